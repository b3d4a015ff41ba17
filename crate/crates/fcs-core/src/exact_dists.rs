//! Closed-form oracles: the exact centered Irwin-Hall pdf/cdf and Fourier
//! coefficients, the Dalen skewness support, and the Geary recurrence used
//! as a self-consistency diagnostic between successive skewness models.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::numerics::{beta_half, binomial_int, factorial, to_f64, Rational};
use crate::quadrature;
use crate::series::{FourierCosineModel, SupportSpec};
use crate::{Error, Result};

/// Density of the centered sum of `n` uniforms on `[-1/2, 1/2]`.
///
/// Piecewise polynomial of degree `n - 1` with knots at the integers minus
/// `n/2`; zero outside `[-n/2, n/2]`.
pub fn irwin_hall_pdf(n: u64, x: f64) -> f64 {
    assert!(n >= 1);
    let half_n = n as f64 / 2.0;
    if x < -half_n || x > half_n {
        return 0.0;
    }
    let shifted = x + half_n;
    let piece = (libm::floor(shifted) as i64).clamp(0, n as i64 - 1) as u64;
    let fact = factorial(n - 1).to_f64().unwrap();
    let mut acc = 0.0;
    for j in 0..=piece {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let c = binomial_int(n, j).to_f64().unwrap();
        acc += sign * c * libm::pow(shifted - j as f64, (n - 1) as f64);
    }
    acc / fact
}

/// Exact distribution function of the centered uniform sum: the piecewise
/// antiderivative of [`irwin_hall_pdf`], zero at `-n/2` and one at `n/2`.
pub fn irwin_hall_cdf(n: u64, x: f64) -> f64 {
    assert!(n >= 1);
    let half_n = n as f64 / 2.0;
    if x <= -half_n {
        return 0.0;
    }
    if x >= half_n {
        return 1.0;
    }
    let shifted = x + half_n;
    let piece = (libm::floor(shifted) as i64).clamp(0, n as i64 - 1) as u64;
    let fact = factorial(n).to_f64().unwrap();
    let mut acc = 0.0;
    for j in 0..=piece {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let c = binomial_int(n, j).to_f64().unwrap();
        acc += sign * c * libm::pow(shifted - j as f64, n as f64);
    }
    (acc / fact).clamp(0.0, 1.0)
}

/// Exact Fourier cosine coefficient of the centered uniform sum, through the
/// characteristic function: `a_{n,k} = (2/n) (sin(k pi / n) / (k pi / n))^n`.
///
/// Returns `2/n` for `k = 0` and exactly zero when `k` is a positive
/// multiple of `n`.
pub fn uniform_sum_coeff_exact(n: u64, k: u64) -> f64 {
    assert!(n >= 1);
    if k == 0 {
        return 2.0 / n as f64;
    }
    if k % n == 0 {
        return 0.0;
    }
    let t = k as f64 * core::f64::consts::PI / n as f64;
    2.0 / n as f64 * libm::pow(libm::sin(t) / t, n as f64)
}

/// Dalen support of sample skewness: `A_n = (n-2)/sqrt(n-1)`, kept exact
/// through `A^2 = (n-2)^2/(n-1)`.
pub fn skewness_support(n: u64) -> Result<SupportSpec> {
    if n < 3 {
        return Err(Error::InvalidArgument("skewness support requires n >= 3"));
    }
    let a2 = Rational::new(
        (BigInt::from(n) - 2) * (BigInt::from(n) - 2),
        BigInt::from(n) - 1,
    );
    Ok(SupportSpec::new(a2, n))
}

/// One evaluation point of the Geary consistency check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearyPoint {
    pub x: f64,
    /// Right side of the recurrence, integrated from the size `n-1` model.
    pub recurrence: f64,
    /// Density of the size `n` model at `x`.
    pub model: f64,
}

/// Result of [`geary_consistency`].
#[derive(Debug, Clone, PartialEq)]
pub struct GearyReport {
    pub n: u64,
    pub max_deviation: f64,
    pub points: Vec<GearyPoint>,
}

/// Right side of the Geary density recurrence at `x`, using the size `n-1`
/// model as the input density.
///
/// The substitution `z = sin(theta)` turns the weight
/// `(1-z^2)^((n-7)/2) dz` into `cos(theta)^(n-6) d(theta)`, absorbing the
/// endpoint singularity for `n >= 6`. The argument density is zero outside
/// its support, which also covers `|sigma| -> inf` as `|z| -> 1`.
pub fn geary_rhs(
    model_prev: &FourierCosineModel,
    n: u64,
    x: f64,
    quad_points: usize,
) -> Result<f64> {
    if n < 6 {
        return Err(Error::InvalidArgument(
            "geary recurrence is restricted to n >= 6 (integrable endpoint weight)",
        ));
    }
    let nf = n as f64;
    let sqrt_nm1 = libm::sqrt(nf - 1.0);
    let inv_sqrt_n = 1.0 / libm::sqrt(nf);
    let prefactor =
        libm::sqrt((nf - 1.0) / nf) / to_f64(&beta_half(n, crate::numerics::DEFAULT_PRECISION_BITS)?);
    let exponent = nf - 6.0;

    let sigma_at = |theta: f64| -> f64 {
        let z = libm::sin(theta);
        let c = libm::cos(theta);
        (sqrt_nm1 * x - 3.0 * z + (nf + 1.0) * z * z * z) * inv_sqrt_n / (c * c * c)
    };
    let integrand = |theta: f64| -> f64 {
        let c = libm::cos(theta);
        if c <= 0.0 {
            return 0.0;
        }
        let weight = if exponent == 0.0 {
            1.0
        } else {
            libm::pow(c, exponent)
        };
        model_prev.pdf_eval(sigma_at(theta)) * weight
    };

    // The truncated input density jumps to zero at its support edge, so the
    // integrand is discontinuous where |sigma| crosses the edge. Locate
    // those crossings and align quadrature panels to them; panel doubling
    // then converges at full order.
    let half_pi = core::f64::consts::FRAC_PI_2;
    let a_prev = model_prev.a();
    let mut breakpoints: Vec<f64> = alloc::vec![0.0];
    const SCAN: usize = 512;
    for target in [a_prev, -a_prev] {
        let g = |t: f64| sigma_at(t) - target;
        let mut prev_t = -half_pi + 1e-12;
        let mut prev_g = g(prev_t);
        for i in 1..=SCAN {
            let t = (-half_pi + core::f64::consts::PI * i as f64 / SCAN as f64)
                .min(half_pi - 1e-12);
            let cur = g(t);
            if prev_g == 0.0 {
                breakpoints.push(prev_t);
            } else if prev_g.is_sign_positive() != cur.is_sign_positive() {
                let (mut lo, mut hi, mut glo) = (prev_t, t, prev_g);
                while hi - lo > 1e-15 {
                    let mid = 0.5 * (lo + hi);
                    let gm = g(mid);
                    if gm == 0.0 || gm.is_sign_positive() == glo.is_sign_positive() {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                breakpoints.push(0.5 * (lo + hi));
            }
            prev_t = t;
            prev_g = cur;
        }
    }
    let rule = quadrature::gauss_legendre(quad_points.max(2));
    let v = quadrature::integrate_adaptive(
        &integrand,
        -half_pi,
        half_pi,
        &breakpoints,
        &rule,
        1e-9,
        10,
    )?;
    Ok(prefactor * v)
}

/// Compare the Geary recurrence output (fed by the size `n-1` model) against
/// the size `n` model on a grid, returning the max absolute deviation.
pub fn geary_consistency(
    model_prev: &FourierCosineModel,
    model_cur: &FourierCosineModel,
    grid: &[f64],
    quad_points: usize,
) -> Result<GearyReport> {
    if model_prev.family != model_cur.family {
        return Err(Error::InvalidArgument("models must share a family"));
    }
    let n = model_cur.support.n;
    if model_prev.support.n + 1 != n {
        return Err(Error::InvalidArgument(
            "geary consistency needs models for consecutive sample sizes",
        ));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut max_dev = 0.0f64;
    for &x in grid {
        let rhs = geary_rhs(model_prev, n, x, quad_points)?;
        let lhs = model_cur.pdf_eval(x);
        max_dev = max_dev.max((rhs - lhs).abs());
        points.push(GearyPoint {
            x,
            recurrence: rhs,
            model: lhs,
        });
    }
    Ok(GearyReport {
        n,
        max_deviation: max_dev,
        points,
    })
}
