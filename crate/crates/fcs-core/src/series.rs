//! Truncated Fourier cosine models: construction from moments or from a pdf
//! integral, and evaluation of pdf, cdf, percentiles, and tail probabilities.

use alloc::vec::Vec;

use num_traits::ToPrimitive;

use crate::moments::{self, Family, MomentSequence};
use crate::numerics::{
    self, bigint_to_float, eval_pi_polynomial, factorial, ratio, to_f64, PiPolynomial, Rational,
    RM,
};
use crate::quadrature;
use crate::{Error, Result};

/// Support half-width of a statistic, kept exact through its square.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSpec {
    /// Exact `A_n^2` (rational for both families).
    pub a_squared: Rational,
    /// Sample size the support belongs to.
    pub n: u64,
}

impl SupportSpec {
    pub fn new(a_squared: Rational, n: u64) -> Self {
        SupportSpec { a_squared, n }
    }

    /// Support of the centered sum of `n` uniforms: `A = n/2`.
    pub fn uniform_sum(n: u64) -> Self {
        SupportSpec::new(ratio((n * n) as i64, 4), n)
    }

    /// Half-width as a double.
    pub fn a(&self) -> f64 {
        libm::sqrt(self.a_squared.to_f64().expect("finite support"))
    }

    /// Half-width as a `BigFloat` at the given precision.
    pub fn a_bigfloat(&self, precision_bits: usize) -> astro_float::BigFloat {
        numerics::rational_to_float(&self.a_squared, precision_bits).sqrt(precision_bits, RM)
    }
}

/// Truncation orders: `K` cosine harmonics, moment series cut at `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationSpec {
    pub k: usize,
    pub j: usize,
}

impl TruncationSpec {
    pub fn new(k: usize, j: usize) -> Self {
        TruncationSpec { k, j }
    }
}

/// The `(K, J)` pairs used for the published uniform-sum configurations.
pub const UNIFORM_SUM_TRUNCATIONS: [(u64, usize, usize); 6] = [
    (2, 8, 35),
    (4, 8, 35),
    (6, 8, 30),
    (8, 8, 30),
    (10, 7, 25),
    (12, 6, 20),
];

/// Default truncation per family; uniform sums follow the published pairs,
/// sample skewness uses `(K, J) = (12, 50)` for every `n`.
pub fn default_truncation(family: Family, n: u64) -> TruncationSpec {
    match family {
        Family::UniformSum => UNIFORM_SUM_TRUNCATIONS
            .iter()
            .find(|&&(m, _, _)| m == n)
            .map(|&(_, k, j)| TruncationSpec::new(k, j))
            .unwrap_or(TruncationSpec::new(8, 35)),
        Family::NormalSkewness => TruncationSpec::new(12, 50),
    }
}

/// How a model's coefficients were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Truncated moment series at order `J`.
    FromMoments(usize),
    /// Numerical projection integral.
    FromIntegral,
    /// Analytic closed form.
    ClosedForm,
}

/// A truncated cosine model: support plus evaluated coefficients
/// `a_0 .. a_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCosineModel {
    pub support: SupportSpec,
    pub family: Family,
    /// `a_0, a_1, ..., a_K` as doubles.
    pub coeffs: Vec<f64>,
    pub provenance: Provenance,
    /// Intervals `(start, end, value)` on `[0, A]` where the cdf holds the
    /// running maximum of the raw antiderivative. The truncated series
    /// oscillates near the support edge; holding each local maximum until
    /// the series recovers keeps the cdf monotone.
    holds: Vec<(f64, f64, f64)>,
}

/// Coefficient `a_{n,k}` as an exact polynomial in `pi^2`:
/// `c_j = (-1)^j k^(2j) mu'_{n,2j} / ((2j)! (A^2)^j)`, scaled by `1/A`.
pub fn coeff_from_moments(
    support: &SupportSpec,
    moments: &MomentSequence,
    k: u64,
    j_max: usize,
) -> Result<PiPolynomial> {
    if k < 1 {
        return Err(Error::InvalidArgument("coeff_from_moments requires k >= 1"));
    }
    if moments.len() < j_max + 1 {
        return Err(Error::InsufficientMoments {
            required: j_max + 1,
            available: moments.len(),
        });
    }
    let k2 = Rational::from_integer((k * k).into());
    let mut coeffs = Vec::with_capacity(j_max + 1);
    // Running factor (-1)^j k^(2j) / (A^2)^j, extended one power at a time.
    let mut factor = Rational::from_integer(1.into());
    for j in 0..=j_max {
        if j > 0 {
            factor *= -(&k2) / &support.a_squared;
        }
        let c = &factor * moments.moment(j).unwrap()
            / Rational::from_integer(factorial(2 * j as u64));
        coeffs.push(c);
    }
    Ok(PiPolynomial::new(coeffs, support.a_squared.clone()))
}

/// Quadrature configuration for [`coeff_from_pdf`].
#[derive(Debug, Clone)]
pub struct QuadSpec {
    /// Gauss-Legendre points per panel.
    pub points: usize,
    /// Absolute tolerance between successive composite estimates.
    pub tol: f64,
    /// Maximum number of panel doublings.
    pub max_doublings: u32,
    /// Integrand knots; panels are aligned to these.
    pub breakpoints: Vec<f64>,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec {
            points: 64,
            tol: 1e-13,
            max_doublings: 20,
            breakpoints: Vec::new(),
        }
    }
}

/// Projection integral `(1/A) int_{-A}^{A} pdf(x) cos(k pi x / A) dx`.
pub fn coeff_from_pdf(
    pdf: &dyn Fn(f64) -> f64,
    support: &SupportSpec,
    k: u64,
    quad: &QuadSpec,
) -> Result<f64> {
    let a = support.a();
    let w = k as f64 * core::f64::consts::PI / a;
    let f = |x: f64| pdf(x) * libm::cos(w * x);
    let rule = quadrature::gauss_legendre(quad.points);
    let v = quadrature::integrate_adaptive(
        &f,
        -a,
        a,
        &quad.breakpoints,
        &rule,
        quad.tol,
        quad.max_doublings,
    )?;
    Ok(v / a)
}

/// Build a truncated cosine model for `(family, n)` from exact moments.
///
/// `a_0 = 1/A` by construction; `a_1 .. a_K` come from the truncated moment
/// series evaluated at `precision_bits` and rounded once to doubles.
pub fn build_model(
    family: Family,
    n: u64,
    trunc: TruncationSpec,
    precision_bits: usize,
) -> Result<FourierCosineModel> {
    let (support, moments) = match family {
        Family::UniformSum => (
            SupportSpec::uniform_sum(n),
            moments::uniform_sum_moments(n, trunc.j)?,
        ),
        Family::NormalSkewness => (
            crate::exact_dists::skewness_support(n)?,
            moments::skewness_moments(n, trunc.j)?,
        ),
    };
    build_model_from_moments(family, support, &moments, trunc, precision_bits)
}

/// As [`build_model`], but with a caller-provided moment sequence (used by
/// the table engine to share one upward recurrence pass across columns).
pub fn build_model_from_moments(
    family: Family,
    support: SupportSpec,
    moments: &MomentSequence,
    trunc: TruncationSpec,
    precision_bits: usize,
) -> Result<FourierCosineModel> {
    let p = precision_bits.max(64);
    let mut coeffs = Vec::with_capacity(trunc.k + 1);
    // a_0 = 1/A, evaluated through the same path as the other coefficients.
    let unit = PiPolynomial::new(
        alloc::vec![Rational::from_integer(1.into())],
        support.a_squared.clone(),
    );
    coeffs.push(to_f64(&eval_pi_polynomial(&unit, p)));
    for k in 1..=trunc.k as u64 {
        let poly = coeff_from_moments(&support, moments, k, trunc.j)?;
        coeffs.push(to_f64(&eval_pi_polynomial(&poly, p)));
    }
    Ok(FourierCosineModel::from_coeffs(
        family,
        support,
        coeffs,
        Provenance::FromMoments(trunc.j),
    ))
}

/// Raw series antiderivative at `x >= 0` (shared by `cdf_raw` and the
/// saturation-point search).
fn raw_antiderivative(a: f64, coeffs: &[f64], x: f64) -> f64 {
    let w = core::f64::consts::PI / a;
    let mut acc = 0.5 * (x / a + 1.0);
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        acc += c * a / (k as f64 * core::f64::consts::PI) * libm::sin(k as f64 * w * x);
    }
    acc
}

/// Raw series density (shared by `pdf_eval` and the hold-interval search).
fn raw_density(a: f64, coeffs: &[f64], x: f64) -> f64 {
    let w = core::f64::consts::PI / a;
    let mut acc = coeffs[0] / 2.0;
    for (k, &c) in coeffs.iter().enumerate().skip(1) {
        acc += c * libm::cos(k as f64 * w * x);
    }
    acc
}

/// Monotonicity repairs for the raw antiderivative on `[0, A]`: from each
/// local maximum the value is held until the series recovers; once a held
/// maximum reaches 1 the function saturates through the endpoint.
fn hold_intervals(a: f64, coeffs: &[f64]) -> Vec<(f64, f64, f64)> {
    const STEPS: usize = 8192;
    let grid = |i: usize| a * i as f64 / STEPS as f64;
    let mut holds = Vec::new();
    let mut x_prev = 0.0;
    let mut d_prev = raw_density(a, coeffs, 0.0);
    let mut i = 1;
    while i <= STEPS {
        let x = grid(i);
        let d = raw_density(a, coeffs, x);
        if !(d_prev > 0.0 && d <= 0.0) {
            x_prev = x;
            d_prev = d;
            i += 1;
            continue;
        }
        // Local maximum of the antiderivative in [x_prev, x].
        let (mut lo, mut hi) = (x_prev, x);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if raw_density(a, coeffs, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let peak = 0.5 * (lo + hi);
        let value = raw_antiderivative(a, coeffs, peak);
        if value >= 1.0 {
            holds.push((peak, a, value));
            return holds;
        }
        // Hold until the series recovers to the peak value; intervening
        // oscillations below it are absorbed into the same hold.
        let mut j = i;
        while j < STEPS && raw_antiderivative(a, coeffs, grid(j + 1)) < value {
            j += 1;
        }
        let end = if j == STEPS {
            a
        } else {
            let (mut lo, mut hi) = (grid(j), grid(j + 1));
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if raw_antiderivative(a, coeffs, mid) < value {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        holds.push((peak, end, value));
        i = j + 2;
        x_prev = grid(j + 1).min(a);
        d_prev = raw_density(a, coeffs, x_prev);
    }
    holds
}

impl FourierCosineModel {
    /// Wrap explicitly computed coefficients (integral or closed form).
    pub fn from_coeffs(
        family: Family,
        support: SupportSpec,
        coeffs: Vec<f64>,
        provenance: Provenance,
    ) -> Self {
        let holds = hold_intervals(support.a(), &coeffs);
        FourierCosineModel {
            support,
            family,
            coeffs,
            provenance,
            holds,
        }
    }

    /// Number of cosine harmonics `K`.
    pub fn harmonics(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Support half-width as a double.
    pub fn a(&self) -> f64 {
        self.support.a()
    }

    /// Truncated series density. Raw series value inside the support (may
    /// dip below zero near the endpoints), exactly zero outside.
    pub fn pdf_eval(&self, x: f64) -> f64 {
        let a = self.a();
        let u = libm::fabs(x);
        if u > a {
            return 0.0;
        }
        raw_density(a, &self.coeffs, u)
    }

    /// Truncated series distribution function: the raw sine series clamped
    /// to `[0, 1]`, with each local maximum held until the series recovers
    /// so the result is monotone (the raw series oscillates near `±A`);
    /// exactly 0 at and below `-A`, 1 at and above `A`.
    pub fn cdf_eval(&self, x: f64) -> f64 {
        let a = self.a();
        if x <= -a {
            return 0.0;
        }
        if x >= a {
            return 1.0;
        }
        // Reflection keeps cdf(x) + cdf(-x) = 1 exact.
        if x < 0.0 {
            return 1.0 - self.cdf_pos(-x);
        }
        self.cdf_pos(x)
    }

    fn cdf_pos(&self, x: f64) -> f64 {
        for &(start, end, value) in &self.holds {
            if x < start {
                break;
            }
            if x <= end {
                return value.clamp(0.0, 1.0);
            }
        }
        self.cdf_raw(x).clamp(0.0, 1.0)
    }

    fn cdf_raw(&self, x: f64) -> f64 {
        raw_antiderivative(self.a(), &self.coeffs, x)
    }

    /// Upper tail probability `1 - F(x)`.
    pub fn tail_prob(&self, x: f64) -> f64 {
        (1.0 - self.cdf_eval(x)).clamp(0.0, 1.0)
    }

    /// Percentile `x_alpha`: safeguarded Newton from `x = 0` with bisection
    /// fallback on `[-A, A]`.
    pub fn percentile(&self, alpha: f64, tol: f64) -> f64 {
        assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0, 1)");
        let a = self.a();
        let mut lo = -a;
        let mut hi = a;
        let mut x = 0.0;
        // cdf(0) = 1/2, so one side of the bracket tightens immediately.
        for _ in 0..200 {
            let fx = self.cdf_eval(x) - alpha;
            if fx.abs() <= tol {
                return x;
            }
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.pdf_eval(x);
            let newton = x - fx / d;
            x = if d.abs() < 1e-12 || newton <= lo || newton >= hi {
                0.5 * (lo + hi)
            } else {
                newton
            };
            if hi - lo < 1e-16 {
                return x;
            }
        }
        x
    }
}

/// Exact `1/A` for a support, as a `BigFloat`.
pub fn a0_bigfloat(support: &SupportSpec, precision_bits: usize) -> astro_float::BigFloat {
    let p = precision_bits.max(64);
    let one = bigint_to_float(&1.into());
    one.div(&support.a_bigfloat(p), p, RM)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dists;
    use crate::numerics::DEFAULT_PRECISION_BITS;

    fn uniform_model(n: u64) -> FourierCosineModel {
        let t = default_truncation(Family::UniformSum, n);
        build_model(Family::UniformSum, n, t, DEFAULT_PRECISION_BITS).unwrap()
    }

    fn skewness_model(n: u64) -> FourierCosineModel {
        let t = default_truncation(Family::NormalSkewness, n);
        build_model(Family::NormalSkewness, n, t, DEFAULT_PRECISION_BITS).unwrap()
    }

    #[test]
    fn uniform4_coefficients_match_published_values() {
        let m = uniform_model(4);
        assert!((m.coeffs[0] - 0.5).abs() < 1e-14);
        assert!((m.coeffs[1] - 0.328511).abs() < 5e-7);
        assert!((m.coeffs[2] - 0.0821279).abs() < 5e-8);
        assert!(m.coeffs[4].abs() < 2e-14);
        // Exact truncated-series value, frozen from an independent
        // 80-digit evaluation of the same sum.
        assert!((m.coeffs[8] - -5.038912786813051e-10).abs() < 1e-15);
    }

    #[test]
    fn triangular_first_coefficient_closed_form() {
        // n = 2 triangular density: a_1 = 4/pi^2.
        let m = uniform_model(2);
        let expect = 4.0 / (core::f64::consts::PI * core::f64::consts::PI);
        assert!((m.coeffs[1] - expect).abs() < 1e-6);
    }

    #[test]
    fn skewness_coefficients_match_published_values() {
        let m6 = skewness_model(6);
        assert!((m6.coeffs[0] / 2.0 - 0.279508).abs() < 5e-7);
        assert!((m6.coeffs[4] - -5.99392e-3).abs() < 5e-8);
        let m20 = skewness_model(20);
        assert!((m20.coeffs[1] - 0.227078).abs() < 5e-7);
    }

    #[test]
    fn a0_times_a_is_one() {
        for m in [uniform_model(4), skewness_model(6), skewness_model(20)] {
            assert!((m.coeffs[0] * m.a() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pdf_center_and_evenness() {
        let m = uniform_model(4);
        // Exact f4(0) = 2/3 from the piecewise cubic.
        assert!((m.pdf_eval(0.0) - 2.0 / 3.0).abs() < 2e-3);
        for &x in &[0.1, 0.77, 1.5, 1.999] {
            assert_eq!(m.pdf_eval(x), m.pdf_eval(-x));
        }
        assert_eq!(m.pdf_eval(2.5), 0.0);
        assert_eq!(m.pdf_eval(-2.5), 0.0);
    }

    #[test]
    fn cdf_boundary_and_symmetry() {
        let m = uniform_model(4);
        assert_eq!(m.cdf_eval(0.0), 0.5);
        assert_eq!(m.cdf_eval(m.a()), 1.0);
        assert_eq!(m.cdf_eval(-m.a()), 0.0);
        for &x in &[0.2, 0.9, 1.7] {
            assert!((m.cdf_eval(x) + m.cdf_eval(-x) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn cdf_tail_values_match_table() {
        let m8 = skewness_model(8);
        assert!((m8.tail_prob(1.0) - 0.0496).abs() < 1e-4);
        let m12 = skewness_model(12);
        assert!((m12.tail_prob(0.6) - 0.1316).abs() < 1e-4);
        let m4 = skewness_model(4);
        assert!((m4.tail_prob(1.1) - 0.0162).abs() < 2e-4);
        assert_eq!(m8.tail_prob(0.0), 0.5);
    }

    #[test]
    fn percentile_examples() {
        let m4 = uniform_model(4);
        assert!(m4.percentile(0.5, 1e-12).abs() < 1e-9);
        assert!((m4.percentile(0.99, 1e-12) - 1.3002).abs() < 1e-4);
        let m2 = uniform_model(2);
        // Triangular oracle: 1 - sqrt(0.2).
        let exact = 1.0 - libm::sqrt(0.2);
        assert!((m2.percentile(0.9, 1e-12) - exact).abs() < 1e-4);
    }

    #[test]
    fn percentile_round_trip() {
        let m = skewness_model(10);
        for &x in &[-1.2, -0.4, 0.0, 0.3, 1.1] {
            let alpha = m.cdf_eval(x);
            let back = m.percentile(alpha, 1e-14);
            assert!((back - x).abs() < 1e-9, "x = {x}, back = {back}");
        }
    }

    #[test]
    fn coeff_from_pdf_examples() {
        let support = SupportSpec::uniform_sum(4);
        let quad = QuadSpec {
            breakpoints: alloc::vec![-2.0, -1.0, 0.0, 1.0, 2.0],
            ..QuadSpec::default()
        };
        let pdf = |x: f64| exact_dists::irwin_hall_pdf(4, x);
        // k = 0 integrates the density: 1/A.
        let c0 = coeff_from_pdf(&pdf, &support, 0, &quad).unwrap();
        assert!((c0 - 0.5).abs() < 1e-12);
        // k = 1: 32/pi^4.
        let c1 = coeff_from_pdf(&pdf, &support, 1, &quad).unwrap();
        let pi = core::f64::consts::PI;
        assert!((c1 - 32.0 / libm::pow(pi, 4.0)).abs() < 1e-12);
        // Triangular n = 2, k = 1: 4/pi^2.
        let s2 = SupportSpec::uniform_sum(2);
        let q2 = QuadSpec {
            breakpoints: alloc::vec![-1.0, 0.0, 1.0],
            ..QuadSpec::default()
        };
        let c = coeff_from_pdf(&|x| exact_dists::irwin_hall_pdf(2, x), &s2, 1, &q2).unwrap();
        assert!((c - 4.0 / (pi * pi)).abs() < 1e-12);
    }

    #[test]
    fn insufficient_moments_is_reported() {
        let support = SupportSpec::uniform_sum(4);
        let m = moments::uniform_sum_moments(4, 5).unwrap();
        match coeff_from_moments(&support, &m, 1, 10) {
            Err(Error::InsufficientMoments {
                required,
                available,
            }) => {
                assert_eq!(required, 11);
                assert_eq!(available, 6);
            }
            other => panic!("expected InsufficientMoments, got {other:?}"),
        }
    }

    #[test]
    fn precision_stability_of_coefficients() {
        // Same coefficient at 320 and 640 bits agrees far beyond doubles.
        let support = SupportSpec::uniform_sum(4);
        let m = moments::uniform_sum_moments(4, 35).unwrap();
        let poly = coeff_from_moments(&support, &m, 8, 35).unwrap();
        let lo = eval_pi_polynomial(&poly, 320);
        let hi = eval_pi_polynomial(&poly, 640);
        let diff = lo.sub(&hi, 640, RM);
        if !diff.is_zero() {
            assert!(diff.exponent().unwrap() < -250);
        }
    }
}
