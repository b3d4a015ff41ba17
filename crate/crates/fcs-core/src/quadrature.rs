//! Gauss-Legendre quadrature: fixed-order rules on `[-1, 1]` and a composite
//! integrator with panel doubling and breakpoint-aligned panels.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on the Legendre polynomial starting
/// from the Chebyshev-angle estimate.
pub fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    assert!(m >= 1);
    let mut rule = Vec::with_capacity(m);
    for i in 0..m {
        // Initial guess (Abramowitz & Stegun 25.4.30-style).
        let mut x = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    rule
}

/// Value and derivative of the Legendre polynomial `P_m` at `x`.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Integral of `f` over `[a, b]` with one application of the rule.
pub fn integrate_panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in rule {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Composite integration over `[a, b]` with panels aligned to `breakpoints`.
///
/// Each breakpoint interval starts as a single panel; panel counts are
/// doubled until two successive composite estimates differ by less than
/// `tol`, up to `max_doublings` refinements.
pub fn integrate_adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rule: &[(f64, f64)],
    tol: f64,
    max_doublings: u32,
) -> Result<f64> {
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    for &x in breakpoints {
        if x > a && x < b {
            edges.push(x);
        }
    }
    edges.push(b);
    edges.sort_by(|p, q| p.partial_cmp(q).unwrap());
    edges.dedup();

    let estimate = |panels_per_edge: u64| -> f64 {
        let mut acc = 0.0;
        for seg in edges.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let h = (hi - lo) / panels_per_edge as f64;
            for i in 0..panels_per_edge {
                let pa = lo + i as f64 * h;
                acc += integrate_panel(f, pa, pa + h, rule);
            }
        }
        acc
    };

    let mut panels = 1u64;
    let mut prev = estimate(panels);
    for _ in 0..max_doublings {
        panels *= 2;
        let cur = estimate(panels);
        let diff = (cur - prev).abs();
        if diff < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureDidNotConverge {
        best: prev,
        error_bound: (estimate(panels * 2) - prev).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        // m-point rule is exact through degree 2m-1.
        let rule = gauss_legendre(8);
        for d in 0..=15u32 {
            let got = integrate_panel(&|x: f64| libm::pow(x, d as f64), -1.0, 1.0, &rule);
            let expect = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            assert!((got - expect).abs() < 1e-13, "degree {d}: {got} vs {expect}");
        }
    }

    #[test]
    fn weights_sum_to_two() {
        for m in [4usize, 16, 64, 256] {
            let rule = gauss_legendre(m);
            let s: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((s - 2.0).abs() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn adaptive_handles_kinked_integrand() {
        // |x| over [-1, 1] with the kink as breakpoint: exact immediately.
        let rule = gauss_legendre(16);
        let v = integrate_adaptive(&|x: f64| x.abs(), -1.0, 1.0, &[0.0], &rule, 1e-13, 20)
            .unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_oscillatory() {
        let rule = gauss_legendre(64);
        let v = integrate_adaptive(&|x: f64| libm::cos(10.0 * x), -2.0, 2.0, &[], &rule, 1e-13, 20)
            .unwrap();
        let expect = 2.0 * libm::sin(20.0) / 10.0;
        assert!((v - expect).abs() < 1e-12);
    }
}
