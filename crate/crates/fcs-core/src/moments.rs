//! Exact rational even-moment sequences for the two statistic families.
//!
//! Odd moments vanish by evenness and are not stored; entry `j` of a
//! sequence is the moment of order `2j`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numerics::{binomial_int, pochhammer, ratio, Rational};
use crate::{Error, Result};

/// The two statistic families covered by the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Sum of `n` independent uniforms on `[-1/2, 1/2]`.
    UniformSum,
    /// Sample skewness `sqrt(b1)` of a normal sample of size `n`.
    NormalSkewness,
}

/// Even moments `mu'_{n,0}, mu'_{n,2}, ..., mu'_{n,2J}` of a statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    pub family: Family,
    pub n: u64,
    /// Entry `j` holds the exact moment of order `2j`.
    pub even_moments: Vec<Rational>,
}

impl MomentSequence {
    /// Moment of order `2j`, if available.
    pub fn moment(&self, j: usize) -> Option<&Rational> {
        self.even_moments.get(j)
    }

    /// Number of stored even moments (`J + 1`).
    pub fn len(&self) -> usize {
        self.even_moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.even_moments.is_empty()
    }
}

/// Even moments of the centered uniform sum, by convolution recurrence:
/// `mu'_{n,2j} = sum_k C(2j,2k) mu'_{n-1,2j-2k} / ((2k+1) 4^k)`.
///
/// Base case `mu'_{1,2j} = 1 / ((2j+1) 4^j)`, the moments of a uniform on
/// `[-1/2, 1/2]`.
pub fn uniform_sum_moments(n: u64, j_max: usize) -> Result<MomentSequence> {
    if n < 1 {
        return Err(Error::InvalidArgument("uniform_sum_moments requires n >= 1"));
    }
    // Moments of a single uniform, reused as the convolution kernel.
    let kernel: Vec<Rational> = (0..=j_max)
        .map(|j| {
            Rational::new(
                BigInt::one(),
                BigInt::from(2 * j as u64 + 1) * BigInt::from(4u64).pow(j as u32),
            )
        })
        .collect();

    let mut row = kernel.clone();
    for _ in 2..=n {
        let prev = row;
        row = (0..=j_max)
            .map(|j| {
                let mut acc = Rational::zero();
                for k in 0..=j {
                    acc += Rational::from_integer(binomial_int(2 * j as u64, 2 * k as u64))
                        * &kernel[k]
                        * &prev[j - k];
                }
                acc
            })
            .collect();
    }
    Ok(MomentSequence {
        family: Family::UniformSum,
        n,
        even_moments: row,
    })
}

/// Closed form for the even moments of the four-uniform sum:
/// `8 (4 * 4^j - 1) / ((1+2j)(2+2j)(3+2j)(4+2j))`.
pub fn uniform4_moment_closed(j: usize) -> Rational {
    let tj = BigInt::from(2 * j as u64);
    let numer = BigInt::from(8) * (BigInt::from(4) * BigInt::from(4u64).pow(j as u32) - 1);
    let denom = (BigInt::one() + &tj)
        * (BigInt::from(2) + &tj)
        * (BigInt::from(3) + &tj)
        * (BigInt::from(4) + &tj);
    Rational::new(numer, denom)
}

/// Even moments of sample skewness under normality, by the Mulholland
/// recurrence lifting `mu'_{n,2s}` from sample size `n` to `n + 1`:
///
/// ```text
/// mu'_{n+1,2s} = (n+1)^s / (n^s (n/2)_{3s})
///     * sum_{j=0}^{s} C(2s,2j) mu'_{n,2s-2j} / (n+1)^j
///     * sum_{i=0}^{2j} C(2j,i) 3^(2j-i) (1-n)^i (1/2)_{j+i} ((n-1)/2)_{3s-j-i}
/// ```
///
/// The iteration starts from the degenerate size-2 sample, for which the
/// skewness is identically zero: `mu'_{2,0} = 1`, `mu'_{2,2s} = 0` for
/// `s >= 1`.
pub fn skewness_moments(n: u64, s_max: usize) -> Result<MomentSequence> {
    if n < 3 {
        return Err(Error::InvalidArgument("skewness_moments requires n >= 3"));
    }
    let mut row = degenerate_base(s_max);
    for m in 2..n {
        row = mulholland_step(m, &row, s_max);
    }
    Ok(MomentSequence {
        family: Family::NormalSkewness,
        n,
        even_moments: row,
    })
}

/// All rows `n = 3 ..= n_max` in one upward pass of the recurrence.
pub fn skewness_moment_rows(n_max: u64, s_max: usize) -> Result<Vec<MomentSequence>> {
    if n_max < 3 {
        return Err(Error::InvalidArgument("skewness_moment_rows requires n_max >= 3"));
    }
    let mut rows = Vec::with_capacity((n_max - 2) as usize);
    let mut row = degenerate_base(s_max);
    for m in 2..n_max {
        row = mulholland_step(m, &row, s_max);
        rows.push(MomentSequence {
            family: Family::NormalSkewness,
            n: m + 1,
            even_moments: row.clone(),
        });
    }
    Ok(rows)
}

fn degenerate_base(s_max: usize) -> Vec<Rational> {
    let mut base = alloc::vec![Rational::zero(); s_max + 1];
    base[0] = Rational::one();
    base
}

/// One lift of the Mulholland recurrence from size `n` to `n + 1`.
fn mulholland_step(n: u64, prev: &[Rational], s_max: usize) -> Vec<Rational> {
    let half = ratio(1, 2);
    let half_nm1 = Rational::new(BigInt::from(n) - 1, BigInt::from(2));
    let one_minus_n = BigInt::one() - BigInt::from(n);

    // Pochhammer values are shared across all terms of a row.
    let max_m = 3 * s_max + 1;
    let poch_half: Vec<Rational> = (0..=max_m as u64).map(|m| pochhammer(&half, m)).collect();
    let poch_nm1: Vec<Rational> = (0..=max_m as u64)
        .map(|m| pochhammer(&half_nm1, m))
        .collect();

    (0..=s_max)
        .map(|s| {
            let mut outer = Rational::zero();
            for j in 0..=s {
                if prev[s - j].is_zero() {
                    continue;
                }
                let mut inner = Rational::zero();
                for i in 0..=2 * j {
                    let term = Rational::from_integer(
                        binomial_int(2 * j as u64, i as u64)
                            * BigInt::from(3u64).pow((2 * j - i) as u32)
                            * one_minus_n.pow(i as u32),
                    ) * &poch_half[j + i]
                        * &poch_nm1[3 * s - j - i];
                    inner += term;
                }
                let weight = Rational::new(
                    binomial_int(2 * s as u64, 2 * j as u64),
                    BigInt::from(n + 1).pow(j as u32),
                );
                outer += weight * &prev[s - j] * inner;
            }
            let prefactor = Rational::new(
                BigInt::from(n + 1).pow(s as u32),
                BigInt::from(n).pow(s as u32),
            ) / pochhammer(
                &Rational::new(BigInt::from(n), BigInt::from(2)),
                3 * s as u64,
            );
            prefactor * outer
        })
        .collect()
}

/// Exact variance of sample skewness under normality,
/// `6(n-2) / ((n+1)(n+3))`; used as an independent oracle.
pub fn skewness_variance_exact(n: u64) -> Rational {
    Rational::new(
        BigInt::from(6) * (BigInt::from(n) - 2),
        (BigInt::from(n) + 1) * (BigInt::from(n) + 3),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    #[test]
    fn uniform_base_variance() {
        let m = uniform_sum_moments(1, 3).unwrap();
        assert_eq!(m.even_moments[1], ratio(1, 12));
    }

    #[test]
    fn uniform4_closed_form_values() {
        assert_eq!(uniform4_moment_closed(0), Rational::one());
        assert_eq!(uniform4_moment_closed(1), ratio(1, 3));
        // 8 * 63 / (5*6*7*8) = 3/10; confirmed by the direct moment
        // E[T^4] = n E[X^4] + 3 n(n-1) (E[X^2])^2 = 4/80 + 36/144.
        assert_eq!(uniform4_moment_closed(2), ratio(3, 10));
    }

    #[test]
    fn uniform_recurrence_matches_closed_form() {
        let m = uniform_sum_moments(4, 35).unwrap();
        for j in 0..=35 {
            assert_eq!(m.even_moments[j], uniform4_moment_closed(j), "j = {j}");
        }
    }

    #[test]
    fn uniform_moments_mass() {
        for n in 1..=12 {
            let m = uniform_sum_moments(n, 5).unwrap();
            assert_eq!(m.even_moments[0], Rational::one());
        }
    }

    #[test]
    fn skewness_first_rows() {
        let m3 = skewness_moments(3, 2).unwrap();
        assert_eq!(m3.even_moments[0], Rational::one());
        assert_eq!(m3.even_moments[1], ratio(1, 4));
        let m4 = skewness_moments(4, 1).unwrap();
        assert_eq!(m4.even_moments[1], ratio(12, 35));
        assert!(skewness_moments(2, 1).is_err());
    }

    #[test]
    fn skewness_variance_matches_exact_formula() {
        for n in 3..=22 {
            let m = skewness_moments(n, 1).unwrap();
            assert_eq!(m.even_moments[1], skewness_variance_exact(n), "n = {n}");
        }
    }

    #[test]
    fn skewness_rows_match_single_calls() {
        let rows = skewness_moment_rows(8, 6).unwrap();
        for row in &rows {
            let single = skewness_moments(row.n, 6).unwrap();
            assert_eq!(row, &single);
        }
    }

    #[test]
    fn hankel_window_nonnegative() {
        // mu'_0 mu'_4 - (mu'_2)^2 >= 0 for both families.
        for n in 1..=12 {
            let m = uniform_sum_moments(n, 2).unwrap();
            let det = &m.even_moments[0] * &m.even_moments[2]
                - &m.even_moments[1] * &m.even_moments[1];
            assert!(det >= Rational::zero(), "uniform n = {n}");
        }
        for n in 3..=22 {
            let m = skewness_moments(n, 2).unwrap();
            let det = &m.even_moments[0] * &m.even_moments[2]
                - &m.even_moments[1] * &m.even_moments[1];
            assert!(det >= Rational::zero(), "skewness n = {n}");
        }
    }

    #[test]
    fn moments_bounded_by_support_power() {
        // mu'_{n,2j} <= A_n^{2j}.
        for n in [2u64, 4, 8] {
            let m = uniform_sum_moments(n, 10).unwrap();
            let a2 = ratio(n as i64 * n as i64, 4);
            let mut bound = Rational::one();
            for j in 0..=10 {
                assert!(m.even_moments[j] <= bound, "uniform n={n} j={j}");
                bound *= &a2;
            }
        }
        for n in [4u64, 10, 22] {
            let m = skewness_moments(n, 10).unwrap();
            let a2 = ratio(((n - 2) * (n - 2)) as i64, (n - 1) as i64);
            let mut bound = Rational::one();
            for j in 0..=10 {
                assert!(m.even_moments[j] <= bound, "skewness n={n} j={j}");
                bound *= &a2;
            }
        }
    }
}
