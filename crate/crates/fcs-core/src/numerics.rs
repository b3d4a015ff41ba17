//! Exact rational arithmetic, arbitrary-precision floats, and the
//! pi-polynomial evaluation behind the alternating coefficient series.
//!
//! The moment series for a Fourier cosine coefficient has terms that grow to
//! ~1e16 while the result is ~1e-4, so all accumulation is kept exact: a
//! coefficient is carried as a polynomial in `pi^2` with rational
//! coefficients ([`PiPolynomial`]) and only the final evaluation rounds.
//! Floating values use [`astro_float::BigFloat`] at a caller-chosen binary
//! precision (default 320 bits across the crate).

use alloc::vec::Vec;

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Default binary precision for coefficient evaluation.
pub const DEFAULT_PRECISION_BITS: usize = 320;

/// Rounding mode used for every `BigFloat` operation in the crate.
pub const RM: RoundingMode = RoundingMode::ToEven;

/// Exact binomial coefficient `C(n, k)`.
///
/// `k > n` is an error rather than zero; callers are expected to range-check.
pub fn binomial(n: u64, k: u64) -> Result<Rational> {
    if k > n {
        return Err(Error::InvalidArgument("binomial requires k <= n"));
    }
    Ok(Rational::from_integer(binomial_int(n, k)))
}

/// Exact binomial coefficient as an integer.
pub fn binomial_int(n: u64, k: u64) -> BigInt {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Rising factorial `(a)_m = a (a+1) ... (a+m-1)`, with `(a)_0 = 1`.
pub fn pochhammer(a: &Rational, m: u64) -> Rational {
    let mut acc = Rational::one();
    let mut term = a.clone();
    for _ in 0..m {
        acc *= &term;
        term += Rational::one();
    }
    acc
}

/// Exact factorial `m!`.
pub fn factorial(m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=m {
        acc *= BigInt::from(i);
    }
    acc
}

/// Pi at the given binary precision (at least 64 bits).
pub fn pi_at(precision_bits: usize) -> BigFloat {
    let p = precision_bits.max(64);
    let mut cc = consts();
    cc.pi(p, RM)
}

fn consts() -> Consts {
    Consts::new().expect("constants cache allocation")
}

/// Exact conversion of a big integer to a `BigFloat` (no rounding).
pub fn bigint_to_float(i: &BigInt) -> BigFloat {
    let (sign, words) = i.to_u64_digits();
    if words.is_empty() {
        return BigFloat::from_word(0, 64);
    }
    let s = match sign {
        IntSign::Minus => Sign::Neg,
        _ => Sign::Pos,
    };
    // Words are least significant first; with e = 64*len the value equals
    // the plain integer.
    let e = (words.len() * 64) as Exponent;
    BigFloat::from_words(&words, s, e)
}

/// Rational to `BigFloat` with a single rounding at `precision_bits`.
pub fn rational_to_float(r: &Rational, precision_bits: usize) -> BigFloat {
    let n = bigint_to_float(r.numer());
    let d = bigint_to_float(r.denom());
    n.div(&d, precision_bits, RM)
}

const TWO_NEG64: f64 = 1.0 / 18446744073709551616.0;

/// Round a `BigFloat` to the nearest native double (at most 1 ulp error).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let (words, _, s, e, _) = x.as_raw_parts().expect("finite value");
    if words.iter().all(|&w| w == 0) {
        return 0.0;
    }
    let k = words.len();
    let hi = words[k - 1] as f64;
    let lo = if k >= 2 { words[k - 2] as f64 } else { 0.0 };
    // Normalized mantissa fraction in [0.5, 1); two words are enough for a
    // double plus a guard.
    let m = (hi + lo * TWO_NEG64) * TWO_NEG64;
    let v = libm::ldexp(m, e);
    if s == Sign::Neg {
        -v
    } else {
        v
    }
}

/// A Fourier cosine coefficient held exactly: `(sum_j c_j pi^(2j)) / sqrt(S)`.
///
/// `S` is the squared support half-width `A^2`, which is rational for both
/// statistic families, so the whole object defers every irrational operation
/// to a single evaluation step.
#[derive(Debug, Clone, PartialEq)]
pub struct PiPolynomial {
    /// Rational coefficients `c_0 .. c_J` of powers of `pi^2`.
    pub coeffs: Vec<Rational>,
    /// Squared support half-width `A^2`; the evaluated polynomial is divided
    /// by `sqrt(A^2)`.
    pub support_a_squared: Rational,
}

impl PiPolynomial {
    pub fn new(coeffs: Vec<Rational>, support_a_squared: Rational) -> Self {
        debug_assert!(support_a_squared.is_positive());
        PiPolynomial {
            coeffs,
            support_a_squared,
        }
    }
}

/// Evaluate `(sum_j c_j pi^(2j)) / sqrt(A^2)` at the given precision.
///
/// The sum is accumulated in order of increasing `j`; for a fixed precision
/// the result is reproducible bit for bit.
pub fn eval_pi_polynomial(poly: &PiPolynomial, precision_bits: usize) -> BigFloat {
    let p = precision_bits.max(64);
    let mut cc = consts();
    let pi = cc.pi(p, RM);
    let pi2 = pi.mul(&pi, p, RM);

    let mut acc = BigFloat::from_word(0, p);
    let mut pow = BigFloat::from_word(1, p);
    for (j, c) in poly.coeffs.iter().enumerate() {
        if j > 0 {
            pow = pow.mul(&pi2, p, RM);
        }
        if !c.is_zero() {
            let term = rational_to_float(c, p).mul(&pow, p, RM);
            acc = acc.add(&term, p, RM);
        }
    }
    let root = rational_to_float(&poly.support_a_squared, p).sqrt(p, RM);
    acc.div(&root, p, RM)
}

/// `B(1/2, (n-2)/2)` for integer `n >= 4`, computed from its exact
/// half-integer closed form and rounded once.
///
/// For even `n` the value is rational, `(m-1)! / (1/2)_m` with `m = (n-2)/2`;
/// for odd `n` it is `pi (1/2)_m / m!` with `m = (n-3)/2`.
pub fn beta_half(n: u64, precision_bits: usize) -> Result<BigFloat> {
    if n < 4 {
        return Err(Error::InvalidArgument("beta_half requires n >= 4"));
    }
    let p = precision_bits.max(64);
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if n % 2 == 0 {
        let m = (n - 2) / 2;
        let r = Rational::from_integer(factorial(m - 1)) / pochhammer(&half, m);
        Ok(rational_to_float(&r, p))
    } else {
        let m = (n - 3) / 2;
        let r = pochhammer(&half, m) / Rational::from_integer(factorial(m));
        Ok(rational_to_float(&r, p).mul(&pi_at(p), p, RM))
    }
}

/// Convenience constructor for small rationals.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
