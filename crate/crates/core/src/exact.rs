//! Exact coefficient arithmetic: big rationals, double factorials,
//! half-integer gamma values, and the closed-form radial coefficient
//! `chi(n, l)`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

pub use num_rational::BigRational;

use crate::{Error, Result};

/// `k!` as a big integer.
pub fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for m in 2..=k {
        acc *= m;
    }
    acc
}

/// `k!!` with the conventions `(-1)!! = 1` and `0!! = 1`.
pub fn double_factorial(k: i64) -> Result<BigInt> {
    if k < -1 {
        return Err(Error::Domain(format!(
            "double factorial defined for k >= -1, got {k}"
        )));
    }
    let mut acc = BigInt::one();
    let mut m = k;
    while m > 1 {
        acc *= m;
        m -= 2;
    }
    Ok(acc)
}

fn big_ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// `2^e` as an exact rational, for any sign of `e`.
fn pow2(e: i64) -> BigRational {
    let p = BigInt::from(2).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        big_ratio(BigInt::one(), p)
    }
}

/// An exact scalar `q * i^a * pi^b` with `q` a reduced big rational.
///
/// Canonical form: `i_pow` is 0 or 1 (even powers of `i` are folded into
/// the sign of `q`), and the canonical zero has `i_pow = 0`, `pi_pow = 0`.
/// Addition is only defined between scalars sharing `(i_pow, pi_pow)`;
/// mixed sums are rejected so that equality stays decidable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    q: BigRational,
    i_pow: u8,
    pi_pow: i64,
}

impl ExactScalar {
    /// Builds a scalar in canonical form from any integer power of `i`.
    pub fn new(q: BigRational, i_pow: i64, pi_pow: i64) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        let a = i_pow.rem_euclid(4);
        let (q, a) = if a >= 2 { (-q, a - 2) } else { (q, a) };
        ExactScalar {
            q,
            i_pow: a as u8,
            pi_pow,
        }
    }

    pub fn zero() -> Self {
        ExactScalar {
            q: BigRational::zero(),
            i_pow: 0,
            pi_pow: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(v)), 0, 0)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::new(big_ratio(BigInt::from(num), BigInt::from(den)), 0, 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(BigRational::from_integer(v), 0, 0)
    }

    /// `num/den * i^i_pow * pi^pi_pow` from machine integers.
    pub fn from_parts(num: i64, den: i64, i_pow: i64, pi_pow: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::new(big_ratio(BigInt::from(num), BigInt::from(den)), i_pow, pi_pow)
    }

    pub fn rational(&self) -> &BigRational {
        &self.q
    }

    pub fn i_pow(&self) -> u8 {
        self.i_pow
    }

    pub fn pi_pow(&self) -> i64 {
        self.pi_pow
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn mul(&self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(
            &self.q * &rhs.q,
            i64::from(self.i_pow) + i64::from(rhs.i_pow),
            self.pi_pow + rhs.pi_pow,
        )
    }

    pub fn neg(&self) -> ExactScalar {
        ExactScalar::new(-self.q.clone(), i64::from(self.i_pow), self.pi_pow)
    }

    /// Exact sum; fails when the operands carry different `i`/`pi`
    /// prefactors and neither is zero.
    pub fn try_add(&self, rhs: &ExactScalar) -> Result<ExactScalar> {
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.i_pow != rhs.i_pow || self.pi_pow != rhs.pi_pow {
            return Err(Error::NotRepresentable(format!(
                "cannot add {self} and {rhs}"
            )));
        }
        Ok(ExactScalar::new(
            &self.q + &rhs.q,
            i64::from(self.i_pow),
            self.pi_pow,
        ))
    }

    pub fn try_sub(&self, rhs: &ExactScalar) -> Result<ExactScalar> {
        self.try_add(&rhs.neg())
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inverse(&self) -> Result<ExactScalar> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        // 1/i = -i, so an odd i power flips the sign of the inverse.
        let q = self.q.recip();
        let q = if self.i_pow == 1 { -q } else { q };
        Ok(ExactScalar::new(q, i64::from(self.i_pow), -self.pi_pow))
    }

    /// Multiplies by `i^k`.
    pub fn mul_i_pow(&self, k: i64) -> ExactScalar {
        ExactScalar::new(self.q.clone(), i64::from(self.i_pow) + k, self.pi_pow)
    }

    pub fn mul_rational(&self, q: &BigRational) -> ExactScalar {
        ExactScalar::new(&self.q * q, i64::from(self.i_pow), self.pi_pow)
    }

    /// Numeric value; fails on a nonzero imaginary scalar.
    pub fn to_f64(&self) -> Result<f64> {
        if self.i_pow != 0 {
            return Err(Error::NotRepresentable(format!(
                "{self} is imaginary, no real float value"
            )));
        }
        let q = self.q.to_f64().ok_or_else(|| {
            Error::Internal("rational does not fit in f64".into())
        })?;
        Ok(q * std::f64::consts::PI.powi(self.pi_pow as i32))
    }
}

impl fmt::Display for ExactScalar {
    /// Renders as `q`, `q*i`, `q*pi^b`, or `q*i*pi^b`, with `pi^1`
    /// shortened to `pi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_integer() {
            write!(f, "{}", self.q.numer())?;
        } else {
            write!(f, "{}/{}", self.q.numer(), self.q.denom())?;
        }
        if self.i_pow == 1 {
            write!(f, "*i")?;
        }
        match self.pi_pow {
            0 => {}
            1 => write!(f, "*pi")?,
            b => write!(f, "*pi^{b}")?,
        }
        Ok(())
    }
}

/// `Gamma(m/2)` for positive integer `m`, as `rational * pi^(0 or 1/2)`.
///
/// Returns `(q, half)` meaning `q * sqrt(pi)^half`: for even `m` this is
/// `(m/2 - 1)!`, and for odd `m = 2k+1` it is `(2k)! sqrt(pi) / (4^k k!)`.
fn gamma_half(m: i64) -> (BigRational, bool) {
    assert!(m > 0, "gamma argument must be positive");
    if m % 2 == 0 {
        (
            BigRational::from_integer(factorial((m / 2 - 1) as u64)),
            false,
        )
    } else {
        let k = (m - 1) / 2;
        let num = factorial(2 * k as u64);
        let den = BigInt::from(4).pow(k as u32) * factorial(k as u64);
        (big_ratio(num, den), true)
    }
}

fn chi_domain_ok(n: i64, ell: i64) -> bool {
    ell >= 0 && n > -(ell + 3) && n <= ell
}

/// The exact radial transform coefficient
/// `chi(n, l) = 2^(n+1) sqrt(pi) Gamma((l+3+n)/2) / Gamma((l-n)/2)`,
/// defined for `l >= 0` and `-(l+3) < n <= l`, with `chi(l, l) = 0`.
///
/// Exactly one of the two gamma arguments is a half integer, so the value
/// is always `rational * pi^(0 or 1)` and the result has `i_pow = 0`.
pub fn chi(n: i64, ell: i64) -> Result<ExactScalar> {
    if !chi_domain_ok(n, ell) {
        return Err(Error::Domain(format!(
            "chi({n}, {ell}) outside definable region: need l >= 0 and -(l+3) < n <= l"
        )));
    }
    if n == ell {
        return Ok(ExactScalar::zero());
    }
    let (num_q, num_half) = gamma_half(ell + 3 + n);
    let (den_q, den_half) = gamma_half(ell - n);
    debug_assert!(num_half != den_half);
    // sqrt(pi) * sqrt(pi)^(num_half - den_half) is pi^1 or pi^0.
    let pi_pow = if num_half { 1 } else { 0 };
    let q = pow2(n + 1) * num_q / den_q;
    Ok(ExactScalar::new(q, 0, pi_pow))
}

/// `chi(n, l)` for real parameters via log-gamma, valid on the open
/// region `-(l+3) < n < l`.
pub fn chi_float(n: f64, ell: f64) -> Result<f64> {
    if !(n > -(ell + 3.0) && n < ell) {
        return Err(Error::Domain(format!(
            "chi_float({n}, {ell}) outside definable region: need -(l+3) < n < l"
        )));
    }
    let ln = (n + 1.0) * std::f64::consts::LN_2
        + 0.5 * std::f64::consts::PI.ln()
        + libm::lgamma((ell + 3.0 + n) / 2.0)
        - libm::lgamma((ell - n) / 2.0);
    Ok(ln.exp())
}
