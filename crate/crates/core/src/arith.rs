//! Exact integer and rational helpers shared by every module.

use num::{BigInt, BigRational, BigUint, One, Zero};

use crate::error::{Error, Result};

/// Exact probability weight.
pub type Prob = BigRational;

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn ratio(num: i64, den: i64) -> Prob {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: usize) -> Prob {
    BigRational::from_integer(BigInt::from(n))
}

pub fn from_big(n: &BigUint) -> Prob {
    BigRational::from_integer(BigInt::from(n.clone()))
}

pub fn pow(base: &Prob, exp: usize) -> Prob {
    num::pow(base.clone(), exp)
}

/// Rising factorial `t (t+1) ... (t+k-1)`; the empty product is 1.
pub fn rising(t: &Prob, k: usize) -> Prob {
    (0..k).fold(Prob::one(), |acc, i| acc * (t + int(i)))
}

/// Parses `p` or `p/q` with nonnegative decimal integers.
pub fn parse_rational(text: &str) -> Result<Prob> {
    let text = text.trim();
    let bad = |msg: &str| Error::parse(0, format!("{msg} in rational {text:?}"));
    let digits = |s: &str| -> Result<BigInt> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected digits"));
        }
        s.parse::<BigInt>().map_err(|_| bad("invalid integer"))
    };
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(digits(text)?)),
        Some((n, d)) => {
            let den = digits(d.trim())?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(digits(n.trim())?, den))
        }
    }
}

/// Parses a comma separated list of rationals, e.g. `1,1/2,3/2`.
pub fn parse_rational_list(text: &str) -> Result<Vec<Prob>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_rational)
        .collect()
}
