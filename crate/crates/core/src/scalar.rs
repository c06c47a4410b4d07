//! Exact rational scalars and finite q-shifted factorials.
//!
//! Everything above this module is written against the [`Field`] trait so
//! the same evaluators run in exact mode ([`Scalar`]) and in the lossy
//! `f64` sanity mode.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Scalar = BigRational;

/// Coefficient field used by every evaluator.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `"exact"` or `"float"`, as reported in verification output.
    const MODE: &'static str;

    fn from_scalar(value: &Scalar) -> Self;

    /// Equality used to compare the two sides of an identity. Exact for
    /// rationals, relative tolerance for floats.
    fn matches(&self, other: &Self) -> bool;

    /// True when the value must be treated as zero in a denominator.
    fn vanishes(&self) -> bool;

    /// JSON rendering for reports: `"num/den"` strings or plain numbers.
    fn to_json(&self) -> serde_json::Value;

    /// Integer power; negative exponents require a nonzero base.
    fn powi(&self, exp: i64) -> Self {
        let mut base = if exp < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Field for Scalar {
    const MODE: &'static str = "exact";

    fn from_scalar(value: &Scalar) -> Self {
        value.clone()
    }

    fn matches(&self, other: &Self) -> bool {
        self == other
    }

    fn vanishes(&self) -> bool {
        self.is_zero()
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_scalar(self))
    }
}

/// Relative tolerance for float-mode comparisons.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl Field for f64 {
    const MODE: &'static str = "float";

    fn from_scalar(value: &Scalar) -> Self {
        scalar_to_f64(value)
    }

    fn matches(&self, other: &Self) -> bool {
        let scale = 1.0_f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= FLOAT_TOLERANCE * scale
    }

    fn vanishes(&self) -> bool {
        self.abs() < 1e-13
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self)
    }
}

pub fn scalar_to_f64(value: &Scalar) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 gives up when both parts overflow f64.
        let shift = value.numer().bits().max(value.denom().bits()) as i64 - 960;
        if shift <= 0 {
            return f64::NAN;
        }
        let n = (value.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let d = (value.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/r"` or `"p"`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Canonical `"num/den"` rendering, denominator always printed.
pub fn format_scalar(value: &Scalar) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// The base q, restricted to the open interval (0, 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QBase(Scalar);

impl QBase {
    pub fn new(q: Scalar) -> Result<Self> {
        if !q.is_positive() || q >= Scalar::one() {
            return Err(Error::InvalidBase(format_scalar(&q)));
        }
        Ok(QBase(q))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_scalar(text)?)
    }

    pub fn value(&self) -> &Scalar {
        &self.0
    }

    pub fn to_field<F: Field>(&self) -> F {
        F::from_scalar(&self.0)
    }
}

impl fmt::Display for QBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_scalar(&self.0))
    }
}

/// q^e for any integer e.
pub fn qpow<F: Field>(q: &F, exp: i64) -> F {
    q.powi(exp)
}

/// (a; q)_k = (1 - a)(1 - aq)...(1 - aq^{k-1}).
pub fn qpoch<F: Field>(a: &F, q: &F, k: usize) -> F {
    let mut acc = F::one();
    let mut term = a.clone();
    for _ in 0..k {
        acc = acc * (F::one() - term.clone());
        term = term * q.clone();
    }
    acc
}

/// (a_1, ..., a_n; q)_k.
pub fn qpoch_list<F: Field>(params: &[F], q: &F, k: usize) -> F {
    params
        .iter()
        .fold(F::one(), |acc, a| acc * qpoch(a, q, k))
}

/// Division that reports a pole instead of producing garbage.
pub fn checked_div<F: Field>(num: F, den: F, factor: impl FnOnce() -> String) -> Result<F> {
    if den.vanishes() {
        return Err(Error::Pole { factor: factor() });
    }
    Ok(num / den)
}

/// (n_1, ..., n_r; q)_k / (d_1, ..., d_s; q)_k with pole detection on each
/// denominator symbol.
pub fn poch_ratio<F: Field>(nums: &[F], dens: &[F], q: &F, k: usize) -> Result<F> {
    let mut value = qpoch_list(nums, q, k);
    for d in dens {
        let p = qpoch(d, q, k);
        value = checked_div(value, p, || format!("({d:?}; q)_{k}"))?;
    }
    Ok(value)
}

/// Sign into `(-1)^k` as a field element.
pub fn sign<F: Field>(k: usize) -> F {
    if k.is_multiple_of(2) {
        F::one()
    } else {
        -F::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn half() -> Scalar {
        ratio(1, 2)
    }

    #[test]
    fn empty_product_is_one() {
        assert_eq!(qpoch(&ratio(3, 7), &half(), 0), int(1));
        assert_eq!(qpoch_list::<Scalar>(&[], &half(), 5), int(1));
    }

    #[test]
    fn single_factor() {
        assert_eq!(qpoch(&half(), &half(), 1), half());
    }

    #[test]
    fn vanishing_factor() {
        for q in [ratio(1, 2), ratio(2, 3), ratio(1, 9)] {
            let a = qpow(&q, -2);
            assert!(qpoch(&a, &q, 3).is_zero());
            assert!(!qpoch(&a, &q, 2).is_zero());
        }
    }

    #[test]
    fn list_product() {
        // (2/3)(5/6)(4/5)(9/10) = 2/5
        let v = qpoch_list(&[ratio(1, 3), ratio(1, 5)], &half(), 2);
        assert_eq!(v, ratio(2, 5));
        let a = ratio(-4, 9);
        assert_eq!(qpoch_list(std::slice::from_ref(&a), &half(), 4), qpoch(&a, &half(), 4));
    }

    #[test]
    fn base_must_lie_in_unit_interval() {
        assert!(QBase::parse("1/2").is_ok());
        assert!(QBase::parse("0").is_err());
        assert!(QBase::parse("1").is_err());
        assert!(QBase::parse("-1/2").is_err());
        assert!(QBase::parse("3/2").is_err());
        assert!(QBase::parse("x").is_err());
        assert!(QBase::parse("1/0").is_err());
    }

    #[test]
    fn format_round_trip() {
        let v = parse_scalar("-6/8").unwrap();
        assert_eq!(format_scalar(&v), "-3/4");
        assert_eq!(format_scalar(&int(1)), "1/1");
        assert_eq!(parse_scalar(" 5 ").unwrap(), int(5));
    }

    #[test]
    fn pole_is_reported() {
        let q = half();
        let err = poch_ratio(&[int(3)], &[qpow(&q, -1)], &q, 2).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn float_mode_agrees() {
        let a = ratio(3, 11);
        let q = ratio(2, 5);
        let exact = scalar_to_f64(&qpoch(&a, &q, 6));
        let float = qpoch(&scalar_to_f64(&a), &scalar_to_f64(&q), 6);
        assert!(exact.matches(&float));
    }

    fn small_rational() -> impl Strategy<Value = Scalar> {
        (-20i64..=20, 1i64..=20).prop_map(|(n, d)| ratio(n, d))
    }

    fn base() -> impl Strategy<Value = Scalar> {
        (1i64..=19).prop_map(|n| ratio(n, 20))
    }

    proptest! {
        #[test]
        fn cocycle(a in small_rational(), q in base(), k in 0usize..=10, l in 0usize..=10) {
            let lhs = qpoch(&a, &q, k + l);
            let rhs = qpoch(&a, &q, k) * qpoch(&(a.clone() * qpow(&q, k as i64)), &q, l);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn terminating_symbol_vanishes_past_n(q in base(), n in 0usize..=6, k in 0usize..=9) {
            let v = qpoch(&qpow(&q, -(n as i64)), &q, k);
            prop_assert_eq!(v.is_zero(), k > n);
        }

        #[test]
        fn exact_ring_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!((a.clone() + b.clone()) - b.clone(), a.clone());
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            prop_assert_eq!(a.clone() + b.clone(), b.clone() + a.clone());
            prop_assert!(a.denom().is_positive());
        }
    }
}
