//! Truncated formal power series in a single variable `u`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{checked_div, qpoch, qpow, sign, Field};

/// Default truncation order used by the formal identities.
pub const DEFAULT_ORDER: usize = 6;

/// `c_0 + c_1 u + ... + c_order u^order (mod u^{order+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<F> {
    coeffs: Vec<F>,
}

impl<F: Field> TruncatedSeries<F> {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![F::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(F::one(), order)
    }

    pub fn constant(c: F, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The series `u` itself.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = F::one();
        }
        s
    }

    /// Builds a series from leading coefficients; missing ones are zero and
    /// extra ones are dropped.
    pub fn from_coeffs(mut coeffs: Vec<F>, order: usize) -> Self {
        coeffs.resize(order + 1, F::zero());
        TruncatedSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn coeff(&self, j: usize) -> F {
        self.coeffs.get(j).cloned().unwrap_or_else(F::zero)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(TruncatedSeries { coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other.clone())
    }

    /// Cauchy product truncated at the common order.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.coeffs.len();
        let mut coeffs = vec![F::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.vanishes() {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Ok(TruncatedSeries { coeffs })
    }

    pub fn scale(&self, c: &F) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// `S(z u)`: multiplies the j-th coefficient by `z^j`.
    pub fn dilate(&self, z: &F) -> Self {
        let mut power = F::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let c = a.clone() * power.clone();
                power = power.clone() * z.clone();
                c
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Multiplicative inverse by Newton iteration, `g <- g (2 - s g)`,
    /// doubling the number of correct coefficients per step.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.coeffs[0].clone();
        let g0 = checked_div(F::one(), c0, || "constant term".to_string())
            .map_err(|_| Error::ZeroConstantTerm)?;
        let order = self.order();
        let mut g = TruncatedSeries::constant(g0, 0);
        let mut precision = 1;
        while precision <= order {
            precision = (2 * precision).min(order + 1);
            let target = precision - 1;
            let s = TruncatedSeries::from_coeffs(self.coeffs.clone(), target);
            let g_ext = TruncatedSeries::from_coeffs(g.coeffs, target);
            let sg = s.try_mul(&g_ext)?;
            let two_minus = TruncatedSeries::constant(F::one() + F::one(), target).try_sub(&sg)?;
            g = g_ext.try_mul(&two_minus)?;
        }
        Ok(TruncatedSeries::from_coeffs(g.coeffs, order))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.reciprocal()?)
    }

    /// Horner evaluation of the truncated polynomial at a numeric `u`.
    pub fn evaluate_at(&self, u: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc * u.clone() + c.clone())
    }

    pub fn matches(&self, other: &Self) -> bool {
        self.order() == other.order()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.matches(b))
    }
}

impl<F: Field> Neg for TruncatedSeries<F> {
    type Output = Self;

    fn neg(self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

// Operator forms panic on order mismatch; that is always a caller bug.
impl<F: Field> Add for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;

    fn add(self, rhs: Self) -> TruncatedSeries<F> {
        self.try_add(rhs).expect("series order mismatch")
    }
}

impl<F: Field> Sub for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;

    fn sub(self, rhs: Self) -> TruncatedSeries<F> {
        self.try_sub(rhs).expect("series order mismatch")
    }
}

impl<F: Field> Mul for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;

    fn mul(self, rhs: Self) -> TruncatedSeries<F> {
        self.try_mul(rhs).expect("series order mismatch")
    }
}

/// `(z u; q)_inf` (or its reciprocal when `inverse`) through `u^order`, from
/// Euler's expansions:
///
/// ```text
/// (zu; q)_inf     = sum_j (-1)^j q^{j(j-1)/2} z^j / (q; q)_j  u^j
/// 1 / (zu; q)_inf = sum_j z^j / (q; q)_j  u^j
/// ```
pub fn qpoch_inf_expand<F: Field>(z: &F, q: &F, order: usize, inverse: bool) -> TruncatedSeries<F> {
    let coeffs = (0..=order)
        .map(|j| {
            let base = z.powi(j as i64) / qpoch(q, q, j);
            if inverse {
                base
            } else {
                base * sign::<F>(j) * qpow(q, (j * j.saturating_sub(1) / 2) as i64)
            }
        })
        .collect();
    TruncatedSeries { coeffs }
}
