//! One-variable basic hypergeometric series: the general `_{n+1}phi_n` and
//! the very-well-poised `_{r+1}W_r`.
//!
//! Terminating series are summed exactly. A `_{n+1}phi_n` with a formal
//! argument `z u` is returned as a truncated series in `u` instead.
//!
//! The very-well-poised factor is taken as `(1 - a0 q^{2k}) / (1 - a0)`.
//! It must depend on `k` for the `W` notation to agree with the underlying
//! `phi` series, and the `phi`-equivalence test below checks exactly that.

use crate::error::{Error, Result};
use crate::powerseries::TruncatedSeries;
use crate::scalar::{checked_div, Field};

/// Largest `N` tried when looking for a numerator parameter `q^{-N}`.
pub const DEFAULT_TERMINATION_BOUND: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum Argument<F> {
    /// A numeric argument; the series must terminate.
    Value(F),
    /// The formal argument `scale * u`, expanded through `u^order`.
    Formal { scale: F, order: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SeriesValue<F> {
    Exact(F),
    Series(TruncatedSeries<F>),
}

impl<F: Field> SeriesValue<F> {
    pub fn exact(self) -> Option<F> {
        match self {
            SeriesValue::Exact(v) => Some(v),
            SeriesValue::Series(_) => None,
        }
    }

    pub fn series(self) -> Option<TruncatedSeries<F>> {
        match self {
            SeriesValue::Series(s) => Some(s),
            SeriesValue::Exact(_) => None,
        }
    }
}

/// Least `N <= bound` such that some parameter equals `q^{-N}`.
pub fn detect_termination<F: Field>(params: &[F], q: &F, bound: usize) -> Option<usize> {
    let inv_q = F::one() / q.clone();
    let mut power = F::one();
    for n in 0..=bound {
        if params.iter().any(|p| p.matches(&power)) {
            return Some(n);
        }
        power = power * inv_q.clone();
    }
    None
}

/// `_{n+1}phi_n [a_0, ..., a_n; c_1, ..., c_n; q; argument]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSeriesSpec<F> {
    pub numerator: Vec<F>,
    pub denominator: Vec<F>,
    pub q: F,
    pub argument: Argument<F>,
}

impl<F: Field> PhiSeriesSpec<F> {
    pub fn new(numerator: Vec<F>, denominator: Vec<F>, q: F, argument: Argument<F>) -> Result<Self> {
        if numerator.len() != denominator.len() + 1 {
            return Err(Error::Shape(format!(
                "_{{n+1}}phi_n needs one more numerator than denominator parameter, got {} and {}",
                numerator.len(),
                denominator.len()
            )));
        }
        Ok(PhiSeriesSpec {
            numerator,
            denominator,
            q,
            argument,
        })
    }

    pub fn termination(&self, bound: usize) -> Option<usize> {
        detect_termination(&self.numerator, &self.q, bound)
    }

    /// `(a_0..a_n)_k / (q, c_1..c_n)_k` for `k = 0..count`, built from the
    /// term ratio. Once a numerator factor vanishes the remaining
    /// coefficients are zero and no further denominators are inspected.
    pub fn coefficients(&self, count: usize) -> Result<Vec<F>> {
        let q = &self.q;
        let mut out = Vec::with_capacity(count);
        let mut term = F::one();
        let mut qk = F::one();
        let mut dead = false;
        for k in 0..count {
            out.push(if dead { F::zero() } else { term.clone() });
            if dead || k + 1 == count {
                continue;
            }
            let mut num = F::one();
            for a in &self.numerator {
                let factor = F::one() - a.clone() * qk.clone();
                if factor.vanishes() {
                    dead = true;
                    break;
                }
                num = num * factor;
            }
            if dead {
                continue;
            }
            let mut den = F::one() - qk.clone() * q.clone();
            for (i, c) in self.denominator.iter().enumerate() {
                let factor = F::one() - c.clone() * qk.clone();
                if factor.vanishes() {
                    return Err(Error::Pole {
                        factor: format!("(c_{}; q)_{} with c_{} = {:?}", i + 1, k + 1, i + 1, c),
                    });
                }
                den = den * factor;
            }
            term = term * num / den;
            qk = qk * q.clone();
        }
        Ok(out)
    }
}

/// Evaluates a `_{n+1}phi_n`: an exact finite sum for a numeric argument,
/// a truncated series for a formal one.
pub fn eval_phi<F: Field>(spec: &PhiSeriesSpec<F>) -> Result<SeriesValue<F>> {
    match &spec.argument {
        Argument::Value(u) => {
            let n = spec
                .termination(DEFAULT_TERMINATION_BOUND)
                .ok_or(Error::RequiresFormal)?;
            let coeffs = spec.coefficients(n + 1)?;
            let series = TruncatedSeries::from_coeffs(coeffs, n);
            Ok(SeriesValue::Exact(series.evaluate_at(u)))
        }
        Argument::Formal { scale, order } => {
            let coeffs = spec.coefficients(order + 1)?;
            Ok(SeriesValue::Series(
                TruncatedSeries::from_coeffs(coeffs, *order).dilate(scale),
            ))
        }
    }
}

/// `_{r+1}W_r [a0; a_3, ..., a_r; q; u]`, the tail listing the parameters
/// after the `a0, q sqrt(a0), -q sqrt(a0)` block.
#[derive(Clone, Debug, PartialEq)]
pub struct VwpSpec<F> {
    pub a0: F,
    pub tail: Vec<F>,
    pub q: F,
    pub argument: F,
}

impl<F: Field> VwpSpec<F> {
    pub fn new(a0: F, tail: Vec<F>, q: F, argument: F) -> Self {
        VwpSpec {
            a0,
            tail,
            q,
            argument,
        }
    }

    pub fn termination(&self, bound: usize) -> Option<usize> {
        detect_termination(&self.tail, &self.q, bound)
    }

    /// The equivalent `_{n+1}phi_n` spec, given a square root of `a0`.
    pub fn as_phi(&self, sqrt_a0: &F) -> Result<PhiSeriesSpec<F>> {
        let q = self.q.clone();
        let mut numerator = vec![
            self.a0.clone(),
            q.clone() * sqrt_a0.clone(),
            -(q.clone() * sqrt_a0.clone()),
        ];
        let mut denominator = vec![sqrt_a0.clone(), -sqrt_a0.clone()];
        for a in &self.tail {
            numerator.push(a.clone());
            denominator.push(checked_div(self.a0.clone() * q.clone(), a.clone(), || {
                format!("a0 q / a_i with a_i = {a:?}")
            })?);
        }
        PhiSeriesSpec::new(numerator, denominator, q, Argument::Value(self.argument.clone()))
    }

    /// Term `k` of the sum, computed directly from its definition.
    pub fn term(&self, k: usize) -> Result<F> {
        let q = &self.q;
        let a0 = &self.a0;
        let vwp = checked_div(
            F::one() - a0.clone() * q.powi(2 * k as i64),
            F::one() - a0.clone(),
            || format!("1 - a0 with a0 = {a0:?}"),
        )?;
        let mut dens = vec![q.clone()];
        for a in &self.tail {
            dens.push(checked_div(a0.clone() * q.clone(), a.clone(), || {
                format!("a0 q / a_i with a_i = {a:?}")
            })?);
        }
        let mut nums = vec![a0.clone()];
        nums.extend(self.tail.iter().cloned());
        let ratio = crate::scalar::poch_ratio(&nums, &dens, q, k)?;
        Ok(vwp * ratio * self.argument.powi(k as i64))
    }
}

/// Exact value of a terminating very-well-poised series.
pub fn eval_w<F: Field>(spec: &VwpSpec<F>) -> Result<F> {
    let n = spec
        .termination(DEFAULT_TERMINATION_BOUND)
        .ok_or(Error::RequiresFormal)?;
    let q = &spec.q;
    let a0 = &spec.a0;
    let one = F::one();
    let norm = one.clone() - a0.clone();
    if norm.vanishes() {
        return Err(Error::Pole {
            factor: format!("1 - a0 with a0 = {a0:?}"),
        });
    }
    let mut pairs = Vec::with_capacity(spec.tail.len());
    for a in &spec.tail {
        let partner = checked_div(a0.clone() * q.clone(), a.clone(), || {
            format!("a0 q / a_i with a_i = {a:?}")
        })?;
        pairs.push((a.clone(), partner));
    }

    // running = (a0)_k prod (a_i)_k / ((q)_k prod (a0 q / a_i)_k) u^k
    let mut running = one.clone();
    let mut qk = one.clone();
    let mut sum = F::zero();
    for k in 0..=n {
        let vwp = (one.clone() - a0.clone() * qk.clone() * qk.clone()) / norm.clone();
        sum = sum + vwp * running.clone();
        if k == n {
            break;
        }
        let mut num = (one.clone() - a0.clone() * qk.clone()) * spec.argument.clone();
        let mut den = one.clone() - qk.clone() * q.clone();
        for (i, (a, partner)) in pairs.iter().enumerate() {
            num = num * (one.clone() - a.clone() * qk.clone());
            let factor = one.clone() - partner.clone() * qk.clone();
            if factor.vanishes() {
                return Err(Error::Pole {
                    factor: format!("(a0 q / a_{}; q)_{} with a_{} = {:?}", i + 3, k + 1, i + 3, a),
                });
            }
            den = den * factor;
        }
        if den.vanishes() {
            return Err(Error::Pole {
                factor: format!("(q; q)_{}", k + 1),
            });
        }
        running = running * num / den;
        qk = qk * q.clone();
    }
    Ok(sum)
}
