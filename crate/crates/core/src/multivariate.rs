//! `A_n` sums: weak compositions, Vandermonde weights, the homogeneous
//! parts `Phi^{n,m}_N`, and both sides of the multiple Euler transformation
//! as truncated series in `u`.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::powerseries::{qpoch_inf_expand, TruncatedSeries};
use crate::scalar::{checked_div, qpoch, Field};

/// A weak composition `gamma` of `N` into `n` nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Self {
        Composition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Streams the weak compositions of `total` into `parts` pieces in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct Compositions {
    next: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        // The successor bumps the part just before the last nonzero one and
        // moves the remainder to the final slot.
        if let Some(last) = current.iter().rposition(|&p| p > 0).filter(|&i| i > 0) {
            let mut succ = current.clone();
            let rest = succ[last] - 1;
            succ[last] = 0;
            succ[last - 1] += 1;
            let end = succ.len() - 1;
            succ[end] += rest;
            self.next = Some(succ);
        }
        Some(Composition { parts: current })
    }
}

pub fn compositions(total: usize, parts: usize) -> Compositions {
    if parts == 0 {
        return Compositions { next: None };
    }
    let mut first = vec![0; parts];
    first[parts - 1] = total;
    Compositions { next: Some(first) }
}

/// `Delta(x q^gamma) / Delta(x)` with `Delta(x) = prod_{i<j} (x_i - x_j)`.
pub fn vandermonde_ratio<F: Field>(x: &[F], gamma: &[usize], q: &F) -> Result<F> {
    let shifted: Vec<F> = x
        .iter()
        .zip(gamma)
        .map(|(xi, &g)| xi.clone() * q.powi(g as i64))
        .collect();
    let mut value = F::one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let den = x[i].clone() - x[j].clone();
            if den.vanishes() {
                return Err(Error::CoincidentVariables { i: i + 1, j: j + 1 });
            }
            value = value * (shifted[i].clone() - shifted[j].clone()) / den;
        }
    }
    Ok(value)
}

/// How the `b`/`c` arguments of `Phi` are scaled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Normalization {
    /// `(b_k x_i y_k)` and `(c x_i y_k)`: exactly the `u^N` coefficient of
    /// the Euler transformation's left side.
    #[default]
    Coefficient,
    /// `(b_k x_i y_k / x_n y_m)` and `(c x_i y_k / x_n y_m)`.
    LastVariable,
}

/// Parameter pack `({a_i}, {x_i}, {b_k}, {y_k}, c)` of an `A_n` sum.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiSpec<F> {
    pub a: Vec<F>,
    pub x: Vec<F>,
    pub b: Vec<F>,
    pub y: Vec<F>,
    pub c: F,
    pub q: F,
    pub normalization: Normalization,
}

impl<F: Field> PhiSpec<F> {
    pub fn new(a: Vec<F>, x: Vec<F>, b: Vec<F>, y: Vec<F>, c: F, q: F) -> Result<Self> {
        if a.is_empty() || a.len() != x.len() {
            return Err(Error::Shape(format!(
                "need n >= 1 with |a| = |x|, got {} and {}",
                a.len(),
                x.len()
            )));
        }
        if b.len() != y.len() {
            return Err(Error::Shape(format!(
                "need |b| = |y|, got {} and {}",
                b.len(),
                y.len()
            )));
        }
        Ok(PhiSpec {
            a,
            x,
            b,
            y,
            c,
            q,
            normalization: Normalization::Coefficient,
        })
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// `A = a_1 ... a_n`.
    pub fn a_product(&self) -> F {
        self.a.iter().cloned().fold(F::one(), |p, v| p * v)
    }

    /// `B = b_1 ... b_m`.
    pub fn b_product(&self) -> F {
        self.b.iter().cloned().fold(F::one(), |p, v| p * v)
    }

    /// `A B / c^m`, the argument scale on the dual side.
    pub fn dual_scale(&self) -> Result<F> {
        checked_div(
            self.a_product() * self.b_product(),
            self.c.powi(self.m() as i64),
            || "c^m".to_string(),
        )
    }

    /// Parameters of the `A_m` sum on the right of the Euler
    /// transformation: `a' = c / b_l`, `x' = y`, `b' = c / a_i`, `y' = x`.
    pub fn dual(&self) -> Result<PhiSpec<F>> {
        let over = |v: &F| checked_div(self.c.clone(), v.clone(), || format!("c / {v:?}"));
        let a = self.b.iter().map(over).collect::<Result<Vec<_>>>()?;
        let b = self.a.iter().map(over).collect::<Result<Vec<_>>>()?;
        if a.is_empty() {
            return Err(Error::Shape("dual sum needs m >= 1".into()));
        }
        Ok(PhiSpec {
            a,
            x: self.y.clone(),
            b,
            y: self.x.clone(),
            c: self.c.clone(),
            q: self.q.clone(),
            normalization: self.normalization,
        })
    }

    fn scale(&self) -> Result<F> {
        match self.normalization {
            Normalization::Coefficient => Ok(F::one()),
            Normalization::LastVariable => {
                let mut s = self.x[self.n() - 1].clone();
                if let Some(y) = self.y.last() {
                    s = s * y.clone();
                }
                checked_div(F::one(), s, || "x_n y_m".to_string())
            }
        }
    }

    /// Summand of `Phi` at one multi-index.
    pub fn term(&self, gamma: &Composition) -> Result<F> {
        let q = &self.q;
        let g = gamma.parts();
        let scale = self.scale()?;
        let context = |factor: String| Error::Pole {
            factor: format!("{factor} at gamma = {gamma}"),
        };
        let mut value = vandermonde_ratio(&self.x, g, q)?;
        for (i, xi) in self.x.iter().enumerate() {
            let k = g[i];
            if k == 0 {
                continue;
            }
            for (j, xj) in self.x.iter().enumerate() {
                let ratio = checked_div(xi.clone(), xj.clone(), || format!("x_{i} / x_{j}"))?;
                let den = qpoch(&(q.clone() * ratio.clone()), q, k);
                if den.vanishes() {
                    return Err(context(format!("(q x_{} / x_{}; q)_{}", i + 1, j + 1, k)));
                }
                value = value * qpoch(&(self.a[j].clone() * ratio), q, k) / den;
            }
            for (l, (bk, yk)) in self.b.iter().zip(&self.y).enumerate() {
                let xy = xi.clone() * yk.clone() * scale.clone();
                let den = qpoch(&(self.c.clone() * xy.clone()), q, k);
                if den.vanishes() {
                    return Err(context(format!("(c x_{} y_{}; q)_{}", i + 1, l + 1, k)));
                }
                value = value * qpoch(&(bk.clone() * xy), q, k) / den;
            }
        }
        Ok(value)
    }
}

/// `Phi^{n,m}_N`: the weight-`N` slice of the `A_n` sum, zero for `N < 0`.
pub fn phi_homogeneous<F: Field>(spec: &PhiSpec<F>, weight: i64) -> Result<F> {
    phi_homogeneous_with(spec, weight, ExecPolicy::Sequential)
}

/// As [`phi_homogeneous`]; the parallel policy evaluates summands
/// concurrently and still adds them in lexicographic order.
pub fn phi_homogeneous_with<F: Field>(spec: &PhiSpec<F>, weight: i64, policy: ExecPolicy) -> Result<F> {
    if weight < 0 {
        return Ok(F::zero());
    }
    let gammas = compositions(weight as usize, spec.n());
    match policy {
        ExecPolicy::Sequential => gammas
            .map(|g| spec.term(&g))
            .try_fold(F::zero(), |acc, t| Ok(acc + t?)),
        ExecPolicy::Parallel => {
            let all: Vec<Composition> = gammas.collect();
            policy
                .map(&all, |g| spec.term(g))
                .into_iter()
                .try_fold(F::zero(), |acc, t| Ok(acc + t?))
        }
    }
}

/// Left side of the Euler transformation through `u^order`.
pub fn etg_lhs_series<F: Field>(spec: &PhiSpec<F>, order: usize) -> Result<TruncatedSeries<F>> {
    let coeffs = (0..=order)
        .map(|n| phi_homogeneous(spec, n as i64))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries::from_coeffs(coeffs, order))
}

/// The two factors of the right side: `(A B u / c^m)_inf / (u)_inf` and the
/// dual sum `sum_L Phi^{m,n}_L (A B u / c^m)^L`.
pub fn etg_rhs_factors<F: Field>(
    spec: &PhiSpec<F>,
    order: usize,
) -> Result<(TruncatedSeries<F>, TruncatedSeries<F>)> {
    let lambda = spec.dual_scale()?;
    let q = &spec.q;
    let prefactor = &qpoch_inf_expand(&lambda, q, order, false) * &qpoch_inf_expand(&F::one(), q, order, true);
    let dual = spec.dual()?;
    let dual_series = etg_lhs_series(&dual, order)?.dilate(&lambda);
    Ok((prefactor, dual_series))
}

/// Right side of the Euler transformation through `u^order`.
pub fn etg_rhs_series<F: Field>(spec: &PhiSpec<F>, order: usize) -> Result<TruncatedSeries<F>> {
    let (prefactor, dual) = etg_rhs_factors(spec, order)?;
    prefactor.try_mul(&dual)
}
