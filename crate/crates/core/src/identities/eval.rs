//! Both sides of every identity, transcribed factor by factor. Each
//! [`Correction`] switches exactly one printed factor group.

use num_traits::Zero;
use serde::Serialize;

use super::{Correction, IdentityCase, IdentityId, Reading};
use crate::error::{Error, Result};
use crate::multivariate::{etg_lhs_series, etg_rhs_series, phi_homogeneous, Normalization, PhiSpec};
use crate::powerseries::qpoch_inf_expand;
use crate::scalar::{poch_ratio, qpow, Field};
use crate::series::{eval_phi, eval_w, Argument, PhiSeriesSpec, SeriesValue, VwpSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lhs,
    Rhs,
    Both,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Lhs => "lhs",
            Side::Rhs => "rhs",
            Side::Both => "both sides",
        })
    }
}

/// Value of one side: a number for terminating identities, the
/// coefficients of `u^0..u^order` for formal ones.
#[derive(Clone, Debug, PartialEq)]
pub enum SideValue<F> {
    Exact(F),
    Coefficients(Vec<F>),
}

impl<F: Field> SideValue<F> {
    pub fn matches(&self, other: &Self) -> bool {
        match (self, other) {
            (SideValue::Exact(a), SideValue::Exact(b)) => a.matches(b),
            (SideValue::Coefficients(a), SideValue::Coefficients(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.matches(y))
            }
            _ => false,
        }
    }

    pub fn exact(&self) -> Option<&F> {
        match self {
            SideValue::Exact(v) => Some(v),
            SideValue::Coefficients(_) => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SideValue::Exact(v) => v.to_json(),
            SideValue::Coefficients(cs) => serde_json::Value::Array(cs.iter().map(Field::to_json).collect()),
        }
    }
}

/// One side under the literal transcription.
pub fn evaluate_side<F: Field>(case: &IdentityCase, side: Side) -> Result<SideValue<F>> {
    evaluate_side_with(case, side, &Reading::literal())
}

/// One side under a chosen reading.
pub fn evaluate_side_with<F: Field>(case: &IdentityCase, side: Side, reading: &Reading) -> Result<SideValue<F>> {
    case.identity.check_dims(&case.dims)?;
    for slot in case.identity.slots(&case.dims) {
        if case.get(&slot)?.is_zero() {
            return Err(Error::Inconsistent(format!("slot {slot} is zero")));
        }
    }
    if !case.constraint_holds()? {
        return Err(Error::Inconsistent(format!("{} balancing constraint violated", case.identity)));
    }
    let lhs = match side {
        Side::Lhs => true,
        Side::Rhs => false,
        Side::Both => return Err(Error::Config("evaluate one side at a time".into())),
    };
    let exact = |v: Result<F>| v.map(SideValue::Exact);
    match case.identity {
        IdentityId::Heine3 => heine3(case, lhs).map(SideValue::Coefficients),
        IdentityId::Etg => etg(case, lhs).map(SideValue::Coefficients),
        IdentityId::Sears => exact(if lhs { sears_lhs(case) } else { sears_rhs(case, reading) }),
        IdentityId::Mf => {
            let corrected = reading.has(Correction::MfReciprocalWeights);
            exact(mf_sides(case, corrected, lhs))
        }
        IdentityId::Phiw => exact(if lhs { phiw_lhs(case, reading) } else { phiw_rhs(case, reading) }),
        IdentityId::Phiw1 => exact(if lhs { phiw1_lhs(case) } else { phiw1_rhs(case) }),
        IdentityId::Gbl => exact(if lhs { gbl_lhs(case) } else { gbl_rhs(case, reading) }),
        IdentityId::M21 => exact(if lhs { m21_lhs(case, reading) } else { m21_rhs(case) }),
        IdentityId::M1m21 => exact(if lhs { m1m21_lhs(case, reading) } else { m1m21_rhs(case) }),
    }
}

fn product<F: Field>(values: &[F]) -> F {
    values.iter().cloned().fold(F::one(), |p, v| p * v)
}

fn heine3<F: Field>(case: &IdentityCase, lhs: bool) -> Result<Vec<F>> {
    let q: F = case.q.to_field();
    let order = case.n;
    let (a, b, c): (F, F, F) = (case.field("a")?, case.field("b")?, case.field("c")?);
    if lhs {
        let spec = PhiSeriesSpec::new(
            vec![a, b],
            vec![c],
            q,
            Argument::Formal {
                scale: F::one(),
                order,
            },
        )?;
        return Ok(formal(eval_phi(&spec)?));
    }
    let lambda = a.clone() * b.clone() / c.clone();
    let prefactor = &qpoch_inf_expand(&lambda, &q, order, false) * &qpoch_inf_expand(&F::one(), &q, order, true);
    let spec = PhiSeriesSpec::new(
        vec![c.clone() / b, c.clone() / a],
        vec![c],
        q,
        Argument::Formal { scale: lambda, order },
    )?;
    let series = eval_phi(&spec)?.series().expect("formal argument gives a series");
    Ok(prefactor.try_mul(&series)?.into_coeffs())
}

fn formal<F: Field>(value: SeriesValue<F>) -> Vec<F> {
    value.series().expect("formal argument gives a series").into_coeffs()
}

fn etg_spec<F: Field>(case: &IdentityCase) -> Result<PhiSpec<F>> {
    let (n, m) = (case.dims[0], case.dims[1]);
    PhiSpec::new(
        case.indexed("a", n)?,
        case.indexed("x", n)?,
        case.indexed("b", m)?,
        case.indexed("y", m)?,
        case.field("c")?,
        case.q.to_field(),
    )
}

fn etg<F: Field>(case: &IdentityCase, lhs: bool) -> Result<Vec<F>> {
    let spec = etg_spec(case)?;
    let series = if lhs {
        etg_lhs_series(&spec, case.n)?
    } else {
        etg_rhs_series(&spec, case.n)?
    };
    Ok(series.into_coeffs())
}

fn terminating<F: Field>(numerator: Vec<F>, denominator: Vec<F>, q: &F, u: F) -> Result<F> {
    let spec = PhiSeriesSpec::new(numerator, denominator, q.clone(), Argument::Value(u))?;
    Ok(eval_phi(&spec)?.exact().expect("numeric argument gives a value"))
}

fn sears_lhs<F: Field>(case: &IdentityCase) -> Result<F> {
    let q: F = case.q.to_field();
    let n = case.n as i64;
    let v = |s: &str| case.field::<F>(s);
    terminating(
        vec![v("a")?, v("b")?, v("c")?, qpow(&q, -n)],
        vec![v("d")?, v("e")?, v("f")?],
        &q,
        q.clone(),
    )
}

fn sears_rhs<F: Field>(case: &IdentityCase, reading: &Reading) -> Result<F> {
    let q: F = case.q.to_field();
    let n = case.n;
    let v = |s: &str| case.field::<F>(s);
    let (a, b, c, d, e, f) = (v("a")?, v("b")?, v("c")?, v("d")?, v("e")?, v("f")?);
    let bc = b.clone() * c.clone();
    let prefactor = poch_ratio(
        &[e.clone() / a.clone(), d.clone() * e.clone() / bc.clone()],
        &[e.clone(), d.clone() * e.clone() / (a.clone() * bc.clone())],
        &q,
        n,
    )?;
    let mut numerator = vec![a, d.clone() / b, d.clone() / c];
    if reading.has(Correction::SearsRestoreTerminator) {
        numerator.push(qpow(&q, -(n as i64)));
    }
    let denominator = vec![d.clone(), d.clone() * f / bc.clone(), d * e / bc];
    Ok(prefactor * terminating(numerator, denominator, &q, q.clone())?)
}

/// The two left `Phi` packs of the master formula with both weights.
pub(super) struct MfPacks<F> {
    pub first: PhiSpec<F>,
    pub second: PhiSpec<F>,
    /// `A B / c^{m1}`.
    pub lambda: F,
    /// `D E / f^{n2}`.
    pub mu: F,
}

pub(super) fn mf_packs<F: Field>(case: &IdentityCase) -> Result<MfPacks<F>> {
    let (n1, m1, n2, m2) = (case.dims[0], case.dims[1], case.dims[2], case.dims[3]);
    let q: F = case.q.to_field();
    let f: F = case.field("f")?;
    let d: Vec<F> = case.indexed("d", m2)?;
    let e: Vec<F> = case.indexed("e", n2)?;
    let first = PhiSpec::new(
        case.indexed("a", n1)?,
        case.indexed("x", n1)?,
        case.indexed("b", m1)?,
        case.indexed("y", m1)?,
        case.field("c")?,
        q.clone(),
    )?;
    let second = PhiSpec::new(
        e.iter().map(|ep| f.clone() / ep.clone()).collect(),
        case.indexed("z", n2)?,
        d.iter().map(|ds| f.clone() / ds.clone()).collect(),
        case.indexed("w", m2)?,
        f.clone(),
        q,
    )?;
    let lambda = first.dual_scale()?;
    let mu = product(&d) * product(&e) / f.powi(n2 as i64);
    Ok(MfPacks {
        first,
        second,
        lambda,
        mu,
    })
}

fn mf_sides<F: Field>(case: &IdentityCase, corrected: bool, lhs: bool) -> Result<F> {
    let packs = mf_packs::<F>(case)?;
    let n = case.n as i64;
    let mut total = F::zero();
    if lhs {
        let weight = if corrected { packs.mu } else { F::one() / packs.mu };
        for k in 0..=n {
            let p1 = phi_homogeneous(&packs.first, k)?;
            if p1.is_zero() {
                continue;
            }
            total = total + p1 * phi_homogeneous(&packs.second, n - k)? * weight.powi(n - k);
        }
    } else {
        let weight = if corrected {
            packs.lambda
        } else {
            F::one() / packs.lambda
        };
        let dual_first = packs.first.dual()?;
        let dual_second = packs.second.dual()?;
        for l in 0..=n {
            let p1 = phi_homogeneous(&dual_first, l)?;
            if p1.is_zero() {
                continue;
            }
            total = total + p1 * phi_homogeneous(&dual_second, n - l)? * weight.powi(l);
        }
    }
    Ok(total)
}

fn phiw_lhs<F: Field>(case: &IdentityCase, reading: &Reading) -> Result<F> {
    let m = case.dims[0];
    let normalization = if reading.has(Correction::PhiwLastVariableNormalization) {
        Normalization::LastVariable
    } else {
        Normalization::Coefficient
    };
    let spec = PhiSpec::new(
        case.indexed("a", 2)?,
        case.indexed("x", 2)?,
        case.indexed("b", m)?,
        case.indexed("y", m)?,
        case.field("c")?,
        case.q.to_field(),
    )?
    .with_normalization(normalization);
    phi_homogeneous(&spec, case.n as i64)
}

fn phiw_rhs<F: Field>(case: &IdentityCase, reading: &Reading) -> Result<F> {
    let m = case.dims[0];
    let q: F = case.q.to_field();
    let n = case.n;
    let (a1, a2): (F, F) = (case.field("a1")?, case.field("a2")?);
    let (mut x1, mut x2): (F, F) = (case.field("x1")?, case.field("x2")?);
    let b: Vec<F> = case.indexed("b", m)?;
    let mut y: Vec<F> = case.indexed("y", m)?;
    let c: F = case.field("c")?;
    if reading.has(Correction::PhiwRescaleFirstVariable) {
        y = y.into_iter().map(|yk| yk * x1.clone()).collect();
        x2 = x2 / x1;
        x1 = F::one();
    }
    let ratio = x2.clone() / x1;
    let head = if reading.has(Correction::PhiwPrefactorA1) {
        a1.clone()
    } else {
        a2.clone()
    };
    let mut nums = vec![a2.clone(), head * ratio.clone()];
    let mut dens = vec![q.clone(), ratio];
    for (bk, yk) in b.iter().zip(&y) {
        nums.push(bk.clone() * x2.clone() * yk.clone());
        dens.push(c.clone() * x2.clone() * yk.clone());
    }
    let prefactor = poch_ratio(&nums, &dens, &q, n)?;

    let q_n = qpow(&q, -(n as i64));
    let mut tail = vec![a1.clone()];
    tail.extend(b.iter().zip(&y).map(|(bk, yk)| bk.clone() * yk.clone()));
    tail.push(a2.clone() / x2.clone());
    tail.extend(y.iter().map(|yk| q.clone() * q_n.clone() / (x2.clone() * c.clone() * yk.clone())));
    tail.push(q_n.clone());
    let argument = c.powi(m as i64) * q.clone() / (a1 * a2 * product(&b));
    let w = eval_w(&VwpSpec::new(q_n / x2, tail, q, argument))?;
    Ok(prefactor * w)
}

fn phiw1_spec<F: Field>(case: &IdentityCase) -> Result<PhiSpec<F>> {
    let m = case.dims[0];
    PhiSpec::new(
        vec![case.field("a")?],
        vec![F::one()],
        case.indexed("b", m)?,
        case.indexed("y", m)?,
        case.field("c")?,
        case.q.to_field(),
    )
}

fn phiw1_lhs<F: Field>(case: &IdentityCase) -> Result<F> {
    phi_homogeneous(&phiw1_spec(case)?, case.n as i64)
}

fn phiw1_rhs<F: Field>(case: &IdentityCase) -> Result<F> {
    let spec: PhiSpec<F> = phiw1_spec(case)?;
    let q = &spec.q;
    let mut nums = vec![spec.a[0].clone()];
    let mut dens = vec![q.clone()];
    for (bk, yk) in spec.b.iter().zip(&spec.y) {
        nums.push(bk.clone() * yk.clone());
        dens.push(spec.c.clone() * yk.clone());
    }
    poch_ratio(&nums, &dens, q, case.n)
}

/// Parameters of the bilinear identities; slots absent from an identity
/// are set to one and never read.
struct Bilinear<F> {
    q: F,
    n: usize,
    t: F,
    b: F,
    c: F,
    d1: F,
    d2: F,
    e: F,
    f: F,
    s: F,
    be: F,
    ga: F,
    de1: F,
    de2: F,
    ep: F,
    ph: F,
}

impl<F: Field> Bilinear<F> {
    fn load(case: &IdentityCase) -> Result<Self> {
        let v = |s: &str| -> Result<F> {
            match case.assignment.get(s) {
                Some(x) => Ok(F::from_scalar(x)),
                None if case.identity.slots(&case.dims).iter().any(|slot| slot == s) => {
                    Err(Error::MissingSlot(s.to_string()))
                }
                None => Ok(F::one()),
            }
        };
        Ok(Bilinear {
            q: case.q.to_field(),
            n: case.n,
            t: v("t")?,
            b: v("b")?,
            c: v("c")?,
            d1: v("d1")?,
            d2: v("d2")?,
            e: v("e")?,
            f: v("f")?,
            s: v("sigma")?,
            be: v("beta")?,
            ga: v("gamma")?,
            de1: v("delta1")?,
            de2: v("delta2")?,
            ep: v("epsilon")?,
            ph: v("phi")?,
        })
    }

    fn qp(&self, e: i64) -> F {
        qpow(&self.q, e)
    }

    fn w(&self, a0: F, tail: Vec<F>, argument: F) -> Result<F> {
        eval_w(&VwpSpec::new(a0, tail, self.q.clone(), argument))
    }

    fn ratio(&self, nums: &[F], dens: &[F], k: usize) -> Result<F> {
        poch_ratio(nums, dens, &self.q, k)
    }

    /// `10W9[t q^{-K}; b, c, d1, d2, e q^{-K}, f q^{-K}, q^{-K}; t^3 q^3/(b c d1 d2 e f)]`.
    fn first_w10(&self, k: usize) -> Result<F> {
        let qk = self.qp(-(k as i64));
        let q = self.q.clone();
        self.w(
            self.t.clone() * qk.clone(),
            vec![
                self.b.clone(),
                self.c.clone(),
                self.d1.clone(),
                self.d2.clone(),
                self.e.clone() * qk.clone(),
                self.f.clone() * qk.clone(),
                qk,
            ],
            self.t.powi(3) * q.powi(3)
                / (self.b.clone() * self.c.clone() * self.d1.clone() * self.d2.clone() * self.e.clone() * self.f.clone()),
        )
    }

    /// `10W9[q^{-L} f/e; tq/ce, tq/be, tq/d1e, tq/d2e, f q^{-L}/t, f q^{-L}, q^{-L}; b c d1 d2 e f/(q t^3)]`.
    fn dual_first_w10(&self, l: usize) -> Result<F> {
        let ql = self.qp(-(l as i64));
        let tq = self.t.clone() * self.q.clone();
        let e = self.e.clone();
        self.w(
            ql.clone() * self.f.clone() / e.clone(),
            vec![
                tq.clone() / (self.c.clone() * e.clone()),
                tq.clone() / (self.b.clone() * e.clone()),
                tq.clone() / (self.d1.clone() * e.clone()),
                tq / (self.d2.clone() * e.clone()),
                self.f.clone() * ql.clone() / self.t.clone(),
                self.f.clone() * ql.clone(),
                ql,
            ],
            self.b.clone() * self.c.clone() * self.d1.clone() * self.d2.clone() * e * self.f.clone()
                / (self.q.clone() * self.t.powi(3)),
        )
    }

    /// `phi^N` times the `N`-dependent prefactor shared by the M21 and
    /// M1M21 right sides.
    fn short_prefactor(&self) -> Result<F> {
        let sq = self.s.clone() * self.q.clone();
        let ph = self.ph.clone();
        Ok(ph.powi(self.n as i64)
            * self.ratio(
                &[
                    sq.clone(),
                    sq.clone() / (self.be.clone() * ph.clone()),
                    sq.clone() / (self.de1.clone() * ph.clone()),
                    sq.clone() / (self.de2.clone() * ph.clone()),
                ],
                &[
                    sq.clone() / self.be.clone(),
                    sq.clone() / ph,
                    sq.clone() / self.de1.clone(),
                    sq / self.de2.clone(),
                ],
                self.n,
            )?)
    }
}

fn gbl_lhs<F: Field>(case: &IdentityCase) -> Result<F> {
    let p = Bilinear::<F>::load(case)?;
    let n = p.n as i64;
    let q = p.q.clone();
    let t = p.t.clone();
    let sq = p.s.clone() * q.clone();
    let mut total = F::zero();
    for k in 0..=p.n {
        let ki = k as i64;
        let head = p.ratio(
            &[
                p.b.clone() / t.clone(),
                p.c.clone() / t.clone(),
                p.d1.clone() / t.clone(),
                p.d2.clone() / t.clone(),
                sq.clone(),
                p.ep.clone(),
                p.ph.clone(),
                p.qp(-n),
            ],
            &[
                q.clone(),
                F::one() / t.clone(),
                q.clone() / p.e.clone(),
                q.clone() / p.f.clone(),
                sq.clone() / p.be.clone(),
                sq.clone() / p.ga.clone(),
                sq.clone() / p.de1.clone(),
                sq.clone() / p.de2.clone(),
            ],
            k,
        )?;
        if head.is_zero() {
            continue;
        }
        let qk = p.qp(ki);
        let second = p.w(
            p.s.clone() * qk.clone(),
            vec![
                p.be.clone(),
                p.ga.clone(),
                p.de1.clone(),
                p.de2.clone(),
                p.ep.clone() * qk.clone(),
                p.ph.clone() * qk.clone(),
                p.qp(ki - n),
            ],
            p.s.powi(3) * p.qp(n + 3)
                / (p.be.clone() * p.ga.clone() * p.de1.clone() * p.de2.clone() * p.ep.clone() * p.ph.clone()),
        )?;
        total = total + head * qk * p.first_w10(k)? * second;
    }
    Ok(total)
}

fn gbl_rhs<F: Field>(case: &IdentityCase, reading: &Reading) -> Result<F> {
    let p = Bilinear::<F>::load(case)?;
    let n = p.n as i64;
    let q = p.q.clone();
    let tq = p.t.clone() * q.clone();
    let sq = p.s.clone() * q.clone();
    let (ph, ep, s) = (p.ph.clone(), p.ep.clone(), p.s.clone());
    let qn = p.qp(-n);

    let mut nums = vec![
        sq.clone() / (p.de1.clone() * ph.clone()),
        sq.clone() / (p.de2.clone() * ph.clone()),
        ep.clone(),
        sq.clone() / (p.ga.clone() * ph.clone()),
        sq.clone(),
        sq.clone() / (p.be.clone() * ph.clone()),
    ];
    let mut dens = vec![
        sq.clone() / p.de1.clone(),
        sq.clone() / p.de2.clone(),
        ep.clone() / ph.clone(),
    ];
    let group = [
        sq.clone() / p.ga.clone(),
        sq.clone() / ph.clone(),
        sq.clone() / p.be.clone(),
    ];
    if reading.has(Correction::GblGroupInNumerator) {
        nums.extend(group);
    } else {
        dens.extend(group);
    }
    let prefactor = ph.powi(n) * p.ratio(&nums, &dens, p.n)?;

    let swapped = if reading.has(Correction::GblSwapEpsilonPhi) {
        ph.clone() / ep.clone()
    } else {
        ep.clone() / ph.clone()
    };
    let mut total = F::zero();
    for l in 0..=p.n {
        let li = l as i64;
        let head = p.ratio(
            &[
                tq.clone() / (p.c.clone() * p.f.clone()),
                tq.clone() / (p.b.clone() * p.f.clone()),
                tq.clone() / (p.d1.clone() * p.f.clone()),
                tq.clone() / (p.d2.clone() * p.f.clone()),
                p.qp(1 - n) * swapped.clone(),
                qn.clone() * ph.clone() / s.clone(),
                ph.clone(),
                qn.clone(),
            ],
            &[
                q.clone(),
                p.e.clone() / p.f.clone(),
                tq.clone() / p.f.clone(),
                q.clone() / p.f.clone(),
                qn.clone() * p.ga.clone() * ph.clone() / s.clone(),
                qn.clone() * p.be.clone() * ph.clone() / s.clone(),
                qn.clone() * p.de1.clone() * ph.clone() / s.clone(),
                qn.clone() * p.de2.clone() * ph.clone() / s.clone(),
            ],
            l,
        )?;
        if head.is_zero() {
            continue;
        }
        let qln = p.qp(li - n);
        let second = p.w(
            qln.clone() * ph.clone() / ep.clone(),
            vec![
                sq.clone() / (p.ga.clone() * ep.clone()),
                sq.clone() / (p.be.clone() * ep.clone()),
                sq.clone() / (p.de1.clone() * ep.clone()),
                sq.clone() / (p.de2.clone() * ep.clone()),
                qln.clone() * ph.clone() / s.clone(),
                p.qp(li) * ph.clone(),
                qln,
            ],
            p.be.clone() * p.ga.clone() * p.de1.clone() * p.de2.clone() * ep.clone() * ph.clone() * p.qp(-n - 1)
                / s.powi(3),
        )?;
        total = total + head * p.qp(li) * p.dual_first_w10(l)? * second;
    }
    Ok(prefactor * total)
}

fn m21_lhs<F: Field>(case: &IdentityCase, reading: &Reading) -> Result<F> {
    let p = Bilinear::<F>::load(case)?;
    let n = p.n as i64;
    let q = p.q.clone();
    let t = p.t.clone();
    let sq = p.s.clone() * q.clone();
    let sigma_power = if reading.has(Correction::M21SigmaSquared) { 2 } else { 1 };
    let mut total = F::zero();
    for k in 0..=p.n {
        let ki = k as i64;
        let head = p.ratio(
            &[
                p.b.clone() / t.clone(),
                p.c.clone() / t.clone(),
                p.d1.clone() / t.clone(),
                p.d2.clone() / t.clone(),
                sq.clone(),
                p.ph.clone(),
                p.qp(-n),
            ],
            &[
                q.clone(),
                F::one() / t.clone(),
                q.clone() / p.e.clone(),
                q.clone() / p.f.clone(),
                sq.clone() / p.be.clone(),
                sq.clone() / p.de1.clone(),
                sq.clone() / p.de2.clone(),
            ],
            k,
        )?;
        if head.is_zero() {
            continue;
        }
        let qk = p.qp(ki);
        let second = p.w(
            p.s.clone() * qk.clone(),
            vec![
                p.be.clone(),
                p.de1.clone(),
                p.de2.clone(),
                p.ph.clone() * qk.clone(),
                p.qp(ki - n),
            ],
            p.s.powi(sigma_power) * p.qp(n + 2) / (p.be.clone() * p.de1.clone() * p.de2.clone() * p.ph.clone()),
        )?;
        total = total + head * qk * p.first_w10(k)? * second;
    }
    Ok(total)
}

fn m21_rhs<F: Field>(case: &IdentityCase) -> Result<F> {
    let p = Bilinear::<F>::load(case)?;
    let n = p.n as i64;
    let q = p.q.clone();
    let tq = p.t.clone() * q.clone();
    let (ph, s) = (p.ph.clone(), p.s.clone());
    let qn = p.qp(-n);
    let mut total = F::zero();
    for l in 0..=p.n {
        let head = p.ratio(
            &[
                tq.clone() / (p.b.clone() * p.f.clone()),
                tq.clone() / (p.c.clone() * p.f.clone()),
                tq.clone() / (p.d1.clone() * p.f.clone()),
                tq.clone() / (p.d2.clone() * p.f.clone()),
                qn.clone() * ph.clone() / s.clone(),
                ph.clone(),
                qn.clone(),
            ],
            &[
                q.clone(),
                p.e.clone() / p.f.clone(),
                tq.clone() / p.f.clone(),
                q.clone() / p.f.clone(),
                qn.clone() * ph.clone() * p.be.clone() / s.clone(),
                qn.clone() * p.de1.clone() * ph.clone() / s.clone(),
                qn.clone() * p.de2.clone() * ph.clone() / s.clone(),
            ],
            l,
        )?;
        if head.is_zero() {
            continue;
        }
        total = total + head * p.qp(l as i64) * p.dual_first_w10(l)?;
    }
    Ok(p.short_prefactor()? * total)
}

fn m1m21_lhs<F: Field>(case: &IdentityCase, reading: &Reading) -> Result<F> {
    let p = Bilinear::<F>::load(case)?;
    let n = p.n as i64;
    let q = p.q.clone();
    let t = p.t.clone();
    let sq = p.s.clone() * q.clone();
    let weighted = reading.has(Correction::M1m21RestoreQWeight);
    let mut total = F::zero();
    for k in 0..=p.n {
        let ki = k as i64;
        let head = p.ratio(
            &[
                p.b.clone() / t.clone(),
                p.d1.clone() / t.clone(),
                p.d2.clone() / t.clone(),
                sq.clone(),
                p.ph.clone(),
                p.qp(-n),
            ],
            &[
                q.clone(),
                F::one() / t.clone(),
                q.clone() / p.e.clone(),
                sq.clone() / p.be.clone(),
                sq.clone() / p.de1.clone(),
                sq.clone() / p.de2.clone(),
            ],
            k,
        )?;
        if head.is_zero() {
            continue;
        }
        let q_minus_k = p.qp(-ki);
        let first = p.w(
            t.clone() * q_minus_k.clone(),
            vec![
                p.b.clone(),
                p.d1.clone(),
                p.d2.clone(),
                p.e.clone() * q_minus_k.clone(),
                q_minus_k,
            ],
            t.powi(2) * q.powi(2) / (p.b.clone() * p.d1.clone() * p.d2.clone() * p.e.clone()),
        )?;
        let qk = p.qp(ki);
        let second = p.w(
            p.s.clone() * qk.clone(),
            vec![
                p.be.clone(),
                p.de1.clone(),
                p.de2.clone(),
                p.ph.clone() * qk.clone(),
                p.qp(ki - n),
            ],
            p.s.powi(2) * p.qp(n + 2) / (p.be.clone() * p.de1.clone() * p.de2.clone() * p.ph.clone()),
        )?;
        let weight = if weighted { qk } else { F::one() };
        total = total + head * weight * first * second;
    }
    Ok(total)
}

fn m1m21_rhs<F: Field>(case: &IdentityCase) -> Result<F> {
    let p = Bilinear::<F>::load(case)?;
    let n = p.n as i64;
    let q = p.q.clone();
    let tq = p.t.clone() * q.clone();
    let (ph, s, e) = (p.ph.clone(), p.s.clone(), p.e.clone());
    let qn = p.qp(-n);
    let sum = terminating(
        vec![
            tq.clone() / (p.b.clone() * e.clone()),
            tq.clone() / (p.d1.clone() * e.clone()),
            tq.clone() / (p.d2.clone() * e.clone()),
            qn.clone() * ph.clone() / s.clone(),
            ph.clone(),
            qn.clone(),
        ],
        vec![
            tq / e.clone(),
            q.clone() / e,
            qn.clone() * p.be.clone() * ph.clone() / s.clone(),
            qn.clone() * p.de1.clone() * ph.clone() / s.clone(),
            qn * p.de2.clone() * ph / s,
        ],
        &q,
        q.clone(),
    )?;
    Ok(p.short_prefactor()? * sum)
}
