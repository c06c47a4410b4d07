//! Independent evaluations through the master formula: the bilinear
//! identities are specializations of it, and so is Whipple-Sears at
//! dimensions (1,1,1,1).

use std::collections::BTreeMap;

use num_traits::One;

use super::eval::mf_packs;
use super::{evaluate_side_with, Correction, IdentityCase, IdentityId, Reading, Side, SideValue};
use crate::error::{Error, Result};
use crate::scalar::{poch_ratio, qpow, Field, Scalar};

fn insert(map: &mut BTreeMap<String, Scalar>, name: &str, values: &[Scalar]) {
    for (i, v) in values.iter().enumerate() {
        map.insert(format!("{name}{}", i + 1), v.clone());
    }
}

fn slot(case: &IdentityCase, name: &str) -> Result<Scalar> {
    case.get(name).cloned()
}

/// Master-formula parameters realizing a GBL, M21 or M1M21 case. The
/// first factor uses `x = (1, 1/t)` and `y_1 = 1`; the second uses
/// `z = (1, q^{-N}/sigma)` and `w_1 = 1`.
pub fn bilinear_to_mf(case: &IdentityCase) -> Result<IdentityCase> {
    let (m1, m2) = match case.identity {
        IdentityId::Gbl => (2, 2),
        IdentityId::M21 => (2, 1),
        IdentityId::M1m21 => (1, 1),
        other => return Err(Error::Unmappable(format!("{other} is not a bilinear identity"))),
    };
    let q = case.q.value().clone();
    let one = Scalar::one();
    let v = |s: &str| slot(case, s);
    let (t, b, d1, d2, e) = (v("t")?, v("b")?, v("d1")?, v("d2")?, v("e")?);
    let (s, be, de1, de2, ph) = (v("sigma")?, v("beta")?, v("delta1")?, v("delta2")?, v("phi")?);

    let x = vec![one.clone(), one.clone() / &t];
    let (a, by, cy) = if m1 == 2 {
        let (c, f) = (v("c")?, v("f")?);
        (
            vec![b.clone(), &c / &t],
            vec![d1.clone(), d2.clone()],
            vec![&q * &t / &e, &q * &t / &f],
        )
    } else {
        (vec![b.clone(), &d1 / &t], vec![d2.clone()], vec![&q * &t / &e])
    };
    let c_mf = cy[0].clone();
    let y: Vec<Scalar> = cy.iter().map(|v| v / &c_mf).collect();
    let bb: Vec<Scalar> = by.iter().zip(&y).map(|(v, yk)| v / yk).collect();

    let x2 = qpow(&q, -(case.n as i64)) / &s;
    let z = vec![one.clone(), x2.clone()];
    let (ap, bw, fw) = if m2 == 2 {
        let (ga, ep) = (v("gamma")?, v("epsilon")?);
        (
            vec![be.clone(), &ga * &x2],
            vec![de1.clone(), de2.clone()],
            vec![&s * &q / &ep, &s * &q / &ph],
        )
    } else {
        (vec![be.clone(), &de1 * &x2], vec![de2.clone()], vec![&s * &q / &ph])
    };
    let f_mf = fw[0].clone();
    let w: Vec<Scalar> = fw.iter().map(|v| v / &f_mf).collect();
    let bp: Vec<Scalar> = bw.iter().zip(&w).map(|(v, wk)| v / wk).collect();
    let e_mf: Vec<Scalar> = ap.iter().map(|v| &f_mf / v).collect();
    let d_mf: Vec<Scalar> = bp.iter().map(|v| &f_mf / v).collect();

    let mut assignment = BTreeMap::new();
    insert(&mut assignment, "a", &a);
    insert(&mut assignment, "x", &x);
    insert(&mut assignment, "b", &bb);
    insert(&mut assignment, "y", &y);
    assignment.insert("c".into(), c_mf);
    insert(&mut assignment, "d", &d_mf);
    insert(&mut assignment, "w", &w);
    insert(&mut assignment, "e", &e_mf);
    insert(&mut assignment, "z", &z);
    assignment.insert("f".into(), f_mf);

    let mut mf = IdentityCase::new(IdentityId::Mf, vec![2, m1, 2, m2], case.q.clone(), case.n, assignment)?;
    mf.seed = case.seed;
    if !mf.constraint_holds()? {
        return Err(Error::Unmappable(
            "image parameters violate AB/c^m1 = DE/f^n2; the bilinear constraint does not hold".into(),
        ));
    }
    Ok(mf)
}

/// Both sides of a bilinear case evaluated through the master formula and
/// normalized to be directly comparable with the printed sides.
pub fn mf_oracle<F: Field>(case: &IdentityCase) -> Result<(F, F)> {
    let mf = bilinear_to_mf(case)?;
    let reading = Reading::of(&[Correction::MfReciprocalWeights]);
    let lhs = exact(evaluate_side_with::<F>(&mf, Side::Lhs, &reading)?);
    let rhs = exact(evaluate_side_with::<F>(&mf, Side::Rhs, &reading)?);

    let packs = mf_packs::<F>(&mf)?;
    let second = &packs.second;
    let x2 = second.x[1].clone();
    let mut nums = vec![second.a[0].clone() * x2.clone(), second.a[1].clone()];
    let mut dens = vec![x2.clone(), second.q.clone()];
    for (bk, wk) in second.b.iter().zip(&second.y) {
        nums.push(bk.clone() * x2.clone() * wk.clone());
        dens.push(second.c.clone() * x2.clone() * wk.clone());
    }
    let norm = packs.lambda.powi(mf.n as i64) * poch_ratio(&nums, &dens, &second.q, mf.n)?;
    if norm.vanishes() {
        return Err(Error::Pole {
            factor: "oracle normalization".into(),
        });
    }
    Ok((lhs / norm.clone(), rhs / norm))
}

fn exact<F: Field>(v: SideValue<F>) -> F {
    match v {
        SideValue::Exact(x) => x,
        SideValue::Coefficients(_) => unreachable!("master formula sides are exact"),
    }
}

/// Whipple-Sears parameters and the prefactor `P` with
/// `MF side = P * Sears side` for a (1,1,1,1) master-formula case.
pub fn sears_from_mf(case: &IdentityCase) -> Result<(IdentityCase, Scalar)> {
    if case.identity != IdentityId::Mf || case.dims != [1, 1, 1, 1] {
        return Err(Error::Unmappable("Sears reduction needs an MF case with dims (1,1,1,1)".into()));
    }
    let q = case.q.value().clone();
    let n = case.n;
    let v = |s: &str| slot(case, s);
    let (a, x, b, y, c) = (v("a1")?, v("x1")?, v("b1")?, v("y1")?, v("c")?);
    let (d, w, e, z, f) = (v("d1")?, v("w1")?, v("e1")?, v("z1")?, v("f")?);
    let b_hat = &b * &x * &y;
    let c_hat = &c * &x * &y;
    let e_hat = &e * &w * &z;
    let f_hat = &f * &w * &z;
    let shift = qpow(&q, 1 - n as i64) / &f_hat;

    let assignment: BTreeMap<String, Scalar> = [
        ("a", shift.clone()),
        ("b", a.clone()),
        ("c", b_hat),
        ("d", c_hat),
        ("e", &shift * &e_hat),
        ("f", &shift * &d),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let mut sears = IdentityCase::new(IdentityId::Sears, vec![], case.q.clone(), n, assignment)?;
    sears.seed = case.seed;
    if !sears.constraint_holds()? {
        return Err(Error::Unmappable("image violates the Sears balancing condition".into()));
    }

    let lambda = &a * &b / &c;
    let prefactor = qpow(&lambda, n as i64)
        * poch_ratio(&[&f_hat / &e_hat, &f_hat / &d], &[q.clone(), f_hat.clone()], &q, n)?;
    Ok((sears, prefactor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::{evaluate_side, sample_case, SamplerConfig};
    use crate::scalar::{ratio, QBase};

    fn q() -> QBase {
        QBase::new(ratio(1, 2)).unwrap()
    }

    #[test]
    fn oracle_at_n_zero_is_one() {
        for id in [IdentityId::Gbl, IdentityId::M21, IdentityId::M1m21] {
            let case = sample_case(id, &[], &q(), 0, 3, &SamplerConfig::default()).unwrap();
            let (l, r) = mf_oracle::<Scalar>(&case).unwrap();
            assert!(l.is_one() && r.is_one(), "{id}");
        }
    }

    #[test]
    fn image_satisfies_master_constraint() {
        for id in [IdentityId::Gbl, IdentityId::M21, IdentityId::M1m21] {
            for seed in 0..3 {
                let case = sample_case(id, &[], &q(), 2, seed, &SamplerConfig::default()).unwrap();
                let mf = bilinear_to_mf(&case).unwrap();
                assert!(mf.constraint_holds().unwrap());
                assert_eq!(mf.get("x1").unwrap(), &Scalar::one());
                assert_eq!(mf.get("y1").unwrap(), &Scalar::one());
                assert_eq!(mf.get("w1").unwrap(), &Scalar::one());
            }
        }
    }

    #[test]
    fn broken_constraint_is_unmappable() {
        let mut case = sample_case(IdentityId::M1m21, &[], &q(), 2, 1, &SamplerConfig::default()).unwrap();
        let phi = case.assignment["phi"].clone();
        case.assignment.insert("phi".into(), phi * ratio(3, 2));
        assert!(matches!(bilinear_to_mf(&case), Err(Error::Unmappable(_))));
    }

    #[test]
    fn printed_m1m21_rhs_matches_oracle() {
        let case = sample_case(IdentityId::M1m21, &[], &q(), 3, 8, &SamplerConfig::default()).unwrap();
        let (_, rhs) = mf_oracle::<Scalar>(&case).unwrap();
        assert_eq!(evaluate_side::<Scalar>(&case, Side::Rhs).unwrap(), SideValue::Exact(rhs));
    }

    #[test]
    fn mf_reduces_to_sears() {
        let reading = Reading::of(&[Correction::MfReciprocalWeights]);
        let sears_reading = Reading::of(&[Correction::SearsRestoreTerminator]);
        for seed in 0..4 {
            let mf = sample_case(IdentityId::Mf, &[1, 1, 1, 1], &q(), 3, seed, &SamplerConfig::default()).unwrap();
            let (sears, p) = sears_from_mf(&mf).unwrap();
            for side in [Side::Lhs, Side::Rhs] {
                let big = evaluate_side_with::<Scalar>(&mf, side, &reading).unwrap();
                let small = evaluate_side_with::<Scalar>(&sears, side, &sears_reading).unwrap();
                assert_eq!(big.exact().unwrap(), &(p.clone() * small.exact().unwrap()));
            }
        }
    }
}
