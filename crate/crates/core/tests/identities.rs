use std::collections::BTreeMap;

use num_traits::One;
use qbilinear::identities::{
    bilinear_to_mf, evaluate_side, evaluate_side_with, mf_oracle, sample_case, solve_constraint, verify, verify_with,
    Correction, Reading, SamplerConfig, Side, SideValue,
};
use qbilinear::scalar::{qpow, ratio, QBase, Scalar};
use qbilinear::{IdentityCase, IdentityId};

fn q() -> QBase {
    QBase::new(ratio(1, 2)).unwrap()
}

fn case(id: IdentityId, dims: &[usize], n: usize, seed: u64) -> IdentityCase {
    sample_case(id, dims, &q(), n, seed, &SamplerConfig::default()).unwrap()
}

#[test]
fn mf_sampling_succeeds_for_large_signature() {
    let ok = (0..100)
        .filter(|&seed| sample_case(IdentityId::Mf, &[2, 2, 2, 2], &q(), 3, seed, &SamplerConfig::default()).is_ok())
        .count();
    assert!(ok >= 95, "only {ok} of 100 seeds sampled");
}

#[test]
fn sears_sample_is_balanced() {
    for seed in 0..5 {
        let c = case(IdentityId::Sears, &[], 4, seed);
        let v = |s: &str| c.get(s).unwrap().clone();
        assert_eq!(v("a") * v("b") * v("c"), v("d") * v("e") * v("f") * qpow(q().value(), 3));
    }
}

#[test]
fn terminating_identities_are_one_at_n_zero() {
    let one = SideValue::Exact(Scalar::one());
    for id in [IdentityId::Sears, IdentityId::Mf, IdentityId::Phiw, IdentityId::Phiw1] {
        let dims = id.signatures()[0].clone();
        let c = case(id, &dims, 0, 1);
        let report = verify(&c).unwrap();
        assert!(report.equal, "{id}");
        assert_eq!(report.lhs, serde_json::json!("1/1"), "{id}");
        if id != IdentityId::Sears {
            assert_eq!(evaluate_side::<Scalar>(&c, Side::Lhs).unwrap(), one, "{id}");
        }
    }
}

#[test]
fn gbl_lhs_equals_oracle() {
    for seed in 0..5 {
        let c = case(IdentityId::Gbl, &[], 3, seed);
        let (lhs, rhs) = mf_oracle::<Scalar>(&c).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(evaluate_side::<Scalar>(&c, Side::Lhs).unwrap(), SideValue::Exact(lhs));
    }
}

#[test]
fn gbl_rhs_needs_factor_swap() {
    let c = case(IdentityId::Gbl, &[], 2, 4);
    let (_, oracle_rhs) = mf_oracle::<Scalar>(&c).unwrap();
    let literal = evaluate_side::<Scalar>(&c, Side::Rhs).unwrap();
    assert_ne!(literal, SideValue::Exact(oracle_rhs.clone()));
    let swapped = evaluate_side_with::<Scalar>(&c, Side::Rhs, &Reading::of(&[Correction::GblSwapEpsilonPhi])).unwrap();
    assert_eq!(swapped, SideValue::Exact(oracle_rhs));
}

#[test]
fn solving_gbl_for_phi() {
    let c = case(IdentityId::Gbl, &[], 2, 9);
    let mut partial: BTreeMap<String, Scalar> = c.assignment.clone();
    let phi = partial.remove("phi").unwrap();
    let solved = solve_constraint(IdentityId::Gbl, &[], 2, &q(), &partial, "phi").unwrap();
    assert_eq!(solved, phi);
    // t^3 sigma^3 q^{N+4} / (b c d1 d2 e f beta gamma delta1 delta2 epsilon)
    let v = |s: &str| partial[s].clone();
    let mut expected = (v("t") * v("sigma")).pow(3) * qpow(q().value(), 6);
    for s in ["b", "c", "d1", "d2", "e", "f", "beta", "gamma", "delta1", "delta2", "epsilon"] {
        expected /= v(s);
    }
    assert_eq!(solved, expected);
}

#[test]
fn bilinear_image_is_a_master_formula_case() {
    let c = case(IdentityId::M21, &[], 3, 2);
    let mf = bilinear_to_mf(&c).unwrap();
    assert_eq!(mf.identity, IdentityId::Mf);
    let report = verify(&mf).unwrap();
    assert!(report.equal);
    assert_eq!(report.reading, vec![Correction::MfReciprocalWeights]);
}

#[test]
fn violated_constraint_is_an_error() {
    let mut c = case(IdentityId::Sears, &[], 2, 3);
    c.assignment.insert("f".into(), ratio(7, 3));
    assert!(evaluate_side::<Scalar>(&c, Side::Lhs).is_err());
}

#[test]
fn etg_report_has_coefficient_lists() {
    let c = case(IdentityId::Etg, &[2, 2], 6, 0);
    let report = verify(&c).unwrap();
    assert!(report.equal);
    assert_eq!(report.lhs.as_array().unwrap().len(), 7);
    assert_eq!(report.lhs, report.rhs);
}

#[test]
fn float_mode_matches_exact_on_mf() {
    let c = case(IdentityId::Mf, &[1, 2, 1, 2], 2, 3);
    let exact = verify(&c).unwrap();
    let float = verify_with::<f64>(&c).unwrap();
    assert!(exact.equal && float.equal);
    assert_eq!(float.mode, "float");
    assert_eq!(float.reading, exact.reading);
}
