use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::IdentityId;
use crate::error::{Error, Result};
use crate::scalar::{QBase, Scalar};

/// The balancing condition `prod slot^e * q^p = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialConstraint {
    pub exponents: BTreeMap<String, i32>,
    pub q_power: i64,
}

impl MonomialConstraint {
    fn from_terms(terms: &[(&str, i32)], q_power: i64) -> Self {
        let mut exponents = BTreeMap::new();
        for (slot, e) in terms {
            *exponents.entry(slot.to_string()).or_insert(0) += e;
        }
        exponents.retain(|_, e| *e != 0);
        MonomialConstraint { exponents, q_power }
    }

    fn monomial(&self, assignment: &BTreeMap<String, Scalar>, q: &QBase, skip: Option<&str>) -> Result<Scalar> {
        let mut value = crate::scalar::qpow(q.value(), self.q_power);
        for (slot, &e) in &self.exponents {
            if Some(slot.as_str()) == skip {
                continue;
            }
            let v = assignment
                .get(slot)
                .ok_or_else(|| Error::MissingSlot(slot.clone()))?;
            if v.is_zero() {
                return Err(Error::Inconsistent(format!("slot {slot} is zero")));
            }
            value *= crate::scalar::qpow(v, e as i64);
        }
        Ok(value)
    }

    pub fn holds(&self, assignment: &BTreeMap<String, Scalar>, q: &QBase) -> Result<bool> {
        Ok(self.monomial(assignment, q, None)?.is_one())
    }

    /// Value of `slot` that makes the constraint hold given every other slot.
    pub fn solve(&self, assignment: &BTreeMap<String, Scalar>, q: &QBase, slot: &str) -> Result<Scalar> {
        let e = self.exponents.get(slot).copied().unwrap_or(0);
        if e.abs() != 1 {
            return Err(Error::NotLinearlySolvable {
                slot: slot.to_string(),
                degree: e.abs(),
            });
        }
        let rest = self.monomial(assignment, q, Some(slot))?;
        Ok(if e == 1 { rest.recip() } else { rest })
    }
}

/// The balancing constraint of an identity, if it has one.
pub fn constraint_for(id: IdentityId, dims: &[usize], n: usize) -> Option<MonomialConstraint> {
    let n = n as i64;
    match id {
        IdentityId::Sears => Some(MonomialConstraint::from_terms(
            &[("a", 1), ("b", 1), ("c", 1), ("d", -1), ("e", -1), ("f", -1)],
            1 - n,
        )),
        IdentityId::Mf => {
            let (n1, m1, n2, m2) = (dims[0], dims[1], dims[2], dims[3]);
            let mut terms: Vec<(String, i32)> = Vec::new();
            terms.extend((1..=n1).map(|i| (format!("a{i}"), 1)));
            terms.extend((1..=m1).map(|i| (format!("b{i}"), 1)));
            terms.push(("c".into(), -(m1 as i32)));
            terms.extend((1..=m2).map(|i| (format!("d{i}"), -1)));
            terms.extend((1..=n2).map(|i| (format!("e{i}"), -1)));
            terms.push(("f".into(), n2 as i32));
            let borrowed: Vec<(&str, i32)> = terms.iter().map(|(s, e)| (s.as_str(), *e)).collect();
            Some(MonomialConstraint::from_terms(&borrowed, 0))
        }
        IdentityId::Gbl => Some(MonomialConstraint::from_terms(
            &[
                ("t", 3),
                ("sigma", 3),
                ("b", -1),
                ("c", -1),
                ("d1", -1),
                ("d2", -1),
                ("e", -1),
                ("f", -1),
                ("beta", -1),
                ("gamma", -1),
                ("delta1", -1),
                ("delta2", -1),
                ("epsilon", -1),
                ("phi", -1),
            ],
            n + 4,
        )),
        IdentityId::M21 => Some(MonomialConstraint::from_terms(
            &[
                ("t", 3),
                ("sigma", 2),
                ("b", -1),
                ("c", -1),
                ("d1", -1),
                ("d2", -1),
                ("e", -1),
                ("f", -1),
                ("beta", -1),
                ("delta1", -1),
                ("delta2", -1),
                ("phi", -1),
            ],
            n + 3,
        )),
        IdentityId::M1m21 => Some(MonomialConstraint::from_terms(
            &[
                ("t", 2),
                ("sigma", 2),
                ("b", -1),
                ("d1", -1),
                ("d2", -1),
                ("e", -1),
                ("beta", -1),
                ("delta1", -1),
                ("delta2", -1),
                ("phi", -1),
            ],
            n + 2,
        )),
        _ => None,
    }
}

/// Solves the constraint of `id` for `free_slot`, all other slots taken
/// from `partial`. Identities without a constraint report an error.
pub fn solve_constraint(
    id: IdentityId,
    dims: &[usize],
    n: usize,
    q: &QBase,
    partial: &BTreeMap<String, Scalar>,
    free_slot: &str,
) -> Result<Scalar> {
    let c = constraint_for(id, dims, n)
        .ok_or_else(|| Error::Inconsistent(format!("{id} has no balancing constraint")))?;
    c.solve(partial, q, free_slot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    fn q() -> QBase {
        QBase::new(ratio(1, 2)).unwrap()
    }

    fn sears_partial() -> BTreeMap<String, Scalar> {
        [("a", int(3)), ("b", ratio(2, 5)), ("c", int(-7)), ("d", ratio(1, 3)), ("e", int(5))]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect()
    }

    #[test]
    fn sears_solution_satisfies_constraint() {
        let mut p = sears_partial();
        let f = solve_constraint(IdentityId::Sears, &[], 3, &q(), &p, "f").unwrap();
        p.insert("f".into(), f.clone());
        assert!(constraint_for(IdentityId::Sears, &[], 3).unwrap().holds(&p, &q()).unwrap());
        // a b c = d e f q^{N-1}: 3 * 2/5 * -7 = 1/3 * 5 * f / 4
        assert_eq!(f, ratio(-504, 25));
    }

    #[test]
    fn missing_and_nonlinear_slots() {
        let p = sears_partial();
        assert_eq!(
            solve_constraint(IdentityId::Sears, &[], 3, &q(), &p, "a").unwrap_err(),
            Error::MissingSlot("f".into())
        );
        let mut full = p.clone();
        full.insert("f".into(), int(1));
        let err = solve_constraint(IdentityId::Gbl, &[], 1, &q(), &full, "t").unwrap_err();
        assert!(matches!(err, Error::NotLinearlySolvable { degree: 3, .. }));
        assert!(solve_constraint(IdentityId::Heine3, &[], 1, &q(), &full, "a").is_err());
    }

    #[test]
    fn mf_exponents() {
        let c = constraint_for(IdentityId::Mf, &[2, 1, 2, 2], 0).unwrap();
        assert_eq!(c.exponents["c"], -1);
        assert_eq!(c.exponents["f"], 2);
        assert_eq!(c.exponents["a1"], 1);
        assert_eq!(c.exponents["d2"], -1);
        assert!(!c.exponents.contains_key("x1"));
    }

    #[test]
    fn mf_solve_for_f() {
        let mut p: BTreeMap<String, Scalar> = [
            ("a1", ratio(2, 3)),
            ("b1", ratio(-5, 7)),
            ("c", int(3)),
            ("d1", ratio(1, 4)),
            ("e1", int(6)),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        // m1 = n2 = 1: f = D E c / (A B)
        let f = solve_constraint(IdentityId::Mf, &[1, 1, 1, 1], 0, &q(), &p, "f").unwrap();
        assert_eq!(f, ratio(1, 4) * int(6) * int(3) / (ratio(2, 3) * ratio(-5, 7)));
        p.insert("a2".into(), ratio(9, 2));
        p.insert("e2".into(), int(-2));
        let err = solve_constraint(IdentityId::Mf, &[2, 1, 2, 1], 0, &q(), &p, "f").unwrap_err();
        assert!(matches!(err, Error::NotLinearlySolvable { degree: 2, .. }));
        assert!(err.to_string().contains("choose another slot"));
    }
}
