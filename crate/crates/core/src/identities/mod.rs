//! Registry of the transformation formulas, their parameter slots and
//! balancing constraints, admissible sampling, evaluation and verification.

mod constraint;
mod eval;
mod oracle;
mod sample;
mod verify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_scalar, Field, QBase, Scalar};

pub use constraint::{constraint_for, solve_constraint, MonomialConstraint};
pub use eval::{evaluate_side, evaluate_side_with, Side, SideValue};
pub use oracle::{bilinear_to_mf, mf_oracle, sears_from_mf};
pub use sample::{sample_case, sample_with_guard, SamplerConfig, DEFAULT_RETRY_BUDGET, RETRY_BUDGET_ENV};
pub use verify::{verify, verify_with, Erratum, OracleCheck, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IdentityId {
    Heine3,
    Etg,
    Sears,
    Mf,
    Phiw,
    Phiw1,
    Gbl,
    M21,
    M1m21,
}

impl IdentityId {
    pub const ALL: [IdentityId; 9] = [
        IdentityId::Heine3,
        IdentityId::Etg,
        IdentityId::Sears,
        IdentityId::Mf,
        IdentityId::Phiw,
        IdentityId::Phiw1,
        IdentityId::Gbl,
        IdentityId::M21,
        IdentityId::M1m21,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityId::Heine3 => "HEINE3",
            IdentityId::Etg => "ETG",
            IdentityId::Sears => "SEARS",
            IdentityId::Mf => "MF",
            IdentityId::Phiw => "PHIW",
            IdentityId::Phiw1 => "PHIW1",
            IdentityId::Gbl => "GBL",
            IdentityId::M21 => "M21",
            IdentityId::M1m21 => "M1M21",
        }
    }

    pub fn definition(self) -> &'static IdentityDefinition {
        CATALOG
            .iter()
            .find(|d| d.id == self)
            .expect("every id has a catalog row")
    }

    pub fn is_bilinear(self) -> bool {
        matches!(self, IdentityId::Gbl | IdentityId::M21 | IdentityId::M1m21)
    }

    /// Dimension signatures exercised by default campaigns.
    pub fn signatures(self) -> Vec<Vec<usize>> {
        match self {
            IdentityId::Mf => {
                let mut out = Vec::with_capacity(16);
                for n1 in 1..=2 {
                    for m1 in 1..=2 {
                        for n2 in 1..=2 {
                            for m2 in 1..=2 {
                                out.push(vec![n1, m1, n2, m2]);
                            }
                        }
                    }
                }
                out
            }
            IdentityId::Etg => vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]],
            IdentityId::Phiw => vec![vec![1], vec![2]],
            IdentityId::Phiw1 => vec![vec![1], vec![2], vec![3]],
            _ => vec![vec![]],
        }
    }

    /// Checks a dimension signature; fixed-shape identities take `[]`.
    pub fn check_dims(self, dims: &[usize]) -> Result<()> {
        let ok = match self {
            IdentityId::Mf => dims.len() == 4,
            IdentityId::Etg => dims.len() == 2,
            IdentityId::Phiw | IdentityId::Phiw1 => dims.len() == 1,
            _ => dims.is_empty(),
        } && dims.iter().all(|&d| (1..=3).contains(&d));
        if ok {
            Ok(())
        } else {
            Err(Error::Dimensions {
                identity: self.to_string(),
                dims: dims.to_vec(),
            })
        }
    }

    /// Parameter slots in canonical order.
    pub fn slots(self, dims: &[usize]) -> Vec<String> {
        fn indexed(out: &mut Vec<String>, name: &str, count: usize) {
            out.extend((1..=count).map(|i| format!("{name}{i}")));
        }
        let fixed = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        match self {
            IdentityId::Heine3 => fixed(&["a", "b", "c"]),
            IdentityId::Sears => fixed(&["a", "b", "c", "d", "e", "f"]),
            IdentityId::Etg => {
                let mut out = Vec::new();
                indexed(&mut out, "a", dims[0]);
                indexed(&mut out, "x", dims[0]);
                indexed(&mut out, "b", dims[1]);
                indexed(&mut out, "y", dims[1]);
                out.push("c".into());
                out
            }
            IdentityId::Mf => {
                let (n1, m1, n2, m2) = (dims[0], dims[1], dims[2], dims[3]);
                let mut out = Vec::new();
                indexed(&mut out, "a", n1);
                indexed(&mut out, "x", n1);
                indexed(&mut out, "b", m1);
                indexed(&mut out, "y", m1);
                out.push("c".into());
                indexed(&mut out, "d", m2);
                indexed(&mut out, "w", m2);
                indexed(&mut out, "e", n2);
                indexed(&mut out, "z", n2);
                out.push("f".into());
                out
            }
            IdentityId::Phiw => {
                let mut out = fixed(&["a1", "a2", "x1", "x2"]);
                indexed(&mut out, "b", dims[0]);
                indexed(&mut out, "y", dims[0]);
                out.push("c".into());
                out
            }
            IdentityId::Phiw1 => {
                let mut out = vec!["a".to_string()];
                indexed(&mut out, "b", dims[0]);
                indexed(&mut out, "y", dims[0]);
                out.push("c".into());
                out
            }
            IdentityId::Gbl => fixed(&[
                "t", "b", "c", "d1", "d2", "e", "f", "sigma", "beta", "gamma", "delta1", "delta2",
                "epsilon", "phi",
            ]),
            IdentityId::M21 => fixed(&[
                "t", "b", "c", "d1", "d2", "e", "f", "sigma", "beta", "delta1", "delta2", "phi",
            ]),
            IdentityId::M1m21 => fixed(&["t", "b", "d1", "d2", "e", "sigma", "beta", "delta1", "delta2", "phi"]),
        }
    }

    /// Slot fixed by the balancing constraint when sampling.
    pub fn solved_slot(self) -> Option<&'static str> {
        match self {
            IdentityId::Sears => Some("f"),
            IdentityId::Mf => Some("a1"),
            IdentityId::Gbl | IdentityId::M21 | IdentityId::M1m21 => Some("phi"),
            _ => None,
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper = s.trim().to_ascii_uppercase();
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == upper)
            .ok_or_else(|| Error::Config(format!("unknown identity id {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ExactTerminating,
    FormalSeries,
}

/// A named alternative reading of one printed factor group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Correction {
    /// Whipple-Sears right side: add `q^{-N}` to the numerator parameters.
    SearsRestoreTerminator,
    /// Master formula: weights `(DE/f^{n2})^{N-K}` and `(AB/c^{m1})^L`
    /// instead of their printed reciprocals.
    MfReciprocalWeights,
    /// Phi-W right side: evaluate at `x1 = 1` via `x -> x/x1, y -> x1 y`.
    PhiwRescaleFirstVariable,
    /// Phi-W prefactor `(a_2 x_2/x_1)_N` read as `(a_1 x_2/x_1)_N`.
    PhiwPrefactorA1,
    /// Phi-W left side with the `b x_i y_k / x_n y_m` normalization.
    PhiwLastVariableNormalization,
    /// GBL right prefactor: the malformed group `(σq/γ, σq/φ, σq/β)_N`
    /// read as numerator factors.
    GblGroupInNumerator,
    /// GBL right L-sum numerator `q^{1-N} ε/φ` read as `q^{1-N} φ/ε`.
    GblSwapEpsilonPhi,
    /// M21 left: second `8W7` argument with `σ^2` instead of `σ`.
    M21SigmaSquared,
    /// M1M21 left: restore the `q^K` weight of the K-sum.
    M1m21RestoreQWeight,
}

impl Correction {
    pub fn side(self) -> Side {
        match self {
            Correction::SearsRestoreTerminator
            | Correction::PhiwRescaleFirstVariable
            | Correction::PhiwPrefactorA1
            | Correction::GblGroupInNumerator
            | Correction::GblSwapEpsilonPhi => Side::Rhs,
            Correction::PhiwLastVariableNormalization
            | Correction::M21SigmaSquared
            | Correction::M1m21RestoreQWeight => Side::Lhs,
            Correction::MfReciprocalWeights => Side::Both,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Correction::SearsRestoreTerminator => {
                "rhs 4phi3 numerator (a, d/b, d/c) completed with q^-N"
            }
            Correction::MfReciprocalWeights => {
                "weights (f^n2/DE)^(N-K) and (c^m1/AB)^L replaced by (DE/f^n2)^(N-K) and (AB/c^m1)^L"
            }
            Correction::PhiwRescaleFirstVariable => {
                "W parameterization evaluated at x1 = 1 (x -> x/x1, y -> x1*y)"
            }
            Correction::PhiwPrefactorA1 => "prefactor (a2 x2/x1)_N read as (a1 x2/x1)_N",
            Correction::PhiwLastVariableNormalization => {
                "Phi with b_k x_i y_k/(x_n y_m) and c x_i y_k/(x_n y_m) arguments"
            }
            Correction::GblGroupInNumerator => {
                "malformed group (sigma q/gamma, sigma q/phi, sigma q/beta)_N moved to the numerator"
            }
            Correction::GblSwapEpsilonPhi => {
                "L-sum numerator q^(1-N) epsilon/phi read as q^(1-N) phi/epsilon"
            }
            Correction::M21SigmaSquared => {
                "second 8W7 argument sigma q^(N+2)/(beta delta1 delta2 phi) read with sigma^2"
            }
            Correction::M1m21RestoreQWeight => "K-sum summand multiplied by the missing q^K",
        }
    }
}

/// A set of corrections applied on top of the literal transcription.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reading(Vec<Correction>);

impl Reading {
    pub fn literal() -> Self {
        Reading(Vec::new())
    }

    pub fn of(corrections: &[Correction]) -> Self {
        let mut v = corrections.to_vec();
        v.sort();
        v.dedup();
        Reading(v)
    }

    pub fn has(&self, c: Correction) -> bool {
        self.0.contains(&c)
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.0
    }

    pub fn is_literal(&self) -> bool {
        self.0.is_empty()
    }

    /// Every subset of `candidates`, smallest first, in a fixed order.
    pub fn candidates(candidates: &[Correction]) -> Vec<Reading> {
        let n = candidates.len();
        let mut masks: Vec<u32> = (0..(1u32 << n)).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
            .into_iter()
            .map(|mask| {
                let picked: Vec<Correction> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| candidates[i])
                    .collect();
                Reading::of(&picked)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityDefinition {
    pub id: IdentityId,
    pub name: &'static str,
    /// Equation label as used in the literature source.
    pub label: &'static str,
    pub dims: &'static str,
    pub constraint: &'static str,
    pub mode: Mode,
    pub corrections: &'static [Correction],
}

pub static CATALOG: [IdentityDefinition; 9] = [
    IdentityDefinition {
        id: IdentityId::Heine3,
        name: "third Heine transformation of 2phi1",
        label: "3rdHeine",
        dims: "n=m=1",
        constraint: "none",
        mode: Mode::FormalSeries,
        corrections: &[],
    },
    IdentityDefinition {
        id: IdentityId::Etg,
        name: "multiple Euler transformation, A_n vs A_m",
        label: "ETG",
        dims: "(n,m)",
        constraint: "none",
        mode: Mode::FormalSeries,
        corrections: &[],
    },
    IdentityDefinition {
        id: IdentityId::Sears,
        name: "Whipple-Sears transformation of terminating balanced 4phi3",
        label: "SearsT1",
        dims: "fixed",
        constraint: "abc = def q^(N-1)",
        mode: Mode::ExactTerminating,
        corrections: &[Correction::SearsRestoreTerminator],
    },
    IdentityDefinition {
        id: IdentityId::Mf,
        name: "master formula for bilinear sums of Phi",
        label: "MF",
        dims: "(n1,m1,n2,m2)",
        constraint: "AB/c^m1 = DE/f^n2",
        mode: Mode::ExactTerminating,
        corrections: &[Correction::MfReciprocalWeights],
    },
    IdentityDefinition {
        id: IdentityId::Phiw,
        name: "Phi^{2,m}_N as a terminating (2m+6)W(2m+5)",
        label: "Phi-W",
        dims: "(m)",
        constraint: "none",
        mode: Mode::ExactTerminating,
        corrections: &[
            Correction::PhiwRescaleFirstVariable,
            Correction::PhiwPrefactorA1,
            Correction::PhiwLastVariableNormalization,
        ],
    },
    IdentityDefinition {
        id: IdentityId::Phiw1,
        name: "Phi^{1,m}_N closed product",
        label: "Phi-W-1",
        dims: "(m)",
        constraint: "none",
        mode: Mode::ExactTerminating,
        corrections: &[],
    },
    IdentityDefinition {
        id: IdentityId::Gbl,
        name: "bilinear 10W9 x 10W9 transformation, n1=m1=n2=m2=2",
        label: "1d-GBL",
        dims: "fixed (2,2,2,2)",
        constraint: "t^3 sigma^3 q^(N+4) = b c d1 d2 e f beta gamma delta1 delta2 epsilon phi",
        mode: Mode::ExactTerminating,
        corrections: &[Correction::GblGroupInNumerator, Correction::GblSwapEpsilonPhi],
    },
    IdentityDefinition {
        id: IdentityId::M21,
        name: "bilinear 10W9 x 8W7 transformation, n1=m1=n2=2, m2=1",
        label: "1d-m21BL",
        dims: "fixed (2,2,2,1)",
        constraint: "t^3 sigma^2 q^(N+3) = b c d1 d2 e f beta delta1 delta2 phi",
        mode: Mode::ExactTerminating,
        corrections: &[Correction::M21SigmaSquared],
    },
    IdentityDefinition {
        id: IdentityId::M1m21,
        name: "bilinear 8W7 x 8W7 to 6phi5 transformation, n1=n2=2, m1=m2=1",
        label: "1d-m1m21BL",
        dims: "fixed (2,1,2,1)",
        constraint: "t^2 sigma^2 q^(N+2) = b d1 d2 e beta delta1 delta2 phi",
        mode: Mode::ExactTerminating,
        corrections: &[Correction::M1m21RestoreQWeight],
    },
];

/// One parameter assignment for one identity.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCase {
    pub identity: IdentityId,
    pub dims: Vec<usize>,
    pub q: QBase,
    /// Termination index `N`, or the truncation order for formal identities.
    pub n: usize,
    pub assignment: BTreeMap<String, Scalar>,
    pub seed: u64,
}

impl IdentityCase {
    pub fn new(
        identity: IdentityId,
        dims: Vec<usize>,
        q: QBase,
        n: usize,
        assignment: BTreeMap<String, Scalar>,
    ) -> Result<Self> {
        identity.check_dims(&dims)?;
        for slot in identity.slots(&dims) {
            if !assignment.contains_key(&slot) {
                return Err(Error::MissingSlot(slot));
            }
        }
        Ok(IdentityCase {
            identity,
            dims,
            q,
            n,
            assignment,
            seed: 0,
        })
    }

    pub fn get(&self, slot: &str) -> Result<&Scalar> {
        self.assignment
            .get(slot)
            .ok_or_else(|| Error::MissingSlot(slot.to_string()))
    }

    pub fn field<F: Field>(&self, slot: &str) -> Result<F> {
        self.get(slot).map(F::from_scalar)
    }

    /// `name1 .. name_count` converted to the evaluation field.
    pub fn indexed<F: Field>(&self, name: &str, count: usize) -> Result<Vec<F>> {
        (1..=count).map(|i| self.field(&format!("{name}{i}"))).collect()
    }

    pub fn constraint_holds(&self) -> Result<bool> {
        match constraint_for(self.identity, &self.dims, self.n) {
            Some(c) => c.holds(&self.assignment, &self.q),
            None => Ok(true),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let assignment: BTreeMap<&str, String> = self
            .assignment
            .iter()
            .map(|(k, v)| (k.as_str(), format_scalar(v)))
            .collect();
        serde_json::json!({
            "identity": self.identity,
            "dims": self.dims,
            "q": self.q.to_string(),
            "N": self.n,
            "seed": self.seed,
            "assignment": assignment,
        })
    }
}
