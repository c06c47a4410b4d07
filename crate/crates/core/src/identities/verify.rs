use std::time::Instant;

use serde::Serialize;

use super::{evaluate_side_with, mf_oracle, Correction, IdentityCase, Reading, Side, SideValue};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// A printed factor group that had to be read differently.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Erratum {
    pub side: Side,
    pub corrections: Vec<Correction>,
    pub descriptions: Vec<&'static str>,
    /// Why the literal transcription failed: a mismatch or an evaluation error.
    pub literal: String,
}

/// Master-formula evaluation of a bilinear case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub case: IdentityCase,
    pub mode: &'static str,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    pub equal: bool,
    /// Corrections applied to obtain `lhs` and `rhs`.
    pub reading: Vec<Correction>,
    /// Every candidate reading that restores agreement.
    pub restoring_readings: Vec<Vec<Correction>>,
    pub errata: Vec<Erratum>,
    pub oracle: Option<OracleCheck>,
    pub diagnostics: Vec<String>,
    pub timing_ms: f64,
}

impl VerificationReport {
    pub fn to_json(&self, include_timing: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "case": self.case.to_json(),
            "mode": self.mode,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "equal": self.equal,
            "reading": self.reading,
            "restoring_readings": self.restoring_readings,
            "errata": self.errata,
            "oracle": self.oracle,
            "diagnostics": self.diagnostics,
        });
        if include_timing {
            v["timing_ms"] = serde_json::json!(self.timing_ms);
        }
        v
    }
}

/// Exact verification of one case.
pub fn verify(case: &IdentityCase) -> Result<VerificationReport> {
    verify_with::<Scalar>(case)
}

/// Verification in the field `F`. The literal transcription is tried
/// first; on failure every combination of the identity's candidate
/// corrections is tried and the smallest restoring one is reported as an
/// erratum. Bilinear identities compare each printed side separately with
/// the master-formula oracle.
pub fn verify_with<F: Field>(case: &IdentityCase) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = if case.identity.is_bilinear() {
        verify_bilinear::<F>(case)?
    } else {
        verify_pair::<F>(case)?
    };
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn describe<F: Field>(outcome: &Result<SideValue<F>>) -> String {
    match outcome {
        Ok(_) => "literal transcription disagrees".into(),
        Err(e) => format!("literal transcription not evaluable: {e}"),
    }
}

fn erratum(side: Side, reading: &Reading, literal: String) -> Erratum {
    Erratum {
        side,
        corrections: reading.corrections().to_vec(),
        descriptions: reading.corrections().iter().map(|c| c.description()).collect(),
        literal,
    }
}

fn blank(case: &IdentityCase, mode: &'static str) -> VerificationReport {
    VerificationReport {
        case: case.clone(),
        mode,
        lhs: serde_json::Value::Null,
        rhs: serde_json::Value::Null,
        equal: false,
        reading: Vec::new(),
        restoring_readings: Vec::new(),
        errata: Vec::new(),
        oracle: None,
        diagnostics: Vec::new(),
        timing_ms: 0.0,
    }
}

/// Prefers a pole or termination failure over a malformed-shape error so
/// samplers retry when a well-formed reading hits a singular point.
fn pick_error(current: Option<Error>, new: Error) -> Option<Error> {
    match current {
        None => Some(new),
        Some(Error::Shape(_)) if !matches!(new, Error::Shape(_)) => Some(new),
        keep => keep,
    }
}

fn verify_pair<F: Field>(case: &IdentityCase) -> Result<VerificationReport> {
    let mut report = blank(case, F::MODE);
    let evaluate = |reading: &Reading| -> Result<(SideValue<F>, SideValue<F>)> {
        Ok((
            evaluate_side_with::<F>(case, Side::Lhs, reading)?,
            evaluate_side_with::<F>(case, Side::Rhs, reading)?,
        ))
    };
    let candidates = Reading::candidates(case.identity.definition().corrections);
    let mut chosen: Option<(Reading, SideValue<F>, SideValue<F>)> = None;
    let mut fallback: Option<(SideValue<F>, SideValue<F>)> = None;
    let mut error: Option<Error> = None;
    let mut literal_note = String::new();

    for reading in &candidates {
        match evaluate(reading) {
            Ok((l, r)) => {
                if l.matches(&r) {
                    report.restoring_readings.push(reading.corrections().to_vec());
                    if chosen.is_none() {
                        chosen = Some((reading.clone(), l, r));
                    }
                    if reading.is_literal() {
                        break;
                    }
                } else {
                    if reading.is_literal() {
                        literal_note = "literal transcription disagrees".into();
                    }
                    if fallback.is_none() {
                        fallback = Some((l, r));
                    }
                }
            }
            Err(e) => {
                if reading.is_literal() {
                    literal_note = format!("literal transcription not evaluable: {e}");
                }
                error = pick_error(error, e);
            }
        }
    }

    match chosen {
        Some((reading, l, r)) => {
            report.lhs = l.to_json();
            report.rhs = r.to_json();
            report.equal = true;
            if !reading.is_literal() {
                let side = side_of(&reading);
                report.errata.push(erratum(side, &reading, literal_note));
            }
            if report.restoring_readings.len() > 1 {
                report
                    .diagnostics
                    .push(format!("{} readings restore agreement; the smallest is applied", report.restoring_readings.len()));
            }
            report.reading = reading.corrections().to_vec();
        }
        None => match fallback {
            Some((l, r)) => {
                report.lhs = l.to_json();
                report.rhs = r.to_json();
                report.diagnostics.push("no candidate reading restores agreement".into());
            }
            None => return Err(error.expect("at least one reading was evaluated")),
        },
    }
    Ok(report)
}

fn side_of(reading: &Reading) -> Side {
    let mut sides = reading.corrections().iter().map(|c| c.side());
    let first = sides.next().unwrap_or(Side::Both);
    if sides.all(|s| s == first) {
        first
    } else {
        Side::Both
    }
}

fn verify_bilinear<F: Field>(case: &IdentityCase) -> Result<VerificationReport> {
    let mut report = blank(case, F::MODE);
    let (oracle_lhs, oracle_rhs) = mf_oracle::<F>(case)?;
    let oracle_equal = oracle_lhs.matches(&oracle_rhs);
    report.oracle = Some(OracleCheck {
        lhs: oracle_lhs.to_json(),
        rhs: oracle_rhs.to_json(),
        equal: oracle_equal,
    });
    if !oracle_equal {
        report.diagnostics.push("master-formula oracle sides disagree".into());
    }

    let corrections = case.identity.definition().corrections;
    let mut localized = true;
    let mut applied: Vec<Correction> = Vec::new();
    let mut restoring_union: Vec<Vec<Correction>> = vec![Vec::new()];
    for (side, target) in [(Side::Lhs, &oracle_lhs), (Side::Rhs, &oracle_rhs)] {
        let own: Vec<Correction> = corrections.iter().copied().filter(|c| c.side() == side).collect();
        let target = SideValue::Exact(target.clone());
        let literal = evaluate_side_with::<F>(case, side, &Reading::literal());
        let mut restoring: Vec<(Reading, SideValue<F>)> = Vec::new();
        let mut error: Option<Error> = None;
        for reading in Reading::candidates(&own) {
            let value = if reading.is_literal() {
                literal.clone()
            } else {
                evaluate_side_with::<F>(case, side, &reading)
            };
            match value {
                Ok(v) if v.matches(&target) => {
                    let done = reading.is_literal();
                    restoring.push((reading, v));
                    if done {
                        break;
                    }
                }
                Ok(_) => {}
                Err(e) => error = pick_error(error, e),
            }
        }
        // Combined restoring readings across both sides, for the report.
        restoring_union = restoring_union
            .iter()
            .flat_map(|prefix| {
                restoring.iter().map(move |(r, _)| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(r.corrections());
                    v
                })
            })
            .collect();
        let value = match restoring.first() {
            Some((reading, v)) => {
                if !reading.is_literal() {
                    report.errata.push(erratum(side, reading, describe(&literal)));
                    applied.extend_from_slice(reading.corrections());
                }
                v.to_json()
            }
            None => {
                localized = false;
                report
                    .diagnostics
                    .push(format!("{side} disagrees with the oracle under every candidate reading"));
                match &literal {
                    Ok(v) => v.to_json(),
                    Err(_) => return Err(error.expect("literal evaluation failed")),
                }
            }
        };
        match side {
            Side::Lhs => report.lhs = value,
            _ => report.rhs = value,
        }
    }
    report.reading = applied;
    report.restoring_readings = if localized { restoring_union } else { Vec::new() };
    report.equal = oracle_equal && localized;
    Ok(report)
}
