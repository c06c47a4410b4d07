use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{solve_constraint, verify, IdentityCase, IdentityId};
use crate::error::{Error, Result};
use crate::scalar::{ratio, QBase, Scalar};

pub const RETRY_BUDGET_ENV: &str = "QBILINEAR_RETRY_BUDGET";
pub const DEFAULT_RETRY_BUDGET: usize = 200;

/// Bounds for sampled values `p/r` with `0 < |p| <= max_numerator`,
/// `1 <= r <= max_denominator`, and the number of redraws allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub max_numerator: i64,
    pub max_denominator: i64,
    pub retry_budget: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        let retry_budget = std::env::var(RETRY_BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_RETRY_BUDGET);
        SamplerConfig {
            max_numerator: 20,
            max_denominator: 20,
            retry_budget,
        }
    }
}

fn stream_seed(id: IdentityId, dims: &[usize], q: &QBase, n: usize, seed: u64) -> u64 {
    // FNV-1a over a canonical description of the case family.
    let key = format!("{id}|{dims:?}|{q}|{n}");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in key.bytes() {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn draw(rng: &mut ChaCha8Rng, config: &SamplerConfig) -> Scalar {
    loop {
        let p = rng.gen_range(-config.max_numerator..=config.max_numerator);
        let r = rng.gen_range(1..=config.max_denominator);
        if p == 0 || p.abs() == r {
            continue;
        }
        return ratio(p, r);
    }
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::Pole { .. }
            | Error::Inconsistent(_)
            | Error::Unmappable(_)
            | Error::RequiresFormal
            | Error::CoincidentVariables { .. }
    )
}

/// Draws an admissible case: the balancing constraint is solved for the
/// identity's designated slot and every side, reading and oracle involved
/// in verification evaluates without a pole.
pub fn sample_case(
    id: IdentityId,
    dims: &[usize],
    q: &QBase,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<IdentityCase> {
    sample_with_guard(id, dims, q, n, seed, config, |case| verify(case).map(|_| ()))
}

pub fn sample_with_guard(
    id: IdentityId,
    dims: &[usize],
    q: &QBase,
    n: usize,
    seed: u64,
    config: &SamplerConfig,
    guard: impl Fn(&IdentityCase) -> Result<()>,
) -> Result<IdentityCase> {
    id.check_dims(dims)?;
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(id, dims, q, n, seed));
    let solved = id.solved_slot();
    let mut last = String::from("no attempt made");
    for _ in 0..config.retry_budget.max(1) {
        let mut assignment = BTreeMap::new();
        for slot in id.slots(dims) {
            if Some(slot.as_str()) != solved {
                assignment.insert(slot, draw(&mut rng, config));
            }
        }
        if let Some(slot) = solved {
            match solve_constraint(id, dims, n, q, &assignment, slot) {
                Ok(v) => {
                    assignment.insert(slot.to_string(), v);
                }
                Err(e) if retryable(&e) => {
                    last = e.to_string();
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        let mut case = IdentityCase::new(id, dims.to_vec(), q.clone(), n, assignment)?;
        case.seed = seed;
        match guard(&case) {
            Ok(()) => return Ok(case),
            Err(e) if retryable(&e) => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetryBudgetExhausted {
        budget: config.retry_budget,
        last,
    })
}
