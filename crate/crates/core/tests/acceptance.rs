//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_traits::{One, Zero};
use qbilinear::cli::{run_campaign, Precision, RunConfig};
use qbilinear::identities::{
    evaluate_side, evaluate_side_with, mf_oracle, sample_case, sample_with_guard, sears_from_mf, verify,
    Correction, Reading, SamplerConfig, Side, SideValue,
};
use qbilinear::powerseries::{qpoch_inf_expand, TruncatedSeries};
use qbilinear::scalar::{qpoch, qpow, ratio, QBase, Scalar};
use qbilinear::{IdentityCase, IdentityId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q() -> QBase {
    QBase::new(ratio(1, 2)).unwrap()
}

fn sampler() -> SamplerConfig {
    SamplerConfig::default()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sample(id: IdentityId, dims: &[usize], n: usize, seed: u64) -> Result<IdentityCase, String> {
    sample_case(id, dims, &q(), n, seed, &sampler()).map_err(|e| format!("{id} {dims:?} N={n} seed={seed}: {e}"))
}

// Runs `verify` on every (dims, N, seed) and requires `equal`. Returns the
// number of cases and the distinct readings seen.
fn exact_sweep(
    id: IdentityId,
    dims: &[Vec<usize>],
    ns: impl Iterator<Item = usize> + Clone,
    seeds: u64,
) -> Result<(usize, BTreeMap<String, usize>), String> {
    let mut count = 0;
    let mut readings = BTreeMap::new();
    for d in dims {
        for n in ns.clone() {
            for seed in 0..seeds {
                let case = sample(id, d, n, seed)?;
                let report = verify(&case).map_err(|e| format!("{id} {d:?} N={n} seed={seed}: {e}"))?;
                check(report.equal, || {
                    format!("{id} {d:?} N={n} seed={seed}: lhs {} != rhs {}", report.lhs, report.rhs)
                })?;
                let key = serde_json::to_string(&report.reading).unwrap();
                *readings.entry(key).or_insert(0) += 1;
                count += 1;
            }
        }
    }
    Ok((count, readings))
}

fn criterion_1() -> Outcome {
    let dims = IdentityId::Mf.signatures();
    check(dims.len() == 16, || format!("expected 16 signatures, got {}", dims.len()))?;
    let (count, readings) = exact_sweep(IdentityId::Mf, &dims, 0..4, 10)?;
    Ok(format!("{count} MF cases equal, readings {readings:?}"))
}

fn criterion_2() -> Outcome {
    let dims = IdentityId::Etg.signatures();
    check(dims == vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]], || format!("signatures {dims:?}"))?;
    let mut count = 0;
    for d in &dims {
        for seed in 0..10 {
            let case = sample(IdentityId::Etg, d, 6, seed)?;
            let lhs = evaluate_side::<Scalar>(&case, Side::Lhs).map_err(|e| e.to_string())?;
            let rhs = evaluate_side::<Scalar>(&case, Side::Rhs).map_err(|e| e.to_string())?;
            match (&lhs, &rhs) {
                (SideValue::Coefficients(l), SideValue::Coefficients(r)) => {
                    check(l.len() == 7 && l == r, || format!("{d:?} seed={seed}: {l:?} vs {r:?}"))?
                }
                _ => return Err("ETG sides are not coefficient lists".into()),
            }
            let report = verify(&case).map_err(|e| e.to_string())?;
            check(report.equal && report.errata.is_empty(), || format!("{d:?} seed={seed}: report"))?;
            count += 1;
        }
    }
    Ok(format!("{count} cases identical through u^6"))
}

fn criterion_3() -> Outcome {
    let mut count = 0;
    for seed in 0..10 {
        let heine = sample(IdentityId::Heine3, &[], 8, seed)?;
        let (a, b, c) = (heine.get("a").unwrap(), heine.get("b").unwrap(), heine.get("c").unwrap());
        let etg_assignment: BTreeMap<String, Scalar> = [
            ("a1", a.clone()),
            ("x1", Scalar::one()),
            ("b1", b.clone()),
            ("y1", Scalar::one()),
            ("c", c.clone()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        let etg = IdentityCase::new(IdentityId::Etg, vec![1, 1], q(), 8, etg_assignment).map_err(|e| e.to_string())?;
        for side in [Side::Lhs, Side::Rhs] {
            let h = evaluate_side::<Scalar>(&heine, side).map_err(|e| e.to_string())?;
            let e = evaluate_side::<Scalar>(&etg, side).map_err(|e| e.to_string())?;
            check(h == e, || format!("seed={seed} {side}: heine {h:?} etg {e:?}"))?;
        }
        let report = verify(&heine).map_err(|e| e.to_string())?;
        check(report.equal && report.errata.is_empty(), || format!("seed={seed}: heine sides differ"))?;
        count += 1;
    }
    Ok(format!("{count} cases match through u^8"))
}

fn criterion_4() -> Outcome {
    let (count, readings) = exact_sweep(IdentityId::Sears, &[vec![]], 0..7, 25)?;
    let mf_reading = Reading::of(&[Correction::MfReciprocalWeights]);
    let sears_reading = Reading::of(&[Correction::SearsRestoreTerminator]);
    let mut reduced = 0;
    for n in 0..7 {
        for seed in 0..25 {
            let guard = |case: &IdentityCase| -> qbilinear::Result<()> {
                verify(case)?;
                let (sears, _) = sears_from_mf(case)?;
                verify(&sears).map(|_| ())
            };
            let mf = sample_with_guard(IdentityId::Mf, &[1, 1, 1, 1], &q(), n, seed, &sampler(), guard)
                .map_err(|e| format!("N={n} seed={seed}: {e}"))?;
            let (sears, p) = sears_from_mf(&mf).map_err(|e| e.to_string())?;
            for side in [Side::Lhs, Side::Rhs] {
                let big = evaluate_side_with::<Scalar>(&mf, side, &mf_reading).map_err(|e| e.to_string())?;
                let small = evaluate_side_with::<Scalar>(&sears, side, &sears_reading).map_err(|e| e.to_string())?;
                let (big, small) = (big.exact().unwrap().clone(), small.exact().unwrap().clone());
                check(big == &p * &small, || format!("N={n} seed={seed} {side}: {big} != {p} * {small}"))?;
            }
            check(verify(&sears).map(|r| r.equal).unwrap_or(false), || {
                format!("N={n} seed={seed}: reduced Sears case unequal")
            })?;
            reduced += 1;
        }
    }
    Ok(format!("{count} Sears cases equal, readings {readings:?}; {reduced} MF(1,1,1,1) reductions agree"))
}

fn criterion_5() -> Outcome {
    let phiw1_dims: Vec<Vec<usize>> = (1..=3).map(|m| vec![m]).collect();
    let (c1, r1) = exact_sweep(IdentityId::Phiw1, &phiw1_dims, 0..5, 10)?;
    let phiw_dims: Vec<Vec<usize>> = (1..=2).map(|m| vec![m]).collect();
    let (c2, r2) = exact_sweep(IdentityId::Phiw, &phiw_dims, 0..5, 10)?;
    let resolution = Reading::of(&[Correction::PhiwRescaleFirstVariable, Correction::PhiwPrefactorA1]);
    let key = serde_json::to_string(resolution.corrections()).unwrap();
    check(r2.keys().all(|k| *k == key || k == "[]"), || format!("unexpected PHIW readings {r2:?}"))?;
    check(r2.contains_key(&key), || format!("resolution {key} never recorded: {r2:?}"))?;
    Ok(format!(
        "{c1} PHIW1 cases equal (readings {r1:?}); {c2} PHIW cases equal under resolution {key} (readings {r2:?})"
    ))
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    let mut errata: BTreeMap<String, usize> = BTreeMap::new();
    for id in [IdentityId::Gbl, IdentityId::M21, IdentityId::M1m21] {
        for n in 0..4 {
            for seed in 0..10 {
                let case = sample(id, &[], n, seed)?;
                let (ol, or) = mf_oracle::<Scalar>(&case).map_err(|e| e.to_string())?;
                check(ol == or, || format!("{id} N={n} seed={seed}: oracle {ol} != {or}"))?;
                let report = verify(&case).map_err(|e| e.to_string())?;
                check(report.equal, || format!("{id} N={n} seed={seed}: {:?}", report.diagnostics))?;
                for (side, target) in [(Side::Lhs, &ol), (Side::Rhs, &or)] {
                    let literal = evaluate_side::<Scalar>(&case, side);
                    let matches = matches!(&literal, Ok(SideValue::Exact(v)) if v == target);
                    let localized = report
                        .errata
                        .iter()
                        .any(|e| e.side == side && !e.corrections.is_empty());
                    check(matches || localized, || format!("{id} N={n} seed={seed}: silent {side} mismatch"))?;
                    check(!(matches && localized), || format!("{id} N={n} seed={seed}: spurious {side} erratum"))?;
                }
                for e in &report.errata {
                    let key = format!("{id}:{}:{}", e.side, serde_json::to_string(&e.corrections).unwrap());
                    *errata.entry(key).or_insert(0) += 1;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} oracle checks equal; errata {errata:?}"))
}

fn rational(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let p: i64 = rng.gen_range(-15..=15);
        let r: i64 = rng.gen_range(1..=15);
        if p != 0 && p.abs() != r {
            return ratio(p, r);
        }
    }
}

fn random_series(rng: &mut ChaCha8Rng, order: usize) -> TruncatedSeries<Scalar> {
    TruncatedSeries::from_coeffs((0..=order).map(|_| rational(rng)).collect(), order)
}

// prod_{i<m} (1 - z q^i u) by repeated multiplication by a linear factor.
fn finite_product(z: &Scalar, q: &Scalar, m: usize, order: usize) -> Vec<Scalar> {
    let mut acc = vec![Scalar::zero(); order + 1];
    acc[0] = Scalar::one();
    let mut zi = z.clone();
    for _ in 0..m {
        for j in (1..=order).rev() {
            let prev = acc[j - 1].clone();
            acc[j] -= &zi * prev;
        }
        zi *= q;
    }
    acc
}

fn dilate(s: &TruncatedSeries<Scalar>, z: &Scalar) -> Vec<Scalar> {
    let mut p = Scalar::one();
    s.coeffs()
        .iter()
        .map(|c| {
            let v = c * &p;
            p *= z;
            v
        })
        .collect()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut tally = [0usize; 4];
    for case in 0..1000 {
        let kind = case % 4;
        let q = loop {
            let v = rational(&mut rng);
            if v.numer().magnitude() < v.denom().magnitude() {
                break v;
            }
        };
        let z = rational(&mut rng);
        match kind {
            0 => {
                let (j, k) = (rng.gen_range(0..8usize), rng.gen_range(0..8usize));
                let lhs = qpoch(&z, &q, j + k);
                let rhs = qpoch(&z, &q, j) * qpoch(&(&z * qpow(&q, j as i64)), &q, k);
                check(lhs == rhs, || format!("cocycle a={z} q={q} j={j} k={k}"))?;
            }
            1 => {
                let order = rng.gen_range(1..9usize);
                let m = rng.gen_range(0..6usize);
                let full = qpoch_inf_expand(&z, &q, order, false);
                let tail = qpoch_inf_expand(&(&z * qpow(&q, m as i64)), &q, order, false);
                let head = TruncatedSeries::from_coeffs(finite_product(&z, &q, m, order), order);
                check(full == &head * &tail, || format!("Euler expansion z={z} q={q} M={m}"))?;
                let inv = qpoch_inf_expand(&z, &q, order, true);
                check(&full * &inv == TruncatedSeries::one(order), || format!("E * 1/E z={z} q={q}"))?;
                // functional equation E(z) = (1 - z u) E(zq) in u
                let shifted = TruncatedSeries::from_coeffs(dilate(&full, &q), order);
                let linear = TruncatedSeries::from_coeffs(vec![Scalar::one(), -z.clone()], order);
                check(full == &linear * &shifted, || format!("E(u) = (1 - zu) E(qu) z={z} q={q}"))?;
            }
            2 => {
                let order = rng.gen_range(0..8usize);
                let (a, b, c) = (
                    random_series(&mut rng, order),
                    random_series(&mut rng, order),
                    random_series(&mut rng, order),
                );
                check(&(&a * &b) * &c == &a * &(&b * &c), || "associativity".into())?;
                check(&a * &b == &b * &a, || "commutativity".into())?;
                check(&(&a + &b) * &c == &(&a * &c) + &(&b * &c), || "distributivity".into())?;
                check(&a * &TruncatedSeries::one(order) == a, || "unit".into())?;
                check(&a + &(-a.clone()) == TruncatedSeries::zero(order), || "additive inverse".into())?;
                check(&(&a + &b) + &c == &a + &(&b + &c), || "additive associativity".into())?;
            }
            _ => {
                let order = rng.gen_range(0..8usize);
                let mut a = random_series(&mut rng, order);
                if a.coeff(0).is_zero() {
                    a = &a + &TruncatedSeries::one(order);
                }
                let inv = a.reciprocal().map_err(|e| e.to_string())?;
                check(&a * &inv == TruncatedSeries::one(order), || "reciprocal".into())?;
                // direct Cauchy product as oracle for multiplication
                let b = random_series(&mut rng, order);
                let mut naive = vec![Scalar::zero(); order + 1];
                for i in 0..=order {
                    for j in 0..=order - i {
                        naive[i + j] += &a.coeffs()[i] * &b.coeffs()[j];
                    }
                }
                check((&a * &b).coeffs() == naive.as_slice(), || "Cauchy product".into())?;
            }
        }
        tally[kind] += 1;
    }
    let elapsed = start.elapsed();
    check(elapsed.as_secs_f64() < 60.0, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "1000 cases (cocycle {}, Euler {}, ring {}, inverse/product {}) in {:.2}s",
        tally[0],
        tally[1],
        tally[2],
        tally[3],
        elapsed.as_secs_f64()
    ))
}

fn campaign_json(identity: IdentityId, dims: Vec<Vec<usize>>, threads: Option<usize>) -> (i32, String) {
    let config = RunConfig {
        identity,
        q: q(),
        n_values: (0..3).collect(),
        order: 6,
        trials: 6,
        seed: 11,
        mode: Precision::Exact,
        dims,
        threads,
        timing: false,
    };
    let (code, doc) = run_campaign(&config);
    (code, serde_json::to_string_pretty(&doc).unwrap())
}

fn criterion_8() -> Outcome {
    let mut runs = 0;
    for (id, dims) in [
        (IdentityId::Mf, IdentityId::Mf.signatures()),
        (IdentityId::Gbl, vec![vec![]]),
        (IdentityId::Phiw, IdentityId::Phiw.signatures()),
    ] {
        let (code, reference) = campaign_json(id, dims.clone(), None);
        check(code == 0, || format!("{id} campaign exit code {code}"))?;
        for threads in [None, Some(1), Some(2), Some(4)] {
            let (_, again) = campaign_json(id, dims.clone(), threads);
            check(again == reference, || format!("{id} output differs with threads {threads:?}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} repeated campaigns byte-identical"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("master formula, 16 signatures, N 0..3", criterion_1),
        ("Euler transformation through u^6", criterion_2),
        ("third Heine transformation as ETG(1,1)", criterion_3),
        ("Whipple-Sears and MF(1,1,1,1) reduction", criterion_4),
        ("Phi-W and Phi-W-1 summations", criterion_5),
        ("bilinear identities against the MF oracle", criterion_6),
        ("algebra suite", criterion_7),
        ("determinism across runs and thread counts", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} [PASS] {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} [FAIL] {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
