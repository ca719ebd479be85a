// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails. All tolerances and budgets are pinned here.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{brute_minimal, brute_waxp, brute_wcxp, random_monotone_game, random_sample_problem};
use nushap_core::explain::{minimal_hitting_sets, DEFAULT_SUBSET_CAP};
use nushap_core::shapley::required_runs;
use nushap_core::{
    fixtures, flaw_census, rbo, shapley_estimate_cgt, shapley_exact_permutations, shapley_exact_subsets, AxpGame,
    EstimatorParams, ExpectationGame, FeatureSet, FeatureSpace, Instance, Model, ModelProblem, Prediction,
    PredictionKind, Ranking, RboParams, Relevance, SampleProblem, SampleSpace, SimilarityConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EFFICIENCY_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;
const METHOD_TOL: f64 = 1e-12;
const OR_TOL: f64 = 1e-12;
const BINOMIAL_SLACK: f64 = 0.03;
const RBO_TOL: f64 = 1e-5;
const SCAN_BUDGET: Duration = Duration::from_secs(1);
const DOUBLING_RATIO: f64 = 2.5;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    check(took < budget, format!("took {took:?}, budget {budget:?}"))
}

fn shapley_axioms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut dummies, mut symmetric) = (0, 0);
    for g in 0..100 {
        let n = 1 + g % 6;
        let game = random_monotone_game(&mut rng, n);
        let v = game.values();
        let sub = shapley_exact_subsets(&game).map_err(|e| e.to_string())?;
        let perm = shapley_exact_permutations(&game).map_err(|e| e.to_string())?;
        let total: f64 = sub.values().iter().sum();
        check(
            (total - (v[(1 << n) - 1] - v[0])).abs() <= EFFICIENCY_TOL,
            format!("efficiency fails on game {g}"),
        )?;
        for i in 0..n {
            check(
                (sub.score(i) - perm.score(i)).abs() <= METHOD_TOL,
                format!("methods disagree on game {g}"),
            )?;
            if (0..1usize << n).all(|s| v[s | 1 << i] == v[s]) {
                dummies += 1;
                check(sub.score(i) == 0.0 && perm.score(i) == 0.0, format!("dummy {i} nonzero in game {g}"))?;
            }
            for j in i + 1..n {
                let swap = |s: usize| (s & !(1 << i) & !(1 << j)) | ((s >> i & 1) << j) | ((s >> j & 1) << i);
                if (0..1usize << n).all(|s| v[s] == v[swap(s)]) {
                    symmetric += 1;
                    check(
                        (sub.score(i) - sub.score(j)).abs() <= SYMMETRY_TOL,
                        format!("symmetry fails on game {g}"),
                    )?;
                }
            }
        }
    }
    within(start, Duration::from_secs(30))?;
    Ok(format!("100 games, {dummies} dummy players, {symmetric} symmetric pairs"))
}

fn or_problem() -> ModelProblem {
    ModelProblem::new(Arc::new(fixtures::or_model()), vec![1, 0], SimilarityConfig::exact(2)).unwrap()
}

fn misleading_or() -> Outcome {
    // ν_e by hand over the four points (0,0)->0, (0,1)->1, (1,0)->1, (1,1)->1
    let mean = |pts: &[f64]| pts.iter().sum::<f64>() / pts.len() as f64;
    let nu = [0.0, mean(&[1.0, 1.0]) - 0.75, mean(&[0.0, 1.0]) - 0.75, 1.0 - 0.75];
    let oracle_2 = 0.5 * (nu[2] - nu[0]) + 0.5 * (nu[3] - nu[1]);
    let e = shapley_exact_subsets(&ExpectationGame::new(or_problem()).unwrap()).unwrap();
    let a = shapley_exact_subsets(&AxpGame::new(or_problem()).unwrap()).unwrap();
    let rel = or_problem().relevancy().unwrap();
    check(rel[1] == Relevance::Irrelevant, "feature 2 should be irrelevant")?;
    check((oracle_2 + 0.125).abs() <= OR_TOL, "oracle drifted")?;
    check((e.score(1) - oracle_2).abs() <= OR_TOL, format!("Sc_e(2) = {}", e.score(1)))?;
    check(a.score(0) == 1.0 && a.score(1) == 0.0, format!("Sc_a = {:?}", a.values()))?;
    Ok(format!("Sc_e(2) = {}, Sc_a = {:?}", e.score(1), a.values()))
}

fn census() -> Outcome {
    let start = Instant::now();
    let s = flaw_census::<Vec<u8>>(3, None).map_err(|e| e.to_string())?;
    check(s.issue_e >= 1, "no expectation-game flaw found")?;
    check(s.issue_a == 0, format!("{} AXp-game flaws", s.issue_a))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "k=3: {} functions, {} cases, issue_e {}, issue_a {}",
        s.functions, s.cases, s.issue_e, s.issue_a
    ))
}

fn estimator_guarantee() -> Outcome {
    let start = Instant::now();
    let (eps, alpha, seeds) = (0.1, 0.1, 200u64);
    let problem = SampleProblem::new(Arc::new(fixtures::d1()), fixtures::d1_instance(), SimilarityConfig::exact(3))
        .map_err(|e| e.to_string())?;
    let game = AxpGame::new(problem).unwrap();
    let exact = shapley_exact_subsets(&game).unwrap();
    let mut hits = [0u64; 3];
    for seed in 0..seeds {
        let est = shapley_estimate_cgt(&game, &EstimatorParams::new(eps, alpha, seed)).unwrap();
        check(est.score(1).to_bits() == 0.0f64.to_bits(), format!("feature 2 estimate {} at seed {seed}", est.score(1)))?;
        for (i, h) in hits.iter_mut().enumerate() {
            if (est.score(i) - exact.score(i)).abs() <= eps {
                *h += 1;
            }
        }
    }
    let need = ((1.0 - alpha - BINOMIAL_SLACK) * seeds as f64).ceil() as u64;
    check(hits.iter().all(|&h| h >= need), format!("hits {hits:?} < {need}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("within ε: {hits:?} of {seeds} (need {need}); feature 2 always 0"))
}

fn run_count() -> Outcome {
    let (eps, alpha) = (0.0015, 0.015);
    let r = required_runs(eps, alpha, 1.0).map_err(|e| e.to_string())?;
    // smallest r with 2·exp(−2rε²) ≤ α, by bisection
    let fails = |r: u64| 2.0 * (-2.0 * r as f64 * eps * eps).exp() > alpha;
    let (mut lo, mut hi) = (1u64, 1u64 << 40);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fails(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    check(r == lo, format!("required_runs {r}, oracle {lo}"))?;
    check(r == 1_087_301, format!("required_runs {r}"))?;
    Ok(format!("r = {r}"))
}

fn scan_fidelity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for t in 0..1000 {
        let raw = random_sample_problem(&mut rng, 8, 64);
        let w = rng.gen_range(0..1u64 << raw.m());
        let set = FeatureSet::from_mask(w);
        let p = SampleProblem::new(raw.sample.clone(), raw.instance.clone(), raw.similarity.clone())
            .map_err(|e| e.to_string())?;
        let expected = brute_waxp(&raw, w);
        check(p.is_sb_waxp(&set).unwrap() == expected, format!("scan wrong on triple {t}"))?;
        check(p.cxp_catalog().is_sb_waxp(&set) == expected, format!("catalog wrong on triple {t}"))?;
    }
    for t in 0..200 {
        let raw = random_sample_problem(&mut rng, 8, 64);
        let p = SampleProblem::new(raw.sample.clone(), raw.instance.clone(), raw.similarity.clone())
            .map_err(|e| e.to_string())?;
        let axps = brute_minimal(raw.m(), |s| brute_waxp(&raw, s));
        let cxps = brute_minimal(raw.m(), |s| brute_wcxp(&raw, s));
        check(p.cxp_catalog().minimal == cxps, format!("CXps wrong on instance {t}"))?;
        check(p.sb_axps().unwrap() == axps, format!("AXps wrong on instance {t}"))?;
        check(
            minimal_hitting_sets(&cxps, DEFAULT_SUBSET_CAP).unwrap() == axps,
            format!("duality fails on instance {t}"),
        )?;
    }
    within(start, Duration::from_secs(60))?;
    Ok("1000 triples, 200 duality checks".into())
}

fn sample_equals_space() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 50 {
        let m = rng.gen_range(1..=4);
        let space = Arc::new(FeatureSpace::boolean(m).unwrap());
        let outputs: Vec<Prediction> = (0..1 << m).map(|_| Prediction::Value(rng.gen_range(0..3) as f64)).collect();
        let model = Arc::new(Model::truth_table(space, outputs).unwrap());
        if model.is_constant().unwrap() {
            continue;
        }
        let point: Vec<u32> = (0..m).map(|_| rng.gen_range(0..2)).collect();
        let sim = SimilarityConfig::exact(m);
        let by_model = ModelProblem::new(model.clone(), point, sim.clone()).unwrap();
        let sample = Arc::new(model.label_space(1 << 20).unwrap());
        let by_sample = SampleProblem::new(sample, by_model.instance().clone(), sim).unwrap();
        check(by_model.axps().unwrap() == by_sample.sb_axps().unwrap(), format!("AXps differ on model {done}"))?;
        check(
            by_model.cxps().unwrap() == by_sample.cxp_catalog().minimal,
            format!("CXps differ on model {done}"),
        )?;
        done += 1;
    }
    Ok("50 models".into())
}

fn m3_regression() -> Outcome {
    let model = Arc::new(fixtures::m3_model());
    let space = model.space().clone();
    check(space.cardinality() == 81, "grid should have 81 points")?;
    let point = fixtures::m3_point(&space);
    check(model.predict(&point).unwrap() == Prediction::Value(1.0), "π(v) should be 1")?;
    let p = ModelProblem::new(model, point, fixtures::m3_similarity(&space)).map_err(|e| e.to_string())?;
    let a = shapley_exact_subsets(&AxpGame::new(p).map_err(|e| e.to_string())?).unwrap();
    check(a.values() == [1.0, 0.0], format!("Sc_a = {:?}", a.values()))?;
    Ok(format!("Sc_a = {:?}", a.values()))
}

/// Binary features, each matching the instance `0^m` with probability 0.97.
/// Rows matching the instance on all of `w` predict 1, others predict 0 or 1
/// at random, so `w` is a weak sbAXp and the scan must cover every
/// disagreeing row.
fn synthetic(rows: usize, m: usize, w: &FeatureSet, rng: &mut ChaCha8Rng) -> SampleSpace {
    let space = Arc::new(FeatureSpace::boolean(m).unwrap());
    let mut s = SampleSpace::new(space, PredictionKind::Ordinal);
    let mut x = vec![0u32; m];
    for _ in 0..rows {
        for xi in x.iter_mut() {
            *xi = u32::from(!rng.gen_bool(0.97));
        }
        let on_w = w.iter().all(|j| x[j] == 0);
        let y = if on_w { 1 } else { rng.gen_range(0..2) };
        s.push(&x, Prediction::Value(y as f64)).unwrap();
    }
    s
}

fn scan_time(rows: usize, w: &FeatureSet, rng: &mut ChaCha8Rng) -> (Duration, usize) {
    let m = 50;
    let sample = Arc::new(synthetic(rows, m, w, rng));
    let instance = Instance::new(vec![0; m], Prediction::Value(1.0));
    let p = SampleProblem::new(sample, instance, SimilarityConfig::exact(m)).unwrap();
    assert!(p.is_sb_waxp(w).unwrap());
    let mut best = Duration::MAX;
    for _ in 0..9 {
        let start = Instant::now();
        std::hint::black_box(p.is_sb_waxp(std::hint::black_box(w)).unwrap());
        best = best.min(start.elapsed());
    }
    (best, p.disagreeing_rows().len())
}

fn scan_performance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w: FeatureSet = (0..50).step_by(2).collect();
    let (t1, d1) = scan_time(1_000_000, &w, &mut rng);
    let (t2, _) = scan_time(2_000_000, &w, &mut rng);
    let ratio = t2.as_secs_f64() / t1.as_secs_f64();
    check(t1 < SCAN_BUDGET, format!("n=1e6 took {t1:?}"))?;
    check(ratio <= DOUBLING_RATIO, format!("doubling ratio {ratio:.2}"))?;
    Ok(format!("n=1e6: {t1:?} ({d1} disagreeing rows), n=2e6: {t2:?}, ratio {ratio:.2}"))
}

fn rbo_checks() -> Outcome {
    let p = RboParams::default();
    let r = |v: &[usize]| Ranking::from_one_based(v).unwrap();
    let a = r(&[1, 2, 3, 4, 5]);
    let same = rbo(&a, &a, &p).unwrap().normalized;
    check(same == 1.0, format!("rbo(x,x) = {same}"))?;
    let disjoint = rbo(&r(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]), &r(&[6, 7, 8, 9, 10, 1, 2, 3, 4, 5]), &p)
        .unwrap()
        .normalized;
    check(disjoint == 0.0, format!("disjoint = {disjoint}"))?;
    let swapped = rbo(&a, &r(&[2, 1, 3, 4, 5]), &p).unwrap().normalized;
    // by hand: 0.5·(0 + 0.5 + 0.25 + 0.125 + 0.0625) / (1 − 2^−5)
    let hand = 0.5 * (0.5 + 0.25 + 0.125 + 0.0625) / (1.0 - 1.0 / 32.0);
    check((swapped - 0.48387).abs() <= RBO_TOL && (swapped - hand).abs() <= 1e-15, format!("swapped = {swapped}"))?;
    Ok(format!("identical 1, disjoint 0, swapped {swapped:.5}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("shapley axioms on random monotone games", shapley_axioms),
        ("misleading expectation score on OR", misleading_or),
        ("flaw census k=3", census),
        ("estimator guarantee on D1", estimator_guarantee),
        ("run count at eps=0.0015 alpha=0.015", run_count),
        ("coverage scan fidelity and duality", scan_fidelity),
        ("sample equals space", sample_equals_space),
        ("M3 regression", m3_regression),
        ("coverage scan performance", scan_performance),
        ("rank-biased overlap", rbo_checks),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
