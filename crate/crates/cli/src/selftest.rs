// SPDX-License-Identifier: Apache-2.0

//! Fast fixture checks with a pass/fail table.

use std::sync::Arc;

use nushap_core::shapley::required_runs;
use nushap_core::{
    fixtures, flaw_census, rbo, shapley_estimate_cgt, shapley_exact_subsets, AxpGame, Declaration, EstimatorParams,
    ExpectationGame, FeatureSet, ModelProblem, Ranking, RboParams, SampleProblem, SimilarityConfig,
};

use crate::{Failure, SelftestArgs};

type Check = Result<String, String>;

fn d1_problem(args: &SelftestArgs) -> Result<SampleProblem, String> {
    let (decl, sample) = match &args.fixtures_dir {
        Some(dir) => {
            let decl = Declaration::load(dir.join("d1.space.json")).map_err(|e| e.to_string())?;
            let sample = decl.load_dataset(dir.join("d1.csv")).map_err(|e| e.to_string())?;
            (decl, sample)
        }
        None => (fixtures::d1_declaration(), fixtures::d1()),
    };
    let instance = decl.parse_instance("1,1,0", None, Some(&sample)).map_err(|e| e.to_string())?;
    SampleProblem::new(Arc::new(sample), instance, decl.similarity).map_err(|e| e.to_string())
}

fn one_based(sets: &[FeatureSet]) -> Vec<Vec<usize>> {
    sets.iter().map(FeatureSet::to_one_based).collect()
}

fn expect<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> Check {
    if got == want {
        Ok(format!("{got:?}"))
    } else {
        Err(format!("got {got:?}, expected {want:?}"))
    }
}

fn d1_explanations(args: &SelftestArgs) -> Check {
    let p = d1_problem(args)?;
    let axps = one_based(&p.sb_axps().map_err(|e| e.to_string())?);
    let cxps = one_based(&p.cxp_catalog().minimal);
    expect((axps, cxps), (vec![vec![1, 3]], vec![vec![1], vec![3]]))
}

fn d1_scores(args: &SelftestArgs) -> Check {
    let game = AxpGame::new(d1_problem(args)?).map_err(|e| e.to_string())?;
    let exact = shapley_exact_subsets(&game).map_err(|e| e.to_string())?;
    expect(exact.values().to_vec(), vec![0.5, 0.0, 0.5])
}

fn d1_estimate(args: &SelftestArgs) -> Check {
    let game = AxpGame::new(d1_problem(args)?).map_err(|e| e.to_string())?;
    let est = shapley_estimate_cgt(&game, &EstimatorParams::new(0.1, 0.1, 0)).map_err(|e| e.to_string())?;
    if est.score(1).to_bits() != 0 {
        return Err(format!("irrelevant feature 2 estimated {}", est.score(1)));
    }
    Ok(format!("{:?} from {} runs", est.values(), est.runs.unwrap_or(0)))
}

fn or_example() -> Check {
    let p = ModelProblem::new(Arc::new(fixtures::or_model()), vec![1, 0], SimilarityConfig::exact(2))
        .map_err(|e| e.to_string())?;
    let e = shapley_exact_subsets(&ExpectationGame::new(p.clone()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let a = shapley_exact_subsets(&AxpGame::new(p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    if (e.score(1) + 0.125).abs() > 1e-12 {
        return Err(format!("Sc_e(2) = {}", e.score(1)));
    }
    expect(a.values().to_vec(), vec![1.0, 0.0]).map(|s| format!("Sc_a = {s}, Sc_e(2) = {}", e.score(1)))
}

fn m3_example() -> Check {
    let model = Arc::new(fixtures::m3_model());
    let space = model.space().clone();
    let p = ModelProblem::new(model, fixtures::m3_point(&space), fixtures::m3_similarity(&space))
        .map_err(|e| e.to_string())?;
    let a = shapley_exact_subsets(&AxpGame::new(p).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    expect(a.values().to_vec(), vec![1.0, 0.0]).map(|s| format!("Sc_a(1), Sc_a(2) = {s}"))
}

fn rbo_example() -> Check {
    let a = Ranking::from_one_based(&[1, 2, 3, 4, 5]).map_err(|e| e.to_string())?;
    let b = Ranking::from_one_based(&[2, 1, 3, 4, 5]).map_err(|e| e.to_string())?;
    let v = rbo(&a, &b, &RboParams::default()).map_err(|e| e.to_string())?.normalized;
    if (v - 0.48387).abs() > 1e-5 {
        return Err(format!("{v}"));
    }
    Ok(format!("{v:.5}"))
}

fn census_example() -> Check {
    let s = flaw_census::<Vec<u8>>(2, None).map_err(|e| e.to_string())?;
    if s.issue_a != 0 || s.issue_e == 0 {
        return Err(format!("issue_e {}, issue_a {}", s.issue_e, s.issue_a));
    }
    Ok(format!("k=2: issue_e {}, issue_a 0", s.issue_e))
}

fn run_count_example() -> Check {
    let r = required_runs(0.5, 2.0 * (-2.0f64).exp(), 1.0).map_err(|e| e.to_string())?;
    expect(r, 4)
}

pub fn run(args: &SelftestArgs) -> Result<(), Failure> {
    let checks: Vec<(&str, Check)> = vec![
        ("d1 explanations", d1_explanations(args)),
        ("d1 exact scores", d1_scores(args)),
        ("d1 estimate", d1_estimate(args)),
        ("or example", or_example()),
        ("m3 example", m3_example()),
        ("rbo example", rbo_example()),
        ("census k=2", census_example()),
        ("run count", run_count_example()),
    ];
    let mut failed = 0;
    for (name, outcome) in &checks {
        match outcome {
            Ok(detail) => println!("PASS  {name:<16} {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<16} {why}");
            }
        }
    }
    if failed > 0 {
        Err(Failure::Checks(failed))
    } else {
        Ok(())
    }
}
