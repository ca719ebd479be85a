// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nushap_core::io::load_truth_table;
use nushap_core::{
    compare_reports, fixtures, flaw_census, shapley_estimate_cgt, shapley_exact_subsets, AxpGame, Declaration, Error,
    EstimatorParams, ExpectationGame, FeatureSet, FeatureSpace, Game, Model, ModelProblem, Prediction, Problem,
    RboParams, Rule, SampleProblem, ScoreReport, SimilarityConfig,
};
use serde_json::{json, Value};

use crate::{CharFn, CompareArgs, ExplainArgs, Failure, Fixture, FlawscanArgs, Mode, ScoreArgs, Source};

type Outcome<T = ()> = Result<T, Failure>;

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Core(Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Writes `text` plus a newline to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| io_err(Path::new("<stdout>"), e))
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("in-memory JSON")
}

fn with_overrides(space: &FeatureSpace, base: &SimilarityConfig, src: &Source) -> Outcome<SimilarityConfig> {
    if src.taus.is_empty() && src.delta.is_none() {
        return Ok(base.clone());
    }
    let mut rules: Vec<Rule> = (0..space.len()).map(|i| base.feature_rule(i)).collect();
    for spec in &src.taus {
        let parsed = spec
            .split_once('=')
            .and_then(|(i, t)| Some((i.trim().parse::<usize>().ok()?, t.trim().parse::<f64>().ok()?)));
        let Some((index, tau)) = parsed.filter(|(i, _)| (1..=space.len()).contains(i)) else {
            return Err(Failure::Usage(format!("--tau expects INDEX=TAU with INDEX in 1..={}, got `{spec}`", space.len())));
        };
        rules[index - 1] = Rule::absolute(tau);
    }
    let prediction = src.delta.map_or(base.prediction_rule(), Rule::absolute);
    Ok(SimilarityConfig::new(space, rules, prediction)?)
}

fn model_problem(model: Model, base: SimilarityConfig, src: &Source, default_point: Option<Vec<u32>>) -> Outcome<Problem> {
    let model = Arc::new(model);
    let space = model.space().clone();
    let sim = with_overrides(&space, &base, src)?;
    let point = match (&src.instance, default_point) {
        (Some(lit), _) => space.parse_point(lit)?,
        (None, Some(p)) => p,
        (None, None) => return Err(Failure::Usage("--instance is required".into())),
    };
    let problem = match &src.prediction {
        None => ModelProblem::new(model, point, sim)?,
        Some(token) => {
            let q = Prediction::parse(token, model.output_kind()).ok_or_else(|| Error::UnknownValue {
                row: 0,
                column: "prediction".into(),
                value: token.clone(),
            })?;
            let instance = nushap_core::Instance::new(point, q);
            ModelProblem::with_instance(model, instance, sim, nushap_core::space::DEFAULT_ENUMERATION_CAP)?
        }
    };
    Ok(Problem::Model(problem))
}

/// Builds the explanation problem from exactly one backend.
pub fn problem(src: &Source) -> Outcome<Problem> {
    if let Some(data) = &src.data {
        let Some(space) = &src.space else {
            return Err(Failure::Usage("--data needs --space".into()));
        };
        let decl = Declaration::load(space)?;
        let sample = decl.load_dataset(data)?;
        let Some(lit) = &src.instance else {
            return Err(Failure::Usage("--instance is required".into()));
        };
        let instance = decl.parse_instance(lit, src.prediction.as_deref(), Some(&sample))?;
        let sim = with_overrides(&decl.space, &decl.similarity, src)?;
        return Ok(Problem::Sample(SampleProblem::new(Arc::new(sample), instance, sim)?));
    }
    if let Some(table) = &src.table {
        let (decl, model) = load_truth_table(table)?;
        return model_problem(model, decl.similarity, src, None);
    }
    match src.fixture {
        Some(Fixture::M3) => {
            let model = fixtures::m3_model();
            let space = model.space().clone();
            model_problem(model, fixtures::m3_similarity(&space), src, Some(fixtures::m3_point(&space)))
        }
        None => Err(Failure::Usage("one of --data, --table, --fixture is required".into())),
    }
}

fn sets_json(sets: &[FeatureSet]) -> Value {
    Value::Array(sets.iter().map(|s| json!(s.to_one_based())).collect())
}

pub fn explain(args: &ExplainArgs) -> Outcome {
    let problem = problem(&args.source)?;
    let mut out = serde_json::Map::new();
    for item in &args.emit {
        match item.trim() {
            "axp" | "axps" => {
                out.insert("axps".into(), sets_json(&problem.axps()?));
            }
            "cxp" | "cxps" => {
                out.insert("cxps".into(), sets_json(&problem.cxps()?));
            }
            "relevancy" => {
                out.insert("relevancy".into(), serde_json::to_value(problem.relevancy()?).expect("plain enum"));
            }
            other => {
                return Err(Failure::Usage(format!(
                    "unknown --emit item `{other}`; expected axps, cxps or relevancy"
                )))
            }
        }
    }
    emit(args.out.as_deref(), &pretty(&out))
}

fn scores_of<G: Game>(game: &G, args: &ScoreArgs) -> Outcome<ScoreReport> {
    match args.mode {
        Mode::Exact => Ok(shapley_exact_subsets(game)?),
        Mode::Estimate => {
            let (Some(epsilon), Some(alpha)) = (args.epsilon, args.alpha) else {
                return Err(Failure::Usage("--mode estimate needs --epsilon and --alpha".into()));
            };
            let seed = args.seed.unwrap_or_else(|| {
                let seed = rand::random::<u64>();
                eprintln!("seed: {seed}");
                seed
            });
            let mut params = EstimatorParams::new(epsilon, alpha, seed);
            params.runs = args.runs;
            params.union_bound = args.union_bound;
            Ok(shapley_estimate_cgt(game, &params)?)
        }
    }
}

pub fn score(args: &ScoreArgs) -> Outcome {
    let estimator_flags = args.epsilon.is_some()
        || args.alpha.is_some()
        || args.seed.is_some()
        || args.runs.is_some()
        || args.union_bound;
    if args.mode == Mode::Exact && estimator_flags {
        return Err(Failure::Usage("estimator parameters need --mode estimate".into()));
    }
    let problem = problem(&args.source)?;
    let report = match args.cf {
        CharFn::Axp => scores_of(&AxpGame::new(problem)?, args)?,
        CharFn::Expv => scores_of(&ExpectationGame::new(problem)?, args)?,
    };
    emit(args.out.as_deref(), &pretty(&report))
}

fn load_report(path: &Path) -> Outcome<ScoreReport> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::Core(Error::Parse {
            what: "score report",
            message: format!("{}: {e}", path.display()),
        })
    })
}

pub fn compare(args: &CompareArgs) -> Outcome {
    let (a, b) = (load_report(&args.a)?, load_report(&args.b)?);
    let params = RboParams {
        persistence: args.rbo_p,
        depth: args.rbo_depth,
    };
    let c = compare_reports(&a, &b, &params)?;
    emit(args.out.as_deref(), &pretty(&c))
}

pub fn flawscan(args: &FlawscanArgs) -> Outcome {
    let summary = match &args.out {
        Some(path) => {
            let file = fs::File::create(path).map_err(|e| io_err(path, e))?;
            flaw_census(args.vars, Some(std::io::BufWriter::new(file)))?
        }
        None => flaw_census(args.vars, Some(std::io::stdout().lock()))?,
    };
    eprintln!("{}", serde_json::to_string(&summary).expect("plain struct"));
    Ok(())
}
