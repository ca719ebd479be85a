// SPDX-License-Identifier: Apache-2.0

//! Small built-in problems used by tests, benches and `nushap selftest`.

use std::sync::Arc;

use crate::data::{Instance, Prediction, SampleSpace};
use crate::io::Declaration;
use crate::models::{Branch, Model};
use crate::similarity::{Rule, SimilarityConfig};
use crate::space::{FeatureDef, FeatureSpace};

pub const D1_SPACE_JSON: &str = include_str!("../fixtures/d1.space.json");
pub const D1_CSV: &str = include_str!("../fixtures/d1.csv");

pub fn d1_declaration() -> Declaration {
    Declaration::from_json_str(D1_SPACE_JSON).expect("built-in D1 declaration parses")
}

/// Six rows over three binary features.
pub fn d1() -> SampleSpace {
    d1_declaration()
        .read_dataset(D1_CSV.as_bytes())
        .expect("built-in D1 dataset parses")
}

/// `v = (1,1,0)`, `q = 1`.
pub fn d1_instance() -> Instance {
    Instance::new(vec![1, 1, 0], Prediction::Value(1.0))
}

/// Boolean OR of two features.
pub fn or_model() -> Model {
    Model::boolean_function(2, 0b1110).expect("OR truth table")
}

/// Lower bound of the upper half-interval `[1/2, 3/2]`.
const M3_UPPER_LO: f64 = 0.5;
const M3_UPPER_HI: f64 = 1.5;

/// `[-1/2, 3/2]` discretised with the given step on both features.
pub fn m3_space(step: f64) -> FeatureSpace {
    let n = ((2.0 / step).round() as usize) + 1;
    let grid: Vec<f64> = (0..n).map(|k| -0.5 + k as f64 * step).collect();
    FeatureSpace::new(vec![
        FeatureDef::ordinal("x1", grid.clone()),
        FeatureDef::ordinal("x2", grid),
    ])
    .expect("M3 grid is a valid space")
}

/// Piecewise-linear regression model on the 0.25 grid:
/// `x1` when `x1` is in the upper half-interval, otherwise `x2 - 2` or
/// `x2 + 1` depending on whether `x2` is.
pub fn m3_model() -> Model {
    m3_model_on(m3_space(0.25))
}

pub fn m3_model_on(space: FeatureSpace) -> Model {
    let upper = |t: f64| (M3_UPPER_LO..=M3_UPPER_HI).contains(&t);
    Model::rule_list(
        Arc::new(space),
        vec![
            Branch::new("x1 in upper", move |x| upper(x[0]), |x| x[0]),
            Branch::new("x1, x2 not in upper", move |x| !upper(x[0]) && !upper(x[1]), |x| x[1] - 2.0),
            Branch::new("x1 not in upper, x2 in upper", move |x| !upper(x[0]) && upper(x[1]), |x| x[1] + 1.0),
        ],
    )
    .expect("M3 guards are exhaustive")
}

/// `tau_1 = tau_2 = delta = 0.25`, absolute.
pub fn m3_similarity(space: &FeatureSpace) -> SimilarityConfig {
    SimilarityConfig::new(space, vec![Rule::absolute(0.25); 2], Rule::absolute(0.25))
        .expect("M3 similarity is valid")
}

/// `v = (1, 1)`.
pub fn m3_point(space: &FeatureSpace) -> Vec<u32> {
    space.parse_point("1,1").expect("(1,1) lies on the grid")
}
