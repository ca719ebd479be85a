// SPDX-License-Identifier: Apache-2.0

//! Feature attribution from abductive explanations.
//!
//! Explanations (weak and minimal AXps and CXps) are computed either against
//! a total model or against a sample of labelled points. Scores are Shapley
//! values of a characteristic-function game, computed exactly or estimated by
//! permutation sampling, and compared with rank-biased overlap.

pub mod analysis;
pub mod charfun;
pub mod data;
pub mod error;
pub mod explain;
pub mod featureset;
pub mod fixtures;
pub mod io;
pub mod models;
pub mod shapley;
pub mod similarity;
pub mod space;

pub use analysis::{compare_reports, flaw_census, rank, rbo, CensusSummary, Comparison, RankKey, Ranking, Rbo, RboParams};
pub use charfun::{AxpGame, ExpectationGame, ExpectationSource, Game, GameKind, TableGame};
pub use data::{Instance, Prediction, PredictionKind, Provenance, SampleSpace};
pub use error::{Error, ErrorClass, Result};
pub use explain::{CxpCatalog, ModelProblem, Problem, Relevance, SampleProblem, WaxpOracle};
pub use featureset::FeatureSet;
pub use io::Declaration;
pub use models::{Branch, Model};
pub use shapley::{
    shapley_estimate_cgt, shapley_exact_permutations, shapley_exact_subsets, EstimatorParams, ScoreKind, ScoreReport,
};
pub use similarity::{Rule, SimilarityConfig, ToleranceMode};
pub use space::{FeatureDef, FeatureKind, FeatureSpace, FeatureValue};
