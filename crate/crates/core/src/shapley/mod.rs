// SPDX-License-Identifier: Apache-2.0

//! Shapley values of characteristic-function games.

mod estimate;
mod exact;
mod report;

pub use estimate::{
    required_runs, shapley_estimate_cgt, trace_permutation, EstimatorParams, Permutation, PrefixStep,
};
pub use exact::{
    shapley_exact_permutations, shapley_exact_subsets, shapley_weights, tabulate, PERMUTATIONS_MAX_PLAYERS,
    SUBSETS_MAX_PLAYERS,
};
pub use report::{ScoreKind, ScoreReport, Scores};

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
