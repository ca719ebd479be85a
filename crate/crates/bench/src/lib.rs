// SPDX-License-Identifier: Apache-2.0

//! Workload generators for the benchmarks.

use std::sync::Arc;

use nushap_core::{
    FeatureSet, FeatureSpace, Instance, Prediction, PredictionKind, SampleProblem, SampleSpace, SimilarityConfig,
    TableGame,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Binary dataset over `m` features where each value matches the all-zero
/// instance with probability 0.97. Rows matching the instance on `w` predict
/// 1, so `w` is a weak sbAXp and testing it scans every disagreeing row.
pub fn scan_problem(rows: usize, m: usize, w: &FeatureSet, seed: u64) -> SampleProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = Arc::new(FeatureSpace::boolean(m).expect("boolean space"));
    let mut sample = SampleSpace::new(space, PredictionKind::Ordinal);
    let mut x = vec![0u32; m];
    for _ in 0..rows {
        for xi in x.iter_mut() {
            *xi = u32::from(!rng.gen_bool(0.97));
        }
        let y = if w.iter().all(|j| x[j] == 0) { 1 } else { rng.gen_range(0..2) };
        sample.push(&x, Prediction::Value(y as f64)).expect("binary row");
    }
    let instance = Instance::new(vec![0; m], Prediction::Value(1.0));
    SampleProblem::new(Arc::new(sample), instance, SimilarityConfig::exact(m)).expect("valid problem")
}

/// Monotone game on `n` players: `ν(S)` is the fraction of random coalitions
/// contained in `S`.
pub fn coverage_game(n: usize, coalitions: usize, seed: u64) -> TableGame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<u64> = (0..coalitions).map(|_| rng.gen_range(1u64..1 << n)).collect();
    TableGame::from_fn(n, |s| {
        let s = s.to_mask();
        sets.iter().filter(|&&t| t & s == t).count() as f64 / coalitions as f64
    })
    .expect("finite values")
}
