// SPDX-License-Identifier: Apache-2.0

//! Permutation-sampling Shapley estimation with an (ε, α) guarantee.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charfun::Game;
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;

use super::report::{ScoreKind, ScoreReport, Scores};

/// Permutations handled per work unit. Fixed so that the summation order, and
/// hence the result, does not depend on the number of threads.
const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub seed: u64,
    /// Overrides the run count derived from `(ε, α, range)`.
    pub runs: Option<u64>,
    /// Overrides the game's own marginal-contribution range.
    pub range: Option<f64>,
    /// Split `α` evenly over the features, so the guarantee holds for all of
    /// them simultaneously.
    pub union_bound: bool,
}

impl EstimatorParams {
    pub fn new(epsilon: f64, alpha: f64, seed: u64) -> Self {
        EstimatorParams {
            epsilon,
            alpha,
            seed,
            runs: None,
            range: None,
            union_bound: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParams(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if self.runs == Some(0) {
            return Err(Error::InvalidParams("run count must be positive".into()));
        }
        Ok(())
    }
}

/// Hoeffding sample size: `⌈ ln(2/α) · range² / (2ε²) ⌉`.
pub fn required_runs(epsilon: f64, alpha: f64, range: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParams(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::InvalidParams(format!("range must be positive, got {range}")));
    }
    let r = ((2.0 / alpha).ln() * range * range / (2.0 * epsilon * epsilon)).ceil();
    if !(r.is_finite() && r < u64::MAX as f64) {
        return Err(Error::InvalidParams(format!("run count {r} is not representable")));
    }
    Ok((r as u64).max(1))
}

/// An ordering of the players, with `Pref(i)` the players before `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParams(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Permutation { order })
    }

    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(Error::InvalidParams("feature numbers start at 1".into()));
        }
        Self::new(order.iter().map(|k| k - 1).collect())
    }

    /// The `k`-th permutation of the stream for `seed`, uniformly drawn by
    /// Fisher–Yates from its own ChaCha stream.
    pub fn sample(n: usize, seed: u64, k: u64) -> Self {
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k);
        fisher_yates(&mut order, &mut rng);
        Permutation { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `Pref(i)`.
    pub fn prefix(&self, i: usize) -> FeatureSet {
        self.order.iter().take_while(|&&j| j != i).copied().collect()
    }
}

fn fisher_yates<R: Rng>(order: &mut [usize], rng: &mut R) {
    for k in (1..order.len()).rev() {
        let j = rng.gen_range(0..=k);
        order.swap(k, j);
    }
}

/// One step of a permutation walk.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixStep {
    pub feature: usize,
    pub prefix: FeatureSet,
    pub delta: f64,
}

/// `Δ_i(Pref(i))` for each player, in permutation order.
pub fn trace_permutation<G: Game + ?Sized>(game: &G, perm: &Permutation) -> Result<Vec<PrefixStep>> {
    let mut values = Vec::new();
    game.prefix_values(perm.order(), &mut values)?;
    let mut prefix = FeatureSet::empty();
    let mut steps = Vec::with_capacity(perm.len());
    for (k, &i) in perm.order().iter().enumerate() {
        steps.push(PrefixStep {
            feature: i,
            prefix: prefix.clone(),
            delta: values[k + 1] - values[k],
        });
        prefix.insert(i);
    }
    Ok(steps)
}

/// Permutation-sampling estimate of the Shapley values of `game`.
///
/// Draws `r` orderings; for each, the prefix values are computed once and
/// every player's marginal contribution at its position is accumulated. The
/// estimate is the accumulated sum divided by `r`. Results depend only on
/// `(game, params)`.
pub fn shapley_estimate_cgt<G: Game + ?Sized>(game: &G, params: &EstimatorParams) -> Result<ScoreReport> {
    params.validate()?;
    let n = game.players();
    let empty = game.value(&FeatureSet::empty())?;
    if empty != 0.0 {
        return Err(Error::NonzeroEmptyValue(empty));
    }
    let range = params.range.or_else(|| game.delta_range());
    let runs = match (params.runs, range) {
        (Some(r), _) => r,
        (None, Some(range)) => {
            let alpha = if params.union_bound && n > 0 {
                params.alpha / n as f64
            } else {
                params.alpha
            };
            if range == 0.0 {
                // every marginal contribution is the same constant
                1
            } else {
                required_runs(params.epsilon, alpha, range)?
            }
        }
        (None, None) => {
            return Err(Error::InvalidParams(
                "no marginal-contribution range known for this game; supply one or a run count".into(),
            ))
        }
    };

    let chunks = runs.div_ceil(CHUNK);
    let partials: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; n];
            let mut values = Vec::with_capacity(n + 1);
            for k in c * CHUNK..((c + 1) * CHUNK).min(runs) {
                let perm = Permutation::sample(n, params.seed, k);
                game.prefix_values(perm.order(), &mut values)?;
                for (pos, &i) in perm.order().iter().enumerate() {
                    acc[i] += values[pos + 1] - values[pos];
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut total = vec![0.0; n];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    let scores = total.into_iter().map(|s| s / runs as f64).collect();
    Ok(ScoreReport {
        scores: Scores(scores),
        kind: ScoreKind::of(game.kind(), true),
        epsilon: Some(params.epsilon),
        alpha: Some(params.alpha),
        runs: Some(runs),
        seed: Some(params.seed),
        range,
    })
}
