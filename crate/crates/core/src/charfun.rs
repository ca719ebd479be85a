// SPDX-License-Identifier: Apache-2.0

//! Characteristic functions over feature subsets.
//!
//! Two games are provided for an explanation problem: the WAXp indicator game
//! and the conditional-expectation game, shifted so that the empty coalition
//! is worth zero. [`TableGame`] holds an explicit value table.

use dashmap::DashMap;

use crate::data::PredictionKind;
use crate::error::{Error, Result};
use crate::explain::{ModelProblem, Problem, SampleProblem, WaxpOracle};
use crate::featureset::FeatureSet;

/// Games with at most this many players memoize `ν`.
pub const MEMO_MAX_PLAYERS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameKind {
    Axp,
    Expectation,
    Custom,
}

/// A cooperative game `(N, ν)` with `ν(∅) = 0`.
pub trait Game: Send + Sync {
    fn players(&self) -> usize;

    fn kind(&self) -> GameKind;

    fn value(&self, s: &FeatureSet) -> Result<f64>;

    /// `out[k] = ν(order[..k])` for `k = 0..=order.len()`.
    fn prefix_values(&self, order: &[usize], out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        let mut s = FeatureSet::empty();
        out.push(self.value(&s)?);
        for &i in order {
            s.insert(i);
            out.push(self.value(&s)?);
        }
        Ok(())
    }

    /// Width of an interval known to contain every marginal contribution.
    fn delta_range(&self) -> Option<f64> {
        None
    }
}

fn new_memo<K: std::hash::Hash + Eq, V>(players: usize) -> Option<DashMap<K, V>> {
    (players <= MEMO_MAX_PLAYERS).then(DashMap::new)
}

/// `ν_a(S) = 1` iff `S` is a weak AXp.
pub struct AxpGame<O> {
    oracle: O,
    memo: Option<DashMap<FeatureSet, bool>>,
}

impl<O: WaxpOracle> AxpGame<O> {
    /// Fails when `∅` is already a weak AXp (then `ν_a(∅) = 1`).
    pub fn new(oracle: O) -> Result<Self> {
        if oracle.is_waxp(&FeatureSet::empty()) {
            return Err(Error::EmptySetSufficient);
        }
        let memo = new_memo(oracle.num_features());
        Ok(AxpGame { oracle, memo })
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    pub fn indicator(&self, s: &FeatureSet) -> bool {
        match &self.memo {
            Some(memo) => {
                if let Some(hit) = memo.get(s) {
                    return *hit;
                }
                let v = self.oracle.is_waxp(s);
                memo.insert(s.clone(), v);
                v
            }
            None => self.oracle.is_waxp(s),
        }
    }
}

impl<O> std::fmt::Debug for AxpGame<O> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxpGame")
            .field("memoized", &self.memo.as_ref().map_or(0, |m| m.len()))
            .finish_non_exhaustive()
    }
}

impl<O: WaxpOracle> Game for AxpGame<O> {
    fn players(&self) -> usize {
        self.oracle.num_features()
    }

    fn kind(&self) -> GameKind {
        GameKind::Axp
    }

    fn value(&self, s: &FeatureSet) -> Result<f64> {
        Ok(if self.indicator(s) { 1.0 } else { 0.0 })
    }

    /// `ν_a` is monotone, so the prefix values are a step from 0 to 1 at the
    /// first sufficient prefix.
    fn prefix_values(&self, order: &[usize], out: &mut Vec<f64>) -> Result<()> {
        let first = self.oracle.first_sufficient_prefix(order).unwrap_or(usize::MAX);
        out.clear();
        out.extend((0..=order.len()).map(|k| if k >= first { 1.0 } else { 0.0 }));
        Ok(())
    }

    fn delta_range(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Source of conditional expectations `E[π(x) | x_S ≈ v_S]` under the uniform
/// distribution.
pub trait ExpectationSource: Send + Sync {
    fn num_features(&self) -> usize;

    fn conditional_mean(&self, s: &FeatureSet) -> Result<f64>;

    /// Smallest and largest output, bounding every conditional mean.
    fn output_bounds(&self) -> Result<(f64, f64)>;
}

fn mean_or_empty(sum: f64, count: usize, s: &FeatureSet) -> Result<f64> {
    if count == 0 {
        return Err(Error::EmptyConditioning(s.to_string()));
    }
    Ok(sum / count as f64)
}

impl ExpectationSource for ModelProblem {
    fn num_features(&self) -> usize {
        WaxpOracle::num_features(self)
    }

    fn conditional_mean(&self, s: &FeatureSet) -> Result<f64> {
        if self.model().output_kind() == PredictionKind::Categorical {
            return Err(Error::CategoricalExpectation);
        }
        let (mut sum, mut count) = (0.0, 0usize);
        let mut err = None;
        self.for_each_consistent(s, |x| match self.model().predict(x) {
            Ok(p) => {
                sum += p.as_f64().unwrap_or(f64::NAN);
                count += 1;
            }
            Err(e) => err = Some(e),
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        mean_or_empty(sum, count, s)
    }

    fn output_bounds(&self) -> Result<(f64, f64)> {
        if self.model().output_kind() == PredictionKind::Categorical {
            return Err(Error::CategoricalExpectation);
        }
        let outputs = self.model().outputs(u128::MAX)?;
        Ok(bounds(outputs.iter().filter_map(|p| p.as_f64())))
    }
}

impl ExpectationSource for SampleProblem {
    fn num_features(&self) -> usize {
        WaxpOracle::num_features(self)
    }

    /// Mean prediction over rows agreeing with `v` on `S`.
    fn conditional_mean(&self, s: &FeatureSet) -> Result<f64> {
        let sample = self.sample();
        if sample.kind() == PredictionKind::Categorical {
            return Err(Error::CategoricalExpectation);
        }
        let space = sample.space();
        let v = &self.instance().point;
        let cfg = self.similarity();
        let masks: Vec<(usize, Vec<bool>)> = s.iter().map(|j| (j, cfg.similarity_mask(space, j, v[j]))).collect();
        let (mut sum, mut count) = (0.0, 0usize);
        for r in 0..sample.len() {
            if masks.iter().all(|(j, m)| m[sample.column(*j)[r] as usize]) {
                sum += sample.prediction(r).as_f64().unwrap_or(f64::NAN);
                count += 1;
            }
        }
        mean_or_empty(sum, count, s)
    }

    fn output_bounds(&self) -> Result<(f64, f64)> {
        if self.sample().kind() == PredictionKind::Categorical {
            return Err(Error::CategoricalExpectation);
        }
        Ok(bounds(self.sample().predictions().iter().filter_map(|p| p.as_f64())))
    }
}

impl ExpectationSource for Problem {
    fn num_features(&self) -> usize {
        WaxpOracle::num_features(self)
    }

    fn conditional_mean(&self, s: &FeatureSet) -> Result<f64> {
        match self {
            Problem::Model(p) => p.conditional_mean(s),
            Problem::Sample(p) => p.conditional_mean(s),
        }
    }

    fn output_bounds(&self) -> Result<(f64, f64)> {
        match self {
            Problem::Model(p) => p.output_bounds(),
            Problem::Sample(p) => p.output_bounds(),
        }
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// `ν(S) = ν_e(S) − ν_e(∅)`, with the raw `ν_e` still available.
pub struct ExpectationGame<E> {
    source: E,
    base: f64,
    range: f64,
    memo: Option<DashMap<FeatureSet, f64>>,
}

impl<E: ExpectationSource> ExpectationGame<E> {
    pub fn new(source: E) -> Result<Self> {
        let base = source.conditional_mean(&FeatureSet::empty())?;
        let (lo, hi) = source.output_bounds()?;
        let memo = new_memo(source.num_features());
        Ok(ExpectationGame {
            source,
            base,
            range: 2.0 * (hi - lo),
            memo,
        })
    }

    pub fn source(&self) -> &E {
        &self.source
    }

    /// Unshifted `ν_e(S)`.
    pub fn raw(&self, s: &FeatureSet) -> Result<f64> {
        if let Some(memo) = &self.memo {
            if let Some(hit) = memo.get(s) {
                return Ok(*hit);
            }
            let v = self.source.conditional_mean(s)?;
            memo.insert(s.clone(), v);
            return Ok(v);
        }
        self.source.conditional_mean(s)
    }

    /// `ν_e(∅)`.
    pub fn base(&self) -> f64 {
        self.base
    }
}

impl<E> std::fmt::Debug for ExpectationGame<E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExpectationGame")
            .field("base", &self.base)
            .field("range", &self.range)
            .finish_non_exhaustive()
    }
}

impl<E: ExpectationSource> Game for ExpectationGame<E> {
    fn players(&self) -> usize {
        self.source.num_features()
    }

    fn kind(&self) -> GameKind {
        GameKind::Expectation
    }

    fn value(&self, s: &FeatureSet) -> Result<f64> {
        if s.is_empty() {
            return Ok(0.0);
        }
        Ok(self.raw(s)? - self.base)
    }

    /// Conditional means lie within the output range `[lo, hi]`, so every
    /// marginal contribution lies in `[-(hi - lo), hi - lo]`.
    fn delta_range(&self) -> Option<f64> {
        Some(self.range)
    }
}

/// Explicit game on at most 20 players, `values[mask] = ν(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGame {
    players: usize,
    values: Vec<f64>,
}

impl TableGame {
    pub fn new(players: usize, values: Vec<f64>) -> Result<Self> {
        if players > MEMO_MAX_PLAYERS {
            return Err(Error::CapExceeded {
                what: "table game players",
                limit: MEMO_MAX_PLAYERS as u128,
                actual: players as u128,
            });
        }
        if values.len() != 1 << players {
            return Err(Error::LengthMismatch {
                expected: 1 << players,
                actual: values.len(),
            });
        }
        if values[0] != 0.0 {
            return Err(Error::NonzeroEmptyValue(values[0]));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite game value {bad}")));
        }
        Ok(TableGame { players, values })
    }

    /// Tabulates `f` over every subset.
    pub fn from_fn(players: usize, mut f: impl FnMut(&FeatureSet) -> f64) -> Result<Self> {
        if players > MEMO_MAX_PLAYERS {
            return Err(Error::CapExceeded {
                what: "table game players",
                limit: MEMO_MAX_PLAYERS as u128,
                actual: players as u128,
            });
        }
        let values = (0..1u64 << players).map(|m| f(&FeatureSet::from_mask(m))).collect();
        Self::new(players, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }
}

impl Game for TableGame {
    fn players(&self) -> usize {
        self.players
    }

    fn kind(&self) -> GameKind {
        GameKind::Custom
    }

    fn value(&self, s: &FeatureSet) -> Result<f64> {
        if s.bound() > self.players {
            return Err(Error::FeatureOutOfRange {
                index: s.bound(),
                features: self.players,
            });
        }
        Ok(self.values[s.to_mask() as usize])
    }

    fn delta_range(&self) -> Option<f64> {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for mask in 0..self.values.len() {
            for i in 0..self.players {
                if mask >> i & 1 == 0 {
                    let d = self.values[mask | 1 << i] - self.values[mask];
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
            }
        }
        (hi >= lo).then_some(hi - lo)
    }
}

impl<G: Game + ?Sized> Game for &G {
    fn players(&self) -> usize {
        (**self).players()
    }
    fn kind(&self) -> GameKind {
        (**self).kind()
    }
    fn value(&self, s: &FeatureSet) -> Result<f64> {
        (**self).value(s)
    }
    fn prefix_values(&self, order: &[usize], out: &mut Vec<f64>) -> Result<()> {
        (**self).prefix_values(order, out)
    }
    fn delta_range(&self) -> Option<f64> {
        (**self).delta_range()
    }
}

/// Marginal contribution `Δ_i(S) = ν(S ∪ {i}) − ν(S)`.
pub fn delta<G: Game + ?Sized>(game: &G, i: usize, s: &FeatureSet) -> Result<f64> {
    if i >= game.players() {
        return Err(Error::FeatureOutOfRange {
            index: i,
            features: game.players(),
        });
    }
    if s.contains(i) {
        return Err(Error::ElementInSet {
            feature: i + 1,
            set: s.to_string(),
        });
    }
    Ok(game.value(&s.with(i))? - game.value(s)?)
}

/// `Crit(i, S)`: `S` is not a weak AXp but `S ∪ {i}` is.
pub fn crit<O: WaxpOracle + ?Sized>(oracle: &O, i: usize, s: &FeatureSet) -> Result<bool> {
    if i >= oracle.num_features() {
        return Err(Error::FeatureOutOfRange {
            index: i,
            features: oracle.num_features(),
        });
    }
    if s.contains(i) {
        return Err(Error::ElementInSet {
            feature: i + 1,
            set: s.to_string(),
        });
    }
    Ok(!oracle.is_waxp(s) && oracle.is_waxp(&s.with(i)))
}
