// SPDX-License-Identifier: Apache-2.0

//! Rankings of features by score and rank-biased overlap between rankings.

mod census;

use serde::{Deserialize, Serialize};

pub use census::{census_case, flaw_census, CensusRow, CensusSummary, CENSUS_MAX_VARS, SCORE_TOLERANCE};

use crate::error::{Error, Result};
use crate::shapley::ScoreReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    Raw,
    Absolute,
}

/// Features ordered from most to least important, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams(format!("ranking {order:?} repeats a feature")));
        }
        Ok(Ranking { order })
    }

    pub fn from_one_based(order: &[usize]) -> Result<Self> {
        if order.contains(&0) {
            return Err(Error::InvalidParams("feature numbers start at 1".into()));
        }
        Self::new(order.iter().map(|k| k - 1).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.order.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Descending by key; ties go to the lower feature index.
pub fn rank(report: &ScoreReport, key: RankKey) -> Result<Ranking> {
    let scores = report.values();
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidParams(format!("cannot rank non-finite score {bad}")));
    }
    let keyed = |i: usize| match key {
        RankKey::Raw => scores[i],
        RankKey::Absolute => scores[i].abs(),
    };
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // partial_cmp so that -0.0 and 0.0 tie; scores are finite here
    order.sort_by(|&a, &b| {
        keyed(b)
            .partial_cmp(&keyed(a))
            .expect("finite scores")
            .then(a.cmp(&b))
    });
    Ok(Ranking { order })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RboParams {
    pub persistence: f64,
    pub depth: usize,
}

impl Default for RboParams {
    fn default() -> Self {
        RboParams {
            persistence: 0.5,
            depth: 5,
        }
    }
}

impl RboParams {
    fn validate(&self) -> Result<()> {
        if !(self.persistence > 0.0 && self.persistence < 1.0) {
            return Err(Error::InvalidParams(format!(
                "persistence must lie in (0,1), got {}",
                self.persistence
            )));
        }
        if self.depth == 0 {
            return Err(Error::InvalidParams("depth must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rbo {
    /// Divided by `1 − p^d`, so identical rankings score exactly 1.
    pub normalized: f64,
    /// `(1 − p) Σ_k p^{k−1} A_k`, truncated at depth `d`.
    pub raw: f64,
}

/// Truncated rank-biased overlap. The agreement at depth `k` is
/// `|a[..k] ∩ b[..k]| / k`, with `k` capped at the ranking length.
pub fn rbo(a: &Ranking, b: &Ranking, params: &RboParams) -> Result<Rbo> {
    params.validate()?;
    let (mut sa, mut sb) = (a.order.clone(), b.order.clone());
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(Error::UniverseMismatch);
    }
    let len = a.len();
    let p = params.persistence;
    let mut seen_a = vec![false; sa.last().map_or(0, |m| m + 1)];
    let mut seen_b = seen_a.clone();
    let mut overlap = 0usize;
    let mut weight = 1.0;
    let mut sum = 0.0;
    let mut weights = 0.0;
    for k in 1..=params.depth {
        let depth = k.min(len);
        if k <= len {
            let (x, y) = (a.order[k - 1], b.order[k - 1]);
            seen_a[x] = true;
            seen_b[y] = true;
            if x == y {
                overlap += 1;
            } else {
                overlap += usize::from(seen_b[x]) + usize::from(seen_a[y]);
            }
        }
        if depth > 0 {
            sum += weight * overlap as f64 / depth as f64;
        }
        weights += weight;
        weight *= p;
    }
    let raw = (1.0 - p) * sum;
    // (1-p)/(1-p^d) == 1/Σ p^{k-1}; dividing by the accumulated weights makes
    // a perfect match exactly 1
    let normalized = sum / weights;
    Ok(Rbo { normalized, raw })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rbo_raw: f64,
    pub rbo_abs: f64,
    pub rbo_raw_unnormalized: f64,
}

/// RBO between two reports, ranking once by raw scores and once by
/// absolute scores.
pub fn compare_reports(a: &ScoreReport, b: &ScoreReport, params: &RboParams) -> Result<Comparison> {
    if a.len() != b.len() {
        return Err(Error::UniverseMismatch);
    }
    let raw = rbo(&rank(a, RankKey::Raw)?, &rank(b, RankKey::Raw)?, params)?;
    let abs = rbo(&rank(a, RankKey::Absolute)?, &rank(b, RankKey::Absolute)?, params)?;
    Ok(Comparison {
        rbo_raw: raw.normalized,
        rbo_abs: abs.normalized,
        rbo_raw_unnormalized: raw.raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfun::GameKind;
    use proptest::prelude::*;

    fn report(v: &[f64]) -> ScoreReport {
        ScoreReport::exact(GameKind::Custom, v.to_vec())
    }

    fn r(v: &[usize]) -> Ranking {
        Ranking::from_one_based(v).unwrap()
    }

    /// Direct evaluation with explicit prefix sets.
    fn rbo_oracle(a: &[usize], b: &[usize], p: f64, d: usize) -> f64 {
        let mut sum = 0.0;
        for k in 1..=d {
            let kk = k.min(a.len());
            let inter = a[..kk].iter().filter(|x| b[..kk].contains(x)).count();
            sum += p.powi(k as i32 - 1) * inter as f64 / kk as f64;
        }
        (1.0 - p) * sum / (1.0 - p.powi(d as i32))
    }

    #[test]
    fn ranking_examples() {
        assert_eq!(rank(&report(&[0.5, 0.0, 0.5]), RankKey::Raw).unwrap().to_one_based(), vec![1, 3, 2]);
        let or_e = report(&[0.0, -0.125]);
        assert_eq!(rank(&or_e, RankKey::Raw).unwrap().to_one_based(), vec![1, 2]);
        assert_eq!(rank(&or_e, RankKey::Absolute).unwrap().to_one_based(), vec![2, 1]);
        assert_eq!(rank(&report(&[3.0]), RankKey::Raw).unwrap().to_one_based(), vec![1]);
        assert!(rank(&report(&[f64::NAN]), RankKey::Raw).is_err());
    }

    #[test]
    fn rbo_examples() {
        let p = RboParams::default();
        let a = r(&[1, 2, 3, 4, 5]);
        assert_eq!(rbo(&a, &a, &p).unwrap().normalized, 1.0);
        let swapped = rbo(&a, &r(&[2, 1, 3, 4, 5]), &p).unwrap();
        assert!((swapped.normalized - 0.48387).abs() < 1e-5);
        assert!((swapped.normalized - 0.46875 / 0.96875).abs() < 1e-15);
        assert!((swapped.raw - 0.46875).abs() < 1e-15);

        let disjoint = rbo(
            &r(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]),
            &r(&[6, 7, 8, 9, 10, 1, 2, 3, 4, 5]),
            &p,
        )
        .unwrap();
        assert_eq!(disjoint.normalized, 0.0);

        let two = RboParams {
            persistence: 0.5,
            depth: 2,
        };
        let rev = rbo(&r(&[1, 2]), &r(&[2, 1]), &two).unwrap();
        assert!((rev.normalized - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rbo_errors() {
        let p = RboParams::default();
        assert!(matches!(rbo(&r(&[1, 2]), &r(&[1, 3]), &p), Err(Error::UniverseMismatch)));
        let bad = RboParams {
            persistence: 1.0,
            depth: 5,
        };
        assert!(rbo(&r(&[1]), &r(&[1]), &bad).is_err());
        assert!(Ranking::from_one_based(&[1, 1]).is_err());
    }

    #[test]
    fn compare_or_reports() {
        let p = RboParams::default();
        let axp = report(&[1.0, 0.0]);
        let exp = report(&[0.375, -0.125]);
        let c = compare_reports(&axp, &exp, &p).unwrap();
        assert_eq!(c.rbo_raw, 1.0);
        // absolute ranking of the expectation report is still <1,2>
        assert_eq!(c.rbo_abs, 1.0);
        let same = compare_reports(&axp, &axp, &p).unwrap();
        assert_eq!((same.rbo_raw, same.rbo_abs), (1.0, 1.0));
        assert!(compare_reports(&axp, &report(&[1.0]), &p).is_err());
    }

    proptest! {
        #[test]
        fn rbo_matches_oracle_and_is_symmetric(
            perm_a in Just((1..=8usize).collect::<Vec<_>>()).prop_shuffle(),
            perm_b in Just((1..=8usize).collect::<Vec<_>>()).prop_shuffle(),
            p in 0.05f64..0.95,
            d in 1usize..12,
        ) {
            let params = RboParams { persistence: p, depth: d };
            let (a, b) = (r(&perm_a), r(&perm_b));
            let ab = rbo(&a, &b, &params).unwrap().normalized;
            let ba = rbo(&b, &a, &params).unwrap().normalized;
            prop_assert!((ab - ba).abs() < 1e-15);
            prop_assert!((ab - rbo_oracle(&perm_a, &perm_b, p, d)).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert!((rbo(&a, &a, &params).unwrap().normalized - 1.0).abs() < 1e-12);
        }

        #[test]
        fn rank_is_scale_invariant(
            scores in proptest::collection::vec(-10.0f64..10.0, 1..10),
            c in 0.01f64..100.0,
        ) {
            let scaled: Vec<f64> = scores.iter().map(|s| s * c).collect();
            for key in [RankKey::Raw, RankKey::Absolute] {
                prop_assert_eq!(rank(&report(&scores), key).unwrap(), rank(&report(&scaled), key).unwrap());
            }
        }
    }
}
