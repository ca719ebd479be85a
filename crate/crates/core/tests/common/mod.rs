// SPDX-License-Identifier: Apache-2.0

//! Random problem generators and brute-force oracles shared by the
//! integration suites. The oracles work on raw numbers and bitmasks and do not
//! call into the library's similarity or explanation code.

#![allow(dead_code)]

use std::sync::Arc;

use nushap_core::{
    FeatureDef, FeatureSet, FeatureSpace, Instance, Prediction, PredictionKind, Rule, SampleSpace, SimilarityConfig,
    ToleranceMode,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use nushap_core::TableGame;

/// A random sample-based problem together with the raw numbers the oracle
/// needs.
pub struct RawProblem {
    pub sample: Arc<SampleSpace>,
    pub instance: Instance,
    pub similarity: SimilarityConfig,
    /// `values[j][a]`: numeric value of domain index `a` of feature `j`.
    pub values: Vec<Vec<f64>>,
    pub rows: Vec<Vec<u32>>,
    pub preds: Vec<f64>,
    pub rules: Vec<(f64, bool)>,
    pub pred_rule: (f64, bool),
}

impl RawProblem {
    pub fn m(&self) -> usize {
        self.values.len()
    }
}

fn random_rule<R: Rng>(rng: &mut R) -> (f64, bool) {
    // (tau, relative); tau 0 in absolute mode is plain equality
    let tau = *[0.0, 0.0, 0.5, 1.0, 1.5].choose(rng).unwrap();
    (tau, rng.gen_bool(0.25))
}

fn to_rule((tau, relative): (f64, bool)) -> Rule {
    Rule::Tolerance {
        tau,
        mode: if relative {
            ToleranceMode::Relative
        } else {
            ToleranceMode::Absolute
        },
    }
}

/// Oracle for a single comparison.
pub fn close((tau, relative): (f64, bool), a: f64, b: f64) -> bool {
    let bound = if relative { tau * (a.abs() + b.abs()) / 2.0 } else { tau };
    (a - b).abs() <= bound
}

/// Ordinal features with 2..=4 values and tolerance rules; at least one row
/// agrees with the instance's prediction.
pub fn random_sample_problem<R: Rng>(rng: &mut R, max_m: usize, max_rows: usize) -> RawProblem {
    let m = rng.gen_range(1..=max_m);
    let values: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            let k = rng.gen_range(2..=4);
            let mut vals: Vec<f64> = (0..k).map(|a| a as f64 - rng.gen_range(0..2) as f64).collect();
            vals.dedup();
            vals
        })
        .collect();
    let space = Arc::new(
        FeatureSpace::new(
            values
                .iter()
                .enumerate()
                .map(|(j, v)| FeatureDef::ordinal(format!("f{}", j + 1), v.iter().copied()))
                .collect(),
        )
        .unwrap(),
    );
    let rules: Vec<(f64, bool)> = (0..m).map(|_| random_rule(rng)).collect();
    let pred_rule = (*[0.0, 0.0, 1.0].choose(rng).unwrap(), false);
    let n = rng.gen_range(1..=max_rows);
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| values.iter().map(|v| rng.gen_range(0..v.len() as u32)).collect())
        .collect();
    let preds: Vec<f64> = (0..n).map(|_| rng.gen_range(0..4) as f64).collect();
    let point: Vec<u32> = values.iter().map(|v| rng.gen_range(0..v.len() as u32)).collect();
    let q = preds[rng.gen_range(0..n)];
    let sample = SampleSpace::from_rows(
        space.clone(),
        PredictionKind::Ordinal,
        rows.iter().cloned().zip(preds.iter().map(|&p| Prediction::Value(p))),
    )
    .unwrap();
    let similarity =
        SimilarityConfig::new(&space, rules.iter().map(|&r| to_rule(r)).collect(), to_rule(pred_rule)).unwrap();
    RawProblem {
        sample: Arc::new(sample),
        instance: Instance::new(point, Prediction::Value(q)),
        similarity,
        values,
        rows,
        preds,
        rules,
        pred_rule,
    }
}

/// Definition of a weak sbAXp: every row that matches `v` on `w` has a
/// prediction similar to `q`.
pub fn brute_waxp(p: &RawProblem, w: u64) -> bool {
    let v = &p.instance.point;
    let q = p.instance.prediction.as_f64().unwrap();
    p.rows.iter().zip(&p.preds).all(|(x, &pred)| {
        let matches = (0..p.m())
            .filter(|j| w >> j & 1 == 1)
            .all(|j| close(p.rules[j], p.values[j][x[j] as usize], p.values[j][v[j] as usize]));
        !matches || close(p.pred_rule, pred, q)
    })
}

/// Definition of a weak sbCXp: some row matches `v` outside `y` and has a
/// prediction distinguishable from `q`.
pub fn brute_wcxp(p: &RawProblem, y: u64) -> bool {
    let full = (1u64 << p.m()) - 1;
    !brute_waxp(p, full & !y)
}

/// Subset-minimal masks over `m` bits satisfying `pred`, in the library's
/// cardinality-then-lexicographic order.
pub fn brute_minimal(m: usize, pred: impl Fn(u64) -> bool) -> Vec<FeatureSet> {
    let sat: Vec<u64> = (0..1u64 << m).filter(|&s| pred(s)).collect();
    let mut out: Vec<FeatureSet> = sat
        .iter()
        .filter(|&&s| !sat.iter().any(|&t| t != s && t & s == t))
        .map(|&s| FeatureSet::from_mask(s))
        .collect();
    out.sort();
    out
}

pub fn mask(s: &FeatureSet) -> u64 {
    s.to_mask()
}

/// Monotone game with non-negative dividends on random coalitions. Player
/// `dummy` (if any) appears in no coalition; players `a` and `b` are made
/// interchangeable by mirroring every coalition.
pub fn random_monotone_game(rng: &mut ChaCha8Rng, n: usize) -> TableGame {
    let dummy = rng.gen_bool(0.5).then(|| rng.gen_range(0..n));
    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let swap = |t: u64| {
        let (ba, bb) = (t >> a & 1, t >> b & 1);
        (t & !(1 << a) & !(1 << b)) | (ba << b) | (bb << a)
    };
    let mut dividends = vec![0.0; 1 << n];
    for _ in 0..rng.gen_range(1..=2 * n) {
        let t = rng.gen_range(1u64..1 << n);
        if dummy.is_some_and(|d| t >> d & 1 == 1) {
            continue;
        }
        let w: f64 = rng.gen_range(0.0..1.0);
        dividends[t as usize] += w;
        dividends[swap(t) as usize] += w;
    }
    TableGame::from_fn(n, |s| {
        let s = s.to_mask();
        (1..1u64 << n).filter(|t| t & s == *t).map(|t| dividends[t as usize]).sum()
    })
    .unwrap()
}
