// SPDX-License-Identifier: Apache-2.0

//! Abductive and contrastive explanations, model-based and sample-based.

mod hitting;
mod model;
mod sample;

use serde::Serialize;

pub use hitting::{minimal_elements, minimal_hitting_sets, minimal_satisfying, DEFAULT_SUBSET_CAP};
pub use model::ModelProblem;
pub use sample::{is_sb_waxp, CoverageTrace, CxpCatalog, SampleProblem};

use crate::data::Instance;
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;

/// Decides whether a set of features is a weak abductive explanation.
///
/// Implementations must be monotone: a superset of a weak AXp is a weak AXp.
pub trait WaxpOracle: Send + Sync {
    fn num_features(&self) -> usize;

    fn is_waxp(&self, s: &FeatureSet) -> bool;

    /// Smallest `k` such that `order[..k]` is a weak AXp, if any.
    fn first_sufficient_prefix(&self, order: &[usize]) -> Option<usize> {
        // monotone in k, so bisect
        let test = |k: usize| self.is_waxp(&order[..k].iter().copied().collect());
        if !test(order.len()) {
            return None;
        }
        let (mut lo, mut hi) = (0, order.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if test(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relevance {
    Relevant,
    Irrelevant,
}

pub(crate) fn relevancy_from(m: usize, axps: &[FeatureSet]) -> Vec<Relevance> {
    let union = axps.iter().fold(FeatureSet::empty(), |acc, s| acc.union(s));
    (0..m)
        .map(|i| {
            if union.contains(i) {
                Relevance::Relevant
            } else {
                Relevance::Irrelevant
            }
        })
        .collect()
}

/// Shrinks a weak AXp to an AXp by trying to drop each member in ascending
/// order.
pub fn extract_axp<O: WaxpOracle + ?Sized>(oracle: &O, seed: &FeatureSet) -> Result<FeatureSet> {
    if !oracle.is_waxp(seed) {
        return Err(Error::NotWeakAxp(seed.to_string()));
    }
    let mut s = seed.clone();
    for i in seed.iter() {
        let smaller = s.without(i);
        if oracle.is_waxp(&smaller) {
            s = smaller;
        }
    }
    Ok(s)
}

/// Either flavour of explanation problem.
#[derive(Debug, Clone)]
pub enum Problem {
    Model(ModelProblem),
    Sample(SampleProblem),
}

impl Problem {
    pub fn instance(&self) -> &Instance {
        match self {
            Problem::Model(p) => p.instance(),
            Problem::Sample(p) => p.instance(),
        }
    }

    pub fn axps(&self) -> Result<Vec<FeatureSet>> {
        match self {
            Problem::Model(p) => p.axps(),
            Problem::Sample(p) => p.sb_axps(),
        }
    }

    pub fn cxps(&self) -> Result<Vec<FeatureSet>> {
        match self {
            Problem::Model(p) => p.cxps(),
            Problem::Sample(p) => Ok(p.cxp_catalog().minimal),
        }
    }

    pub fn relevancy(&self) -> Result<Vec<Relevance>> {
        match self {
            Problem::Model(p) => p.relevancy(),
            Problem::Sample(p) => p.relevancy(),
        }
    }
}

impl WaxpOracle for Problem {
    fn num_features(&self) -> usize {
        match self {
            Problem::Model(p) => p.num_features(),
            Problem::Sample(p) => p.num_features(),
        }
    }

    fn is_waxp(&self, s: &FeatureSet) -> bool {
        match self {
            Problem::Model(p) => p.is_waxp(s),
            Problem::Sample(p) => p.is_waxp(s),
        }
    }

    fn first_sufficient_prefix(&self, order: &[usize]) -> Option<usize> {
        match self {
            Problem::Model(p) => p.first_sufficient_prefix(order),
            Problem::Sample(p) => p.first_sufficient_prefix(order),
        }
    }
}
