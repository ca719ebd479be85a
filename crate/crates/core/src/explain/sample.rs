// SPDX-License-Identifier: Apache-2.0

//! Sample-based explanations: the coverage scan for weak AXps, the CXp
//! catalog and its hitting-set dual.

use std::sync::Arc;

use crate::data::{Instance, SampleSpace};
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;
use crate::similarity::SimilarityConfig;

use super::hitting::{minimal_elements, minimal_hitting_sets, DEFAULT_SUBSET_CAP};
use super::{extract_axp, relevancy_from, Relevance, WaxpOracle};

/// Rows covered by each feature in turn, then the rows left uncovered.
pub type CoverageTrace = (Vec<(usize, Vec<u32>)>, Vec<u32>);

/// A sample space, an instance and the similarity rules, with the per-row
/// and per-feature facts every query needs precomputed.
#[derive(Debug, Clone)]
pub struct SampleProblem {
    sample: Arc<SampleSpace>,
    instance: Instance,
    similarity: SimilarityConfig,
    /// Rows whose prediction is not similar to `q`; the only rows that matter.
    disagreeing: Vec<u32>,
    /// `similar[j][a]`: domain value `a` of feature `j` is similar to `v_j`.
    similar: Vec<Vec<bool>>,
}

impl SampleProblem {
    pub fn new(sample: Arc<SampleSpace>, instance: Instance, similarity: SimilarityConfig) -> Result<Self> {
        let space = sample.space().clone();
        space.check_point(&instance.point)?;
        if similarity.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                actual: similarity.len(),
            });
        }
        if instance.prediction.kind() != sample.kind() {
            return Err(Error::KindMismatch(format!(
                "instance prediction {} does not match the sample's {:?} predictions",
                instance.prediction,
                sample.kind()
            )));
        }
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        if u32::try_from(sample.len()).is_err() {
            return Err(Error::CapExceeded {
                what: "sample rows",
                limit: u32::MAX as u128,
                actual: sample.len() as u128,
            });
        }
        let q = &instance.prediction;
        let disagreeing: Vec<u32> = sample
            .predictions()
            .iter()
            .enumerate()
            .filter(|(_, p)| !similarity.pred_similar_lenient(p, q))
            .map(|(r, _)| r as u32)
            .collect();
        if disagreeing.len() == sample.len() {
            return Err(Error::NoAgreeingRow);
        }
        let similar = (0..space.len())
            .map(|j| similarity.similarity_mask(&space, j, instance.point[j]))
            .collect();
        Ok(SampleProblem {
            sample,
            instance,
            similarity,
            disagreeing,
            similar,
        })
    }

    pub fn sample(&self) -> &Arc<SampleSpace> {
        &self.sample
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn similarity(&self) -> &SimilarityConfig {
        &self.similarity
    }

    /// Row indices whose prediction is distinguishable from `q`.
    pub fn disagreeing_rows(&self) -> &[u32] {
        &self.disagreeing
    }

    #[inline]
    fn agrees(&self, j: usize, r: u32) -> bool {
        self.similar[j][self.sample.column(j)[r as usize] as usize]
    }

    fn check_set(&self, w: &FeatureSet) -> Result<()> {
        if w.bound() > self.num_features() {
            return Err(Error::FeatureOutOfRange {
                index: w.bound(),
                features: self.num_features(),
            });
        }
        Ok(())
    }

    /// Weak sbAXp test. A disagreeing row is covered once some `j ∈ W` has
    /// `u_j ≉ v_j`; `W` is a weak sbAXp iff every disagreeing row gets covered.
    /// Features are processed one at a time over the shrinking set of
    /// uncovered rows, so the cost is at most one lookup per (feature, row).
    pub fn is_sb_waxp(&self, w: &FeatureSet) -> Result<bool> {
        self.check_set(w)?;
        Ok(self.covers(w))
    }

    fn covers(&self, w: &FeatureSet) -> bool {
        let features: Vec<usize> = w.iter().collect();
        all_covered(&self.sample, &self.similar, &self.disagreeing, &features)
    }

    /// Per feature of `W` in ascending order, the rows that become covered
    /// by it, followed by the rows left uncovered.
    pub fn coverage_trace(&self, w: &FeatureSet) -> Result<CoverageTrace> {
        self.check_set(w)?;
        let mut uncovered = self.disagreeing.clone();
        let mut steps = Vec::new();
        for j in w.iter() {
            let (keep, covered): (Vec<u32>, Vec<u32>) = uncovered.iter().partition(|&&r| self.agrees(j, r));
            steps.push((j, covered));
            uncovered = keep;
        }
        Ok((steps, uncovered))
    }

    /// `diff(u) = {i : u_i ≉ v_i}` for a row.
    pub fn disagreement_set(&self, r: u32) -> FeatureSet {
        (0..self.num_features()).filter(|&j| !self.agrees(j, r)).collect()
    }

    /// Minimal sbCXps plus the distinct per-row disagreement sets.
    pub fn cxp_catalog(&self) -> CxpCatalog {
        let mut diffs: Vec<FeatureSet> = self.disagreeing.iter().map(|&r| self.disagreement_set(r)).collect();
        diffs.sort();
        diffs.dedup();
        let minimal = minimal_elements(diffs.iter().cloned());
        CxpCatalog { minimal, diffs }
    }

    /// Deletion-based sbAXp inside `seed`, ascending feature order.
    pub fn extract_sb_axp(&self, seed: &FeatureSet) -> Result<FeatureSet> {
        self.check_set(seed)?;
        extract_axp(self, seed)
    }

    /// All sbAXps, as the minimal hitting sets of the CXp catalog.
    pub fn sb_axps(&self) -> Result<Vec<FeatureSet>> {
        self.cxp_catalog().axps(DEFAULT_SUBSET_CAP)
    }

    pub fn relevancy(&self) -> Result<Vec<Relevance>> {
        Ok(relevancy_from(self.num_features(), &self.sb_axps()?))
    }
}

impl WaxpOracle for SampleProblem {
    fn num_features(&self) -> usize {
        self.similar.len()
    }

    fn is_waxp(&self, s: &FeatureSet) -> bool {
        self.covers(s)
    }

    fn first_sufficient_prefix(&self, order: &[usize]) -> Option<usize> {
        if self.disagreeing.is_empty() {
            return Some(0);
        }
        let mut uncovered: Vec<u32> = Vec::new();
        for (k, &j) in order.iter().enumerate() {
            if k == 0 {
                uncovered = self.disagreeing.iter().copied().filter(|&r| self.agrees(j, r)).collect();
            } else {
                uncovered.retain(|&r| self.agrees(j, r));
            }
            if uncovered.is_empty() {
                return Some(k + 1);
            }
        }
        None
    }
}

/// Disagreeing rows per block of the scan. A block's uncovered list stays in
/// cache while every feature of `W` is applied to it.
const SCAN_BLOCK: usize = 4096;

/// Whether fixing `features` covers every row of `disagreeing`. Stops at the
/// first block with a row left uncovered.
fn all_covered(sample: &SampleSpace, similar: &[Vec<bool>], disagreeing: &[u32], features: &[usize]) -> bool {
    let Some((&first, rest)) = features.split_first() else {
        return disagreeing.is_empty();
    };
    let agrees = |j: usize, r: u32| similar[j][sample.column(j)[r as usize] as usize];
    let mut uncovered = Vec::with_capacity(SCAN_BLOCK.min(disagreeing.len()));
    for block in disagreeing.chunks(SCAN_BLOCK) {
        uncovered.clear();
        uncovered.extend(block.iter().copied().filter(|&r| agrees(first, r)));
        for &j in rest {
            if uncovered.is_empty() {
                break;
            }
            uncovered.retain(|&r| agrees(j, r));
        }
        if !uncovered.is_empty() {
            return false;
        }
    }
    true
}

/// One-shot weak sbAXp test without building a [`SampleProblem`]: one pass to
/// find the disagreeing rows, then the coverage scan over `W`.
pub fn is_sb_waxp(
    sample: &SampleSpace,
    instance: &Instance,
    similarity: &SimilarityConfig,
    w: &FeatureSet,
) -> Result<bool> {
    let space = sample.space();
    space.check_point(&instance.point)?;
    if w.bound() > space.len() {
        return Err(Error::FeatureOutOfRange {
            index: w.bound(),
            features: space.len(),
        });
    }
    let q = &instance.prediction;
    let disagreeing: Vec<u32> = sample
        .predictions()
        .iter()
        .enumerate()
        .filter(|(_, p)| !similarity.pred_similar_lenient(p, q))
        .map(|(r, _)| r as u32)
        .collect();
    let mut similar = vec![Vec::new(); space.len()];
    for j in w.iter() {
        similar[j] = similarity.similarity_mask(space, j, instance.point[j]);
    }
    let features: Vec<usize> = w.iter().collect();
    Ok(all_covered(sample, &similar, &disagreeing, &features))
}

/// The minimal sample-based CXps of a problem.
///
/// `Y` is a weak sbCXp iff it contains some member of `minimal`; `W` is a weak
/// sbAXp iff it intersects every member.
#[derive(Debug, Clone, PartialEq)]
pub struct CxpCatalog {
    pub minimal: Vec<FeatureSet>,
    /// Distinct disagreement sets of the disagreeing rows.
    pub diffs: Vec<FeatureSet>,
}

impl CxpCatalog {
    pub fn is_weak_cxp(&self, y: &FeatureSet) -> bool {
        self.minimal.iter().any(|c| c.is_subset(y))
    }

    /// Weak sbAXp test against the catalog: `W` must hit every minimal CXp.
    pub fn is_sb_waxp(&self, w: &FeatureSet) -> bool {
        self.minimal.iter().all(|c| c.intersects(w))
    }

    pub fn axps(&self, cap: usize) -> Result<Vec<FeatureSet>> {
        minimal_hitting_sets(&self.minimal, cap)
    }
}
