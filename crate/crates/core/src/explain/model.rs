// SPDX-License-Identifier: Apache-2.0

//! Model-based explanations over enumerable feature spaces.

use std::sync::Arc;

use crate::data::{Instance, Prediction};
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;
use crate::models::Model;
use crate::similarity::SimilarityConfig;
use crate::space::DEFAULT_ENUMERATION_CAP;

use super::hitting::{minimal_satisfying, DEFAULT_SUBSET_CAP};
use super::{relevancy_from, Relevance, WaxpOracle};

/// A total model, an instance and similarity rules. Construction walks the
/// whole space once and keeps the points whose prediction is distinguishable
/// from `q`.
#[derive(Debug, Clone)]
pub struct ModelProblem {
    model: Arc<Model>,
    instance: Instance,
    similarity: SimilarityConfig,
    /// Linear indices of points `x` with `π(x) ≉ q`.
    disagreeing: Vec<u64>,
}

impl ModelProblem {
    /// Instance `(v, π(v))`.
    pub fn new(model: Arc<Model>, point: Vec<u32>, similarity: SimilarityConfig) -> Result<Self> {
        Self::with_cap(model, point, similarity, DEFAULT_ENUMERATION_CAP)
    }

    pub fn with_cap(model: Arc<Model>, point: Vec<u32>, similarity: SimilarityConfig, cap: u128) -> Result<Self> {
        let q = model.predict(&point)?;
        Self::with_instance(model, Instance::new(point, q), similarity, cap)
    }

    /// Checks `q ≈ π(v)`.
    pub fn with_instance(model: Arc<Model>, instance: Instance, similarity: SimilarityConfig, cap: u128) -> Result<Self> {
        let space = model.space().clone();
        if !model.is_total() {
            return Err(Error::InvalidParams(
                "model-based explanations need a model defined on the whole space".into(),
            ));
        }
        if similarity.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                actual: similarity.len(),
            });
        }
        let at_v = model.predict(&instance.point)?;
        if !similarity.similar_pred(&at_v, &instance.prediction)? {
            return Err(Error::InstanceMismatch);
        }
        let mut first: Option<Prediction> = None;
        let mut constant = true;
        let mut disagreeing = Vec::new();
        for (k, x) in space.enumerate(cap)?.enumerate() {
            let p = model.predict(&x)?;
            if !similarity.similar_pred(&p, &instance.prediction)? {
                disagreeing.push(k as u64);
            }
            match &first {
                None => first = Some(p),
                Some(f) => constant &= *f == p,
            }
        }
        if constant {
            return Err(Error::ConstantModel);
        }
        Ok(ModelProblem {
            model,
            instance,
            similarity,
            disagreeing,
        })
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn similarity(&self) -> &SimilarityConfig {
        &self.similarity
    }

    /// WAXp: every point agreeing with `v` on `S` has a prediction similar to `q`.
    pub fn is_waxp_checked(&self, s: &FeatureSet) -> Result<bool> {
        if s.bound() > self.num_features() {
            return Err(Error::FeatureOutOfRange {
                index: s.bound(),
                features: self.num_features(),
            });
        }
        Ok(self.is_waxp(s))
    }

    /// Weak CXp: some point agreeing with `v` outside `Y` has a
    /// distinguishable prediction.
    pub fn is_wcxp(&self, y: &FeatureSet) -> bool {
        !self.is_waxp(&y.complement(self.num_features()))
    }

    /// All AXps, by exhaustive search over subsets in cardinality order.
    pub fn axps(&self) -> Result<Vec<FeatureSet>> {
        let universe: Vec<usize> = (0..self.num_features()).collect();
        minimal_satisfying(&universe, DEFAULT_SUBSET_CAP, |s| self.is_waxp(s))
    }

    pub fn cxps(&self) -> Result<Vec<FeatureSet>> {
        let universe: Vec<usize> = (0..self.num_features()).collect();
        minimal_satisfying(&universe, DEFAULT_SUBSET_CAP, |y| self.is_wcxp(y))
    }

    pub fn relevancy(&self) -> Result<Vec<Relevance>> {
        Ok(relevancy_from(self.num_features(), &self.axps()?))
    }

    /// Calls `f(x)` for every point of the space with `x_S ≈ v_S`.
    pub(crate) fn for_each_consistent(&self, s: &FeatureSet, mut f: impl FnMut(&[u32])) -> Result<()> {
        let space = self.model.space();
        // the space was enumerable at construction
        for x in space.enumerate(u128::MAX)? {
            if self.similarity.similar_on_unchecked(space, s, &x, &self.instance.point) {
                f(&x);
            }
        }
        Ok(())
    }
}

impl WaxpOracle for ModelProblem {
    fn num_features(&self) -> usize {
        self.model.space().len()
    }

    fn is_waxp(&self, s: &FeatureSet) -> bool {
        let space = self.model.space();
        let v = &self.instance.point;
        let mut x = vec![0u32; space.len()];
        self.disagreeing.iter().all(|&k| {
            space.decode_into(k as u128, &mut x);
            !self.similarity.similar_on_unchecked(space, s, &x, v)
        })
    }
}
