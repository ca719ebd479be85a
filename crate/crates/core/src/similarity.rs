// SPDX-License-Identifier: Apache-2.0

//! Similarity relations over feature values and predictions.
//!
//! Every rule is reflexive and symmetric. Tolerance rules are not transitive,
//! and nothing downstream assumes they are.

use serde::{Deserialize, Serialize};

use crate::data::Prediction;
use crate::error::{Error, Result};
use crate::featureset::FeatureSet;
use crate::space::{FeatureKind, FeatureSpace, FeatureValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToleranceMode {
    /// `|a - b| <= tau`.
    #[default]
    Absolute,
    /// `|a - b| <= tau * (|a| + |b|) / 2`, i.e. the change relative to the
    /// arithmetic mean of the magnitudes.
    Relative,
}

/// How two values of one feature (or two predictions) are compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Rule {
    Exact,
    Tolerance { tau: f64, mode: ToleranceMode },
}

impl Rule {
    pub fn absolute(tau: f64) -> Self {
        Rule::Tolerance {
            tau,
            mode: ToleranceMode::Absolute,
        }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if let Rule::Tolerance { tau, .. } = self {
            if !(tau.is_finite() && *tau >= 0.0) {
                return Err(Error::InvalidSimilarity(format!(
                    "{what}: tolerance must be finite and non-negative, got {tau}"
                )));
            }
        }
        Ok(())
    }

    pub fn numbers_similar(&self, a: f64, b: f64) -> bool {
        match *self {
            Rule::Exact => a == b,
            Rule::Tolerance { tau, mode } => {
                let d = (a - b).abs();
                match mode {
                    ToleranceMode::Absolute => d <= tau,
                    ToleranceMode::Relative => d <= tau * (a.abs() + b.abs()) / 2.0,
                }
            }
        }
    }

    fn values_similar(&self, a: &FeatureValue, b: &FeatureValue) -> bool {
        match (a, b) {
            (FeatureValue::Ord(x), FeatureValue::Ord(y)) => self.numbers_similar(*x, *y),
            _ => a == b,
        }
    }
}

/// Per-feature rules plus the prediction rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityConfig {
    features: Vec<Rule>,
    prediction: Rule,
}

impl SimilarityConfig {
    /// Equality everywhere.
    pub fn exact(m: usize) -> Self {
        SimilarityConfig {
            features: vec![Rule::Exact; m],
            prediction: Rule::Exact,
        }
    }

    pub fn new(space: &FeatureSpace, features: Vec<Rule>, prediction: Rule) -> Result<Self> {
        if features.len() != space.len() {
            return Err(Error::InvalidSimilarity(format!(
                "{} feature rules for {} features",
                features.len(),
                space.len()
            )));
        }
        for (i, r) in features.iter().enumerate() {
            r.validate(&format!("feature {}", i + 1))?;
            if space.feature(i).kind == FeatureKind::Categorical && matches!(r, Rule::Tolerance { .. }) {
                return Err(Error::InvalidSimilarity(format!(
                    "feature {} is categorical and only admits exact matching",
                    i + 1
                )));
            }
        }
        prediction.validate("prediction")?;
        Ok(SimilarityConfig { features, prediction })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature_rule(&self, i: usize) -> Rule {
        self.features[i]
    }

    pub fn prediction_rule(&self) -> Rule {
        self.prediction
    }

    pub fn set_feature_rule(&mut self, i: usize, rule: Rule) {
        self.features[i] = rule;
    }

    pub fn set_prediction_rule(&mut self, rule: Rule) {
        self.prediction = rule;
    }

    /// `x_i ≈ v_i` for value indices of feature `i`.
    #[inline]
    pub fn feature_similar(&self, space: &FeatureSpace, i: usize, a: u32, b: u32) -> bool {
        a == b || {
            match self.features[i] {
                Rule::Exact => false,
                rule => rule.values_similar(space.value(i, a), space.value(i, b)),
            }
        }
    }

    /// `x_S ≈ v_S`: conjunction over the members of `s`. True for `s = ∅`.
    pub fn similar_on(&self, space: &FeatureSpace, s: &FeatureSet, x: &[u32], v: &[u32]) -> Result<bool> {
        space.check_point(x)?;
        space.check_point(v)?;
        if self.len() != space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len(),
                actual: self.len(),
            });
        }
        if s.bound() > space.len() {
            return Err(Error::FeatureOutOfRange {
                index: s.bound(),
                features: space.len(),
            });
        }
        Ok(self.similar_on_unchecked(space, s, x, v))
    }

    #[inline]
    pub(crate) fn similar_on_unchecked(&self, space: &FeatureSpace, s: &FeatureSet, x: &[u32], v: &[u32]) -> bool {
        s.iter().all(|i| self.feature_similar(space, i, x[i], v[i]))
    }

    /// Same as [`similar_pred`](Self::similar_pred) but panics-free on kind
    /// mismatch (mismatched kinds are never similar).
    #[inline]
    pub(crate) fn pred_similar_lenient(&self, a: &Prediction, b: &Prediction) -> bool {
        self.similar_pred(a, b).unwrap_or(false)
    }

    /// `π(x) ≈ π(v)`.
    pub fn similar_pred(&self, a: &Prediction, b: &Prediction) -> Result<bool> {
        match (a, b) {
            (Prediction::Class(x), Prediction::Class(y)) => Ok(x == y),
            (Prediction::Value(x), Prediction::Value(y)) => Ok(self.prediction.numbers_similar(*x, *y)),
            _ => Err(Error::KindMismatch(format!("cannot compare {a} with {b}"))),
        }
    }

    /// For each value index of feature `i`, whether it is similar to `v_i`.
    pub fn similarity_mask(&self, space: &FeatureSpace, i: usize, vi: u32) -> Vec<bool> {
        (0..space.domain_size(i) as u32)
            .map(|a| self.feature_similar(space, i, a, vi))
            .collect()
    }
}
