// SPDX-License-Identifier: Apache-2.0

//! Feature spaces: finite per-feature domains and their product.
//!
//! Points are stored as vectors of domain indices (`u32` per feature), never as
//! raw values. The value behind an index is looked up through the space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on `|F|` for anything that walks the whole space.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeatureKind {
    #[serde(rename = "cat")]
    Categorical,
    #[serde(rename = "ord")]
    Ordinal,
}

/// A single domain value. Comparisons only make sense between values of the
/// same feature.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Cat(String),
    Ord(f64),
}

impl FeatureValue {
    pub fn kind(&self) -> FeatureKind {
        match self {
            FeatureValue::Cat(_) => FeatureKind::Categorical,
            FeatureValue::Ord(_) => FeatureKind::Ordinal,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            FeatureValue::Ord(x) => Some(*x),
            FeatureValue::Cat(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Cat(s) => f.write_str(s),
            FeatureValue::Ord(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDef {
    pub name: String,
    pub kind: FeatureKind,
    pub domain: Vec<FeatureValue>,
}

impl FeatureDef {
    pub fn categorical<S: Into<String>>(name: impl Into<String>, tokens: impl IntoIterator<Item = S>) -> Self {
        FeatureDef {
            name: name.into(),
            kind: FeatureKind::Categorical,
            domain: tokens.into_iter().map(|t| FeatureValue::Cat(t.into())).collect(),
        }
    }

    pub fn ordinal(name: impl Into<String>, values: impl IntoIterator<Item = f64>) -> Self {
        FeatureDef {
            name: name.into(),
            kind: FeatureKind::Ordinal,
            domain: values.into_iter().map(FeatureValue::Ord).collect(),
        }
    }

    /// Index of the domain value matching `token`, parsed according to the
    /// declared kind.
    pub fn lookup(&self, token: &str) -> Option<u32> {
        let token = token.trim();
        let pos = match self.kind {
            FeatureKind::Categorical => self
                .domain
                .iter()
                .position(|v| matches!(v, FeatureValue::Cat(s) if s == token)),
            FeatureKind::Ordinal => {
                let x: f64 = token.parse().ok()?;
                self.domain
                    .iter()
                    .position(|v| matches!(v, FeatureValue::Ord(y) if *y == x))
            }
        };
        pos.map(|p| p as u32)
    }
}

/// The input space `D_1 x .. x D_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    features: Vec<FeatureDef>,
}

impl FeatureSpace {
    pub fn new(features: Vec<FeatureDef>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidSpace("at least one feature is required".into()));
        }
        for (i, f) in features.iter().enumerate() {
            if f.domain.is_empty() {
                return Err(Error::InvalidSpace(format!("feature {} has an empty domain", i + 1)));
            }
            if f.domain.len() > u32::MAX as usize {
                return Err(Error::InvalidSpace(format!("feature {} domain too large", i + 1)));
            }
            for (a, va) in f.domain.iter().enumerate() {
                if va.kind() != f.kind {
                    return Err(Error::InvalidSpace(format!(
                        "feature {} mixes categorical and ordinal values",
                        i + 1
                    )));
                }
                if let FeatureValue::Ord(x) = va {
                    if !x.is_finite() {
                        return Err(Error::InvalidSpace(format!(
                            "feature {} has a non-finite value",
                            i + 1
                        )));
                    }
                }
                if f.domain[..a].contains(va) {
                    return Err(Error::InvalidSpace(format!(
                        "feature {} repeats domain value {va}",
                        i + 1
                    )));
                }
            }
        }
        Ok(FeatureSpace { features })
    }

    /// `m` binary features named `x1..xm` with ordinal domain `{0, 1}`.
    pub fn boolean(m: usize) -> Result<Self> {
        Self::new(
            (1..=m)
                .map(|i| FeatureDef::ordinal(format!("x{i}"), [0.0, 1.0]))
                .collect(),
        )
    }

    pub fn features(&self) -> &[FeatureDef] {
        &self.features
    }

    pub fn feature(&self, i: usize) -> &FeatureDef {
        &self.features[i]
    }

    /// Number of features, `m`.
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn domain_size(&self, i: usize) -> usize {
        self.features[i].domain.len()
    }

    /// `|F|`, saturating at `u128::MAX`.
    pub fn cardinality(&self) -> u128 {
        self.features
            .iter()
            .fold(1u128, |acc, f| acc.saturating_mul(f.domain.len() as u128))
    }

    pub fn value(&self, i: usize, index: u32) -> &FeatureValue {
        &self.features[i].domain[index as usize]
    }

    /// Checks that `x` is a point of this space.
    pub fn check_point(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: x.len(),
            });
        }
        for (i, &xi) in x.iter().enumerate() {
            if xi as usize >= self.domain_size(i) {
                return Err(Error::ValueOutOfRange {
                    feature: i + 1,
                    index: xi,
                    size: self.domain_size(i),
                });
            }
        }
        Ok(())
    }

    /// Ordinal coordinates of `x`; categorical features map to their index.
    pub fn numeric(&self, x: &[u32]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, &k)| self.value(i, k).as_f64().unwrap_or(k as f64))
            .collect()
    }

    /// Parses a comma-separated literal such as `"1,1,0"`.
    pub fn parse_point(&self, literal: &str) -> Result<Vec<u32>> {
        let tokens: Vec<&str> = literal.split(',').collect();
        if tokens.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: tokens.len(),
            });
        }
        tokens
            .iter()
            .enumerate()
            .map(|(i, t)| {
                self.features[i].lookup(t).ok_or_else(|| Error::UnknownValue {
                    row: 0,
                    column: self.features[i].name.clone(),
                    value: t.trim().to_string(),
                })
            })
            .collect()
    }

    pub fn format_point(&self, x: &[u32]) -> String {
        x.iter()
            .enumerate()
            .map(|(i, &k)| self.value(i, k).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Position of `x` in lexicographic enumeration order.
    pub fn linear_index(&self, x: &[u32]) -> u128 {
        x.iter()
            .enumerate()
            .fold(0u128, |acc, (i, &k)| acc * self.domain_size(i) as u128 + k as u128)
    }

    /// Inverse of [`linear_index`](Self::linear_index), written into `out`.
    pub fn decode_into(&self, mut index: u128, out: &mut [u32]) {
        for i in (0..self.len()).rev() {
            let d = self.domain_size(i) as u128;
            out[i] = (index % d) as u32;
            index /= d;
        }
    }

    /// Lexicographic enumeration of every point, guarded by `cap`.
    pub fn enumerate(&self, cap: u128) -> Result<PointIter<'_>> {
        let total = self.cardinality();
        if total > cap {
            return Err(Error::CapExceeded {
                what: "feature space size",
                limit: cap,
                actual: total,
            });
        }
        Ok(PointIter {
            space: self,
            next: Some(vec![0; self.len()]),
        })
    }
}

/// Odometer over the points of a [`FeatureSpace`].
#[derive(Debug)]
pub struct PointIter<'a> {
    space: &'a FeatureSpace,
    next: Option<Vec<u32>>,
}

impl Iterator for PointIter<'_> {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if (succ[i] as usize) < self.space.domain_size(i) {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        Some(current)
    }
}
