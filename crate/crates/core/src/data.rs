// SPDX-License-Identifier: Apache-2.0

//! Predictions, instances and sample spaces.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::FeatureSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredictionKind {
    /// Class labels, compared by equality.
    #[serde(rename = "cat")]
    Categorical,
    /// Real-valued outputs (regression or ordinal classes).
    #[serde(rename = "ord")]
    Ordinal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prediction {
    Class(String),
    Value(f64),
}

impl Prediction {
    pub fn kind(&self) -> PredictionKind {
        match self {
            Prediction::Class(_) => PredictionKind::Categorical,
            Prediction::Value(_) => PredictionKind::Ordinal,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Prediction::Value(x) => Some(*x),
            Prediction::Class(_) => None,
        }
    }

    /// Parses a token according to `kind`.
    pub fn parse(token: &str, kind: PredictionKind) -> Option<Self> {
        let token = token.trim();
        match kind {
            PredictionKind::Categorical => Some(Prediction::Class(token.to_string())),
            PredictionKind::Ordinal => token
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Prediction::Value),
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Class(s) => f.write_str(s),
            Prediction::Value(x) => write!(f, "{x}"),
        }
    }
}

/// Target point `v` with its prediction `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub point: Vec<u32>,
    pub prediction: Prediction,
}

impl Instance {
    pub fn new(point: Vec<u32>, prediction: Prediction) -> Self {
        Instance { point, prediction }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    #[default]
    OriginalDataset,
    RecordedSampling,
    Aggregate,
    /// Every point of the feature space, labelled by a model.
    FullSpace,
}

/// A finite multiset of labelled points of a feature space.
///
/// Stored column-major so that per-feature scans touch contiguous memory.
#[derive(Debug, Clone)]
pub struct SampleSpace {
    space: Arc<FeatureSpace>,
    kind: PredictionKind,
    columns: Vec<Vec<u32>>,
    predictions: Vec<Prediction>,
    provenance: Provenance,
}

impl SampleSpace {
    pub fn new(space: Arc<FeatureSpace>, kind: PredictionKind) -> Self {
        let columns = vec![Vec::new(); space.len()];
        SampleSpace {
            space,
            kind,
            columns,
            predictions: Vec::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn from_rows(
        space: Arc<FeatureSpace>,
        kind: PredictionKind,
        rows: impl IntoIterator<Item = (Vec<u32>, Prediction)>,
    ) -> Result<Self> {
        let mut s = Self::new(space, kind);
        for (x, p) in rows {
            s.push(&x, p)?;
        }
        Ok(s)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn push(&mut self, x: &[u32], prediction: Prediction) -> Result<()> {
        self.space.check_point(x)?;
        if prediction.kind() != self.kind {
            return Err(Error::KindMismatch(format!(
                "row prediction {prediction} does not match declared kind {:?}",
                self.kind
            )));
        }
        for (col, &xi) in self.columns.iter_mut().zip(x) {
            col.push(xi);
        }
        self.predictions.push(prediction);
        Ok(())
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn kind(&self) -> PredictionKind {
        self.kind
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.columns[j]
    }

    pub fn predictions(&self) -> &[Prediction] {
        &self.predictions
    }

    pub fn prediction(&self, r: usize) -> &Prediction {
        &self.predictions[r]
    }

    pub fn row(&self, r: usize) -> Vec<u32> {
        self.columns.iter().map(|c| c[r]).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = (Vec<u32>, &Prediction)> + '_ {
        (0..self.len()).map(move |r| (self.row(r), &self.predictions[r]))
    }

    /// Prediction recorded for `x`, if `x` occurs and all its occurrences agree.
    pub fn lookup(&self, x: &[u32]) -> Result<Option<&Prediction>> {
        let mut found: Option<&Prediction> = None;
        for r in 0..self.len() {
            if self.columns.iter().zip(x).all(|(c, &xi)| c[r] == xi) {
                match found {
                    Some(p) if p != &self.predictions[r] => {
                        return Err(Error::InconsistentRecords(x.to_vec()));
                    }
                    _ => found = Some(&self.predictions[r]),
                }
            }
        }
        Ok(found)
    }
}
