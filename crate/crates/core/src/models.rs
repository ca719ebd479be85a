// SPDX-License-Identifier: Apache-2.0

//! Prediction functions `π: F -> T` with three small backends.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::data::{Prediction, PredictionKind, Provenance, SampleSpace};
use crate::error::{Error, Result};
use crate::space::{FeatureSpace, DEFAULT_ENUMERATION_CAP};

type Guard = dyn Fn(&[f64]) -> bool + Send + Sync;
type Output = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// One `(guard, output)` pair of a rule list. Both closures see the numeric
/// coordinates of the point.
#[derive(Clone)]
pub struct Branch {
    label: String,
    guard: Arc<Guard>,
    output: Arc<Output>,
}

impl Branch {
    pub fn new(
        label: impl Into<String>,
        guard: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        output: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Branch {
            label: label.into(),
            guard: Arc::new(guard),
            output: Arc::new(output),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Branch").field("label", &self.label).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
enum Backend {
    /// One output per point, lexicographic order.
    TruthTable(Vec<Prediction>),
    /// First matching branch wins.
    RuleList(Vec<Branch>),
    Recorded(HashMap<Vec<u32>, Prediction>),
}

#[derive(Debug, Clone)]
pub struct Model {
    space: Arc<FeatureSpace>,
    output: PredictionKind,
    backend: Backend,
}

impl Model {
    pub fn truth_table(space: Arc<FeatureSpace>, outputs: Vec<Prediction>) -> Result<Self> {
        let expected = space.cardinality();
        if expected != outputs.len() as u128 {
            return Err(Error::LengthMismatch {
                expected: usize::try_from(expected).unwrap_or(usize::MAX),
                actual: outputs.len(),
            });
        }
        let output = outputs
            .first()
            .map(Prediction::kind)
            .unwrap_or(PredictionKind::Ordinal);
        if outputs.iter().any(|p| p.kind() != output) {
            return Err(Error::KindMismatch("truth table mixes output kinds".into()));
        }
        Ok(Model {
            space,
            output,
            backend: Backend::TruthTable(outputs),
        })
    }

    /// Boolean function over `m` binary features whose output at the point with
    /// linear index `p` is bit `p` of `function_id`. Outputs are 0/1 ordinals.
    pub fn boolean_function(m: usize, function_id: u64) -> Result<Self> {
        if m > 6 {
            return Err(Error::CapExceeded {
                what: "boolean function arity",
                limit: 6,
                actual: m as u128,
            });
        }
        let space = Arc::new(FeatureSpace::boolean(m)?);
        let outputs = (0..1usize << m)
            .map(|p| Prediction::Value(((function_id >> p) & 1) as f64))
            .collect();
        Self::truth_table(space, outputs)
    }

    /// Rule list over ordinal coordinates. When the space is enumerable the
    /// guards are checked to be exhaustive.
    pub fn rule_list(space: Arc<FeatureSpace>, branches: Vec<Branch>) -> Result<Self> {
        let model = Model {
            space,
            output: PredictionKind::Ordinal,
            backend: Backend::RuleList(branches),
        };
        if let Ok(points) = model.space.enumerate(DEFAULT_ENUMERATION_CAP) {
            for x in points {
                model.predict(&x)?;
            }
        }
        Ok(model)
    }

    /// Predictions recorded in a sample; total on the sample's points only.
    pub fn recorded(sample: &SampleSpace) -> Result<Self> {
        let mut table: HashMap<Vec<u32>, Prediction> = HashMap::with_capacity(sample.len());
        for (x, p) in sample.rows() {
            if let Some(prev) = table.get(&x) {
                if prev != p {
                    return Err(Error::InconsistentRecords(x));
                }
                continue;
            }
            table.insert(x, p.clone());
        }
        Ok(Model {
            space: sample.space().clone(),
            output: sample.kind(),
            backend: Backend::Recorded(table),
        })
    }

    pub fn space(&self) -> &Arc<FeatureSpace> {
        &self.space
    }

    pub fn output_kind(&self) -> PredictionKind {
        self.output
    }

    /// Whether `predict` is defined on every point of the feature space.
    pub fn is_total(&self) -> bool {
        !matches!(self.backend, Backend::Recorded(_))
    }

    pub fn predict(&self, x: &[u32]) -> Result<Prediction> {
        self.space.check_point(x)?;
        match &self.backend {
            Backend::TruthTable(outputs) => Ok(outputs[self.space.linear_index(x) as usize].clone()),
            Backend::RuleList(branches) => {
                let coords = self.space.numeric(x);
                branches
                    .iter()
                    .find(|b| (b.guard)(&coords))
                    .map(|b| Prediction::Value((b.output)(&coords)))
                    .ok_or_else(|| Error::OutsideCoverage(x.to_vec()))
            }
            Backend::Recorded(table) => table
                .get(x)
                .cloned()
                .ok_or_else(|| Error::OutsideCoverage(x.to_vec())),
        }
    }

    /// Whether every point of the model's domain receives the same output.
    pub fn is_constant(&self) -> Result<bool> {
        let mut first: Option<Prediction> = None;
        let mut check = |p: &Prediction| match &first {
            None => {
                first = Some(p.clone());
                true
            }
            Some(f) => f == p,
        };
        match &self.backend {
            Backend::TruthTable(outputs) => Ok(outputs.iter().all(check)),
            Backend::Recorded(table) => Ok(table.values().all(check)),
            Backend::RuleList(_) => {
                for x in self.space.enumerate(DEFAULT_ENUMERATION_CAP)? {
                    if !check(&self.predict(&x)?) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// The truth table of a total model, in lexicographic point order.
    pub fn outputs(&self, cap: u128) -> Result<Vec<Prediction>> {
        match &self.backend {
            Backend::TruthTable(outputs) => Ok(outputs.clone()),
            _ => self.space.enumerate(cap)?.map(|x| self.predict(&x)).collect(),
        }
    }

    /// The whole feature space as a sample, labelled by this model.
    pub fn label_space(&self, cap: u128) -> Result<SampleSpace> {
        let outputs = self.outputs(cap)?;
        let points = self.space.enumerate(cap)?;
        Ok(SampleSpace::from_rows(self.space.clone(), self.output, points.zip(outputs))?
            .with_provenance(Provenance::FullSpace))
    }
}
