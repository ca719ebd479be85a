// SPDX-License-Identifier: Apache-2.0

//! File formats: space declarations (JSON), datasets (CSV), truth tables (JSON).

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::{Prediction, PredictionKind, SampleSpace};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::similarity::{Rule, SimilarityConfig, ToleranceMode};
use crate::space::{FeatureDef, FeatureKind, FeatureSpace, FeatureValue};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FeatureEntry {
    name: String,
    kind: FeatureKind,
    domain: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<ToleranceMode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PredictionEntry {
    kind: PredictionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<ToleranceMode>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpaceFile {
    features: Vec<FeatureEntry>,
    prediction: PredictionEntry,
}

fn rule_of(tau: Option<f64>, mode: Option<ToleranceMode>) -> Rule {
    match tau {
        None => Rule::Exact,
        Some(tau) => Rule::Tolerance {
            tau,
            mode: mode.unwrap_or_default(),
        },
    }
}

fn split_rule(rule: Rule) -> (Option<f64>, Option<ToleranceMode>) {
    match rule {
        Rule::Exact => (None, None),
        Rule::Tolerance { tau, mode } => (Some(tau), (mode != ToleranceMode::Absolute).then_some(mode)),
    }
}

fn domain_value(kind: FeatureKind, v: &Value, feature: &str) -> Result<FeatureValue> {
    let bad = || Error::Parse {
        what: "space declaration",
        message: format!("feature `{feature}`: unusable domain value {v}"),
    };
    match (kind, v) {
        (FeatureKind::Categorical, Value::String(s)) => Ok(FeatureValue::Cat(s.clone())),
        (FeatureKind::Categorical, Value::Number(n)) => Ok(FeatureValue::Cat(n.to_string())),
        (FeatureKind::Categorical, Value::Bool(b)) => Ok(FeatureValue::Cat(b.to_string())),
        (FeatureKind::Ordinal, Value::Number(n)) => n.as_f64().map(FeatureValue::Ord).ok_or_else(bad),
        (FeatureKind::Ordinal, Value::String(s)) => s.trim().parse().map(FeatureValue::Ord).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

/// A feature space together with its similarity rules and prediction kind.
#[derive(Debug, Clone)]
pub struct Declaration {
    pub space: Arc<FeatureSpace>,
    pub prediction: PredictionKind,
    pub similarity: SimilarityConfig,
}

impl Declaration {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "space declaration",
            message: e.to_string(),
        })?;
        Self::from_file(file)
    }

    fn from_file(file: SpaceFile) -> Result<Self> {
        let mut defs = Vec::with_capacity(file.features.len());
        let mut rules = Vec::with_capacity(file.features.len());
        for f in &file.features {
            let domain = f
                .domain
                .iter()
                .map(|v| domain_value(f.kind, v, &f.name))
                .collect::<Result<Vec<_>>>()?;
            defs.push(FeatureDef {
                name: f.name.clone(),
                kind: f.kind,
                domain,
            });
            // tau 0 on a categorical feature is plain equality
            let tau = match (f.kind, f.tau) {
                (FeatureKind::Categorical, Some(0.0)) => None,
                (_, t) => t,
            };
            rules.push(rule_of(tau, f.mode));
        }
        let space = FeatureSpace::new(defs)?;
        let pred_rule = match file.prediction.kind {
            PredictionKind::Categorical => Rule::Exact,
            PredictionKind::Ordinal => rule_of(file.prediction.delta, file.prediction.mode),
        };
        let similarity = SimilarityConfig::new(&space, rules, pred_rule)?;
        Ok(Declaration {
            space: Arc::new(space),
            prediction: file.prediction.kind,
            similarity,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Value {
        let features = self
            .space
            .features()
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let (tau, mode) = split_rule(self.similarity.feature_rule(i));
                FeatureEntry {
                    name: f.name.clone(),
                    kind: f.kind,
                    domain: f
                        .domain
                        .iter()
                        .map(|v| match v {
                            FeatureValue::Cat(s) => Value::String(s.clone()),
                            FeatureValue::Ord(x) => serde_json::json!(x),
                        })
                        .collect(),
                    tau,
                    mode,
                }
            })
            .collect();
        let (delta, mode) = split_rule(self.similarity.prediction_rule());
        serde_json::to_value(SpaceFile {
            features,
            prediction: PredictionEntry {
                kind: self.prediction,
                delta,
                mode,
            },
        })
        .expect("space declaration serializes")
    }

    /// Reads a dataset CSV: one column per declared feature (matched by
    /// name) plus a final `prediction` column.
    pub fn read_dataset<R: Read>(&self, reader: R) -> Result<SampleSpace> {
        let parse_err = |message: String| Error::Parse {
            what: "dataset",
            message,
        };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
        if header.iter().next_back() != Some("prediction") {
            return Err(parse_err("the last column must be `prediction`".into()));
        }
        if header.len() != self.space.len() + 1 {
            return Err(parse_err(format!(
                "expected {} feature columns, found {}",
                self.space.len(),
                header.len() - 1
            )));
        }
        let mut column_of = Vec::with_capacity(self.space.len());
        for f in self.space.features() {
            let pos = header
                .iter()
                .position(|h| h == f.name)
                .ok_or_else(|| parse_err(format!("missing column `{}`", f.name)))?;
            column_of.push(pos);
        }
        let pred_col = header.len() - 1;

        let mut sample = SampleSpace::new(self.space.clone(), self.prediction);
        let mut point = vec![0u32; self.space.len()];
        for (r, record) in rdr.records().enumerate() {
            let row = r + 1;
            let record = record.map_err(|e| parse_err(format!("row {row}: {e}")))?;
            for (i, f) in self.space.features().iter().enumerate() {
                let token = record.get(column_of[i]).unwrap_or("");
                point[i] = f.lookup(token).ok_or_else(|| Error::UnknownValue {
                    row,
                    column: f.name.clone(),
                    value: token.to_string(),
                })?;
            }
            let token = record.get(pred_col).unwrap_or("");
            let p = Prediction::parse(token, self.prediction).ok_or_else(|| Error::UnknownValue {
                row,
                column: "prediction".into(),
                value: token.to_string(),
            })?;
            sample.push(&point, p)?;
        }
        Ok(sample)
    }

    pub fn load_dataset(&self, path: impl AsRef<Path>) -> Result<SampleSpace> {
        let path = path.as_ref();
        let file = fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.read_dataset(file)
    }

    /// Parses an instance literal. Without an explicit prediction, the
    /// prediction is looked up in `sample`.
    pub fn parse_instance(
        &self,
        literal: &str,
        prediction: Option<&str>,
        sample: Option<&SampleSpace>,
    ) -> Result<crate::data::Instance> {
        let point = self.space.parse_point(literal)?;
        let q = match prediction {
            Some(t) => Prediction::parse(t, self.prediction).ok_or_else(|| Error::UnknownValue {
                row: 0,
                column: "prediction".into(),
                value: t.to_string(),
            })?,
            None => sample
                .map(|s| s.lookup(&point))
                .transpose()?
                .flatten()
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidParams(format!(
                        "instance {literal} has no recorded prediction; supply one explicitly"
                    ))
                })?,
        };
        Ok(crate::data::Instance::new(point, q))
    }
}

/// Writes a sample as dataset CSV.
pub fn write_dataset<W: std::io::Write>(sample: &SampleSpace, writer: W) -> Result<()> {
    let to_err = |e: csv::Error| Error::Parse {
        what: "dataset",
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(writer);
    let space = sample.space();
    let mut header: Vec<String> = space.features().iter().map(|f| f.name.clone()).collect();
    header.push("prediction".into());
    w.write_record(&header).map_err(to_err)?;
    for (x, p) in sample.rows() {
        let mut rec: Vec<String> = x
            .iter()
            .enumerate()
            .map(|(i, &k)| space.value(i, k).to_string())
            .collect();
        rec.push(p.to_string());
        w.write_record(&rec).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("dataset", e))?;
    Ok(())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpaceRef {
    Path(PathBuf),
    Inline(SpaceFile),
}

#[derive(Debug, Deserialize)]
struct TruthTableFile {
    space: SpaceRef,
    outputs: Vec<Value>,
}

/// Loads a truth-table model. `space` may be inline or a path relative to
/// the table file.
pub fn load_truth_table(path: impl AsRef<Path>) -> Result<(Declaration, Model)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    truth_table_from_str(&text, base)
}

pub fn truth_table_from_str(text: &str, base: &Path) -> Result<(Declaration, Model)> {
    let file: TruthTableFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        what: "truth table",
        message: e.to_string(),
    })?;
    let decl = match file.space {
        SpaceRef::Inline(s) => Declaration::from_file(s)?,
        SpaceRef::Path(p) => Declaration::load(base.join(p))?,
    };
    let outputs = file
        .outputs
        .iter()
        .map(|v| {
            let token = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            Prediction::parse(&token, decl.prediction).ok_or_else(|| Error::Parse {
                what: "truth table",
                message: format!("unusable output {v}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let model = Model::truth_table(decl.space.clone(), outputs)?;
    Ok((decl, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn declaration_round_trip() {
        let decl = fixtures::d1_declaration();
        let again = Declaration::from_json_str(&decl.to_json().to_string()).unwrap();
        assert_eq!(again.space, decl.space);
        assert_eq!(again.similarity, decl.similarity);
    }

    #[test]
    fn tolerance_parsed() {
        let decl = Declaration::from_json_str(
            r#"{"features":[{"name":"a","kind":"ord","domain":[0,0.5,1],"tau":0.5},
                            {"name":"b","kind":"cat","domain":["x","y"],"tau":0.0}],
                "prediction":{"kind":"ord","delta":0.25}}"#,
        )
        .unwrap();
        assert_eq!(decl.similarity.feature_rule(0), Rule::absolute(0.5));
        assert_eq!(decl.similarity.feature_rule(1), Rule::Exact);
        assert_eq!(decl.similarity.prediction_rule(), Rule::absolute(0.25));
    }

    #[test]
    fn unknown_value_has_diagnostics() {
        let decl = fixtures::d1_declaration();
        let csv = "x1,x2,x3,prediction\n0,0,0,0\n0,2,0,1\n";
        match decl.read_dataset(csv.as_bytes()) {
            Err(Error::UnknownValue { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "x2", "2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_checks() {
        let decl = fixtures::d1_declaration();
        assert!(decl.read_dataset("x1,x2,x3\n0,0,0\n".as_bytes()).is_err());
        assert!(decl.read_dataset("x1,x2,y,prediction\n0,0,0,0\n".as_bytes()).is_err());
        // columns may come in any order
        let s = decl
            .read_dataset("x3,x2,x1,prediction\n1,0,0,1\n".as_bytes())
            .unwrap();
        assert_eq!(s.row(0), vec![0, 0, 1]);
    }

    #[test]
    fn dataset_write_read() {
        let decl = fixtures::d1_declaration();
        let d1 = fixtures::d1();
        let mut buf = Vec::new();
        write_dataset(&d1, &mut buf).unwrap();
        let back = decl.read_dataset(buf.as_slice()).unwrap();
        assert_eq!(back.len(), d1.len());
        for r in 0..d1.len() {
            assert_eq!(back.row(r), d1.row(r));
            assert_eq!(back.prediction(r), d1.prediction(r));
        }
    }

    #[test]
    fn instance_prediction_lookup() {
        let decl = fixtures::d1_declaration();
        let d1 = fixtures::d1();
        let inst = decl.parse_instance("1,1,0", None, Some(&d1)).unwrap();
        assert_eq!(inst.prediction, Prediction::Value(1.0));
        assert!(decl.parse_instance("1,0,1", None, Some(&d1)).is_err());
        let inst = decl.parse_instance("1,0,1", Some("0"), Some(&d1)).unwrap();
        assert_eq!(inst.point, vec![1, 0, 1]);
    }

    #[test]
    fn inline_truth_table() {
        let text = r#"{"space":{"features":[{"name":"a","kind":"ord","domain":[0,1]},
                                            {"name":"b","kind":"ord","domain":[0,1]}],
                                "prediction":{"kind":"ord"}},
                       "outputs":[0,1,1,1]}"#;
        let (_, m) = truth_table_from_str(text, Path::new(".")).unwrap();
        assert_eq!(m.predict(&[1, 0]).unwrap(), Prediction::Value(1.0));
        let short = text.replace("[0,1,1,1]", "[0,1,1]");
        assert!(truth_table_from_str(&short, Path::new(".")).is_err());
    }
}

