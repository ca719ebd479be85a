// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::charfun::GameKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreKind {
    AxpExact,
    AxpEstimated,
    ExpExact,
    ExpEstimated,
    CustomExact,
    CustomEstimated,
}

impl ScoreKind {
    pub fn of(game: GameKind, estimated: bool) -> Self {
        match (game, estimated) {
            (GameKind::Axp, false) => ScoreKind::AxpExact,
            (GameKind::Axp, true) => ScoreKind::AxpEstimated,
            (GameKind::Expectation, false) => ScoreKind::ExpExact,
            (GameKind::Expectation, true) => ScoreKind::ExpEstimated,
            (GameKind::Custom, false) => ScoreKind::CustomExact,
            (GameKind::Custom, true) => ScoreKind::CustomEstimated,
        }
    }

    pub fn is_estimated(self) -> bool {
        matches!(
            self,
            ScoreKind::AxpEstimated | ScoreKind::ExpEstimated | ScoreKind::CustomEstimated
        )
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("kind serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

/// Per-feature scores, serialized as `{"1": s1, "2": s2, ..}` in feature order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scores(pub Vec<f64>);

impl Serialize for Scores {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (i, v) in self.0.iter().enumerate() {
            map.serialize_entry(&(i + 1).to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Scores {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, f64> = BTreeMap::deserialize(deserializer)?;
        let mut indexed = Vec::with_capacity(raw.len());
        for (k, v) in raw {
            let i: usize = k
                .parse()
                .map_err(|_| D::Error::custom(format!("score key `{k}` is not a feature number")))?;
            indexed.push((i, v));
        }
        indexed.sort_by_key(|(i, _)| *i);
        for (pos, (i, _)) in indexed.iter().enumerate() {
            if *i != pos + 1 {
                return Err(D::Error::custom("score keys must be exactly 1..=n"));
            }
        }
        Ok(Scores(indexed.into_iter().map(|(_, v)| v).collect()))
    }
}

/// Scores plus how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub scores: Scores,
    pub kind: ScoreKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, rename = "r", skip_serializing_if = "Option::is_none")]
    pub runs: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Width of the marginal-contribution interval used to size `r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
}

impl ScoreReport {
    pub fn exact(kind: GameKind, scores: Vec<f64>) -> Self {
        ScoreReport {
            scores: Scores(scores),
            kind: ScoreKind::of(kind, false),
            epsilon: None,
            alpha: None,
            runs: None,
            seed: None,
            range: None,
        }
    }

    pub fn len(&self) -> usize {
        self.scores.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.0.is_empty()
    }

    /// Score of 0-based feature `i`.
    pub fn score(&self, i: usize) -> f64 {
        self.scores.0[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.scores.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut r = ScoreReport::exact(GameKind::Axp, vec![0.5, 0.0, 0.5]);
        let j = serde_json::to_string(&r).unwrap();
        assert_eq!(j, r#"{"scores":{"1":0.5,"2":0.0,"3":0.5},"kind":"axp-exact"}"#);
        r.kind = ScoreKind::AxpEstimated;
        r.epsilon = Some(0.1);
        r.alpha = Some(0.1);
        r.runs = Some(150);
        r.seed = Some(7);
        let back: ScoreReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn keys_ordered_numerically() {
        let r = ScoreReport::exact(GameKind::Custom, (0..11).map(|i| i as f64).collect());
        let j = serde_json::to_string(&r.scores).unwrap();
        assert!(j.starts_with(r#"{"1":0.0,"2":1.0,"3":2.0"#));
        let back: Scores = serde_json::from_str(&j).unwrap();
        assert_eq!(back, r.scores);
        assert!(serde_json::from_str::<Scores>(r#"{"1":0.0,"3":1.0}"#).is_err());
        assert!(serde_json::from_str::<Scores>(r#"{"a":0.0}"#).is_err());
    }
}
