// SPDX-License-Identifier: Apache-2.0

//! Census of boolean functions: for every non-constant function on `k`
//! variables and every instance, does an irrelevant feature receive a nonzero
//! score under the expectation game, or under the AXp game?

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::charfun::{AxpGame, ExpectationGame};
use crate::error::{Error, Result};
use crate::explain::{ModelProblem, Relevance};
use crate::models::Model;
use crate::shapley::shapley_exact_subsets;
use crate::similarity::SimilarityConfig;

pub const CENSUS_MAX_VARS: usize = 4;

/// Expectation-game scores with magnitude above this count as nonzero.
pub const SCORE_TOLERANCE: f64 = 1e-12;

/// Functions processed per batch; bounds memory for k = 4.
const BATCH: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub function_id: u64,
    /// Linear index of the instance point.
    pub instance: u64,
    /// Some irrelevant feature has `|Sc_e| > SCORE_TOLERANCE`.
    #[serde(serialize_with = "as_bit")]
    pub issue_e: bool,
    /// Some irrelevant feature has `|Sc_a| > 0`.
    #[serde(serialize_with = "as_bit")]
    pub issue_a: bool,
}

fn as_bit<S: serde::Serializer>(b: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CensusSummary {
    pub vars: usize,
    /// Non-constant functions examined.
    pub functions: u64,
    pub cases: u64,
    pub issue_e: u64,
    pub issue_a: u64,
}

/// Scores one (function, instance) pair.
pub fn census_case(model: &Arc<Model>, vars: usize, instance: u64) -> Result<CensusRow> {
    let point: Vec<u32> = (0..vars).map(|i| ((instance >> (vars - 1 - i)) & 1) as u32).collect();
    let problem = ModelProblem::new(model.clone(), point, SimilarityConfig::exact(vars))?;
    let relevancy = problem.relevancy()?;
    let exp = shapley_exact_subsets(&ExpectationGame::new(problem.clone())?)?;
    let axp = shapley_exact_subsets(&AxpGame::new(problem)?)?;
    let irrelevant = || (0..vars).filter(|&i| relevancy[i] == Relevance::Irrelevant);
    Ok(CensusRow {
        function_id: 0,
        instance,
        issue_e: irrelevant().any(|i| exp.score(i).abs() > SCORE_TOLERANCE),
        issue_a: irrelevant().any(|i| axp.score(i) != 0.0),
    })
}

fn function_rows(vars: usize, id: u64) -> Result<Vec<CensusRow>> {
    let model = Arc::new(Model::boolean_function(vars, id)?);
    (0..1u64 << vars)
        .map(|p| {
            let mut row = census_case(&model, vars, p)?;
            row.function_id = id;
            Ok(row)
        })
        .collect()
}

/// Runs the census over all `2^(2^k)` functions, skipping the two constant
/// ones. Rows are written to `out` (CSV with header) ordered by
/// `(function_id, instance)`.
pub fn flaw_census<W: Write>(vars: usize, out: Option<W>) -> Result<CensusSummary> {
    if vars == 0 || vars > CENSUS_MAX_VARS {
        return Err(Error::CapExceeded {
            what: "census variables",
            limit: CENSUS_MAX_VARS as u128,
            actual: vars as u128,
        });
    }
    let mut writer = out.map(|w| csv::WriterBuilder::new().has_headers(false).from_writer(w));
    let csv_err = |e: csv::Error| Error::Parse {
        what: "census output",
        message: e.to_string(),
    };
    if let Some(w) = writer.as_mut() {
        w.write_record(["function_id", "instance", "issue_e", "issue_a"])
            .map_err(csv_err)?;
    }
    let total = 1u64 << (1u64 << vars);
    // ids 0 and total-1 are the constant functions
    let mut summary = CensusSummary {
        vars,
        ..Default::default()
    };
    let mut start = 1u64;
    while start < total - 1 {
        let end = (start + BATCH).min(total - 1);
        let rows: Vec<Vec<CensusRow>> = (start..end)
            .into_par_iter()
            .map(|id| function_rows(vars, id))
            .collect::<Result<_>>()?;
        for row in rows.iter().flatten() {
            summary.cases += 1;
            summary.issue_e += u64::from(row.issue_e);
            summary.issue_a += u64::from(row.issue_a);
            if let Some(w) = writer.as_mut() {
                w.serialize(row).map_err(csv_err)?;
            }
        }
        summary.functions += end - start;
        start = end;
    }
    if let Some(w) = writer.as_mut() {
        w.flush().map_err(|e| Error::io("census output", e))?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn or_case_is_flagged_for_expectations_only() {
        let row = census_case(&Arc::new(fixtures::or_model()), 2, 0b10).unwrap();
        assert!(row.issue_e);
        assert!(!row.issue_a);
    }

    #[test]
    fn census_two_vars() {
        let mut buf = Vec::new();
        let s = flaw_census(2, Some(&mut buf)).unwrap();
        assert_eq!(s.functions, 14);
        assert_eq!(s.cases, 14 * 4);
        assert_eq!(s.issue_a, 0);
        assert!(s.issue_e >= 1);
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("function_id,instance,issue_e,issue_a"));
        // OR is function 14, instance (1,0) has index 2
        assert!(text.lines().any(|l| l == "14,2,1,0"));
        assert_eq!(text.lines().count(), 1 + 56);
    }

    #[test]
    fn census_caps() {
        assert!(flaw_census::<Vec<u8>>(0, None).is_err());
        assert!(flaw_census::<Vec<u8>>(5, None).is_err());
    }

    #[test]
    fn one_var_census_is_clean() {
        // identity and negation: the single feature is always relevant
        let s = flaw_census::<Vec<u8>>(1, None).unwrap();
        assert_eq!((s.functions, s.cases, s.issue_e, s.issue_a), (2, 4, 0, 0));
    }
}
