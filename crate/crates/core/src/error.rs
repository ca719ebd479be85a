// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse grouping used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input, bad parameters, unreadable files.
    Validation,
    /// Well-formed input describing a problem that has no meaningful scores.
    Degenerate,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {message}")]
    Parse { what: &'static str, message: String },

    #[error("row {row}, column `{column}`: value `{value}` is not in the declared domain")]
    UnknownValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("invalid feature space: {0}")]
    InvalidSpace(String),

    #[error("invalid similarity configuration: {0}")]
    InvalidSimilarity(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("feature index {index} out of range for {features} features")]
    FeatureOutOfRange { index: usize, features: usize },

    #[error("point has {actual} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("value index {index} out of range for feature {feature} (domain size {size})")]
    ValueOutOfRange {
        feature: usize,
        index: u32,
        size: usize,
    },

    #[error("{what} exceeds cap: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: u128,
        actual: u128,
    },

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("prediction kinds differ: {0}")]
    KindMismatch(String),

    #[error("point {0:?} is not covered by the recorded predictions")]
    OutsideCoverage(Vec<u32>),

    #[error("recorded predictions are inconsistent at point {0:?}")]
    InconsistentRecords(Vec<u32>),

    #[error("the model is constant")]
    ConstantModel,

    #[error("the empty set is already a weak abductive explanation; no feature can matter")]
    EmptySetSufficient,

    #[error("no point is consistent with the instance on features {0}")]
    EmptyConditioning(String),

    #[error("expectations over categorical predictions are ill-defined")]
    CategoricalExpectation,

    #[error("the sample space has no rows")]
    EmptySample,

    #[error("no row of the sample space has a prediction similar to the instance")]
    NoAgreeingRow,

    #[error("instance prediction does not match the model output at the instance")]
    InstanceMismatch,

    #[error("seed {0} is not a weak abductive explanation")]
    NotWeakAxp(String),

    #[error("feature {feature} already belongs to {set}")]
    ElementInSet { feature: usize, set: String },

    #[error("characteristic function of the empty set is {0}, expected 0")]
    NonzeroEmptyValue(f64),

    #[error("rankings range over different feature sets")]
    UniverseMismatch,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::ConstantModel
            | Error::EmptySetSufficient
            | Error::EmptyConditioning(_)
            | Error::NoAgreeingRow => ErrorClass::Degenerate,
            _ => ErrorClass::Validation,
        }
    }

    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::UnknownValue { .. } => "unknown-value",
            Error::InvalidSpace(_) => "invalid-space",
            Error::InvalidSimilarity(_) => "invalid-similarity",
            Error::InvalidParams(_) => "invalid-params",
            Error::FeatureOutOfRange { .. } => "feature-out-of-range",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::ValueOutOfRange { .. } => "value-out-of-range",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::KindMismatch(_) => "kind-mismatch",
            Error::OutsideCoverage(_) => "outside-coverage",
            Error::InconsistentRecords(_) => "inconsistent-records",
            Error::ConstantModel => "constant-model",
            Error::EmptySetSufficient => "empty-set-sufficient",
            Error::EmptyConditioning(_) => "empty-conditioning",
            Error::CategoricalExpectation => "categorical-expectation",
            Error::EmptySample => "empty-sample",
            Error::NoAgreeingRow => "no-agreeing-row",
            Error::InstanceMismatch => "instance-mismatch",
            Error::NotWeakAxp(_) => "not-weak-axp",
            Error::ElementInSet { .. } => "element-in-set",
            Error::NonzeroEmptyValue(_) => "nonzero-empty-value",
            Error::UniverseMismatch => "universe-mismatch",
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
