//! Crate-wide error type.
//!
//! Errors are grouped by how the CLI reports them: configuration and
//! validation problems exit with code 2, infeasible constructions
//! (blocklength too small, quantization impossible) with code 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent alphabets, overlapping variable sets, bad labels,
    /// policy-class mismatches.
    #[error("configuration error: {0}")]
    Config(String),

    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or invalid input files.
    #[error("validation error: {0}")]
    Validation(String),

    /// The quantization grid cannot satisfy the required inequalities.
    #[error("quantization infeasible: {0}")]
    QuantizationInfeasible(String),

    /// Exact computation requested on an instance above the size guards.
    #[error("instance too large: {0}")]
    Capacity(String),

    /// No admissible conference alphabet exists at this blocklength.
    #[error("blocklength too small: {detail}{}", min_feasible_suffix(.min_feasible))]
    BlocklengthTooSmall {
        detail: String,
        /// Smallest blocklength for which the construction succeeds, when known.
        min_feasible: Option<u64>,
    },

    /// A conference plan constraint cannot be met for these parameters.
    #[error("infeasible plan: {0}")]
    InfeasiblePlan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn min_feasible_suffix(min: &Option<u64>) -> String {
    match min {
        Some(n) => format!(" (minimal feasible n = {n})"),
        None => String::new(),
    }
}

impl Error {
    /// Process exit code used by the CLI for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Validation(_) | Error::Capacity(_) => 2,
            Error::QuantizationInfeasible(_)
            | Error::BlocklengthTooSmall { .. }
            | Error::InfeasiblePlan(_) => 3,
            Error::Io(_) | Error::Json(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
