//! Error types shared by every module.

use thiserror::Error;

/// Library-wide error type.
///
/// The variants are grouped by how a caller should react: `Completeness`
/// and `ExceptionalRate` are *refusals* (the input question is well-posed
/// but the supplied data cannot answer it, or the theory itself refuses
/// the weight), everything else is a hard input or numeric failure.
#[derive(Debug, Error)]
pub enum Error {
    /// Mathematically invalid input (negative eigenvalue, `m < 3`,
    /// non-positive-definite Gram matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed structure: bad mesh, bad simplicial complex, bad config.
    #[error("structural error: {0}")]
    Structural(String),

    /// A spectrum does not extend far enough to answer the query.
    #[error(
        "incomplete spectrum{}: eigenvalues up to {required} are needed, available cutoff is {available}",
        end_label(*.end_index)
    )]
    Completeness {
        end_index: Option<usize>,
        required: String,
        available: String,
    },

    /// A weight coincides with an exceptional weight; the operator is not
    /// Fredholm there and we refuse to pick a side.
    #[error(
        "exceptional weight on end {end_index}: {weight} coincides with gamma = {gamma} (multiplicity {multiplicity}){}",
        if *.approximate { " [approximate match]" } else { "" }
    )]
    ExceptionalRate {
        end_index: usize,
        weight: String,
        gamma: String,
        multiplicity: u64,
        approximate: bool,
    },

    /// Numerical failure (eigensolver non-convergence etc.), with diagnostics.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A weight-window combination the dimension theory does not cover.
    #[error("unsupported weight window: {0}")]
    Unsupported(String),
}

fn end_label(i: Option<usize>) -> String {
    match i {
        Some(i) => format!(" on end {i}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for the refusal class (CLI exit code 2): the request was valid
    /// but either the spectrum is incomplete or the weight is exceptional.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::Completeness { .. } | Error::ExceptionalRate { .. }
        )
    }
}
