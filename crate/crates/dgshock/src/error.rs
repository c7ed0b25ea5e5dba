use thiserror::Error;

/// Failures surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of a closed-form or configuration.
    #[error("domain error: {0}")]
    Domain(String),

    /// Relative shock position sits on (or within 1e-9 of) a branch boundary.
    #[error("s_c = {s_c} is an excluded branch boundary for p = {p} (nearest {boundary})")]
    BranchBoundary { p: usize, s_c: f64, boundary: f64 },

    /// Request not covered by a closed form.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative method hit its iteration cap.
    #[error("no convergence in {what} after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    /// Complex intermediate failed to realify.
    #[error("imaginary residue {residue:e} exceeds tolerance in {what}")]
    ImaginaryResidue { what: &'static str, residue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
