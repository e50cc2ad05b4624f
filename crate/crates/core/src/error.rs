//! Crate-wide error type.

/// Errors surfaced by construction validation and certified evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input outside the documented domain (invalid geometry, state width,
    /// tolerance, characteristic, grid, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The quadrature cannot resolve the integrand's fastest oscillation
    /// within the node cap; returning a value would be garbage.
    #[error(
        "quadrature resolution failure: ~{required} nodes needed but the cap is {cap}; \
         increase the node budget or shrink the momentum scale"
    )]
    Resolution { required: u64, cap: u64 },

    /// The certified lattice-sum radius exceeds the hard cap.
    #[error("lattice sum needs truncation radius > {cap} to certify tolerance {tol:e}")]
    Capacity { cap: usize, tol: f64 },

    /// The imaginary part of a period matrix is not positive-definite.
    #[error("Im(Omega) is not positive-definite (eigenvalues {lambda_min:e}, {lambda_max:e})")]
    NotPositiveDefinite { lambda_min: f64, lambda_max: f64 },

    /// Two states or distributions that must share a torus geometry do not.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// Peak detection failed in the flat-limit scan.
    #[error("degenerate scan: {0}")]
    DegenerateScan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
