//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A domain type was constructed with values violating its invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Optical-constant lookup failed (unknown material or wavelength).
    #[error("no tabulated permittivity for material `{name}` at {wavelength} nm")]
    MaterialLookup { name: String, wavelength: f64 },

    /// A permittivity profile evaluated to (near) zero, so 1/eps terms blow up.
    #[error("singular permittivity: |eps| = {magnitude:.3e} at ({x:.4}, {y:.4})")]
    SingularPermittivity { x: f64, y: f64, magnitude: f64 },

    /// Too few quadrature samples for the requested harmonic content.
    #[error("quadrature too coarse: {got} samples, need at least {need}")]
    Aliasing { got: usize, need: usize },

    /// Shape or layout mismatch between cooperating arrays.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The dense eigensolver did not converge for a layer.
    #[error("eigendecomposition failed for layer {layer}")]
    EigenFailure { layer: usize },

    /// Eigenvectors of a layer matrix fail the residual check; the matrix is
    /// defective to tolerance. Changing the harmonic count usually resolves it.
    #[error(
        "layer {layer} modes are defective to tolerance (worst residual {residual:.3e}); \
         try a different harmonic count"
    )]
    DefectiveModes { layer: usize, residual: f64 },

    /// The global system is singular or too ill-conditioned to trust.
    #[error("global system is ill-conditioned (estimated condition number {cond_estimate:.3e})")]
    IllConditioned { cond_estimate: f64 },

    /// A field evaluation was requested outside the configured z bounds.
    #[error("z = {z} outside evaluation bounds [{z_min}, {z_max}]")]
    OutOfRange { z: f64, z_min: f64, z_max: f64 },

    /// Training produced a non-finite loss.
    #[error("training diverged: {0}")]
    Divergence(String),

    /// Checkpoint or export parsing failure.
    #[error("malformed data: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
