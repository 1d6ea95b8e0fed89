//! Physics-informed solver for the TE diffraction problems: PDE residuals of
//! the governing magnetic-field equations, periodic/outgoing boundary
//! residuals, the weighted composite loss, and two-stage training
//! (Adam then L-BFGS) over multiple seeds.

mod boundary;
mod embed;
mod field;
mod loss;
mod problem;
mod residual;
mod train;

pub use boundary::{boundary_residuals, BoundaryResiduals};
pub use embed::{fourier_embed, fourier_embed_with_derivatives};
pub use field::{PinnField, ScalarField2};
pub use loss::{pinn_loss, LossBreakdown};
pub use problem::PinnProblem;
pub use residual::{pde_residual_coupled, pde_residual_scalar, HxHyField};
pub use train::{pinn_train, PinnConfig, PinnRun, PinnTrainReport, SamplingMode};
