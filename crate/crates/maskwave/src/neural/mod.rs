//! Minimal dense-network substrate shared by the physics-trained solvers:
//! multilayer perceptrons with tanh hidden layers, exact differentiation
//! (reverse accumulation for parameters, second-order forward jets for
//! inputs), Adam and L-BFGS optimizers, and deterministic seeding.

mod autodiff;
mod jet;
mod mlp;
mod optim;
mod rng;

pub use autodiff::{input_hessian_diag, input_jacobian, param_gradients};
pub use jet::{jet_backward, jet_forward, JetOutput, JetSeed};
pub use mlp::{mlp_init, Gradients, MlpParams};
pub use optim::{adam_step, lbfgs_minimize, AdamState, LbfgsConfig, LbfgsOutcome};
pub use rng::SplitMix64;
