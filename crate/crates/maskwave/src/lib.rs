//! Rigorous simulation of EUV plane-wave diffraction from periodic layered
//! lithography masks, and neural accelerations of it.
//!
//! The reference solver is the waveguide (Fourier modal) method: each layer of
//! the mask is expanded in lateral Fourier harmonics, the per-layer eigenmode
//! problem is solved, and tangential-field continuity at the layer interfaces
//! yields one global linear system for the mode amplitudes. On top of that
//! pipeline sit two physics-trained networks:
//!
//! * a PINN that minimizes PDE + boundary residuals of the coupled magnetic
//!   field equations at collocation points, and
//! * the waveguide neural operator (WGNO), an MLP that replaces the global
//!   linear solve and is trained unsupervised on the system residual.
//!
//! Lengths are in nanometers throughout; wavevectors in rad/nm. Time
//! dependence `exp(i w t)` is dropped, so a downward travelling incident wave
//! is `exp[-i (kx x + ky y - kz z)]` and absorbing media have `Im(eps) < 0`.

pub mod analytic;
pub mod catalog;
pub mod domain;
pub mod error;
pub mod metrics;
pub mod neural;
pub mod pinn;
pub mod spectral;
pub mod waveguide;
pub mod wgno;

mod linalg;

pub use error::{Error, Result};
