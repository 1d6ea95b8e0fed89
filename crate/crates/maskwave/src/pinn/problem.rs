//! The problem description a PINN trains against: permittivity and its
//! lateral gradient, domain bounds, incident wave, and the reference field
//! used for error reporting.

use num_complex::Complex64;

use crate::analytic::BenchmarkProblem;
use crate::domain::{FieldComponent, FieldGrid, MaskSpec};
use crate::error::Result;
use crate::waveguide::{assemble, GridRequest};

/// A 2D TE problem the PINN can solve: one of the closed-form validation
/// problems, or a patterned mask (scalar E_y formulation in both cases).
#[derive(Debug, Clone)]
pub enum PinnProblem {
    Benchmark(BenchmarkProblem),
    Mask(MaskSpec),
}

impl PinnProblem {
    pub fn k0(&self) -> f64 {
        match self {
            PinnProblem::Benchmark(b) => b.k0(),
            PinnProblem::Mask(m) => m.incident.k0(),
        }
    }

    pub fn period_x(&self) -> f64 {
        match self {
            PinnProblem::Benchmark(b) => b.period_x(),
            PinnProblem::Mask(m) => m.period_x,
        }
    }

    /// (x_min, x_max, z_min, z_max) of the collocation domain.
    pub fn domain(&self) -> (f64, f64, f64, f64) {
        match self {
            PinnProblem::Benchmark(b) => b.domain(),
            PinnProblem::Mask(m) => {
                (-0.5 * m.period_x, 0.5 * m.period_x, m.z_min, m.z_max)
            }
        }
    }

    /// Incident transverse/longitudinal wavevector components (TE, unit E).
    pub fn incident_k(&self) -> (f64, f64) {
        match self {
            PinnProblem::Benchmark(b) => (b.kx(), b.kz()),
            PinnProblem::Mask(m) => {
                let (k0x, _) = m.incident.transverse_k(m.superstrate_eps);
                let k0 = m.incident.k0();
                (k0x, (k0 * k0 - k0x * k0x).sqrt())
            }
        }
    }

    pub fn eps(&self, x: f64, z: f64) -> Complex64 {
        match self {
            PinnProblem::Benchmark(b) => b.eps_at(z),
            PinnProblem::Mask(m) => m.eps_at(x, 0.0, z),
        }
    }

    /// Lateral permittivity gradient (d/dx only; the problems are 2D).
    pub fn eps_grad_x(&self, x: f64, z: f64) -> Complex64 {
        match self {
            PinnProblem::Benchmark(_) => Complex64::new(0.0, 0.0),
            PinnProblem::Mask(m) => {
                if z > 0.0 || z < -m.total_thickness() {
                    return Complex64::new(0.0, 0.0);
                }
                let mut top = 0.0f64;
                for layer in &m.layers {
                    let bottom = top - layer.thickness;
                    if z >= bottom {
                        let (gx, _) = layer.profile.grad(x, 0.0, m.period_x, m.period_y);
                        return gx;
                    }
                    top = bottom;
                }
                Complex64::new(0.0, 0.0)
            }
        }
    }

    /// Permittivities of the media at the top and bottom domain boundaries,
    /// which set the outgoing-wave dispersion there.
    pub fn boundary_eps(&self) -> (Complex64, Complex64) {
        let (_, _, z_min, z_max) = self.domain();
        (self.eps(0.0, z_max), self.eps(0.0, z_min))
    }

    /// z planes where the permittivity jumps (layer interfaces); the PDE
    /// residual is not defined there.
    pub fn interface_planes(&self) -> Vec<f64> {
        match self {
            PinnProblem::Benchmark(b) => vec![0.0, -b.thickness()],
            PinnProblem::Mask(m) => {
                let mut planes = vec![0.0];
                let mut z = 0.0;
                for layer in &m.layers {
                    z -= layer.thickness;
                    planes.push(z);
                }
                planes
            }
        }
    }

    /// Reference solution on a tensor grid: analytic for the validation
    /// problems, the waveguide solver for masks.
    pub fn reference_field(&self, xs: &[f64], zs: &[f64], nx: usize) -> Result<FieldGrid> {
        match self {
            PinnProblem::Benchmark(b) => {
                let mut field = b.exact_field(xs, zs);
                field.components.retain(|(c, _)| *c == FieldComponent::Ey);
                Ok(field)
            }
            PinnProblem::Mask(m) => {
                let assembled = assemble(m, nx, None)?;
                let amps = assembled.solve()?;
                let request = GridRequest {
                    x: xs.to_vec(),
                    y: None,
                    z: zs.to_vec(),
                    components: vec![FieldComponent::Ey],
                };
                assembled.synthesize(&amps, &request)
            }
        }
    }
}
