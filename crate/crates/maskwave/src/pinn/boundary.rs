//! Boundary operator residuals: per-harmonic outgoing-wave (radiation)
//! conditions at the top and bottom of the domain, and optional periodicity
//! residuals for networks without the Fourier embedding.
//!
//! At the top boundary the condition applies to the scattered field
//! u - u_inc (the incident wave itself travels inward and would otherwise
//! violate the stated condition); at the bottom the total field is outgoing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::branch_sqrt;

use super::field::ScalarField2;
use super::problem::PinnProblem;

#[derive(Debug, Clone)]
pub struct BoundaryResiduals {
    /// Per harmonic m in [-nx, nx], top boundary (scattered field).
    pub sommerfeld_top: Vec<Complex64>,
    /// Per harmonic, bottom boundary (total field).
    pub sommerfeld_bottom: Vec<Complex64>,
    /// Value periodicity samples, present only when requested (networks with
    /// the embedding satisfy periodicity exactly).
    pub periodicity: Option<Vec<Complex64>>,
}

/// Shared quadrature data of the two horizontal boundaries.
pub(crate) struct BoundaryQuadrature {
    pub xs: Vec<f64>,
    pub z_top: f64,
    pub z_bottom: f64,
    /// Outgoing kz per harmonic, in the top / bottom medium.
    pub kz_top: Vec<Complex64>,
    pub kz_bottom: Vec<Complex64>,
    /// phase[m][q] = exp(+i kappa m x_q) / Q.
    pub phase: Vec<Vec<Complex64>>,
    /// Incident field and its z derivative at the top points.
    pub inc_top: Vec<Complex64>,
    pub inc_top_dz: Vec<Complex64>,
}

pub(crate) fn boundary_quadrature(
    problem: &PinnProblem,
    nx: usize,
    quadrature_n: usize,
) -> Result<BoundaryQuadrature> {
    let need = 2 * (2 * nx + 1);
    if quadrature_n < need {
        return Err(Error::Aliasing { got: quadrature_n, need });
    }
    let (x_min, x_max, z_min, z_max) = problem.domain();
    let lx = x_max - x_min;
    let q = quadrature_n;
    let xs: Vec<f64> = (0..q).map(|i| x_min + i as f64 * lx / q as f64).collect();
    let kappa = 2.0 * std::f64::consts::PI / lx;
    let k0 = problem.k0();
    let (eps_top, eps_bottom) = problem.boundary_eps();
    let ms: Vec<i64> = (-(nx as i64)..=nx as i64).collect();
    let kz_of = |eps: Complex64| -> Vec<Complex64> {
        ms.iter()
            .map(|&m| branch_sqrt(eps * k0 * k0 - (kappa * m as f64).powi(2)))
            .collect()
    };
    let phase: Vec<Vec<Complex64>> = ms
        .iter()
        .map(|&m| {
            xs.iter()
                .map(|&x| Complex64::from_polar(1.0 / q as f64, kappa * m as f64 * x))
                .collect()
        })
        .collect();
    let (k0x, k0z) = problem.incident_k();
    let inc = |x: f64, z: f64| Complex64::from_polar(1.0, -(k0x * x - k0z * z));
    let inc_top: Vec<Complex64> = xs.iter().map(|&x| inc(x, z_max)).collect();
    let inc_top_dz: Vec<Complex64> =
        inc_top.iter().map(|&u| Complex64::new(0.0, k0z) * u).collect();
    Ok(BoundaryQuadrature {
        xs,
        z_top: z_max,
        z_bottom: z_min,
        kz_top: kz_of(eps_top),
        kz_bottom: kz_of(eps_bottom),
        phase,
        inc_top,
        inc_top_dz,
    })
}

impl BoundaryQuadrature {
    /// Projects sampled boundary values onto the harmonic residuals.
    /// `u`/`uz` are the field and its z derivative at `xs` on one boundary.
    pub fn project(
        &self,
        u: &[Complex64],
        uz: &[Complex64],
        top: bool,
    ) -> Vec<Complex64> {
        let kzs = if top { &self.kz_top } else { &self.kz_bottom };
        let sign = if top { 1.0 } else { -1.0 };
        kzs.iter()
            .zip(self.phase.iter())
            .map(|(&kz, ph)| {
                let mut acc = Complex64::default();
                for q in 0..u.len() {
                    acc += (uz[q] + sign * Complex64::new(0.0, 1.0) * kz * u[q]) * ph[q];
                }
                acc
            })
            .collect()
    }
}

/// Evaluates the boundary residuals of an arbitrary field.
pub fn boundary_residuals(
    field: &dyn ScalarField2,
    problem: &PinnProblem,
    nx: usize,
    quadrature_n: usize,
    include_periodicity: bool,
) -> Result<BoundaryResiduals> {
    let quad = boundary_quadrature(problem, nx, quadrature_n)?;
    let sample = |z: f64| -> (Vec<Complex64>, Vec<Complex64>) {
        let mut u = Vec::with_capacity(quad.xs.len());
        let mut uz = Vec::with_capacity(quad.xs.len());
        for &x in &quad.xs {
            let (v, _, vz, _, _) = field.eval_jet(x, z);
            u.push(v);
            uz.push(vz);
        }
        (u, uz)
    };
    let (u_top, uz_top) = sample(quad.z_top);
    let scat: Vec<Complex64> = u_top
        .iter()
        .zip(quad.inc_top.iter())
        .map(|(u, i)| u - i)
        .collect();
    let scat_dz: Vec<Complex64> = uz_top
        .iter()
        .zip(quad.inc_top_dz.iter())
        .map(|(u, i)| u - i)
        .collect();
    let sommerfeld_top = quad.project(&scat, &scat_dz, true);
    let (u_bot, uz_bot) = sample(quad.z_bottom);
    let sommerfeld_bottom = quad.project(&u_bot, &uz_bot, false);

    let periodicity = if include_periodicity {
        let (x_min, x_max, z_min, z_max) = problem.domain();
        let n = quad.xs.len().min(64);
        Some(
            (0..n)
                .map(|j| {
                    let z = z_min + (z_max - z_min) * j as f64 / (n - 1).max(1) as f64;
                    field.eval(x_min, z) - field.eval(x_max, z)
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(BoundaryResiduals { sommerfeld_top, sommerfeld_bottom, periodicity })
}
