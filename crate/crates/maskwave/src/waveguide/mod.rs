//! The reference solver: per-layer eigenmode expansion in lateral Fourier
//! harmonics, interface mode matching, a direct dense solve of the resulting
//! global system, field synthesis and diffraction efficiencies.

mod efficiency;
mod field;
mod global;
mod layer;
mod solve;

pub use efficiency::{
    diffraction_efficiencies, reflectivity_scan, DiffractionEfficiencies, OrderEfficiency,
    ReflectivityCurve,
};
pub use field::{linspace, GridRequest};
pub use global::{
    assemble_global_system, GlobalSystem, IncidentPlaneWave, RegionData, SystemLayout,
};
pub use layer::{
    assemble_layer_matrix, layer_eigenmodes, prepare_layer, LayerMatrix, LayerModes, LayerStack,
};
pub use solve::{solve_amplitudes, AmplitudeVector};

use rayon::prelude::*;

use crate::domain::{FieldGrid, MaskSpec};
use crate::error::Result;
use crate::spectral::{permittivity_fourier, FourierPermittivity, HarmonicBasis};

/// Default quadrature samples per axis for the permittivity spectra.
fn default_quadrature(is_3d: bool, nx: usize, ny: usize) -> usize {
    let need = 4 * (2 * nx.max(ny) + 1);
    if is_3d {
        512usize.max(need)
    } else {
        4096usize.max(need)
    }
}

/// A mask run through the full assembly pipeline (Fourier spectra, per-layer
/// eigenmodes, global continuity system), ready to solve and post-process.
#[derive(Debug, Clone)]
pub struct AssembledMask {
    pub mask: MaskSpec,
    pub basis: HarmonicBasis,
    pub k0: f64,
    pub incident: IncidentPlaneWave,
    pub fourier: Vec<FourierPermittivity>,
    pub layers: Vec<LayerStack>,
    pub superstrate: RegionData,
    pub substrate: RegionData,
    pub system: GlobalSystem,
    pub warnings: Vec<String>,
}

/// Runs the assembly stages for `mask` with `nx` (and `ny` for 3D problems)
/// retained harmonics per axis.
///
/// With `nx = ny = 0` the basis carries the incident transverse wavevector as
/// a Bloch offset, which evaluates laterally uniform stacks at arbitrary
/// incidence angles. Otherwise harmonics are integer multiples of the lattice
/// vectors and the incident wave snaps onto the nearest lattice harmonic
/// (recorded in `warnings` if the mismatch is meaningful).
pub fn assemble(mask: &MaskSpec, nx: usize, ny: Option<usize>) -> Result<AssembledMask> {
    assemble_with_quadrature(mask, nx, ny, None)
}

pub fn assemble_with_quadrature(
    mask: &MaskSpec,
    nx: usize,
    ny: Option<usize>,
    quadrature_n: Option<usize>,
) -> Result<AssembledMask> {
    mask.validate()?;
    let k0 = mask.incident.k0();
    let is_3d = mask.period_y.is_some();
    let ny = ny.unwrap_or(if is_3d { nx } else { 0 });
    let (k0x, k0y) = mask.incident.transverse_k(mask.superstrate_eps);

    let basis = if nx == 0 && ny == 0 {
        // Single-harmonic Bloch path.
        match mask.period_y {
            Some(ly) => HarmonicBasis::new_3d(0, 0, mask.period_x, ly, k0x, k0y)?,
            None => HarmonicBasis::new_2d(0, mask.period_x, k0x)?,
        }
    } else {
        match mask.period_y {
            Some(ly) => HarmonicBasis::new_3d(nx, ny, mask.period_x, ly, 0.0, 0.0)?,
            None => HarmonicBasis::new_2d(nx, mask.period_x, 0.0)?,
        }
    };

    let mut warnings = Vec::new();
    let incident = IncidentPlaneWave::resolve(mask, &basis, &mut warnings)?;

    let quad = quadrature_n.unwrap_or_else(|| default_quadrature(is_3d, basis.nx, basis.ny));
    let fourier: Vec<FourierPermittivity> = mask
        .layers
        .par_iter()
        .map(|layer| {
            permittivity_fourier(&layer.profile, &basis, mask.period_x, mask.period_y, quad)
        })
        .collect::<Result<_>>()?;

    let layers: Vec<LayerStack> = fourier
        .par_iter()
        .zip(mask.layers.par_iter())
        .enumerate()
        .map(|(j, (fp, layer))| prepare_layer(fp, &basis, k0, layer.thickness, j))
        .collect::<Result<_>>()?;

    let superstrate = RegionData::new(mask.superstrate_eps, &basis, k0);
    let substrate = RegionData::new(mask.substrate_eps, &basis, k0);
    let system =
        assemble_global_system(&basis, k0, &layers, &superstrate, &substrate, &incident)?;

    Ok(AssembledMask {
        mask: mask.clone(),
        basis,
        k0,
        incident,
        fourier,
        layers,
        superstrate,
        substrate,
        system,
        warnings,
    })
}

impl AssembledMask {
    /// Direct dense solve of the global system.
    pub fn solve(&self) -> Result<AmplitudeVector> {
        solve_amplitudes(&self.system)
    }

    /// Evaluates the solved field on a sample grid.
    pub fn synthesize(&self, amps: &AmplitudeVector, request: &GridRequest) -> Result<FieldGrid> {
        field::synthesize(self, amps, request)
    }

    /// Per-order reflected/transmitted power fractions.
    pub fn efficiencies(&self, amps: &AmplitudeVector) -> DiffractionEfficiencies {
        diffraction_efficiencies(self, amps)
    }

    /// Residual norm ||M a - r|| of an arbitrary amplitude vector; the
    /// quantity neural surrogates train against.
    pub fn residual_norm(&self, a: &ndarray::Array1<num_complex::Complex64>) -> f64 {
        solve::norm(&(&self.system.m_hat.dot(a) - &self.system.rhs))
    }

    /// Tangential E_y amplitude of the reflected order (m, n) at z = 0, per
    /// unit incident amplitude. For TE problems this is the field reflection
    /// coefficient of the order.
    pub fn reflected_ey(&self, amps: &AmplitudeVector, m: i64, n: i64) -> num_complex::Complex64 {
        let i = self.basis.index(m, n);
        let kx = self.basis.kx(m);
        let ky = self.basis.ky(n);
        let kz = self.superstrate.kz[i];
        let inv = num_complex::Complex64::new(1.0, 0.0) / (self.superstrate.eps * self.k0);
        let ax = amps.values[amps.layout.refl_x(i)];
        let ay = amps.values[amps.layout.refl_y(i)];
        -inv * ((kx * kx + kz * kz) * ax + kx * ky * ay)
    }

    /// Tangential E_y amplitude of the transmitted order (m, n), referenced
    /// at the stack bottom z = -D.
    pub fn transmitted_ey(&self, amps: &AmplitudeVector, m: i64, n: i64) -> num_complex::Complex64 {
        let i = self.basis.index(m, n);
        let kx = self.basis.kx(m);
        let ky = self.basis.ky(n);
        let kz = self.substrate.kz[i];
        let inv = num_complex::Complex64::new(1.0, 0.0) / (self.substrate.eps * self.k0);
        inv * ((kx * kx + kz * kz) * ax_ay(amps, i).0 + kx * ky * ax_ay(amps, i).1)
    }
}

fn ax_ay(amps: &AmplitudeVector, i: usize) -> (num_complex::Complex64, num_complex::Complex64) {
    (
        amps.values[amps.layout.trans_x(i)],
        amps.values[amps.layout.trans_y(i)],
    )
}
