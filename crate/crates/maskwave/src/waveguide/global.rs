//! Mode matching: tangential-field continuity at every interface assembled
//! into one global linear system for the mode amplitudes.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::domain::MaskSpec;
use crate::error::{Error, Result};
use crate::spectral::{branch_sqrt, HarmonicBasis};

use super::layer::LayerStack;

/// Index layout of the global unknown vector: for each layer j the
/// down-going amplitudes (referenced at the layer top) then the up-going ones
/// (referenced at the layer bottom), followed by reflected A_x, A_y and
/// transmitted A_x, A_y order amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemLayout {
    /// Retained harmonics N.
    pub n: usize,
    /// Layer count J.
    pub layers: usize,
}

impl SystemLayout {
    pub fn dim(&self) -> usize {
        4 * self.n * (self.layers + 1)
    }

    /// Amplitude of mode p travelling with exp(+i kz (z - z_top)).
    pub fn layer_down(&self, j: usize, p: usize) -> usize {
        j * 4 * self.n + p
    }

    /// Amplitude of mode p travelling with exp(-i kz (z - z_bottom)).
    pub fn layer_up(&self, j: usize, p: usize) -> usize {
        j * 4 * self.n + 2 * self.n + p
    }

    pub fn refl_x(&self, i: usize) -> usize {
        self.layers * 4 * self.n + i
    }

    pub fn refl_y(&self, i: usize) -> usize {
        self.layers * 4 * self.n + self.n + i
    }

    pub fn trans_x(&self, i: usize) -> usize {
        self.layers * 4 * self.n + 2 * self.n + i
    }

    pub fn trans_y(&self, i: usize) -> usize {
        self.layers * 4 * self.n + 3 * self.n + i
    }

    /// Row of the continuity equation for `component` of harmonic `i` at
    /// interface `iface` (0 = top of the stack, J = bottom).
    pub fn row(&self, iface: usize, component: usize, i: usize) -> usize {
        iface * 4 * self.n + component * self.n + i
    }
}

/// Uniform half-space above or below the stack: per-harmonic z wavevectors.
#[derive(Debug, Clone)]
pub struct RegionData {
    pub eps: Complex64,
    pub kz: Vec<Complex64>,
}

impl RegionData {
    pub fn new(eps: Complex64, basis: &HarmonicBasis, k0: f64) -> Self {
        let kz = basis.iter().map(|(m, n)| basis.kz_in(eps, k0, m, n)).collect();
        Self { eps, kz }
    }
}

/// The incident plane wave resolved onto the harmonic lattice.
#[derive(Debug, Clone)]
pub struct IncidentPlaneWave {
    /// Harmonic carrying the incident wave.
    pub m0: i64,
    pub n0: i64,
    /// Transverse wavevector actually used (snapped to the lattice).
    pub kx: f64,
    pub ky: f64,
    /// Downward z wavevector in the superstrate (positive real part).
    pub kz: Complex64,
    /// Tangential field amplitudes at z = 0.
    pub h0x: Complex64,
    pub h0y: Complex64,
    pub e0x: Complex64,
    pub e0y: Complex64,
}

impl IncidentPlaneWave {
    /// Resolves a TE wave onto the basis. When the basis has harmonics
    /// (nx + ny > 0) the transverse wavevector must sit on the integer
    /// lattice; otherwise it is snapped and a warning is recorded.
    pub fn resolve(
        mask: &MaskSpec,
        basis: &HarmonicBasis,
        warnings: &mut Vec<String>,
    ) -> Result<Self> {
        let k0 = mask.incident.k0();
        let (k0x_exact, k0y_exact) = mask.incident.transverse_k(mask.superstrate_eps);
        let (m0, n0, kx, ky) = if basis.nx == 0 && basis.ny == 0 {
            // Single-harmonic Bloch path: the offset carries the obliquity.
            (0i64, 0i64, basis.kx(0), basis.ky(0))
        } else {
            let m0 = ((k0x_exact - basis.beta_x) / basis.kappa_x).round() as i64;
            let n0 = if basis.ny == 0 {
                0
            } else {
                ((k0y_exact - basis.beta_y) / basis.kappa_y).round() as i64
            };
            if m0.unsigned_abs() as usize > basis.nx || n0.unsigned_abs() as usize > basis.ny {
                return Err(Error::invalid(format!(
                    "incident harmonic ({m0}, {n0}) outside the retained basis"
                )));
            }
            let kx = basis.kx(m0);
            let ky = basis.ky(n0);
            let mismatch = ((kx - k0x_exact).powi(2) + (ky - k0y_exact).powi(2)).sqrt();
            if mismatch > 1e-9 * k0 {
                warnings.push(format!(
                    "incident transverse wavevector snapped to harmonic ({m0}, {n0}): \
                     |dk| = {mismatch:.3e} rad/nm"
                ));
            }
            (m0, n0, kx, ky)
        };

        let eps_sup = mask.superstrate_eps;
        let kz = branch_sqrt(eps_sup * k0 * k0 - kx * kx - ky * ky);
        if kz.re <= 0.0 {
            return Err(Error::invalid(
                "incident wave is evanescent in the superstrate".to_string(),
            ));
        }

        // TE amplitudes: E0 perpendicular to the plane of incidence, H0 from
        // K x E / k0 with K = (kx, ky, -kz).
        let e0 = mask.incident.amplitude;
        let kt = (kx * kx + ky * ky).sqrt();
        let (cos_az, sin_az) = if kt > 1e-14 * k0 {
            (kx / kt, ky / kt)
        } else {
            (mask.incident.azimuth.cos(), mask.incident.azimuth.sin())
        };
        let e0x = -e0 * sin_az;
        let e0y = e0 * cos_az;
        let h0x = kz * e0 * cos_az / k0;
        let h0y = kz * e0 * sin_az / k0;

        Ok(Self { m0, n0, kx, ky, kz, h0x, h0y, e0x, e0y })
    }

    /// Downward power flux (z component of the Poynting vector magnitude).
    pub fn flux(&self) -> f64 {
        0.5 * (self.e0x * self.h0y.conj() - self.e0y * self.h0x.conj()).re.abs()
    }
}

/// The assembled global system `m_hat * a = rhs` plus its unknown layout.
/// Rows are scaled to unit infinity norm; `rhs` is nonzero only in the
/// incident harmonic's continuity rows at z = 0.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub m_hat: Array2<Complex64>,
    pub rhs: Array1<Complex64>,
    pub layout: SystemLayout,
}

const H_X: usize = 0;
const H_Y: usize = 1;
const E_X: usize = 2;
const E_Y: usize = 3;

/// Assembles the continuity equations of (H_x, H_y, E_x, E_y) at all J + 1
/// interfaces. Signs: field above the interface enters +, below enters -, and
/// the incident wave's tangential amplitudes land on the right-hand side.
pub fn assemble_global_system(
    basis: &HarmonicBasis,
    k0: f64,
    layers: &[LayerStack],
    superstrate: &RegionData,
    substrate: &RegionData,
    incident: &IncidentPlaneWave,
) -> Result<GlobalSystem> {
    let n = basis.len();
    let layout = SystemLayout { n, layers: layers.len() };
    let dim = layout.dim();
    let mut m = Array2::<Complex64>::default((dim, dim));
    let mut rhs = Array1::<Complex64>::default(dim);

    let kxs: Vec<f64> = basis.iter().map(|(mm, _)| basis.kx(mm)).collect();
    let kys: Vec<f64> = basis.iter().map(|(_, nn)| basis.ky(nn)).collect();

    // Contribution of layer j's modes at one of its interfaces.
    // `at_top`: which interface of the layer; `sign`: + if the layer sits
    // above the interface under consideration, - if below.
    let add_layer = |m: &mut Array2<Complex64>,
                         iface: usize,
                         j: usize,
                         at_top: bool,
                         sign: f64| {
        let stack = &layers[j];
        let two_n = 2 * n;
        for p in 0..two_n {
            let kz = stack.modes.kz[p];
            let ph = stack.phase[p];
            // (phase of the down amplitude, phase of the up amplitude)
            let (ph_down, ph_up) = if at_top {
                (Complex64::new(1.0, 0.0), ph)
            } else {
                (ph, Complex64::new(1.0, 0.0))
            };
            let col_down = layout.layer_down(j, p);
            let col_up = layout.layer_up(j, p);
            for i in 0..n {
                let hx = kz * stack.modes.b[(p, i)];
                let hy = kz * stack.modes.c[(p, i)];
                let ex = stack.ex[(p, i)];
                let ey = stack.ey[(p, i)];
                let s = Complex64::new(sign, 0.0);
                m[(layout.row(iface, H_X, i), col_down)] += s * ph_down * hx;
                m[(layout.row(iface, H_X, i), col_up)] += s * ph_up * hx;
                m[(layout.row(iface, H_Y, i), col_down)] += s * ph_down * hy;
                m[(layout.row(iface, H_Y, i), col_up)] += s * ph_up * hy;
                // E coefficients flip sign with direction: s_dir = +1 down, -1 up.
                m[(layout.row(iface, E_X, i), col_down)] += s * ph_down * ex;
                m[(layout.row(iface, E_X, i), col_up)] -= s * ph_up * ex;
                m[(layout.row(iface, E_Y, i), col_down)] += s * ph_down * ey;
                m[(layout.row(iface, E_Y, i), col_up)] -= s * ph_up * ey;
            }
        }
    };

    // Top interface (z = 0): superstrate (incident + reflected) above,
    // layer 0 below.
    {
        let iface = 0;
        let inv = Complex64::new(1.0, 0.0) / (superstrate.eps * k0);
        for i in 0..n {
            let kz = superstrate.kz[i];
            let kx = kxs[i];
            let ky = kys[i];
            // Reflected wave: s = -1, referenced at z = 0.
            m[(layout.row(iface, H_X, i), layout.refl_x(i))] += kz;
            m[(layout.row(iface, H_Y, i), layout.refl_y(i))] += kz;
            m[(layout.row(iface, E_X, i), layout.refl_x(i))] += inv * (kx * ky);
            m[(layout.row(iface, E_X, i), layout.refl_y(i))] += inv * (ky * ky + kz * kz);
            m[(layout.row(iface, E_Y, i), layout.refl_x(i))] -= inv * (kx * kx + kz * kz);
            m[(layout.row(iface, E_Y, i), layout.refl_y(i))] -= inv * (kx * ky);
        }
        add_layer(&mut m, iface, 0, true, -1.0);
        // Incident wave belongs to the "above" side; move it to the RHS.
        let i0 = basis.index(incident.m0, incident.n0);
        rhs[layout.row(iface, H_X, i0)] = -incident.h0x;
        rhs[layout.row(iface, H_Y, i0)] = -incident.h0y;
        rhs[layout.row(iface, E_X, i0)] = -incident.e0x;
        rhs[layout.row(iface, E_Y, i0)] = -incident.e0y;
    }

    // Interior interfaces: layer j-1 above, layer j below.
    for j in 1..layers.len() {
        add_layer(&mut m, j, j - 1, false, 1.0);
        add_layer(&mut m, j, j, true, -1.0);
    }

    // Bottom interface (z = -D): layer J-1 above, transmitted field below,
    // referenced at z = -D so its phase factors are unity here.
    {
        let iface = layers.len();
        add_layer(&mut m, iface, layers.len() - 1, false, 1.0);
        let inv = Complex64::new(1.0, 0.0) / (substrate.eps * k0);
        for i in 0..n {
            let kz = substrate.kz[i];
            let kx = kxs[i];
            let ky = kys[i];
            // Transmitted wave: s = +1. Sign below the interface: -1.
            m[(layout.row(iface, H_X, i), layout.trans_x(i))] -= kz;
            m[(layout.row(iface, H_Y, i), layout.trans_y(i))] -= kz;
            m[(layout.row(iface, E_X, i), layout.trans_x(i))] -= -inv * (kx * ky);
            m[(layout.row(iface, E_X, i), layout.trans_y(i))] -= -inv * (ky * ky + kz * kz);
            m[(layout.row(iface, E_Y, i), layout.trans_x(i))] -= inv * (kx * kx + kz * kz);
            m[(layout.row(iface, E_Y, i), layout.trans_y(i))] -= inv * (kx * ky);
        }
    }

    // Row equilibration: scale every row (and the rhs) to unit infinity norm.
    for r in 0..dim {
        let mut max = 0.0f64;
        for c in 0..dim {
            max = max.max(m[(r, c)].norm());
        }
        if max > 0.0 {
            let s = Complex64::new(1.0 / max, 0.0);
            for c in 0..dim {
                m[(r, c)] *= s;
            }
            rhs[r] *= s;
        }
    }

    Ok(GlobalSystem { m_hat: m, rhs, layout })
}
