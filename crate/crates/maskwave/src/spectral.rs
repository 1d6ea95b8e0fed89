//! Truncated Fourier harmonic lattice, free-space dispersion with the
//! outgoing-wave branch, and permittivity Fourier coefficients.

use ndarray::Array2;
use num_complex::Complex64;

use crate::domain::PermittivityProfile;
use crate::error::{Error, Result};

/// Square root on the branch Re >= 0, Im <= 0 used for every propagation
/// constant: propagating waves carry power outward, evanescent ones decay.
pub fn branch_sqrt(w: Complex64) -> Complex64 {
    let s = w.sqrt();
    if s.im > 0.0 {
        -s
    } else {
        s
    }
}

/// Truncated lattice of lateral Fourier harmonics.
///
/// Harmonic (m, n) has transverse wavevector (beta_x + kappa_x m,
/// beta_y + kappa_y n); the Bloch offset beta represents oblique incidence on
/// laterally uniform stacks and is zero for strictly periodic problems.
/// Flattened index order: m in [-nx, nx] outer, n in [-ny, ny] inner.
#[derive(Debug, Clone)]
pub struct HarmonicBasis {
    pub nx: usize,
    pub ny: usize,
    pub kappa_x: f64,
    pub kappa_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
}

impl HarmonicBasis {
    pub fn new_2d(nx: usize, lx: f64, beta_x: f64) -> Result<Self> {
        if !(lx > 0.0) {
            return Err(Error::invalid("period must be > 0"));
        }
        Ok(Self {
            nx,
            ny: 0,
            kappa_x: 2.0 * std::f64::consts::PI / lx,
            kappa_y: 0.0,
            beta_x,
            beta_y: 0.0,
        })
    }

    pub fn new_3d(nx: usize, ny: usize, lx: f64, ly: f64, beta_x: f64, beta_y: f64) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::invalid("periods must be > 0"));
        }
        Ok(Self {
            nx,
            ny,
            kappa_x: 2.0 * std::f64::consts::PI / lx,
            kappa_y: 2.0 * std::f64::consts::PI / ly,
            beta_x,
            beta_y,
        })
    }

    /// Number of retained harmonics N = (2 nx + 1)(2 ny + 1).
    pub fn len(&self) -> usize {
        (2 * self.nx + 1) * (2 * self.ny + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flattened index of harmonic (m, n).
    pub fn index(&self, m: i64, n: i64) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= self.nx);
        debug_assert!(n.unsigned_abs() as usize <= self.ny);
        ((m + self.nx as i64) * (2 * self.ny as i64 + 1) + (n + self.ny as i64)) as usize
    }

    /// Inverse of `index`.
    pub fn harmonic(&self, idx: usize) -> (i64, i64) {
        let w = 2 * self.ny as i64 + 1;
        let m = idx as i64 / w - self.nx as i64;
        let n = idx as i64 % w - self.ny as i64;
        (m, n)
    }

    /// Iterates harmonics in flattened order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (nx, ny) = (self.nx as i64, self.ny as i64);
        (-nx..=nx).flat_map(move |m| (-ny..=ny).map(move |n| (m, n)))
    }

    pub fn kx(&self, m: i64) -> f64 {
        self.beta_x + self.kappa_x * m as f64
    }

    pub fn ky(&self, n: i64) -> f64 {
        self.beta_y + self.kappa_y * n as f64
    }

    /// z wavevector of harmonic (m, n) in a uniform medium `eps`, on the
    /// outgoing branch Re >= 0, Im <= 0.
    pub fn kz_in(&self, eps: Complex64, k0: f64, m: i64, n: i64) -> Complex64 {
        let kx = self.kx(m);
        let ky = self.ky(n);
        branch_sqrt(eps * k0 * k0 - kx * kx - ky * ky)
    }
}

/// Free-space z wavevector of harmonic (m, n): sqrt(k0^2 - kx^2 - ky^2) on
/// the branch Re >= 0, Im <= 0.
pub fn free_space_kz(basis: &HarmonicBasis, k0: f64, m: i64, n: i64) -> Complex64 {
    basis.kz_in(Complex64::new(1.0, 0.0), k0, m, n)
}

/// Fourier coefficient tables of one layer profile over lattice offsets
/// (-2 nx ..= 2 nx) x (-2 ny ..= 2 ny): the raw permittivity `eps`, and the
/// log-derivative spectra `hat_x`, `hat_y` of (1/eps) d(eps)/dx and
/// (1/eps) d(eps)/dy. The offset range covers every difference (m - l, n - p)
/// the layer-matrix convolutions need.
#[derive(Debug, Clone)]
pub struct FourierPermittivity {
    pub nx: usize,
    pub ny: usize,
    pub eps: Array2<Complex64>,
    pub hat_x: Array2<Complex64>,
    pub hat_y: Array2<Complex64>,
}

impl FourierPermittivity {
    fn offset_index(&self, dm: i64, dn: i64) -> (usize, usize) {
        debug_assert!(dm.unsigned_abs() as usize <= 2 * self.nx);
        debug_assert!(dn.unsigned_abs() as usize <= 2 * self.ny);
        (
            (dm + 2 * self.nx as i64) as usize,
            (dn + 2 * self.ny as i64) as usize,
        )
    }

    pub fn eps_at(&self, dm: i64, dn: i64) -> Complex64 {
        self.eps[self.offset_index(dm, dn)]
    }

    pub fn hat_x_at(&self, dm: i64, dn: i64) -> Complex64 {
        self.hat_x[self.offset_index(dm, dn)]
    }

    pub fn hat_y_at(&self, dm: i64, dn: i64) -> Complex64 {
        self.hat_y[self.offset_index(dm, dn)]
    }

    /// Flattened coefficient list in deterministic offset order, used as
    /// neural-operator features.
    pub fn eps_flat(&self) -> Vec<Complex64> {
        self.eps.iter().copied().collect()
    }
}

/// Computes the Fourier coefficient tables of a layer profile by periodic
/// trapezoid quadrature, which converges spectrally for the smooth tanh
/// profiles used here. Derivatives of the profile are analytic.
///
/// `quadrature_n` is the sample count per axis and must be at least
/// 4 (2 nx + 1) to keep the highest retained offsets alias-free.
pub fn permittivity_fourier(
    profile: &PermittivityProfile,
    basis: &HarmonicBasis,
    lx: f64,
    ly: Option<f64>,
    quadrature_n: usize,
) -> Result<FourierPermittivity> {
    let need = 4 * (2 * basis.nx + 1);
    if quadrature_n < need {
        return Err(Error::Aliasing { got: quadrature_n, need });
    }
    if basis.ny > 0 && ly.is_none() {
        return Err(Error::invalid("3D basis requires a y period"));
    }

    // Uniform profiles have exact delta coefficients; skip the quadrature.
    if let PermittivityProfile::Uniform(eps) = profile {
        if eps.norm() < 1e-14 {
            return Err(Error::SingularPermittivity { x: 0.0, y: 0.0, magnitude: eps.norm() });
        }
        let dims = (4 * basis.nx + 1, 4 * basis.ny + 1);
        let mut eps_t = Array2::<Complex64>::default(dims);
        eps_t[(2 * basis.nx, 2 * basis.ny)] = *eps;
        return Ok(FourierPermittivity {
            nx: basis.nx,
            ny: basis.ny,
            eps: eps_t,
            hat_x: Array2::default(dims),
            hat_y: Array2::default(dims),
        });
    }

    let qx = quadrature_n;
    let qy = if basis.ny == 0 { 1 } else { quadrature_n.max(4 * (2 * basis.ny + 1)) };
    let ly_val = ly.unwrap_or(lx);

    // Sample eps and its log-gradient once per node.
    let mut eps_s = Array2::<Complex64>::default((qx, qy));
    let mut lgx_s = Array2::<Complex64>::default((qx, qy));
    let mut lgy_s = Array2::<Complex64>::default((qx, qy));
    for p in 0..qx {
        let x = -0.5 * lx + p as f64 * lx / qx as f64;
        for q in 0..qy {
            let y = if basis.ny == 0 {
                0.0
            } else {
                -0.5 * ly_val + q as f64 * ly_val / qy as f64
            };
            let e = profile.eval(x, y, lx, ly);
            if e.norm() < 1e-14 {
                return Err(Error::SingularPermittivity { x, y, magnitude: e.norm() });
            }
            let (gx, gy) = profile.grad(x, y, lx, ly);
            eps_s[(p, q)] = e;
            lgx_s[(p, q)] = gx / e;
            lgy_s[(p, q)] = gy / e;
        }
    }

    // Phase tables e^{+i kappa m x_p}, e^{+i kappa n y_q} for all offsets.
    let span_x = 2 * basis.nx as i64;
    let span_y = 2 * basis.ny as i64;
    let phase = |count: usize, period: f64, span: i64, kappa: f64| -> Array2<Complex64> {
        Array2::from_shape_fn((2 * span as usize + 1, count), |(mi, p)| {
            let m = mi as i64 - span;
            let u = -0.5 * period + p as f64 * period / count as f64;
            Complex64::from_polar(1.0, kappa * m as f64 * u)
        })
    };
    let phx = phase(qx, lx, span_x, basis.kappa_x);
    let phy = if basis.ny == 0 {
        Array2::from_elem((1, 1), Complex64::new(1.0, 0.0))
    } else {
        phase(qy, ly_val, span_y, basis.kappa_y)
    };

    let norm = 1.0 / (qx * qy) as f64;
    let dims = (2 * span_x as usize + 1, 2 * span_y as usize + 1);
    let table = |samples: &Array2<Complex64>| -> Array2<Complex64> {
        // Separable sums: contract y first, then x.
        let mut partial = Array2::<Complex64>::default((qx, dims.1));
        for p in 0..qx {
            for ni in 0..dims.1 {
                let mut row = Complex64::default();
                for q in 0..qy {
                    row += samples[(p, q)] * phy[(ni, q)];
                }
                partial[(p, ni)] = row;
            }
        }
        let mut out = Array2::<Complex64>::default(dims);
        for mi in 0..dims.0 {
            for ni in 0..dims.1 {
                let mut acc = Complex64::default();
                for p in 0..qx {
                    acc += partial[(p, ni)] * phx[(mi, p)];
                }
                out[(mi, ni)] = acc * norm;
            }
        }
        out
    };

    Ok(FourierPermittivity {
        nx: basis.nx,
        ny: basis.ny,
        eps: table(&eps_s),
        hat_x: table(&lgx_s),
        hat_y: table(&lgy_s),
    })
}

/// Materializes the convolution with a coefficient table as a dense N x N
/// matrix: T[(m,n),(l,p)] = coeffs[(m-l, n-p)].
pub fn convolution_matrix(
    coeffs: &Array2<Complex64>,
    basis: &HarmonicBasis,
    // coeffs is indexed by offsets centered at (2 nx, 2 ny)
    nx: usize,
    ny: usize,
) -> Result<Array2<Complex64>> {
    if nx < basis.nx || ny < basis.ny {
        return Err(Error::ShapeMismatch(format!(
            "coefficient table covers offsets ({nx}, {ny}), basis needs ({}, {})",
            basis.nx, basis.ny
        )));
    }
    if coeffs.dim() != (4 * nx + 1, 4 * ny + 1) {
        return Err(Error::ShapeMismatch(format!(
            "coefficient table shape {:?} does not match offsets ({nx}, {ny})",
            coeffs.dim()
        )));
    }
    let n = basis.len();
    let mut t = Array2::<Complex64>::default((n, n));
    for (row, (m, nn)) in basis.iter().enumerate() {
        for (col, (l, p)) in basis.iter().enumerate() {
            let dm = (m - l + 2 * nx as i64) as usize;
            let dn = (nn - p + 2 * ny as i64) as usize;
            t[(row, col)] = coeffs[(dm, dn)];
        }
    }
    Ok(t)
}

impl FourierPermittivity {
    /// Convolution matrix of the raw permittivity coefficients.
    pub fn eps_matrix(&self, basis: &HarmonicBasis) -> Result<Array2<Complex64>> {
        convolution_matrix(&self.eps, basis, self.nx, self.ny)
    }
}
