//! Closed-form TE solutions for the validation problems: plane-wave
//! propagation, reflection from a single interface, and reflection from a
//! dielectric slab, plus the Fresnel/Airy amplitude oracles behind them.

use ndarray::Array3;
use num_complex::Complex64;

use crate::domain::{
    FieldComponent, FieldGrid, IncidentWave, Layer, MaskSpec, PermittivityProfile,
    UNIT_INCIDENT_E,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkVariant {
    /// Plane wave in free space, no scatterer.
    Propagation,
    /// Half space of `eps` below z = 0.
    Interface,
    /// Slab of `eps` occupying -pi/kz <= z <= 0, vacuum elsewhere.
    Slab,
}

/// One of the three validation problems. TE wave at 45 degrees
/// (kx = kz = `kz_inc`), medium permittivity 4 by default; the slab is a
/// half-wave layer of thickness pi / kz_inc.
#[derive(Debug, Clone)]
pub struct BenchmarkProblem {
    pub variant: BenchmarkVariant,
    pub eps: Complex64,
    pub kz_inc: f64,
}

impl BenchmarkProblem {
    /// Default scale: a 13.5 nm wave at 45 degrees, so kx = kz = k0 / sqrt(2).
    /// The closed forms are scale free; the scale matters only to the
    /// conditioning of the trained solvers.
    pub fn new(variant: BenchmarkVariant) -> Self {
        let k0 = 2.0 * std::f64::consts::PI / 13.5;
        Self {
            variant,
            eps: Complex64::new(4.0, 0.0),
            kz_inc: k0 / 2.0f64.sqrt(),
        }
    }

    /// Dimensionless variant with kx = kz = 1, handy for closed-form checks.
    pub fn unit_scale(variant: BenchmarkVariant) -> Self {
        Self { variant, eps: Complex64::new(4.0, 0.0), kz_inc: 1.0 }
    }

    pub fn kx(&self) -> f64 {
        self.kz_inc
    }

    pub fn kz(&self) -> f64 {
        self.kz_inc
    }

    pub fn k0(&self) -> f64 {
        (self.kx() * self.kx() + self.kz() * self.kz()).sqrt()
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k0()
    }

    /// One lateral period of the computational cell.
    pub fn period_x(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.kx()
    }

    /// Slab thickness (also the depth of the interface-problem layer).
    pub fn thickness(&self) -> f64 {
        std::f64::consts::PI / self.kz()
    }

    /// Evaluation domain (x_min, x_max, z_min, z_max).
    pub fn domain(&self) -> (f64, f64, f64, f64) {
        let pi = std::f64::consts::PI;
        let zmin = match self.variant {
            BenchmarkVariant::Slab => -2.0 * pi / self.kz(),
            _ => -pi / self.kz(),
        };
        (-pi / self.kx(), pi / self.kx(), zmin, pi / self.kz())
    }

    /// Permittivity along z (the problems are laterally uniform).
    pub fn eps_at(&self, z: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self.variant {
            BenchmarkVariant::Propagation => one,
            BenchmarkVariant::Interface => {
                if z > 0.0 {
                    one
                } else {
                    self.eps
                }
            }
            BenchmarkVariant::Slab => {
                if z > 0.0 || z < -self.thickness() {
                    one
                } else {
                    self.eps
                }
            }
        }
    }

    fn kz2(&self) -> Complex64 {
        let k0 = self.k0();
        crate::spectral::branch_sqrt(self.eps * k0 * k0 - self.kx() * self.kx())
    }

    /// Exact E_y at a point, normalized to unit incident amplitude.
    pub fn exact_ey(&self, x: f64, z: f64) -> Complex64 {
        self.exact_ey_hx(x, z).0
    }

    /// Exact (E_y, H_x) at a point.
    pub fn exact_ey_hx(&self, x: f64, z: f64) -> (Complex64, Complex64) {
        let i = Complex64::new(0.0, 1.0);
        let k0 = self.k0();
        let kz1 = Complex64::new(self.kz(), 0.0);
        let lateral = (-i * self.kx() * x).exp();
        let down = |kz: Complex64, z: f64| (i * kz * z).exp();
        let up = |kz: Complex64, z: f64| (-i * kz * z).exp();
        let (ey, hx): (Complex64, Complex64) = match self.variant {
            BenchmarkVariant::Propagation => {
                let e = down(kz1, z);
                (e, kz1 / k0 * e)
            }
            BenchmarkVariant::Interface => {
                let kz2 = self.kz2();
                let (r, t) = fresnel_te(kz1, kz2).expect("regular interface");
                if z > 0.0 {
                    let e = down(kz1, z) + r * up(kz1, z);
                    let h = kz1 / k0 * (down(kz1, z) - r * up(kz1, z));
                    (e, h)
                } else {
                    let e = t * down(kz2, z);
                    (e, kz2 / k0 * e)
                }
            }
            BenchmarkVariant::Slab => {
                let kz2 = self.kz2();
                let h = self.thickness();
                let sol = slab_solution(kz1, kz2, h).expect("regular slab");
                if z > 0.0 {
                    let e = down(kz1, z) + sol.r * up(kz1, z);
                    let hx = kz1 / k0 * (down(kz1, z) - sol.r * up(kz1, z));
                    (e, hx)
                } else if z >= -h {
                    let e = sol.a * down(kz2, z) + sol.b * up(kz2, z);
                    let hx = kz2 / k0 * (sol.a * down(kz2, z) - sol.b * up(kz2, z));
                    (e, hx)
                } else {
                    let e = sol.t * down(kz1, z + h);
                    (e, kz1 / k0 * e)
                }
            }
        };
        (ey * lateral, hx * lateral)
    }

    /// Exact solution sampled on a tensor grid (components E_y and H_x).
    pub fn exact_field(&self, xs: &[f64], zs: &[f64]) -> FieldGrid {
        let mut ey = Array3::<Complex64>::default((xs.len(), 1, zs.len()));
        let mut hx = Array3::<Complex64>::default((xs.len(), 1, zs.len()));
        for (ix, &x) in xs.iter().enumerate() {
            for (iz, &z) in zs.iter().enumerate() {
                let (e, h) = self.exact_ey_hx(x, z);
                ey[(ix, 0, iz)] = e;
                hx[(ix, 0, iz)] = h;
            }
        }
        FieldGrid {
            x: xs.to_vec(),
            y: None,
            z: zs.to_vec(),
            components: vec![(FieldComponent::Ey, ey), (FieldComponent::Hx, hx)],
            normalization: UNIT_INCIDENT_E.to_string(),
        }
    }

    /// The equivalent layered-mask description consumed by the numeric
    /// solvers. The incident wave is the first lattice harmonic of the cell.
    pub fn to_mask(&self) -> Result<MaskSpec> {
        let one = Complex64::new(1.0, 0.0);
        let (_, _, z_min, z_max) = self.domain();
        let (layer_eps, substrate) = match self.variant {
            BenchmarkVariant::Propagation => (one, one),
            BenchmarkVariant::Interface => (self.eps, self.eps),
            BenchmarkVariant::Slab => (self.eps, one),
        };
        let layer = Layer::new(
            PermittivityProfile::Uniform(layer_eps),
            self.thickness(),
            "medium",
        )?;
        let incident = IncidentWave::te(self.wavelength(), std::f64::consts::FRAC_PI_4)?;
        Ok(MaskSpec {
            period_x: self.period_x(),
            period_y: None,
            layers: vec![layer],
            superstrate_eps: one,
            substrate_eps: substrate,
            incident,
            z_min,
            z_max,
        })
    }
}

/// TE Fresnel amplitudes of a single interface in terms of the z
/// wavevectors on either side: r = (kz1 - kz2) / (kz1 + kz2),
/// t = 2 kz1 / (kz1 + kz2).
pub fn fresnel_te(kz1: Complex64, kz2: Complex64) -> Result<(Complex64, Complex64)> {
    let denom = kz1 + kz2;
    if denom.norm() < 1e-300 {
        return Err(Error::invalid("kz1 + kz2 = 0: degenerate interface"));
    }
    Ok(((kz1 - kz2) / denom, 2.0 * kz1 / denom))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct SlabSolution {
    pub r: Complex64,
    pub t: Complex64,
    /// Interior amplitudes of exp(+i kz2 z) and exp(-i kz2 z).
    pub a: Complex64,
    pub b: Complex64,
}

pub(crate) fn slab_solution(kz1: Complex64, kz2: Complex64, h: f64) -> Result<SlabSolution> {
    if (kz1 + kz2).norm() < 1e-300 || kz2.norm() < 1e-300 {
        return Err(Error::invalid("degenerate slab wavevectors"));
    }
    let i = Complex64::new(0.0, 1.0);
    let e_plus = (i * kz2 * h).exp();
    let e_minus = (-i * kz2 * h).exp();
    let p = ((kz2 + kz1) * e_plus + (kz2 - kz1) * e_minus) / (2.0 * kz2);
    let q = ((kz2 + kz1) * e_plus - (kz2 - kz1) * e_minus) / 2.0;
    let denom = kz1 * p + q;
    if denom.norm() < 1e-300 {
        return Err(Error::invalid("slab system is singular"));
    }
    let t = 2.0 * kz1 / denom;
    let r = t * p - Complex64::new(1.0, 0.0);
    let u = t * (kz2 + kz1) / (2.0 * kz2);
    let v = t * (kz2 - kz1) / (2.0 * kz2);
    Ok(SlabSolution { r, t, a: u * e_plus, b: v * e_minus })
}

/// Reflection and transmission amplitudes of a slab of thickness `h`
/// sandwiched between identical media, by two-interface matching. The
/// transmitted amplitude is referenced at the slab bottom.
pub fn airy_slab(kz1: Complex64, kz2: Complex64, thickness: f64) -> Result<(Complex64, Complex64)> {
    let sol = slab_solution(kz1, kz2, thickness)?;
    Ok((sol.r, sol.t))
}
