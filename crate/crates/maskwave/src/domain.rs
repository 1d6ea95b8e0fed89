//! Domain types shared by every solver: the incident wave, permittivity
//! profiles, the layered mask description, field grids, and the embedded
//! optical-constant table.

use ndarray::{Array2, Array3};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Speed of light in nm/s, for converting `k0` to an angular frequency.
pub const SPEED_OF_LIGHT_NM_PER_S: f64 = 2.997_924_58e17;

/// Checks that a complex value has finite components.
pub fn ensure_finite(value: Complex64, what: &str) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{what} must be finite, got {value}")))
    }
}

/// Incident polarization. Only TE (electric field perpendicular to the plane
/// of incidence) is exercised here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
}

/// A monochromatic plane wave incident from above (travelling toward -z).
///
/// `polar_angle` is measured from the -z axis toward +x, `azimuth` rotates the
/// plane of incidence about z. `amplitude` is the electric-field amplitude the
/// outputs are normalized to (default 1).
#[derive(Debug, Clone)]
pub struct IncidentWave {
    pub wavelength: f64,
    pub polar_angle: f64,
    pub azimuth: f64,
    pub polarization: Polarization,
    pub amplitude: Complex64,
}

impl IncidentWave {
    pub fn te(wavelength: f64, polar_angle: f64) -> Result<Self> {
        Self::new(wavelength, polar_angle, 0.0, Complex64::new(1.0, 0.0))
    }

    pub fn new(
        wavelength: f64,
        polar_angle: f64,
        azimuth: f64,
        amplitude: Complex64,
    ) -> Result<Self> {
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(Error::invalid(format!("wavelength must be > 0, got {wavelength}")));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&polar_angle) {
            return Err(Error::invalid(format!(
                "polar angle must lie in [0, pi/2), got {polar_angle}"
            )));
        }
        if !azimuth.is_finite() {
            return Err(Error::invalid("azimuth must be finite"));
        }
        ensure_finite(amplitude, "amplitude")?;
        Ok(Self {
            wavelength,
            polar_angle,
            azimuth,
            polarization: Polarization::Te,
            amplitude,
        })
    }

    /// Free-space wavenumber `2 pi / wavelength` in rad/nm.
    pub fn k0(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Angular frequency `k0 c` in rad/s.
    pub fn angular_frequency(&self) -> f64 {
        self.k0() * SPEED_OF_LIGHT_NM_PER_S
    }

    /// Transverse components of the incident wavevector (in the superstrate).
    pub fn transverse_k(&self, superstrate_eps: Complex64) -> (f64, f64) {
        let n = superstrate_eps.re.max(0.0).sqrt();
        let kt = self.k0() * n * self.polar_angle.sin();
        (kt * self.azimuth.cos(), kt * self.azimuth.sin())
    }
}

/// Lateral permittivity profile of one layer (uniform along z).
///
/// The tanh variants describe an absorber pierced by a vacuum hole of
/// half-width `a` (and `b` along y), with transition width `d`:
/// the profile interpolates between 1 inside the hole and `eps` outside.
#[derive(Debug, Clone)]
pub enum PermittivityProfile {
    Uniform(Complex64),
    TanhHole1D { eps: Complex64, a: f64, d: f64 },
    TanhHole2D { eps: Complex64, a: f64, b: f64, d: f64 },
    /// Uniform samples over one period cell, interpreted as the trigonometric
    /// interpolant through the samples. Row index runs along x, column along y.
    SampledGrid { values: Array2<Complex64>, lx: f64, ly: f64 },
}

/// Wraps a coordinate into the centered period cell [-period/2, period/2).
fn wrap_period(u: f64, period: f64) -> f64 {
    if period <= 0.0 {
        return u;
    }
    let w = (u / period - (u / period).round()) * period;
    // round() ties can land on +period/2; fold to the lower edge.
    if w >= period / 2.0 {
        w - period
    } else {
        w
    }
}

fn tanh_bracket(u: f64, a: f64, d: f64) -> f64 {
    0.5 * (((u + a) / d).tanh() - ((u - a) / d).tanh())
}

/// d/du of `tanh_bracket`.
fn tanh_bracket_deriv(u: f64, a: f64, d: f64) -> f64 {
    let sech2 = |t: f64| {
        let c = t.cosh();
        1.0 / (c * c)
    };
    0.5 * (sech2((u + a) / d) - sech2((u - a) / d)) / d
}

impl PermittivityProfile {
    pub fn validate(&self, lx: f64, ly: Option<f64>) -> Result<()> {
        match self {
            PermittivityProfile::Uniform(eps) => {
                ensure_finite(*eps, "eps")?;
            }
            PermittivityProfile::TanhHole1D { eps, a, d } => {
                ensure_finite(*eps, "eps")?;
                if !(*a > 0.0 && *a <= lx / 2.0) {
                    return Err(Error::invalid(format!(
                        "hole half-width a={a} must satisfy 0 < a <= Lx/2 = {}",
                        lx / 2.0
                    )));
                }
                if !(*d > 0.0) {
                    return Err(Error::invalid("transition width d must be > 0"));
                }
            }
            PermittivityProfile::TanhHole2D { eps, a, b, d } => {
                ensure_finite(*eps, "eps")?;
                let ly = ly.ok_or_else(|| {
                    Error::invalid("TanhHole2D profile requires a y period")
                })?;
                if !(*a > 0.0 && *a <= lx / 2.0) || !(*b > 0.0 && *b <= ly / 2.0) {
                    return Err(Error::invalid(
                        "hole half-widths must satisfy 0 < a <= Lx/2, 0 < b <= Ly/2",
                    ));
                }
                if !(*d > 0.0) {
                    return Err(Error::invalid("transition width d must be > 0"));
                }
            }
            PermittivityProfile::SampledGrid { values, lx, ly } => {
                if values.nrows() < 2 || values.ncols() < 2 {
                    return Err(Error::invalid("sampled grid must be at least 2x2"));
                }
                if !(*lx > 0.0) || !(*ly > 0.0) {
                    return Err(Error::invalid("sampled grid periods must be > 0"));
                }
                for v in values.iter() {
                    ensure_finite(*v, "grid sample")?;
                }
            }
        }
        Ok(())
    }

    /// True when the profile does not vary along y.
    pub fn is_y_uniform(&self) -> bool {
        matches!(
            self,
            PermittivityProfile::Uniform(_) | PermittivityProfile::TanhHole1D { .. }
        )
    }

    /// Evaluates eps(x, y). Coordinates outside the period cell are wrapped by
    /// periodicity rather than rejected.
    pub fn eval(&self, x: f64, y: f64, lx: f64, ly: Option<f64>) -> Complex64 {
        match self {
            PermittivityProfile::Uniform(eps) => *eps,
            PermittivityProfile::TanhHole1D { eps, a, d } => {
                let xw = wrap_period(x, lx);
                let w = tanh_bracket(xw, *a, *d);
                Complex64::new(1.0 - eps.re, -eps.im) * w + eps
            }
            PermittivityProfile::TanhHole2D { eps, a, b, d } => {
                let xw = wrap_period(x, lx);
                let yw = wrap_period(y, ly.unwrap_or(lx));
                let w = tanh_bracket(xw, *a, *d) * tanh_bracket(yw, *b, *d);
                Complex64::new(1.0 - eps.re, -eps.im) * w + eps
            }
            PermittivityProfile::SampledGrid { .. } => self.sampled_eval_grad(x, y).0,
        }
    }

    /// Analytic lateral gradient (d/dx, d/dy) of eps.
    pub fn grad(&self, x: f64, y: f64, lx: f64, ly: Option<f64>) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            PermittivityProfile::Uniform(_) => (zero, zero),
            PermittivityProfile::TanhHole1D { eps, a, d } => {
                let xw = wrap_period(x, lx);
                let dw = tanh_bracket_deriv(xw, *a, *d);
                ((Complex64::new(1.0, 0.0) - eps) * dw, zero)
            }
            PermittivityProfile::TanhHole2D { eps, a, b, d } => {
                let xw = wrap_period(x, lx);
                let yw = wrap_period(y, ly.unwrap_or(lx));
                let wx = tanh_bracket(xw, *a, *d);
                let wy = tanh_bracket(yw, *b, *d);
                let one_minus_eps = Complex64::new(1.0, 0.0) - eps;
                (
                    one_minus_eps * (tanh_bracket_deriv(xw, *a, *d) * wy),
                    one_minus_eps * (wx * tanh_bracket_deriv(yw, *b, *d)),
                )
            }
            PermittivityProfile::SampledGrid { .. } => {
                let (_, gx, gy) = self.sampled_eval_grad_full(x, y);
                (gx, gy)
            }
        }
    }

    fn sampled_eval_grad(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        let (v, gx, _) = self.sampled_eval_grad_full(x, y);
        (v, gx)
    }

    /// Trigonometric interpolant of the sampled grid and its spectral
    /// derivatives. Direct DFT sums; sampled profiles are small.
    fn sampled_eval_grad_full(&self, x: f64, y: f64) -> (Complex64, Complex64, Complex64) {
        let PermittivityProfile::SampledGrid { values, lx, ly } = self else {
            unreachable!()
        };
        let (nx, ny) = (values.nrows(), values.ncols());
        let kx = 2.0 * std::f64::consts::PI / lx;
        let ky = 2.0 * std::f64::consts::PI / ly;
        // DFT coefficients c_{mn} of the samples, with frequencies centered
        // around zero (Nyquist split symmetrically to keep the interpolant
        // real for real samples).
        let mut value = Complex64::default();
        let mut gx = Complex64::default();
        let mut gy = Complex64::default();
        for (m, wm) in centered_freqs(nx) {
            for (n, wn) in centered_freqs(ny) {
                let mut c = Complex64::default();
                for p in 0..nx {
                    for q in 0..ny {
                        let xp = -0.5 * lx + p as f64 * lx / nx as f64;
                        let yq = -0.5 * ly + q as f64 * ly / ny as f64;
                        let phase = kx * m as f64 * xp + ky * n as f64 * yq;
                        c += values[(p, q)] * Complex64::from_polar(1.0, phase);
                    }
                }
                c *= wm * wn / (nx * ny) as f64;
                let ph = Complex64::from_polar(1.0, -(kx * m as f64 * x + ky * n as f64 * y));
                value += c * ph;
                gx += c * ph * Complex64::new(0.0, -kx * m as f64);
                gy += c * ph * Complex64::new(0.0, -ky * n as f64);
            }
        }
        (value, gx, gy)
    }
}

/// Centered DFT frequency list for n samples, with half weights on the
/// Nyquist pair when n is even.
fn centered_freqs(n: usize) -> Vec<(i64, f64)> {
    let half = n as i64 / 2;
    let mut out = Vec::new();
    for m in -half..=half {
        if n % 2 == 0 && (m == -half || m == half) {
            out.push((m, 0.5));
        } else if m > -half || n % 2 == 1 {
            out.push((m, 1.0));
        }
    }
    out
}

/// One mask layer: a lateral profile extruded over `thickness` along z.
#[derive(Debug, Clone)]
pub struct Layer {
    pub profile: PermittivityProfile,
    pub thickness: f64,
    pub label: String,
}

impl Layer {
    pub fn new(profile: PermittivityProfile, thickness: f64, label: impl Into<String>) -> Result<Self> {
        if !(thickness > 0.0) || !thickness.is_finite() {
            return Err(Error::invalid(format!("layer thickness must be > 0, got {thickness}")));
        }
        Ok(Self { profile, thickness, label: label.into() })
    }
}

/// Full problem definition: periodic cell, ordered layer stack (top to
/// bottom), surrounding media, incident wave and evaluation bounds.
///
/// A missing `period_y` marks a 2D problem: all profiles must be uniform in y
/// and fields carry no y dependence.
#[derive(Debug, Clone)]
pub struct MaskSpec {
    pub period_x: f64,
    pub period_y: Option<f64>,
    pub layers: Vec<Layer>,
    pub superstrate_eps: Complex64,
    pub substrate_eps: Complex64,
    pub incident: IncidentWave,
    pub z_min: f64,
    pub z_max: f64,
}

impl MaskSpec {
    /// Total stack thickness D; the stack occupies z in [-D, 0].
    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    pub fn is_two_dimensional(&self) -> bool {
        self.period_y.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.period_x > 0.0) {
            return Err(Error::invalid("period_x must be > 0"));
        }
        if let Some(ly) = self.period_y {
            if !(ly > 0.0) {
                return Err(Error::invalid("period_y must be > 0 when present"));
            }
        }
        if self.layers.is_empty() {
            return Err(Error::invalid("mask needs at least one layer"));
        }
        for layer in &self.layers {
            layer.profile.validate(self.period_x, self.period_y)?;
            if self.period_y.is_none() && !layer.profile.is_y_uniform() {
                return Err(Error::invalid(format!(
                    "layer `{}` varies along y but the problem is 2D",
                    layer.label
                )));
            }
            if !(layer.thickness > 0.0) {
                return Err(Error::invalid("layer thickness must be > 0"));
            }
        }
        ensure_finite(self.superstrate_eps, "superstrate eps")?;
        ensure_finite(self.substrate_eps, "substrate eps")?;
        let depth = self.total_thickness();
        let slack = 1e-9 * depth.max(1.0);
        if !(self.z_max > 0.0) || self.z_min > -depth + slack {
            return Err(Error::invalid(format!(
                "z bounds [{}, {}] must bracket the stack [-{depth}, 0]",
                self.z_min, self.z_max
            )));
        }
        Ok(())
    }

    /// z of the top of layer `j` (layer 0 starts at z = 0).
    pub fn layer_top(&self, j: usize) -> f64 {
        -self.layers[..j].iter().map(|l| l.thickness).sum::<f64>()
    }

    /// Permittivity at a point anywhere in the evaluation slab.
    pub fn eps_at(&self, x: f64, y: f64, z: f64) -> Complex64 {
        if z > 0.0 {
            return self.superstrate_eps;
        }
        let mut top = 0.0;
        for layer in &self.layers {
            let bottom = top - layer.thickness;
            if z >= bottom {
                return layer.profile.eval(x, y, self.period_x, self.period_y);
            }
            top = bottom;
        }
        self.substrate_eps
    }
}

/// Which field component a grid slot holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldComponent {
    Hx,
    Hy,
    Ex,
    Ey,
}

impl FieldComponent {
    pub fn name(self) -> &'static str {
        match self {
            FieldComponent::Hx => "Hx",
            FieldComponent::Hy => "Hy",
            FieldComponent::Ex => "Ex",
            FieldComponent::Ey => "Ey",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "Hx" => Some(FieldComponent::Hx),
            "Hy" => Some(FieldComponent::Hy),
            "Ex" => Some(FieldComponent::Ex),
            "Ey" => Some(FieldComponent::Ey),
            _ => None,
        }
    }
}

/// Sampled complex field components on a tensor grid.
///
/// Arrays are shaped (nx, ny, nz) with ny = 1 for 2D problems. The
/// normalization tag records the amplitude convention of the values.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub z: Vec<f64>,
    pub components: Vec<(FieldComponent, Array3<Complex64>)>,
    pub normalization: String,
}

pub const UNIT_INCIDENT_E: &str = "unit incident E amplitude";

impl FieldGrid {
    pub fn shape(&self) -> (usize, usize, usize) {
        (
            self.x.len(),
            self.y.as_ref().map_or(1, |y| y.len()),
            self.z.len(),
        )
    }

    pub fn component(&self, which: FieldComponent) -> Option<&Array3<Complex64>> {
        self.components
            .iter()
            .find(|(c, _)| *c == which)
            .map(|(_, a)| a)
    }

    pub fn validate(&self) -> Result<()> {
        let shape = self.shape();
        for (c, a) in &self.components {
            if a.dim() != shape {
                return Err(Error::ShapeMismatch(format!(
                    "component {} has shape {:?}, grid is {:?}",
                    c.name(),
                    a.dim(),
                    shape
                )));
            }
        }
        Ok(())
    }

    /// Pointwise |a - b| over all shared components, returned as a real-valued
    /// grid (imaginary parts zero). Useful for difference plots.
    pub fn abs_diff(&self, other: &FieldGrid) -> Result<FieldGrid> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch("grids differ in shape".into()));
        }
        let mut components = Vec::new();
        for (c, a) in &self.components {
            let b = other.component(*c).ok_or_else(|| {
                Error::ShapeMismatch(format!("component {} missing in other grid", c.name()))
            })?;
            let diff = ndarray::Zip::from(a)
                .and(b)
                .map_collect(|&p, &q| Complex64::new((p - q).norm(), 0.0));
            components.push((*c, diff));
        }
        Ok(FieldGrid {
            x: self.x.clone(),
            y: self.y.clone(),
            z: self.z.clone(),
            components,
            normalization: format!("abs difference of: {}", self.normalization),
        })
    }
}

/// Embedded complex permittivities of the mask media at the two supported
/// wavelengths. Pure lookup, no interpolation.
pub fn material_permittivity(name: &str, wavelength: f64) -> Result<Complex64> {
    const AT_13_5: &[(&str, f64, f64)] = &[
        ("TaBO", 0.857, -0.079),
        ("TaBN", 0.861, -0.071),
        ("Ru", 0.785, -0.030),
        ("Mo", 0.853, -0.012),
        ("Si", 0.998, -0.004),
    ];
    const AT_11_2: &[(&str, f64, f64)] = &[
        ("TaBO", 0.906, -0.064),
        ("TaBN", 0.909, -0.060),
        ("Mo", 0.91, -0.009),
        ("Ru", 0.872, -0.012),
        ("Be", 1.025, -0.003),
        ("Sr", 0.986, -0.002),
    ];
    if name.eq_ignore_ascii_case("vacuum") {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let table = if (wavelength - 13.5).abs() < 1e-9 {
        AT_13_5
    } else if (wavelength - 11.2).abs() < 1e-9 {
        AT_11_2
    } else {
        return Err(Error::MaterialLookup { name: name.into(), wavelength });
    };
    table
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, re, im)| Complex64::new(*re, *im))
        .ok_or(Error::MaterialLookup { name: name.into(), wavelength })
}
