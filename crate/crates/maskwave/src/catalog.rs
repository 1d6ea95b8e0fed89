//! Built-in problem definitions: the three validation problems, multilayer
//! mirror stacks, and the 2D/3D absorber masks at 13.5 nm and 11.2 nm.

use num_complex::Complex64;

use crate::analytic::{BenchmarkProblem, BenchmarkVariant};
use crate::domain::{material_permittivity, IncidentWave, Layer, MaskSpec, PermittivityProfile};
use crate::error::{Error, Result};

/// Production incidence angle on the mask.
pub const MASK_INCIDENCE_DEG: f64 = 6.0;

pub fn benchmark(variant: BenchmarkVariant) -> BenchmarkProblem {
    BenchmarkProblem::new(variant)
}

pub fn benchmark_by_name(name: &str) -> Result<BenchmarkProblem> {
    let variant = match name {
        "propagation" => BenchmarkVariant::Propagation,
        "interface" => BenchmarkVariant::Interface,
        "slab" => BenchmarkVariant::Slab,
        other => return Err(Error::invalid(format!("unknown benchmark `{other}`"))),
    };
    Ok(benchmark(variant))
}

/// Mirror families considered for the two wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MirrorKind {
    MoSi,
    MoBe,
    RuBe,
    RuBeSr,
}

impl MirrorKind {
    pub fn wavelength(self) -> f64 {
        match self {
            MirrorKind::MoSi => 13.5,
            _ => 11.2,
        }
    }

    /// One mirror period, top to bottom: (material, thickness in nm).
    pub fn period(self) -> &'static [(&'static str, f64)] {
        match self {
            MirrorKind::MoSi => &[("Mo", 3.0), ("Si", 4.0)],
            MirrorKind::MoBe => &[("Mo", 2.22), ("Be", 3.5)],
            MirrorKind::RuBe => &[("Ru", 2.01), ("Be", 3.72)],
            MirrorKind::RuBeSr => &[("Ru", 1.7), ("Be", 2.7), ("Sr", 1.34)],
        }
    }
}

fn mirror_layers(kind: MirrorKind, n_layers: usize) -> Result<Vec<Layer>> {
    let wavelength = kind.wavelength();
    let period = kind.period();
    let mut layers = Vec::with_capacity(n_layers);
    let mut i = 0usize;
    while layers.len() < n_layers {
        let (material, thickness) = period[i % period.len()];
        let eps = material_permittivity(material, wavelength)?;
        layers.push(Layer::new(
            PermittivityProfile::Uniform(eps),
            thickness,
            material,
        )?);
        i += 1;
    }
    Ok(layers)
}

/// A bare multilayer mirror of `n_periods` repetitions in free space at the
/// production incidence angle.
pub fn mirror(kind: MirrorKind, n_periods: usize) -> Result<MaskSpec> {
    let wavelength = kind.wavelength();
    let layers = mirror_layers(kind, n_periods * kind.period().len())?;
    let depth: f64 = layers.iter().map(|l| l.thickness).sum();
    let incident = IncidentWave::te(wavelength, MASK_INCIDENCE_DEG.to_radians())?;
    Ok(MaskSpec {
        period_x: wavelength, // immaterial for laterally uniform stacks
        period_y: None,
        layers,
        superstrate_eps: Complex64::new(1.0, 0.0),
        substrate_eps: Complex64::new(1.0, 0.0),
        incident,
        z_min: -depth - wavelength,
        z_max: wavelength,
    })
}

/// Mask variants: the thin stack used by the PINN experiments and the full
/// mirror-backed stack used by the WGNO ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskScale {
    Thin,
    Full,
}

/// Lateral period of the patterned masks, chosen so the production incidence
/// angle lands exactly on the first lattice harmonic.
pub fn mask_period(wavelength: f64) -> f64 {
    wavelength / MASK_INCIDENCE_DEG.to_radians().sin()
}

/// Patterned 2D mask: a TaBO/TaBN absorber pierced by a hole of width Lx/2,
/// a thin capping layer, and the resonant mirror for the wavelength.
///
/// `tabn_thickness` and `mirror_count` select the thin/full variants;
/// `hole_half_width` overrides the default a = Lx/4 (used by parameter
/// sweeps). The transition width is fixed at wavelength / 10.
pub fn mask_2d_with(
    wavelength: f64,
    tabn_thickness: f64,
    mirror_count: usize,
    hole_half_width: Option<f64>,
) -> Result<MaskSpec> {
    let lx = mask_period(wavelength);
    let a = hole_half_width.unwrap_or(lx / 4.0);
    let d = wavelength / 10.0;
    let hole = |material: &str, thickness: f64| -> Result<Layer> {
        let eps = material_permittivity(material, wavelength)?;
        Layer::new(PermittivityProfile::TanhHole1D { eps, a, d }, thickness, material)
    };

    let mut layers = Vec::new();
    layers.push(hole("TaBO", 10.0)?);
    layers.push(hole("TaBN", tabn_thickness)?);
    if (wavelength - 13.5).abs() < 1e-9 {
        let ru = material_permittivity("Ru", wavelength)?;
        layers.push(Layer::new(PermittivityProfile::Uniform(ru), 2.0, "Ru")?);
        layers.extend(mirror_layers(MirrorKind::MoSi, mirror_count)?);
    } else {
        layers.extend(mirror_layers(MirrorKind::RuBeSr, mirror_count)?);
    }

    let depth: f64 = layers.iter().map(|l| l.thickness).sum();
    let incident = IncidentWave::te(wavelength, MASK_INCIDENCE_DEG.to_radians())?;
    Ok(MaskSpec {
        period_x: lx,
        period_y: None,
        layers,
        superstrate_eps: Complex64::new(1.0, 0.0),
        substrate_eps: Complex64::new(1.0, 0.0),
        incident,
        z_min: -depth - wavelength / 2.0,
        z_max: wavelength / 2.0,
    })
}

pub fn mask_2d(wavelength: f64, scale: MaskScale) -> Result<MaskSpec> {
    match scale {
        MaskScale::Thin => {
            let mirrors = if (wavelength - 13.5).abs() < 1e-9 { 2 } else { 3 };
            mask_2d_with(wavelength, 10.0, mirrors, None)
        }
        MaskScale::Full => mask_2d_with(wavelength, 60.0, 31, None),
    }
}

/// Patterned 3D mask: same stack as the full 2D mask with a square-cell
/// rectangular hole profile.
pub fn mask_3d(wavelength: f64) -> Result<MaskSpec> {
    mask_3d_with(wavelength, 31)
}

pub fn mask_3d_with(wavelength: f64, mirror_count: usize) -> Result<MaskSpec> {
    let mut mask = mask_2d_with(wavelength, 60.0, mirror_count, None)?;
    let lx = mask.period_x;
    let ly = lx;
    let d = wavelength / 10.0;
    for layer in &mut mask.layers {
        if let PermittivityProfile::TanhHole1D { eps, a, .. } = layer.profile {
            layer.profile = PermittivityProfile::TanhHole2D { eps, a, b: ly / 4.0, d };
        }
    }
    mask.period_y = Some(ly);
    Ok(mask)
}

/// Stack registry used by the command line and the test suites.
pub fn named_stack(name: &str) -> Result<MaskSpec> {
    match name {
        "mosi60" => mirror(MirrorKind::MoSi, 60),
        "mobe60" => mirror(MirrorKind::MoBe, 60),
        "rube60" => mirror(MirrorKind::RuBe, 60),
        "rubesr60" => mirror(MirrorKind::RuBeSr, 60),
        "mask2d_13.5_pinn" => mask_2d(13.5, MaskScale::Thin),
        "mask2d_13.5_wgno" => mask_2d(13.5, MaskScale::Full),
        "mask2d_11.2_pinn" => mask_2d(11.2, MaskScale::Thin),
        "mask2d_11.2_wgno" => mask_2d(11.2, MaskScale::Full),
        "mask3d_13.5" => mask_3d(13.5),
        "mask3d_11.2" => mask_3d(11.2),
        other => Err(Error::invalid(format!("unknown stack `{other}`"))),
    }
}
