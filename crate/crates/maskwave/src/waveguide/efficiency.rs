//! Diffraction efficiencies (per-order power fractions) and reflectivity
//! scans over incidence angle.

use num_complex::Complex64;

use crate::domain::MaskSpec;
use crate::error::Result;

use super::solve::AmplitudeVector;
use super::AssembledMask;

#[derive(Debug, Clone)]
pub struct OrderEfficiency {
    pub m: i64,
    pub n: i64,
    pub efficiency: f64,
}

#[derive(Debug, Clone)]
pub struct DiffractionEfficiencies {
    pub reflected: Vec<OrderEfficiency>,
    pub transmitted: Vec<OrderEfficiency>,
    pub r_total: f64,
    pub t_total: f64,
}

/// Per propagating order, the time-averaged z power flux normalized to the
/// incident flux. Evanescent orders carry no net flux and are excluded.
pub fn diffraction_efficiencies(
    assembled: &AssembledMask,
    amps: &AmplitudeVector,
) -> DiffractionEfficiencies {
    let basis = &assembled.basis;
    let k0 = assembled.k0;
    let layout = amps.layout;
    let incident_flux = assembled.incident.flux();
    let prop_tol = 1e-12 * k0;

    let mut reflected = Vec::new();
    let mut transmitted = Vec::new();
    let (mut r_total, mut t_total) = (0.0, 0.0);

    for (i, (m, nn)) in basis.iter().enumerate() {
        let kx = basis.kx(m);
        let ky = basis.ky(nn);

        let sup = &assembled.superstrate;
        if sup.kz[i].im.abs() <= prop_tol && sup.kz[i].re > prop_tol {
            let kz = sup.kz[i];
            let inv = Complex64::new(1.0, 0.0) / (sup.eps * k0);
            let ax = amps.values[layout.refl_x(i)];
            let ay = amps.values[layout.refl_y(i)];
            let hx = kz * ax;
            let hy = kz * ay;
            let ex = inv * (kx * ky * ax + (ky * ky + kz * kz) * ay);
            let ey = -inv * ((kx * kx + kz * kz) * ax + kx * ky * ay);
            let flux = 0.5 * (ex * hy.conj() - ey * hx.conj()).re;
            let eff = flux.abs() / incident_flux;
            r_total += eff;
            reflected.push(OrderEfficiency { m, n: nn, efficiency: eff });
        }

        let sub = &assembled.substrate;
        if sub.kz[i].im.abs() <= prop_tol && sub.kz[i].re > prop_tol {
            let kz = sub.kz[i];
            let inv = Complex64::new(1.0, 0.0) / (sub.eps * k0);
            let ax = amps.values[layout.trans_x(i)];
            let ay = amps.values[layout.trans_y(i)];
            let hx = kz * ax;
            let hy = kz * ay;
            let ex = -inv * (kx * ky * ax + (ky * ky + kz * kz) * ay);
            let ey = inv * ((kx * kx + kz * kz) * ax + kx * ky * ay);
            let flux = 0.5 * (ex * hy.conj() - ey * hx.conj()).re;
            let eff = flux.abs() / incident_flux;
            t_total += eff;
            transmitted.push(OrderEfficiency { m, n: nn, efficiency: eff });
        }
    }

    DiffractionEfficiencies { reflected, transmitted, r_total, t_total }
}

/// Sampled reflectivity-vs-angle curve with its maximum.
#[derive(Debug, Clone)]
pub struct ReflectivityCurve {
    /// Incidence angles in radians, as supplied.
    pub angles: Vec<f64>,
    pub r_total: Vec<f64>,
    pub t_total: Vec<f64>,
    pub max_angle: f64,
    pub max_r: f64,
}

/// Solves the mask once per incidence angle and reports total reflectivity.
/// Laterally uniform stacks run on the single-harmonic Bloch path; patterned
/// masks keep `nx` harmonics and snap each angle onto the lattice.
pub fn reflectivity_scan(mask: &MaskSpec, angles: &[f64], nx: usize) -> Result<ReflectivityCurve> {
    let uniform = mask
        .layers
        .iter()
        .all(|l| matches!(l.profile, crate::domain::PermittivityProfile::Uniform(_)));
    let mut r_total = Vec::with_capacity(angles.len());
    let mut t_total = Vec::with_capacity(angles.len());
    for &theta in angles {
        let mut m = mask.clone();
        m.incident.polar_angle = theta;
        let use_nx = if uniform { 0 } else { nx };
        let assembled = super::assemble(&m, use_nx, if uniform { Some(0) } else { None })?;
        let amps = assembled.solve()?;
        let eff = diffraction_efficiencies(&assembled, &amps);
        r_total.push(eff.r_total);
        t_total.push(eff.t_total);
    }
    let (imax, &max_r) = r_total
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("at least one angle");
    Ok(ReflectivityCurve {
        angles: angles.to_vec(),
        r_total,
        t_total,
        max_angle: angles[imax],
        max_r,
    })
}
