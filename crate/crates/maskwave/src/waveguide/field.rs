//! Field synthesis: evaluates the solved expansion on a sample grid,
//! region by region (reflected, in-layer, transmitted).

use ndarray::Array3;
use num_complex::Complex64;

use crate::domain::{FieldComponent, FieldGrid, UNIT_INCIDENT_E};
use crate::error::{Error, Result};

use super::solve::AmplitudeVector;
use super::AssembledMask;

/// Grid and component request for field synthesis.
#[derive(Debug, Clone)]
pub struct GridRequest {
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    pub z: Vec<f64>,
    pub components: Vec<FieldComponent>,
}

impl GridRequest {
    /// Uniform grid over one period cell and [z_min, z_max], `n` points per
    /// axis inclusive of both ends.
    pub fn uniform_2d(mask: &crate::domain::MaskSpec, n: usize, components: &[FieldComponent]) -> Self {
        let lx = mask.period_x;
        let xs = linspace(-0.5 * lx, 0.5 * lx, n);
        let zs = linspace(mask.z_min, mask.z_max, n);
        GridRequest { x: xs, y: None, z: zs, components: components.to_vec() }
    }

    pub fn uniform_3d(
        mask: &crate::domain::MaskSpec,
        n_xy: usize,
        n_z: usize,
        components: &[FieldComponent],
    ) -> Self {
        let lx = mask.period_x;
        let ly = mask.period_y.unwrap_or(lx);
        GridRequest {
            x: linspace(-0.5 * lx, 0.5 * lx, n_xy),
            y: Some(linspace(-0.5 * ly, 0.5 * ly, n_xy)),
            z: linspace(mask.z_min, mask.z_max, n_z),
            components: components.to_vec(),
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Per-harmonic tangential coefficients of the total field on one z plane.
struct PlaneCoefficients {
    hx: Vec<Complex64>,
    hy: Vec<Complex64>,
    ex: Vec<Complex64>,
    ey: Vec<Complex64>,
}

pub(super) fn synthesize(
    assembled: &AssembledMask,
    amps: &AmplitudeVector,
    request: &GridRequest,
) -> Result<FieldGrid> {
    let mask = &assembled.mask;
    for &z in &request.z {
        if z < mask.z_min - 1e-9 || z > mask.z_max + 1e-9 {
            return Err(Error::OutOfRange { z, z_min: mask.z_min, z_max: mask.z_max });
        }
    }
    if request.components.is_empty() {
        return Err(Error::invalid("no field components requested"));
    }
    let basis = &assembled.basis;
    let n = basis.len();
    let nx_pts = request.x.len();
    let ny_pts = request.y.as_ref().map_or(1, |y| y.len());
    let nz_pts = request.z.len();

    // Spatial phase tables exp(-i kx_m x), exp(-i ky_n y).
    let kxs: Vec<f64> = basis.iter().map(|(m, _)| basis.kx(m)).collect();
    let kys: Vec<f64> = basis.iter().map(|(_, nn)| basis.ky(nn)).collect();
    let phase_x: Vec<Vec<Complex64>> = request
        .x
        .iter()
        .map(|&x| kxs.iter().map(|&k| Complex64::from_polar(1.0, -k * x)).collect())
        .collect();
    let ones = vec![Complex64::new(1.0, 0.0); n];
    let phase_y: Vec<Vec<Complex64>> = match &request.y {
        None => vec![ones],
        Some(ys) => ys
            .iter()
            .map(|&y| kys.iter().map(|&k| Complex64::from_polar(1.0, -k * y)).collect())
            .collect(),
    };

    let mut arrays: Vec<(FieldComponent, Array3<Complex64>)> = request
        .components
        .iter()
        .map(|&c| (c, Array3::default((nx_pts, ny_pts, nz_pts))))
        .collect();

    for (iz, &z) in request.z.iter().enumerate() {
        let coeffs = plane_coefficients(assembled, amps, z);
        for (ix, px) in phase_x.iter().enumerate() {
            for (iy, py) in phase_y.iter().enumerate() {
                for (component, array) in arrays.iter_mut() {
                    let table = match component {
                        FieldComponent::Hx => &coeffs.hx,
                        FieldComponent::Hy => &coeffs.hy,
                        FieldComponent::Ex => &coeffs.ex,
                        FieldComponent::Ey => &coeffs.ey,
                    };
                    let mut acc = Complex64::default();
                    for i in 0..n {
                        acc += table[i] * px[i] * py[i];
                    }
                    array[(ix, iy, iz)] = acc;
                }
            }
        }
    }

    Ok(FieldGrid {
        x: request.x.clone(),
        y: request.y.clone(),
        z: request.z.clone(),
        components: arrays,
        normalization: UNIT_INCIDENT_E.to_string(),
    })
}

fn plane_coefficients(
    assembled: &AssembledMask,
    amps: &AmplitudeVector,
    z: f64,
) -> PlaneCoefficients {
    let basis = &assembled.basis;
    let n = basis.len();
    let k0 = assembled.k0;
    let layout = amps.layout;
    let depth = assembled.mask.total_thickness();
    let mut hx = vec![Complex64::default(); n];
    let mut hy = vec![Complex64::default(); n];
    let mut ex = vec![Complex64::default(); n];
    let mut ey = vec![Complex64::default(); n];
    let kxs: Vec<f64> = basis.iter().map(|(m, _)| basis.kx(m)).collect();
    let kys: Vec<f64> = basis.iter().map(|(_, nn)| basis.ky(nn)).collect();

    if z >= 0.0 {
        // Superstrate: incident plus reflected orders.
        let region = &assembled.superstrate;
        let inv = Complex64::new(1.0, 0.0) / (region.eps * k0);
        for i in 0..n {
            let kz = region.kz[i];
            let ph = (Complex64::new(0.0, -1.0) * kz * z).exp();
            let ax = amps.values[layout.refl_x(i)];
            let ay = amps.values[layout.refl_y(i)];
            let (kx, ky) = (kxs[i], kys[i]);
            hx[i] = kz * ax * ph;
            hy[i] = kz * ay * ph;
            ex[i] = inv * (kx * ky * ax + (ky * ky + kz * kz) * ay) * ph;
            ey[i] = -inv * ((kx * kx + kz * kz) * ax + kx * ky * ay) * ph;
        }
        let inc = &assembled.incident;
        let i0 = basis.index(inc.m0, inc.n0);
        let ph = (Complex64::new(0.0, 1.0) * inc.kz * z).exp();
        hx[i0] += inc.h0x * ph;
        hy[i0] += inc.h0y * ph;
        ex[i0] += inc.e0x * ph;
        ey[i0] += inc.e0y * ph;
    } else if z < -depth {
        // Substrate: transmitted orders, phases referenced at z = -depth.
        let region = &assembled.substrate;
        let inv = Complex64::new(1.0, 0.0) / (region.eps * k0);
        for i in 0..n {
            let kz = region.kz[i];
            let ph = (Complex64::new(0.0, 1.0) * kz * (z + depth)).exp();
            let ax = amps.values[layout.trans_x(i)];
            let ay = amps.values[layout.trans_y(i)];
            let (kx, ky) = (kxs[i], kys[i]);
            hx[i] = kz * ax * ph;
            hy[i] = kz * ay * ph;
            ex[i] = -inv * (kx * ky * ax + (ky * ky + kz * kz) * ay) * ph;
            ey[i] = inv * ((kx * kx + kz * kz) * ax + kx * ky * ay) * ph;
        }
    } else {
        // Inside the stack: find the layer containing z.
        let mut top = 0.0f64;
        let mut index = assembled.layers.len() - 1;
        for (j, stack) in assembled.layers.iter().enumerate() {
            let bottom = top - stack.thickness;
            if z >= bottom - 1e-12 {
                index = j;
                break;
            }
            top = bottom;
        }
        let stack = &assembled.layers[index];
        let bottom = top - stack.thickness;
        let i_unit = Complex64::new(0.0, 1.0);
        for p in 0..2 * n {
            let kz = stack.modes.kz[p];
            let a_down = amps.values[layout.layer_down(index, p)] * (i_unit * kz * (z - top)).exp();
            let a_up = amps.values[layout.layer_up(index, p)] * (-i_unit * kz * (z - bottom)).exp();
            let sum = a_down + a_up;
            let diff = a_down - a_up;
            for i in 0..n {
                hx[i] += sum * kz * stack.modes.b[(p, i)];
                hy[i] += sum * kz * stack.modes.c[(p, i)];
                ex[i] += diff * stack.ex[(p, i)];
                ey[i] += diff * stack.ey[(p, i)];
            }
        }
    }

    PlaneCoefficients { hx, hy, ex, ey }
}
