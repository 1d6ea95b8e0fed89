//! Oracle and property tests for the reference solver: Fresnel/Airy closed
//! forms, energy conservation, interface continuity, reciprocity, and
//! convergence in the harmonic count.

use maskwave::analytic::{airy_slab, fresnel_te};
use maskwave::catalog::{self, MaskScale};
use maskwave::domain::{
    FieldComponent, IncidentWave, Layer, MaskSpec, PermittivityProfile,
};
use maskwave::metrics::relative_l2;
use maskwave::spectral::branch_sqrt;
use maskwave::waveguide::{assemble, linspace, GridRequest};
use num_complex::Complex64;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn half_space_mask(eps: Complex64, wavelength: f64, theta: f64) -> MaskSpec {
    let layer = Layer::new(PermittivityProfile::Uniform(eps), wavelength, "medium").unwrap();
    MaskSpec {
        period_x: wavelength,
        period_y: None,
        layers: vec![layer],
        superstrate_eps: one(),
        substrate_eps: eps,
        incident: IncidentWave::te(wavelength, theta).unwrap(),
        z_min: -2.0 * wavelength,
        z_max: wavelength,
    }
}

fn slab_mask(eps: Complex64, thickness: f64, wavelength: f64, theta: f64) -> MaskSpec {
    let layer = Layer::new(PermittivityProfile::Uniform(eps), thickness, "slab").unwrap();
    MaskSpec {
        period_x: wavelength,
        period_y: None,
        layers: vec![layer],
        superstrate_eps: one(),
        substrate_eps: one(),
        incident: IncidentWave::te(wavelength, theta).unwrap(),
        z_min: -thickness - wavelength,
        z_max: wavelength,
    }
}

/// Ten incidence angles: specular reflection off a half space matches the
/// TE Fresnel coefficient to 1e-10.
#[test]
fn interface_amplitudes_match_fresnel_across_angles() {
    let wavelength = 13.5;
    let k0 = 2.0 * std::f64::consts::PI / wavelength;
    let eps = Complex64::new(4.0, 0.0);
    for i in 0..10 {
        let theta = (5.0 + 8.5 * i as f64).to_radians();
        let mask = half_space_mask(eps, wavelength, theta);
        let assembled = assemble(&mask, 0, None).unwrap();
        let amps = assembled.solve().unwrap();
        let r = assembled.reflected_ey(&amps, 0, 0);
        let kx = k0 * theta.sin();
        let kz1 = Complex64::new(k0 * theta.cos(), 0.0);
        let kz2 = branch_sqrt(eps * k0 * k0 - kx * kx);
        let (r_exact, _) = fresnel_te(kz1, kz2).unwrap();
        assert!(
            (r - r_exact).norm() < 1e-10,
            "theta = {:.1} deg: {r} vs {r_exact}",
            theta.to_degrees()
        );
    }
}

/// Slab reflection and transmission match the two-interface closed form.
#[test]
fn slab_amplitudes_match_airy_across_angles() {
    let wavelength = 10.0;
    let k0 = 2.0 * std::f64::consts::PI / wavelength;
    let eps = Complex64::new(2.25, 0.0);
    let thickness = 0.73 * wavelength;
    for i in 0..10 {
        let theta = (3.0 + 8.0 * i as f64).to_radians();
        let mask = slab_mask(eps, thickness, wavelength, theta);
        let assembled = assemble(&mask, 0, None).unwrap();
        let amps = assembled.solve().unwrap();
        let r = assembled.reflected_ey(&amps, 0, 0);
        let t = assembled.transmitted_ey(&amps, 0, 0);
        let kx = k0 * theta.sin();
        let kz1 = Complex64::new(k0 * theta.cos(), 0.0);
        let kz2 = branch_sqrt(eps * k0 * k0 - kx * kx);
        let (r_exact, t_exact) = airy_slab(kz1, kz2, thickness).unwrap();
        assert!((r - r_exact).norm() < 1e-10, "r at {:.0} deg", theta.to_degrees());
        assert!((t - t_exact).norm() < 1e-10, "t at {:.0} deg", theta.to_degrees());
    }
}

#[test]
fn free_space_mask_does_not_scatter() {
    let wavelength = 13.5;
    // Period chosen away from integer multiples of the wavelength so no
    // order sits exactly at grazing (kz = 0 degenerates the expansion).
    let mut mask = slab_mask(one(), wavelength, wavelength, 0.0);
    mask.period_x = 1.37 * wavelength;
    let assembled = assemble(&mask, 10, None).unwrap();
    let amps = assembled.solve().unwrap();
    let eff = assembled.efficiencies(&amps);
    assert!(eff.r_total < 1e-12);
    assert!((eff.t_total - 1.0).abs() < 1e-12);
    // Field equals the incident plane wave everywhere.
    let request = GridRequest {
        x: linspace(-0.5 * wavelength, 0.5 * wavelength, 21),
        y: None,
        z: linspace(mask.z_min, mask.z_max, 33),
        components: vec![FieldComponent::Hx, FieldComponent::Ey],
    };
    let field = assembled.synthesize(&amps, &request).unwrap();
    let k0 = 2.0 * std::f64::consts::PI / wavelength;
    let (k0x, _) = mask.incident.transverse_k(one());
    let k0z = (k0 * k0 - k0x * k0x).sqrt();
    let hx = field.component(FieldComponent::Hx).unwrap();
    for (ix, &x) in request.x.iter().enumerate() {
        for (iz, &z) in request.z.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, -(k0x * x - k0z * z)) * (k0z / k0);
            assert!((hx[(ix, 0, iz)] - expect).norm() < 1e-10);
        }
    }
}

#[test]
fn energy_conserved_for_lossless_patterned_mask() {
    let wavelength = 13.5;
    let lx = catalog::mask_period(wavelength);
    let layer = Layer::new(
        PermittivityProfile::TanhHole1D {
            eps: Complex64::new(4.0, 0.0),
            a: lx / 4.0,
            d: wavelength / 10.0,
        },
        20.0,
        "grating",
    )
    .unwrap();
    let mask = MaskSpec {
        period_x: lx,
        period_y: None,
        layers: vec![layer],
        superstrate_eps: one(),
        substrate_eps: one(),
        incident: IncidentWave::te(wavelength, 6.0f64.to_radians()).unwrap(),
        z_min: -30.0,
        z_max: 10.0,
    };
    let assembled = assemble(&mask, 10, None).unwrap();
    assert!(assembled.warnings.is_empty(), "{:?}", assembled.warnings);
    let amps = assembled.solve().unwrap();
    let eff = assembled.efficiencies(&amps);
    assert!(
        (eff.r_total + eff.t_total - 1.0).abs() < 1e-8,
        "R + T = {}",
        eff.r_total + eff.t_total
    );
    // Several propagating orders carry power.
    assert!(eff.reflected.len() > 1);
}

#[test]
fn absorbing_mask_dissipates_power() {
    let mask = catalog::mask_2d(13.5, MaskScale::Thin).unwrap();
    let assembled = assemble(&mask, 8, None).unwrap();
    let amps = assembled.solve().unwrap();
    let eff = assembled.efficiencies(&amps);
    assert!(eff.r_total + eff.t_total < 1.0 - 1e-3);
    assert!(eff.r_total > 0.0 && eff.t_total > 0.0);
    // Every prepared layer passed the eigenpair residual gate.
    for stack in &assembled.layers {
        assert!(stack.modes.max_residual <= 1e-10);
    }
}

/// Tangential fields evaluated just above and just below every interface
/// agree pointwise.
#[test]
fn tangential_fields_continuous_at_interfaces() {
    let mask = catalog::mask_2d(13.5, MaskScale::Thin).unwrap();
    let assembled = assemble(&mask, 10, None).unwrap();
    let amps = assembled.solve().unwrap();
    let lx = mask.period_x;
    let xs = linspace(-0.45 * lx, 0.45 * lx, 7);
    let mut z_if = vec![0.0];
    let mut z = 0.0;
    for layer in &mask.layers {
        z -= layer.thickness;
        z_if.push(z);
    }
    let eps_step = 1e-12;
    for &zi in &z_if {
        let request = |z: f64| GridRequest {
            x: xs.clone(),
            y: None,
            z: vec![z],
            components: vec![FieldComponent::Hx, FieldComponent::Ey],
        };
        let above = assembled.synthesize(&amps, &request(zi + eps_step)).unwrap();
        let below = assembled.synthesize(&amps, &request(zi - eps_step)).unwrap();
        for c in [FieldComponent::Hx, FieldComponent::Ey] {
            let a = above.component(c).unwrap();
            let b = below.component(c).unwrap();
            for i in 0..xs.len() {
                let diff = (a[(i, 0, 0)] - b[(i, 0, 0)]).norm();
                assert!(diff < 1e-9, "{} jump {diff:.2e} at z = {zi}", c.name());
            }
        }
    }
}

/// A lossless symmetric stack reflects identically from above and below.
#[test]
fn reciprocity_for_symmetric_lossless_stack() {
    let wavelength = 12.0;
    let lx = 2.83 * wavelength;
    let grating = |eps: f64, t: f64| {
        Layer::new(
            PermittivityProfile::TanhHole1D {
                eps: Complex64::new(eps, 0.0),
                a: lx / 4.0,
                d: wavelength / 8.0,
            },
            t,
            "grating",
        )
        .unwrap()
    };
    let uniform = |eps: f64, t: f64| {
        Layer::new(PermittivityProfile::Uniform(Complex64::new(eps, 0.0)), t, "u").unwrap()
    };
    // Symmetric sandwich: grating / spacer / grating.
    let layers = vec![grating(3.0, 8.0), uniform(2.0, 5.0), grating(3.0, 8.0)];
    let depth: f64 = layers.iter().map(|l| l.thickness).sum();
    let make = |layers: Vec<Layer>| MaskSpec {
        period_x: lx,
        period_y: None,
        layers,
        superstrate_eps: one(),
        substrate_eps: one(),
        incident: IncidentWave::te(wavelength, 0.0).unwrap(),
        z_min: -depth - 1.0,
        z_max: 1.0,
    };
    let mask = make(layers.clone());
    let flipped = make(layers.into_iter().rev().collect());
    let r_above = {
        let a = assemble(&mask, 7, None).unwrap();
        let amps = a.solve().unwrap();
        a.efficiencies(&amps).r_total
    };
    let r_below = {
        let a = assemble(&flipped, 7, None).unwrap();
        let amps = a.solve().unwrap();
        a.efficiencies(&amps).r_total
    };
    assert!(
        (r_above - r_below).abs() < 1e-8,
        "R from above {r_above} vs below {r_below}"
    );
}

/// Running the y-invariant problem through the 3D path reproduces the 2D
/// fields.
#[test]
fn three_dimensional_path_matches_two_dimensional() {
    let mut mask = catalog::mask_2d(13.5, MaskScale::Thin).unwrap();
    let request = GridRequest {
        x: linspace(-0.4 * mask.period_x, 0.4 * mask.period_x, 9),
        y: None,
        z: linspace(mask.z_min + 0.5, mask.z_max - 0.5, 11),
        components: vec![FieldComponent::Hx, FieldComponent::Ey],
    };
    let field_2d = {
        let a = assemble(&mask, 5, None).unwrap();
        let amps = a.solve().unwrap();
        a.synthesize(&amps, &request).unwrap()
    };
    // Same mask, declared periodic in y with y-uniform profiles.
    mask.period_y = Some(mask.period_x);
    let field_3d = {
        let a = assemble(&mask, 5, Some(2)).unwrap();
        let amps = a.solve().unwrap();
        let request_3d = GridRequest { y: Some(vec![0.0, 11.3]), ..request.clone() };
        a.synthesize(&amps, &request_3d).unwrap()
    };
    for c in [FieldComponent::Hx, FieldComponent::Ey] {
        let f2 = field_2d.component(c).unwrap();
        let f3 = field_3d.component(c).unwrap();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for ix in 0..request.x.len() {
            for iz in 0..request.z.len() {
                // Both y samples must match the 2D slice (y-invariance).
                for iy in 0..2 {
                    num += (f3[(ix, iy, iz)] - f2[(ix, 0, iz)]).norm_sqr();
                }
                den += f2[(ix, 0, iz)].norm_sqr();
            }
        }
        assert!(
            (num / (2.0 * den)).sqrt() < 1e-10,
            "{} mismatch {:.2e}",
            c.name(),
            (num / (2.0 * den)).sqrt()
        );
    }
}

/// Field differences between successive harmonic counts shrink on the
/// patterned mask (one mildly non-monotone step tolerated).
#[test]
fn solutions_converge_in_harmonic_count() {
    let mask = catalog::mask_2d(13.5, MaskScale::Thin).unwrap();
    let request = GridRequest {
        x: linspace(-0.5 * mask.period_x, 0.5 * mask.period_x, 41),
        y: None,
        z: linspace(mask.z_min, mask.z_max, 41),
        components: vec![FieldComponent::Ey],
    };
    let solve_at = |nx: usize| {
        let a = assemble(&mask, nx, None).unwrap();
        let amps = a.solve().unwrap();
        a.synthesize(&amps, &request).unwrap()
    };
    let fields: Vec<_> = [5usize, 10, 15, 20].iter().map(|&nx| solve_at(nx)).collect();
    let mut steps = Vec::new();
    for w in fields.windows(2) {
        steps.push(relative_l2(&w[0], &w[1]).unwrap());
    }
    let mut violations = 0;
    for w in steps.windows(2) {
        if w[1] > w[0] * 1.1 {
            violations += 1;
        }
    }
    assert!(
        violations <= 1,
        "convergence steps not shrinking: {steps:?}"
    );
    assert!(steps.last().unwrap() < &1e-3, "steps: {steps:?}");
}

/// Identical inputs give bitwise-identical amplitudes.
#[test]
fn assembly_and_solve_are_deterministic() {
    let mask = catalog::mask_2d(11.2, MaskScale::Thin).unwrap();
    let run = || {
        let a = assemble(&mask, 6, None).unwrap();
        a.solve().unwrap().values
    };
    let a = run();
    let b = run();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b.iter()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
}

/// Off-lattice incidence angles snap onto the nearest harmonic with a
/// recorded warning.
#[test]
fn incommensurate_angle_snaps_with_warning() {
    let mut mask = catalog::mask_2d(13.5, MaskScale::Thin).unwrap();
    mask.incident.polar_angle = 5.0f64.to_radians();
    let assembled = assemble(&mask, 5, None).unwrap();
    assert_eq!(assembled.warnings.len(), 1);
    assert!(assembled.warnings[0].contains("snapped"));
    let amps = assembled.solve().unwrap();
    assert!(amps.relative_residual <= 1e-10);
}
