use maskwave::analytic::{BenchmarkProblem, BenchmarkVariant};
use maskwave::catalog::{mirror, MirrorKind};
use maskwave::domain::FieldComponent;
use maskwave::metrics::relative_l2;
use maskwave::waveguide::{assemble, reflectivity_scan, GridRequest, linspace};

fn main() {
    // Benchmarks at nx = 10.
    for variant in [BenchmarkVariant::Propagation, BenchmarkVariant::Interface, BenchmarkVariant::Slab] {
        let problem = BenchmarkProblem::new(variant);
        let mask = problem.to_mask().unwrap();
        let assembled = assemble(&mask, 10, None).unwrap();
        let amps = assembled.solve().unwrap();
        let (x0, x1, z0, z1) = problem.domain();
        let request = GridRequest {
            x: linspace(x0, x1, 101),
            y: None,
            z: linspace(z0, z1, 101),
            components: vec![FieldComponent::Ey, FieldComponent::Hx],
        };
        let wg = assembled.synthesize(&amps, &request).unwrap();
        let exact = problem.exact_field(&request.x, &request.z);
        let err = relative_l2(&wg, &exact).unwrap();
        let eff = assembled.efficiencies(&amps);
        println!("{variant:?}: rel_l2={err:.3e} residual={:.2e} R={:.6} T={:.6} R+T={:.8}",
                 amps.relative_residual, eff.r_total, eff.t_total, eff.r_total + eff.t_total);
    }

    // Mirror curve: Mo/Si at 13.5nm, scan 0..20 deg.
    let angles: Vec<f64> = (0..=400).map(|i| (i as f64 * 0.05f64).to_radians()).collect();
    for kind in [MirrorKind::MoSi, MirrorKind::MoBe, MirrorKind::RuBe, MirrorKind::RuBeSr] {
        let mask = mirror(kind, 60).unwrap();
        let t0 = std::time::Instant::now();
        let curve = reflectivity_scan(&mask, &angles, 0).unwrap();
        println!("{kind:?}: max R = {:.4} at {:.2} deg  ({} angles in {:.2}s)",
                 curve.max_r, curve.max_angle.to_degrees(), angles.len(), t0.elapsed().as_secs_f64());
    }
}
