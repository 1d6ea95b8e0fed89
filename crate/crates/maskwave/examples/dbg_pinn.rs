use maskwave::analytic::{BenchmarkProblem, BenchmarkVariant};
use maskwave::pinn::{pinn_train, PinnConfig, PinnProblem, SamplingMode};
// knobs via env: LBFGS_MEM

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let variant = match args.get(1).map(|s| s.as_str()).unwrap_or("propagation") {
        "interface" => BenchmarkVariant::Interface,
        "slab" => BenchmarkVariant::Slab,
        _ => BenchmarkVariant::Propagation,
    };
    let epochs: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(200);
    let grid: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(40);
    let bench = if std::env::var("UNIT").is_ok() {
        BenchmarkProblem::unit_scale(variant)
    } else {
        BenchmarkProblem::new(variant)
    };
    let problem = PinnProblem::Benchmark(bench);
    let lambda_bc: Option<f64> = args.get(4).and_then(|s| s.parse().ok());
    let random = args.get(5).map(|s| s == "random").unwrap_or(false);
    let config = PinnConfig {
        epochs_adam: epochs,
        iters_lbfgs: args.get(6).and_then(|s| s.parse().ok()).unwrap_or(5),
        grid_intervals: (grid, args.get(7).and_then(|s| s.parse().ok()).unwrap_or(grid)),
        boundary_quadrature: 101,
        seeds: std::env::var("SEEDS")
            .map(|v| v.split(',').map(|t| t.parse().unwrap()).collect())
            .unwrap_or(vec![0]),
        sampling: if random { SamplingMode::RandomPerEpoch } else { SamplingMode::Grid },
        lambda_bc,
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let report = pinn_train(&problem, &config).unwrap();
    for r in &report.runs {
        println!("  seed {}: rel {:.3e} loss {:.3e}", r.seed, r.rel_l2, r.final_loss);
    }
    let run = &report.runs[0];
    println!(
        "{variant:?}: rel_l2={:.3e} final_loss={:.3e} epochs={} time={:.1}s ({:.0} ms/epoch)",
        run.rel_l2,
        run.final_loss,
        run.history.len(),
        t0.elapsed().as_secs_f64(),
        1000.0 * run.history.iter().take(epochs).map(|r| r.wall_secs).sum::<f64>() / epochs.max(1) as f64,
    );
    for i in [0usize, 10, 50, 100, 200, 400, 500, 800, 999] {
        if let Some(r) = run.history.get(i) {
            println!("  epoch {:4}: loss {:.4e} (r {:.3e}, bc {:.3e})", r.epoch, r.loss, r.residual_term, r.boundary_term);
        }
    }
}
