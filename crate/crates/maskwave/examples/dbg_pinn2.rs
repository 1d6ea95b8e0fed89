use maskwave::analytic::{BenchmarkProblem, BenchmarkVariant};
use maskwave::pinn::{pinn_train, PinnConfig, PinnProblem, ScalarField2, SamplingMode};

fn main() {
    let problem = PinnProblem::Benchmark(BenchmarkProblem::new(BenchmarkVariant::Interface));
    let config = PinnConfig {
        epochs_adam: 500,
        iters_lbfgs: 75,
        grid_intervals: (20, 20),
        boundary_quadrature: 101,
        seeds: vec![0],
        sampling: SamplingMode::Grid,
        ..Default::default()
    };
    let report = pinn_train(&problem, &config).unwrap();
    let run = &report.runs[0];
    println!("rel {:.3e}", run.rel_l2);
    let bench = BenchmarkProblem::new(BenchmarkVariant::Interface);
    // Error along z at x = 0 and along x at z = 0.
    for z in [-9.0f64, -6.0, -3.0, 0.0, 3.0, 6.0, 9.0] {
        let u = run.field.eval(0.0, z);
        let e = bench.exact_ey(0.0, z);
        println!("z={z:6.2}: net=({:7.4},{:7.4})  exact=({:7.4},{:7.4})  |err|={:.3}", u.re, u.im, e.re, e.im, (u - e).norm());
    }
    for x in [-9.0f64, -4.0, 0.0, 4.0, 9.0] {
        let u = run.field.eval(x, 2.0);
        let e = bench.exact_ey(x, 2.0);
        println!("x={x:6.2}: |err|={:.3}", (u - e).norm());
    }
}
