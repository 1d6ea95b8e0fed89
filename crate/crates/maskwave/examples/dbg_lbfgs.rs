use maskwave::neural::{lbfgs_minimize, mlp_init, Gradients, LbfgsConfig, MlpParams};

fn main() {
    // Rosenbrock in 2D embedded in network biases.
    let mut p = mlp_init(&[1, 2, 1], 0).unwrap();
    for w in &mut p.weights { w.fill(0.0); }
    p.biases[0][0] = -1.2;
    p.biases[0][1] = 1.0;
    let rosen = |params: &MlpParams| -> maskwave::Result<(f64, Gradients)> {
        let x = params.biases[0][0];
        let y = params.biases[0][1];
        let f = (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2);
        let mut g = Gradients::zeros_like(params);
        g.biases[0][0] = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
        g.biases[0][1] = 200.0 * (y - x * x);
        Ok((f, g))
    };
    let out = lbfgs_minimize(rosen, &p, &LbfgsConfig { max_iter: 100, ..Default::default() }).unwrap();
    println!("rosenbrock: f = {:.3e} after {} evals, x = ({:.6}, {:.6})",
        out.loss_history.last().unwrap(), out.loss_history.len(),
        out.params.biases[0][0], out.params.biases[0][1]);

    // Ill-conditioned quadratic, dim 200, cond 1e6.
    let mut p2 = mlp_init(&[1, 200, 1], 1).unwrap();
    for w in &mut p2.weights { w.fill(0.0); }
    let n = 200;
    let scales: Vec<f64> = (0..n).map(|i| (1e6f64).powf(i as f64 / (n - 1) as f64)).collect();
    let sc = scales.clone();
    let quad = move |params: &MlpParams| -> maskwave::Result<(f64, Gradients)> {
        let mut f = 0.0;
        let mut g = Gradients::zeros_like(params);
        for i in 0..n {
            let x = params.biases[0][i] - 1.0;
            f += 0.5 * sc[i] * x * x;
            g.biases[0][i] = sc[i] * x;
        }
        Ok((f, g))
    };
    let out2 = lbfgs_minimize(quad, &p2, &LbfgsConfig { max_iter: 150, ..Default::default() }).unwrap();
    println!("quadratic cond 1e6: f = {:.3e} after {} evals (start ~{:.1e})",
        out2.loss_history.last().unwrap(), out2.loss_history.len(), out2.loss_history[0]);
}
