//! Pointwise differentiation API on top of the jet engine: input Jacobians,
//! diagonal input Hessians, and parameter gradients of weighted outputs.

use ndarray::Array2;

use crate::error::Result;

use super::jet::{jet_backward, jet_forward, JetSeed};
use super::mlp::{Gradients, MlpParams};

fn unit_seeds(dim: usize) -> Vec<JetSeed> {
    (0..dim)
        .map(|k| {
            let mut first = Array2::zeros((dim, 1));
            first[(k, 0)] = 1.0;
            JetSeed { first, second: Array2::zeros((dim, 1)) }
        })
        .collect()
}

/// d output_o / d input_k as an (out, in) matrix.
pub fn input_jacobian(params: &MlpParams, input: &[f64]) -> Result<Array2<f64>> {
    let d0 = params.input_dim();
    let x = Array2::from_shape_vec((d0, 1), input.to_vec())
        .map_err(|e| crate::error::Error::ShapeMismatch(e.to_string()))?;
    let out = jet_forward(params, &x, &unit_seeds(d0))?;
    let mut jac = Array2::zeros((params.output_dim(), d0));
    for k in 0..d0 {
        for o in 0..params.output_dim() {
            jac[(o, k)] = out.d1[k][(o, 0)];
        }
    }
    Ok(jac)
}

/// d^2 output_o / d input_k^2 (diagonal of the input Hessian) as (out, in);
/// the pieces a Laplacian needs.
pub fn input_hessian_diag(params: &MlpParams, input: &[f64]) -> Result<Array2<f64>> {
    let d0 = params.input_dim();
    let x = Array2::from_shape_vec((d0, 1), input.to_vec())
        .map_err(|e| crate::error::Error::ShapeMismatch(e.to_string()))?;
    let out = jet_forward(params, &x, &unit_seeds(d0))?;
    let mut hess = Array2::zeros((params.output_dim(), d0));
    for k in 0..d0 {
        for o in 0..params.output_dim() {
            hess[(o, k)] = out.d2[k][(o, 0)];
        }
    }
    Ok(hess)
}

/// Gradient of sum_o weights_o * output_o with respect to every parameter
/// (reverse accumulation).
pub fn param_gradients(
    params: &MlpParams,
    input: &[f64],
    output_weights: &[f64],
) -> Result<Gradients> {
    let d0 = params.input_dim();
    let x = Array2::from_shape_vec((d0, 1), input.to_vec())
        .map_err(|e| crate::error::Error::ShapeMismatch(e.to_string()))?;
    let out = jet_forward(params, &x, &[])?;
    let adj = Array2::from_shape_vec((params.output_dim(), 1), output_weights.to_vec())
        .map_err(|e| crate::error::Error::ShapeMismatch(e.to_string()))?;
    jet_backward(params, &out, &adj, &[], &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::mlp::mlp_init;
    use ndarray::Array1;

    #[test]
    fn linear_network_jacobian_is_its_weight_matrix() {
        let mut p = mlp_init(&[3, 4, 2], 1).unwrap();
        // Make the hidden layer effectively linear: weights small enough that
        // tanh is identity to first order is not exact, so instead collapse
        // the network: zero hidden weights mean constant output.
        for w in &mut p.weights {
            w.fill(0.0);
        }
        let jac = input_jacobian(&p, &[0.1, 0.2, -0.3]).unwrap();
        assert!(jac.iter().all(|v| v.abs() < 1e-15));
        let hess = input_hessian_diag(&p, &[0.1, 0.2, -0.3]).unwrap();
        assert!(hess.iter().all(|v| v.abs() < 1e-15));
    }

    /// Scalar tanh unit: d/dx tanh(w x + b) = w (1 - tanh^2).
    #[test]
    fn single_tanh_unit_matches_closed_form() {
        let mut p = mlp_init(&[1, 1, 1], 2).unwrap();
        let (w0, b0, w1) = (0.7, -0.2, 1.3);
        p.weights[0][(0, 0)] = w0;
        p.biases[0][0] = b0;
        p.weights[1][(0, 0)] = w1;
        p.biases[1][0] = 0.0;
        let x = 0.43;
        let jac = input_jacobian(&p, &[x]).unwrap();
        let t = (w0 * x + b0).tanh();
        let expect = w1 * w0 * (1.0 - t * t);
        assert!((jac[(0, 0)] - expect).abs() < 1e-14);
        let hess = input_hessian_diag(&p, &[x]).unwrap();
        let expect2 = w1 * w0 * w0 * (-2.0 * t * (1.0 - t * t));
        assert!((hess[(0, 0)] - expect2).abs() < 1e-14);
    }

    /// Full-size network: every derivative is checked against central finite
    /// differences at the accuracy the spec demands.
    #[test]
    fn derivatives_match_finite_differences_on_realistic_shape() {
        let p = mlp_init(&[2, 128, 128, 2], 12345).unwrap();
        let x = [0.37, -0.81];
        let h = 1e-4;
        let jac = input_jacobian(&p, &x).unwrap();
        let hess = input_hessian_diag(&p, &x).unwrap();
        let eval = |x: &[f64; 2]| p.forward(x).unwrap();
        for k in 0..2 {
            let at = |delta: f64| {
                let mut xs = x;
                xs[k] += delta;
                eval(&xs)
            };
            let (fp, fm, f0) = (at(h), at(-h), at(0.0));
            // Second derivatives need a wider high-order stencil: the plain
            // 3-point difference at this step drowns in f64 cancellation.
            let h2 = 1e-3;
            let (gp2, gp1, gm1, gm2) = (at(2.0 * h2), at(h2), at(-h2), at(-2.0 * h2));
            for o in 0..2 {
                let fd1 = (fp[o] - fm[o]) / (2.0 * h);
                let fd2 = (-gp2[o] + 16.0 * gp1[o] - 30.0 * f0[o] + 16.0 * gm1[o] - gm2[o])
                    / (12.0 * h2 * h2);
                let rel1 = (jac[(o, k)] - fd1).abs() / fd1.abs().max(1e-6);
                let rel2 = (hess[(o, k)] - fd2).abs() / fd2.abs().max(1e-6);
                assert!(rel1 < 1e-6, "jacobian ({o},{k}): rel {rel1:.2e}");
                assert!(rel2 < 1e-6, "hessian ({o},{k}): rel {rel2:.2e}");
            }
        }
    }

    /// Parameter gradients against finite differences, including the jet
    /// channels (adjoints on first/second directional derivatives).
    #[test]
    fn parameter_gradients_match_finite_differences() {
        use crate::neural::jet::{jet_backward, jet_forward, JetSeed};
        use ndarray::Array2;

        let p = mlp_init(&[2, 6, 5, 2], 7).unwrap();
        let x = Array2::from_shape_vec((2, 1), vec![0.31, -0.44]).unwrap();
        let seed = JetSeed {
            first: Array2::from_shape_vec((2, 1), vec![1.0, 0.5]).unwrap(),
            second: Array2::from_shape_vec((2, 1), vec![0.2, -0.1]).unwrap(),
        };
        // Scalar objective mixing value, first and second jets.
        let weights_v = Array2::from_shape_vec((2, 1), vec![0.9, -1.2]).unwrap();
        let weights_1 = Array2::from_shape_vec((2, 1), vec![0.4, 0.7]).unwrap();
        let weights_2 = Array2::from_shape_vec((2, 1), vec![-0.3, 0.55]).unwrap();
        let objective = |params: &MlpParams| -> f64 {
            let out = jet_forward(params, &x, std::slice::from_ref(&seed)).unwrap();
            let mut acc = 0.0;
            for o in 0..2 {
                acc += weights_v[(o, 0)] * out.value[(o, 0)];
                acc += weights_1[(o, 0)] * out.d1[0][(o, 0)];
                acc += weights_2[(o, 0)] * out.d2[0][(o, 0)];
            }
            acc
        };
        let out = jet_forward(&p, &x, std::slice::from_ref(&seed)).unwrap();
        let grads = jet_backward(
            &p,
            &out,
            &weights_v,
            std::slice::from_ref(&weights_1),
            std::slice::from_ref(&weights_2),
        )
        .unwrap();

        let h = 1e-6;
        let flat = p.flatten();
        let gflat = grads.flatten();
        // Probe a spread of parameter indices.
        let mut k = 1usize;
        while k < flat.len() {
            let mut fp = flat.clone();
            let mut fm = flat.clone();
            fp[k] += h;
            fm[k] -= h;
            let mut pp = p.clone();
            pp.assign_from_flat(&fp).unwrap();
            let mut pm = p.clone();
            pm.assign_from_flat(&fm).unwrap();
            let fd = (objective(&pp) - objective(&pm)) / (2.0 * h);
            let rel = (gflat[k] - fd).abs() / fd.abs().max(1e-6);
            assert!(rel < 1e-6, "param {k}: analytic {} vs fd {fd}", gflat[k]);
            k = k * 2 + 3;
        }
        let _ = Array1::<f64>::zeros(0);
    }
}
