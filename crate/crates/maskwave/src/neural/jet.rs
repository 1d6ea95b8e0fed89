//! Batched second-order forward jets through the network, with a matching
//! reverse pass for parameter gradients.
//!
//! A jet direction carries first and second directional derivative seeds of
//! the input batch; propagating them yields exact directional first/second
//! derivatives of every output (the pieces a Laplacian needs), and the
//! reverse pass backpropagates adjoints of values *and* jet components into
//! parameter gradients. All arrays are column-per-sample: (width, batch).

use ndarray::Array2;

use crate::error::{Error, Result};

use super::mlp::{Gradients, MlpParams};

/// First/second derivative seeds of the input along one direction.
#[derive(Debug, Clone)]
pub struct JetSeed {
    pub first: Array2<f64>,
    pub second: Array2<f64>,
}

/// Stored forward state of one layer needed by the reverse pass.
struct LayerTrace {
    /// Input activations of the layer (and their jets).
    a_in: Array2<f64>,
    a_in_d1: Vec<Array2<f64>>,
    a_in_d2: Vec<Array2<f64>>,
    /// tanh output and its derivative 1 - t^2 (empty for the identity layer).
    t: Option<Array2<f64>>,
    s: Option<Array2<f64>>,
    /// Pre-activation jets (needed by the tanh backward).
    z_d1: Vec<Array2<f64>>,
    z_d2: Vec<Array2<f64>>,
}

/// Network outputs and their directional jets for one batch.
pub struct JetOutput {
    pub value: Array2<f64>,
    pub d1: Vec<Array2<f64>>,
    pub d2: Vec<Array2<f64>>,
    trace: Vec<LayerTrace>,
}

/// Forward pass with `seeds.len()` jet directions.
pub fn jet_forward(params: &MlpParams, input: &Array2<f64>, seeds: &[JetSeed]) -> Result<JetOutput> {
    let d0 = params.input_dim();
    let batch = input.ncols();
    if input.nrows() != d0 {
        return Err(Error::ShapeMismatch("jet input rows mismatch".into()));
    }
    for seed in seeds {
        if seed.first.dim() != (d0, batch) || seed.second.dim() != (d0, batch) {
            return Err(Error::ShapeMismatch("jet seed shape mismatch".into()));
        }
    }
    let n_dirs = seeds.len();
    let last = params.layer_count() - 1;

    let mut a = input.clone();
    let mut a_d1: Vec<Array2<f64>> = seeds.iter().map(|s| s.first.clone()).collect();
    let mut a_d2: Vec<Array2<f64>> = seeds.iter().map(|s| s.second.clone()).collect();
    let mut trace = Vec::with_capacity(params.layer_count());

    for (l, (w, b)) in params.weights.iter().zip(params.biases.iter()).enumerate() {
        let mut z = w.dot(&a);
        for mut col in z.columns_mut() {
            col += b;
        }
        let z_d1: Vec<Array2<f64>> = a_d1.iter().map(|d| w.dot(d)).collect();
        let z_d2: Vec<Array2<f64>> = a_d2.iter().map(|d| w.dot(d)).collect();

        if l < last {
            let t = z.mapv(f64::tanh);
            let s = t.mapv(|v| 1.0 - v * v);
            let mut new_d1 = Vec::with_capacity(n_dirs);
            let mut new_d2 = Vec::with_capacity(n_dirs);
            for k in 0..n_dirs {
                new_d1.push(&s * &z_d1[k]);
                // t'' chain rule: s * z'' - 2 t s z'^2
                let mut dd = &s * &z_d2[k];
                dd -= &(2.0 * &t * &s * &z_d1[k] * &z_d1[k]);
                new_d2.push(dd);
            }
            trace.push(LayerTrace {
                a_in: a,
                a_in_d1: a_d1,
                a_in_d2: a_d2,
                t: Some(t.clone()),
                s: Some(s),
                z_d1,
                z_d2,
            });
            a = t;
            a_d1 = new_d1;
            a_d2 = new_d2;
        } else {
            trace.push(LayerTrace {
                a_in: a,
                a_in_d1: a_d1,
                a_in_d2: a_d2,
                t: None,
                s: None,
                z_d1: z_d1.clone(),
                z_d2: z_d2.clone(),
            });
            a = z;
            a_d1 = z_d1;
            a_d2 = z_d2;
        }
    }

    Ok(JetOutput { value: a, d1: a_d1, d2: a_d2, trace })
}

/// Reverse pass: given adjoints of the outputs (value, first jets, second
/// jets), accumulates gradients with respect to every weight and bias.
///
/// Adjoint slices must match the direction count of the forward pass; pass
/// zero arrays for unused components.
pub fn jet_backward(
    params: &MlpParams,
    output: &JetOutput,
    adj_value: &Array2<f64>,
    adj_d1: &[Array2<f64>],
    adj_d2: &[Array2<f64>],
) -> Result<Gradients> {
    let n_dirs = output.d1.len();
    if adj_d1.len() != n_dirs || adj_d2.len() != n_dirs {
        return Err(Error::ShapeMismatch("adjoint direction count mismatch".into()));
    }
    let mut grads = Gradients::zeros_like(params);
    let mut abar = adj_value.clone();
    let mut abar_d1: Vec<Array2<f64>> = adj_d1.to_vec();
    let mut abar_d2: Vec<Array2<f64>> = adj_d2.to_vec();

    for l in (0..params.layer_count()).rev() {
        let tr = &output.trace[l];
        // Through the activation: map activation adjoints to pre-activation
        // adjoints (identity for the output layer).
        let (zbar, zbar_d1, zbar_d2) = match (&tr.t, &tr.s) {
            (Some(t), Some(s)) => {
                // Adjoints of: t = tanh(z), s = 1 - t^2,
                //   a1 = s z1,  a2 = s z2 - 2 t s z1^2
                // with respect to (z, z1, z2):
                //   dz  <- abar s + a1b (-2 t s z1) + a2b (-2 t s z2 - 2 s (s - 2 t^2) z1^2)
                //   dz1 <- a1b s - 4 t s z1 a2b
                //   dz2 <- a2b s
                let mut zbar = &abar * s;
                let mut zb1 = Vec::with_capacity(n_dirs);
                let mut zb2 = Vec::with_capacity(n_dirs);
                let ts = t * s;
                let s_minus_2t2 = s - &(2.0 * t * t);
                for k in 0..n_dirs {
                    let z1 = &tr.z_d1[k];
                    let z2 = &tr.z_d2[k];
                    let a1b = &abar_d1[k];
                    let a2b = &abar_d2[k];
                    zbar -= &(2.0 * &ts * z1 * a1b);
                    zbar -= &(a2b * &(2.0 * &ts * z2 + 2.0 * s * &s_minus_2t2 * z1 * z1));
                    zb1.push(s * a1b - 4.0 * &ts * z1 * a2b);
                    zb2.push(s * a2b);
                }
                (zbar, zb1, zb2)
            }
            _ => (abar.clone(), abar_d1.clone(), abar_d2.clone()),
        };

        // Affine backward: weight gradient collects value and jet channels.
        let w = &params.weights[l];
        let gw = &mut grads.weights[l];
        *gw += &zbar.dot(&tr.a_in.t());
        for k in 0..n_dirs {
            *gw += &zbar_d1[k].dot(&tr.a_in_d1[k].t());
            *gw += &zbar_d2[k].dot(&tr.a_in_d2[k].t());
        }
        let gb = &mut grads.biases[l];
        *gb += &zbar.sum_axis(ndarray::Axis(1));

        if l > 0 {
            abar = w.t().dot(&zbar);
            abar_d1 = zbar_d1.iter().map(|z| w.t().dot(z)).collect();
            abar_d2 = zbar_d2.iter().map(|z| w.t().dot(z)).collect();
        }
    }
    Ok(grads)
}
