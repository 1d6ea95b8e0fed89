//! The trainable field representation: an MLP over Fourier-embedded x and
//! affinely normalized z, outputting (Re u, Im u).

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::Result;
use crate::neural::{jet_forward, JetSeed, MlpParams};

use super::embed::fourier_embed_with_derivatives;

/// A complex scalar field with the derivatives the PDE residual needs.
/// Implemented by the network wrapper and by analytic closures in tests.
pub trait ScalarField2 {
    /// (u, u_x, u_z, u_xx, u_zz) at a point.
    fn eval_jet(&self, x: f64, z: f64) -> (Complex64, Complex64, Complex64, Complex64, Complex64);

    fn eval(&self, x: f64, z: f64) -> Complex64 {
        self.eval_jet(x, z).0
    }
}

/// MLP-backed field: inputs [fourier_embed(x); z_scaled], outputs
/// (Re u, Im u). The z coordinate is affinely mapped onto an O(1) interval;
/// x periodicity is exact through the embedding.
#[derive(Debug, Clone)]
pub struct PinnField {
    pub network: MlpParams,
    pub embedding_order: usize,
    pub kx: f64,
    /// z_net = (z - z_center) * z_scale.
    pub z_center: f64,
    pub z_scale: f64,
}

impl PinnField {
    pub fn input_dim(order: usize) -> usize {
        2 * order + 2
    }

    /// z is passed through raw (centered only); the x coordinate enters via
    /// the periodic embedding.
    pub fn new(network: MlpParams, order: usize, lx: f64, z_range: (f64, f64)) -> Self {
        let kx = 2.0 * std::f64::consts::PI / lx;
        let z_center = 0.5 * (z_range.0 + z_range.1);
        Self { network, embedding_order: order, kx, z_center, z_scale: 1.0 }
    }

    /// Network input vector at a point.
    pub fn features(&self, x: f64, z: f64) -> Vec<f64> {
        let mut v = super::embed::fourier_embed(x, self.embedding_order, self.kx);
        v.push((z - self.z_center) * self.z_scale);
        v
    }

    /// Batched inputs plus the jet seeds of the x and z directions.
    pub(crate) fn batch_inputs(
        &self,
        points: &[(f64, f64)],
    ) -> (Array2<f64>, JetSeed, JetSeed) {
        let d0 = Self::input_dim(self.embedding_order);
        let b = points.len();
        let mut input = Array2::<f64>::zeros((d0, b));
        let mut x1 = Array2::<f64>::zeros((d0, b));
        let mut x2 = Array2::<f64>::zeros((d0, b));
        let mut z1 = Array2::<f64>::zeros((d0, b));
        let z2 = Array2::<f64>::zeros((d0, b));
        for (j, &(x, z)) in points.iter().enumerate() {
            let (v, d1, d2) = fourier_embed_with_derivatives(x, self.embedding_order, self.kx);
            for i in 0..v.len() {
                input[(i, j)] = v[i];
                x1[(i, j)] = d1[i];
                x2[(i, j)] = d2[i];
            }
            input[(d0 - 1, j)] = (z - self.z_center) * self.z_scale;
            z1[(d0 - 1, j)] = self.z_scale;
        }
        (
            input,
            JetSeed { first: x1, second: x2 },
            JetSeed { first: z1, second: z2 },
        )
    }
}

impl ScalarField2 for PinnField {
    fn eval_jet(&self, x: f64, z: f64) -> (Complex64, Complex64, Complex64, Complex64, Complex64) {
        let (input, sx, sz) = self.batch_inputs(&[(x, z)]);
        let out = jet_forward(&self.network, &input, &[sx, sz]).expect("consistent shapes");
        let c = |a: &Array2<f64>| Complex64::new(a[(0, 0)], a[(1, 0)]);
        (
            c(&out.value),
            c(&out.d1[0]),
            c(&out.d1[1]),
            c(&out.d2[0]),
            c(&out.d2[1]),
        )
    }
}

/// Evaluates the network field on a tensor grid as a complex component.
pub fn field_on_grid(field: &PinnField, xs: &[f64], zs: &[f64]) -> Result<Array2<Complex64>> {
    let points: Vec<(f64, f64)> = xs
        .iter()
        .flat_map(|&x| zs.iter().map(move |&z| (x, z)))
        .collect();
    let d0 = PinnField::input_dim(field.embedding_order);
    let mut input = Array2::<f64>::zeros((d0, points.len()));
    for (j, &(x, z)) in points.iter().enumerate() {
        for (i, v) in field.features(x, z).into_iter().enumerate() {
            input[(i, j)] = v;
        }
    }
    let out = field.network.forward_batch(&input)?;
    let mut grid = Array2::<Complex64>::default((xs.len(), zs.len()));
    for (j, _) in points.iter().enumerate() {
        let (ix, iz) = (j / zs.len(), j % zs.len());
        grid[(ix, iz)] = Complex64::new(out[(0, j)], out[(1, j)]);
    }
    Ok(grid)
}
