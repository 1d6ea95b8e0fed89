//! The composite loss: weighted mean-square PDE and boundary residuals, and
//! its fused batched evaluation with parameter gradients for training.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::neural::{jet_backward, jet_forward, Gradients, MlpParams};

use super::boundary::{boundary_quadrature, boundary_residuals, BoundaryQuadrature};
use super::field::{PinnField, ScalarField2};
use super::problem::PinnProblem;
use super::residual::pde_residual_scalar;

#[derive(Debug, Clone)]
pub struct LossBreakdown {
    pub total: f64,
    pub residual_term: f64,
    pub boundary_term: f64,
    pub lambda_r: f64,
    pub lambda_bc: f64,
    pub n_r: usize,
    pub n_bc: usize,
}

/// Loss of an arbitrary field: lambda_r * mean |R|^2 over the interior
/// samples plus lambda_bc * mean |B|^2 over the boundary residuals.
pub fn pinn_loss(
    field: &dyn ScalarField2,
    problem: &PinnProblem,
    interior: &[(f64, f64)],
    nx: usize,
    quadrature_n: usize,
    lambda_r: f64,
    lambda_bc: f64,
) -> Result<LossBreakdown> {
    let mut r_acc = 0.0;
    for &(x, z) in interior {
        r_acc += pde_residual_scalar(field, problem, x, z).norm_sqr();
    }
    let n_r = interior.len().max(1);
    let residual_term = r_acc / n_r as f64;

    let res = boundary_residuals(field, problem, nx, quadrature_n, false)?;
    let mut bc_acc = 0.0;
    let mut n_bc = 0usize;
    for b in res.sommerfeld_top.iter().chain(res.sommerfeld_bottom.iter()) {
        bc_acc += b.norm_sqr();
        n_bc += 1;
    }
    let boundary_term = bc_acc / n_bc.max(1) as f64;
    Ok(LossBreakdown {
        total: lambda_r * residual_term + lambda_bc * boundary_term,
        residual_term,
        boundary_term,
        lambda_r,
        lambda_bc,
        n_r,
        n_bc,
    })
}

/// Precomputed training context: collocation points with their permittivity,
/// boundary quadrature tables, and weights. Evaluating against parameters
/// yields the loss and its full parameter gradient.
pub(crate) struct TrainObjective {
    pub field_meta: PinnField,
    pub k0: f64,
    pub interior: Vec<(f64, f64)>,
    pub eps: Vec<Complex64>,
    pub quad: BoundaryQuadrature,
    pub lambda_r: f64,
    pub lambda_bc: f64,
    pub chunk: usize,
}

impl TrainObjective {
    pub fn new(
        problem: &PinnProblem,
        field_meta: &PinnField,
        interior: Vec<(f64, f64)>,
        nx: usize,
        quadrature_n: usize,
        lambda_r: f64,
        lambda_bc: f64,
    ) -> Result<Self> {
        let eps = interior.iter().map(|&(x, z)| problem.eps(x, z)).collect();
        let quad = boundary_quadrature(problem, nx, quadrature_n)?;
        Ok(Self {
            field_meta: field_meta.clone(),
            k0: problem.k0(),
            interior,
            eps,
            quad,
            lambda_r,
            lambda_bc,
            chunk: 2048,
        })
    }

    pub fn with_samples(&self, interior: Vec<(f64, f64)>, problem: &PinnProblem) -> Self {
        let eps = interior.iter().map(|&(x, z)| problem.eps(x, z)).collect();
        Self {
            field_meta: self.field_meta.clone(),
            k0: self.k0,
            interior,
            eps,
            quad: boundary_quadrature_clone(&self.quad),
            lambda_r: self.lambda_r,
            lambda_bc: self.lambda_bc,
            chunk: self.chunk,
        }
    }

    /// Loss + gradient, batched over chunks in parallel with a fixed
    /// reduction order.
    pub fn loss_grad(&self, params: &MlpParams) -> Result<(f64, LossBreakdown, Gradients)> {
        let n_r = self.interior.len().max(1);
        let w_r = self.lambda_r / n_r as f64;

        let chunks: Vec<(usize, usize)> = (0..self.interior.len())
            .step_by(self.chunk)
            .map(|start| (start, (start + self.chunk).min(self.interior.len())))
            .collect();

        let partials: Vec<Result<(f64, Gradients)>> = chunks
            .par_iter()
            .map(|&(start, end)| self.interior_chunk(params, start, end, w_r))
            .collect();

        let mut grads = Gradients::zeros_like(params);
        let mut r_acc = 0.0;
        for partial in partials {
            let (loss, g) = partial?;
            r_acc += loss;
            grads.add_assign(&g);
        }

        let (bc_acc, bc_grads) = self.boundary_term(params)?;
        grads.add_assign(&bc_grads);

        // The accumulators carry their lambda weights; divide them back out
        // for the per-term means in the breakdown.
        let residual_mean = r_acc / self.lambda_r.max(f64::MIN_POSITIVE);
        let n_bc = 2 * self.quad.kz_top.len();
        let boundary_mean = bc_acc / self.lambda_bc.max(f64::MIN_POSITIVE);
        let total = r_acc + bc_acc;
        Ok((
            total,
            LossBreakdown {
                total,
                residual_term: residual_mean,
                boundary_term: boundary_mean,
                lambda_r: self.lambda_r,
                lambda_bc: self.lambda_bc,
                n_r,
                n_bc,
            },
            grads,
        ))
    }

    fn interior_chunk(
        &self,
        params: &MlpParams,
        start: usize,
        end: usize,
        w_r: f64,
    ) -> Result<(f64, Gradients)> {
        let points = &self.interior[start..end];
        let (input, sx, sz) = self.field_meta.batch_inputs(points);
        let out = jet_forward(params, &input, &[sx, sz])?;
        let b = points.len();
        let k0sq = self.k0 * self.k0;

        let mut loss = 0.0f64;
        let mut adj_value = Array2::<f64>::zeros((2, b));
        let zero = Array2::<f64>::zeros((2, b));
        let mut adj_x2 = Array2::<f64>::zeros((2, b));
        let mut adj_z2 = Array2::<f64>::zeros((2, b));
        for j in 0..b {
            let eps = self.eps[start + j];
            let (u_re, u_im) = (out.value[(0, j)], out.value[(1, j)]);
            let lap_re = out.d2[0][(0, j)] + out.d2[1][(0, j)];
            let lap_im = out.d2[0][(1, j)] + out.d2[1][(1, j)];
            let r_re = lap_re + k0sq * (eps.re * u_re - eps.im * u_im);
            let r_im = lap_im + k0sq * (eps.re * u_im + eps.im * u_re);
            loss += w_r * (r_re * r_re + r_im * r_im);
            let (gr, gi) = (2.0 * w_r * r_re, 2.0 * w_r * r_im);
            adj_x2[(0, j)] = gr;
            adj_x2[(1, j)] = gi;
            adj_z2[(0, j)] = gr;
            adj_z2[(1, j)] = gi;
            adj_value[(0, j)] = k0sq * (gr * eps.re + gi * eps.im);
            adj_value[(1, j)] = k0sq * (-gr * eps.im + gi * eps.re);
        }
        let grads = jet_backward(
            params,
            &out,
            &adj_value,
            &[zero.clone(), zero.clone()],
            &[adj_x2, adj_z2],
        )?;
        Ok((loss, grads))
    }

    fn boundary_term(&self, params: &MlpParams) -> Result<(f64, Gradients)> {
        let q = self.quad.xs.len();
        let n_harm = self.quad.kz_top.len();
        let n_bc = 2 * n_harm;
        let w_bc = self.lambda_bc / n_bc as f64;
        let mut loss = 0.0f64;
        let mut grads = Gradients::zeros_like(params);

        for top in [true, false] {
            let z = if top { self.quad.z_top } else { self.quad.z_bottom };
            let points: Vec<(f64, f64)> = self.quad.xs.iter().map(|&x| (x, z)).collect();
            let (input, _sx, sz) = self.field_meta.batch_inputs(&points);
            let out = jet_forward(params, &input, std::slice::from_ref(&sz))?;

            // Complex field and z derivative at the boundary points.
            let mut u: Vec<Complex64> = (0..q)
                .map(|j| Complex64::new(out.value[(0, j)], out.value[(1, j)]))
                .collect();
            let mut uz: Vec<Complex64> = (0..q)
                .map(|j| Complex64::new(out.d1[0][(0, j)], out.d1[0][(1, j)]))
                .collect();
            if top {
                for j in 0..q {
                    u[j] -= self.quad.inc_top[j];
                    uz[j] -= self.quad.inc_top_dz[j];
                }
            }
            let residuals = self.quad.project(&u, &uz, top);
            for bm in &residuals {
                loss += w_bc * bm.norm_sqr();
            }

            // Adjoints on (u, uz) per point, accumulated over harmonics.
            let kzs = if top { &self.quad.kz_top } else { &self.quad.kz_bottom };
            let sign = if top { 1.0 } else { -1.0 };
            let mut adj_value = Array2::<f64>::zeros((2, q));
            let mut adj_d1 = Array2::<f64>::zeros((2, q));
            let zero = Array2::<f64>::zeros((2, q));
            for j in 0..q {
                let mut g_u = Complex64::default();
                let mut g_uz = Complex64::default();
                for (k, bm) in residuals.iter().enumerate() {
                    let c_uz = self.quad.phase[k][j];
                    let c_u = sign * Complex64::new(0.0, 1.0) * kzs[k] * c_uz;
                    g_u += bm.conj() * c_u;
                    g_uz += bm.conj() * c_uz;
                }
                adj_value[(0, j)] = 2.0 * w_bc * g_u.re;
                adj_value[(1, j)] = -2.0 * w_bc * g_u.im;
                adj_d1[(0, j)] = 2.0 * w_bc * g_uz.re;
                adj_d1[(1, j)] = -2.0 * w_bc * g_uz.im;
            }
            let g = jet_backward(
                params,
                &out,
                &adj_value,
                std::slice::from_ref(&adj_d1),
                std::slice::from_ref(&zero),
            )?;
            grads.add_assign(&g);
        }
        Ok((loss, grads))
    }
}

fn boundary_quadrature_clone(q: &BoundaryQuadrature) -> BoundaryQuadrature {
    BoundaryQuadrature {
        xs: q.xs.clone(),
        z_top: q.z_top,
        z_bottom: q.z_bottom,
        kz_top: q.kz_top.clone(),
        kz_bottom: q.kz_bottom.clone(),
        phase: q.phase.clone(),
        inc_top: q.inc_top.clone(),
        inc_top_dz: q.inc_top_dz.clone(),
    }
}
