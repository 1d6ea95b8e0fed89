//! Optimizers: Adam with bias correction and L-BFGS with a strong-Wolfe
//! line search.

use crate::error::{Error, Result};

use super::mlp::{Gradients, MlpParams};

/// Adam state (first/second moment buffers and step count).
#[derive(Debug, Clone)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    m: Gradients,
    v: Gradients,
}

impl AdamState {
    pub fn new(params: &MlpParams, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: Gradients::zeros_like(params),
            v: Gradients::zeros_like(params),
        }
    }
}

/// One bias-corrected Adam update in place.
pub fn adam_step(state: &mut AdamState, params: &mut MlpParams, grads: &Gradients) -> Result<()> {
    if !grads.is_finite() {
        return Err(Error::Divergence("non-finite gradient in Adam step".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    let (lr, beta1, beta2, eps) = (state.lr, state.beta1, state.beta2, state.eps);
    let update = move |p: &mut f64, m: &mut f64, v: &mut f64, g: f64| {
        *m = beta1 * *m + (1.0 - beta1) * g;
        *v = beta2 * *v + (1.0 - beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    };
    for l in 0..params.weights.len() {
        let (w, gw) = (&mut params.weights[l], &grads.weights[l]);
        let (mw, vw) = (&mut state.m.weights[l], &mut state.v.weights[l]);
        for ((p, (m, v)), g) in w.iter_mut().zip(mw.iter_mut().zip(vw.iter_mut())).zip(gw.iter()) {
            update(p, m, v, *g);
        }
        let (b, gb) = (&mut params.biases[l], &grads.biases[l]);
        let (mb, vb) = (&mut state.m.biases[l], &mut state.v.biases[l]);
        for ((p, (m, v)), g) in b.iter_mut().zip(mb.iter_mut().zip(vb.iter_mut())).zip(gb.iter()) {
            update(p, m, v, *g);
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct LbfgsConfig {
    pub max_iter: usize,
    pub history: usize,
    pub c1: f64,
    pub c2: f64,
    pub max_line_search: usize,
    pub grad_tol: f64,
}

impl Default for LbfgsConfig {
    fn default() -> Self {
        Self {
            max_iter: 5,
            history: 10,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 25,
            grad_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LbfgsOutcome {
    pub params: MlpParams,
    pub loss_history: Vec<f64>,
    /// True if a non-finite loss forced an early stop; the best parameters
    /// seen so far are returned.
    pub aborted: bool,
}

/// Full-batch L-BFGS with two-loop recursion and a strong-Wolfe line search.
/// `loss_fn` returns the loss and its parameter gradient.
pub fn lbfgs_minimize<F>(
    mut loss_fn: F,
    params: &MlpParams,
    config: &LbfgsConfig,
) -> Result<LbfgsOutcome>
where
    F: FnMut(&MlpParams) -> Result<(f64, Gradients)>,
{
    let mut shaped = params.clone();
    let mut x = shaped.flatten();
    let n = x.len();

    let mut eval = |xv: &[f64], shaped: &mut MlpParams| -> Result<(f64, Vec<f64>)> {
        shaped.assign_from_flat(xv)?;
        let (loss, grads) = loss_fn(shaped)?;
        Ok((loss, grads.flatten()))
    };

    let (mut f, mut g) = eval(&x, &mut shaped)?;
    let mut best = (f, x.clone());
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new(); // (s, y, rho)
    let mut losses = vec![f];
    let mut aborted = false;

    'outer: for _ in 0..config.max_iter {
        if !f.is_finite() {
            aborted = true;
            break;
        }
        let gnorm = norm(&g);
        if gnorm <= config.grad_tol {
            break;
        }
        // Two-loop recursion for the search direction.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let alpha = rho * dot(s, &q);
            axpy(&mut q, -alpha, y);
            alphas.push(alpha);
        }
        let gamma = history
            .last()
            .map(|(s, y, _)| dot(s, y) / dot(y, y).max(1e-300))
            .unwrap_or(1.0);
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for ((s, y, rho), alpha) in history.iter().zip(alphas.iter().rev()) {
            let beta = rho * dot(y, &q);
            axpy(&mut q, alpha - beta, s);
        }
        let mut dir: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut dg = dot(&dir, &g);
        if dg >= 0.0 {
            // Not a descent direction; fall back to steepest descent.
            dir = g.iter().map(|v| -v).collect();
            dg = -dot(&g, &g);
            history.clear();
        }

        // Strong Wolfe line search (bracket + zoom).
        let phi0 = f;
        let dphi0 = dg;
        let mut alpha_prev = 0.0f64;
        let mut phi_prev = phi0;
        let mut alpha = 1.0f64;
        let mut accepted: Option<(f64, f64, Vec<f64>)> = None;
        let mut lo_hi: Option<(f64, f64, f64, f64)> = None; // (alo, phi_lo, ahi, phi_hi)
        for ls in 0..config.max_line_search {
            let xt = add_scaled(&x, alpha, &dir);
            let (phi, gt) = match eval(&xt, &mut shaped) {
                Ok(v) => v,
                Err(_) => {
                    aborted = true;
                    break 'outer;
                }
            };
            if !phi.is_finite() {
                aborted = true;
                break 'outer;
            }
            if phi > phi0 + config.c1 * alpha * dphi0 || (ls > 0 && phi >= phi_prev) {
                lo_hi = Some((alpha_prev, phi_prev, alpha, phi));
                break;
            }
            let dphi = dot(&gt, &dir);
            if dphi.abs() <= -config.c2 * dphi0 {
                accepted = Some((alpha, phi, gt));
                break;
            }
            if dphi >= 0.0 {
                lo_hi = Some((alpha, phi, alpha_prev, phi_prev));
                break;
            }
            alpha_prev = alpha;
            phi_prev = phi;
            alpha *= 2.0;
        }
        if accepted.is_none() {
            if let Some((mut alo, mut phi_lo, mut ahi, mut phi_hi)) = lo_hi {
                for _ in 0..config.max_line_search {
                    let amid = 0.5 * (alo + ahi);
                    let xt = add_scaled(&x, amid, &dir);
                    let (phi, gt) = match eval(&xt, &mut shaped) {
                        Ok(v) => v,
                        Err(_) => {
                            aborted = true;
                            break 'outer;
                        }
                    };
                    if !phi.is_finite() {
                        aborted = true;
                        break 'outer;
                    }
                    if phi > phi0 + config.c1 * amid * dphi0 || phi >= phi_lo {
                        ahi = amid;
                        phi_hi = phi;
                    } else {
                        let dphi = dot(&gt, &dir);
                        if dphi.abs() <= -config.c2 * dphi0 {
                            accepted = Some((amid, phi, gt));
                            break;
                        }
                        if dphi * (ahi - alo) >= 0.0 {
                            ahi = alo;
                            phi_hi = phi_lo;
                        }
                        alo = amid;
                        phi_lo = phi;
                    }
                    let _ = phi_hi;
                }
            }
        }

        let Some((alpha_acc, phi_acc, g_acc)) = accepted else {
            // Line search failed to satisfy Wolfe; take the best point seen
            // if it improves, else stop.
            break;
        };
        let x_new = add_scaled(&x, alpha_acc, &dir);
        let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_acc.iter().zip(g.iter()).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            history.push((s, y, 1.0 / sy));
            if history.len() > config.history {
                history.remove(0);
            }
        }
        x = x_new;
        f = phi_acc;
        g = g_acc;
        losses.push(f);
        if f < best.0 {
            best = (f, x.clone());
        }
        let _ = n;
    }

    if f <= best.0 && f.is_finite() {
        best = (f, x);
    }
    shaped.assign_from_flat(&best.1)?;
    Ok(LbfgsOutcome { params: shaped, loss_history: losses, aborted })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(target: &mut [f64], alpha: f64, v: &[f64]) {
    for (t, s) in target.iter_mut().zip(v.iter()) {
        *t += alpha * s;
    }
}

fn add_scaled(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d.iter()).map(|(a, b)| a + alpha * b).collect()
}
