//! Two-stage PINN training (Adam then L-BFGS) repeated over random seeds,
//! with per-epoch history and relative-error statistics against the
//! problem's reference solution.

use std::time::Instant;

use ndarray::Array3;
use num_complex::Complex64;

use crate::domain::{FieldComponent, FieldGrid, UNIT_INCIDENT_E};
use crate::error::{Error, Result};
use crate::metrics::relative_l2;
use crate::neural::{adam_step, lbfgs_minimize, mlp_init, AdamState, LbfgsConfig, SplitMix64};
use crate::waveguide::linspace;

use super::field::{field_on_grid, PinnField};
use super::loss::TrainObjective;
use super::problem::PinnProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Fixed tensor grid of collocation points.
    Grid,
    /// Uniform random interior points, redrawn every epoch.
    RandomPerEpoch,
}

#[derive(Debug, Clone)]
pub struct PinnConfig {
    /// Fourier feature order m.
    pub embedding_order: usize,
    pub hidden: Vec<usize>,
    /// Harmonics retained in the boundary operator.
    pub nx: usize,
    /// Collocation intervals per axis (x, z) for grid sampling, or the
    /// sample count for random sampling.
    pub grid_intervals: (usize, usize),
    pub sampling: SamplingMode,
    /// Quadrature points along x for the boundary residuals.
    pub boundary_quadrature: usize,
    pub lambda_r: f64,
    /// Defaults to nx / Lx when unset.
    pub lambda_bc: Option<f64>,
    pub epochs_adam: usize,
    pub lr_adam: f64,
    pub iters_lbfgs: usize,
    pub seeds: Vec<u64>,
    /// Evaluation grid (points per axis) for the error report.
    pub eval_points: usize,
}

impl Default for PinnConfig {
    fn default() -> Self {
        Self {
            embedding_order: 2,
            hidden: vec![128, 128],
            nx: 10,
            grid_intervals: (100, 100),
            sampling: SamplingMode::Grid,
            boundary_quadrature: 101,
            lambda_r: 1.0,
            lambda_bc: None,
            epochs_adam: 1000,
            lr_adam: 1e-3,
            iters_lbfgs: 5,
            seeds: vec![0, 1, 2, 3, 4, 5, 6],
            eval_points: 101,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub residual_term: f64,
    pub boundary_term: f64,
    pub wall_secs: f64,
}

#[derive(Debug, Clone)]
pub struct PinnRun {
    pub seed: u64,
    pub field: PinnField,
    pub history: Vec<EpochRecord>,
    pub rel_l2: f64,
    pub final_loss: f64,
    pub diverged: bool,
    pub train_secs: f64,
}

#[derive(Debug, Clone)]
pub struct PinnTrainReport {
    pub runs: Vec<PinnRun>,
    pub median_rel_l2: f64,
    pub mean_rel_l2: f64,
    pub std_rel_l2: f64,
    pub failed_seeds: Vec<u64>,
}

/// Collocation grid over the domain, excluding points that sit exactly on a
/// permittivity jump (the PDE residual is undefined there).
fn grid_samples(problem: &PinnProblem, intervals: (usize, usize)) -> Vec<(f64, f64)> {
    let (x_min, x_max, z_min, z_max) = problem.domain();
    let planes = problem.interface_planes();
    let (nx_int, nz_int) = intervals;
    // x is periodic: the right edge duplicates the left.
    let xs: Vec<f64> = (0..nx_int)
        .map(|i| x_min + (x_max - x_min) * i as f64 / nx_int as f64)
        .collect();
    let zs = linspace(z_min, z_max, nz_int + 1);
    let mut pts = Vec::with_capacity(xs.len() * zs.len());
    for &x in &xs {
        for &z in &zs {
            if planes.iter().any(|zi| (z - zi).abs() < 1e-9) {
                continue;
            }
            pts.push((x, z));
        }
    }
    pts
}

fn random_samples(
    problem: &PinnProblem,
    count: usize,
    rng: &mut SplitMix64,
) -> Vec<(f64, f64)> {
    let (x_min, x_max, z_min, z_max) = problem.domain();
    let planes = problem.interface_planes();
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let x = x_min + (x_max - x_min) * rng.next_f64();
        let z = z_min + (z_max - z_min) * rng.next_f64();
        if planes.iter().any(|zi| (z - zi).abs() < 1e-9) {
            continue;
        }
        pts.push((x, z));
    }
    pts
}

/// Trains one network per seed and reports per-seed errors against the
/// problem's reference solution.
pub fn pinn_train(problem: &PinnProblem, config: &PinnConfig) -> Result<PinnTrainReport> {
    if config.seeds.is_empty() {
        return Err(Error::invalid("no seeds configured"));
    }
    let (x_min, x_max, z_min, z_max) = problem.domain();
    let lx = x_max - x_min;
    let lambda_bc = config.lambda_bc.unwrap_or(config.nx as f64 / lx);
    let d0 = PinnField::input_dim(config.embedding_order);
    let mut sizes = vec![d0];
    sizes.extend(&config.hidden);
    sizes.push(2);

    // Reference field for the error report.
    let eval_x = linspace(x_min, x_max, config.eval_points);
    let eval_z = linspace(z_min, z_max, config.eval_points);
    let reference = problem.reference_field(&eval_x, &eval_z, 10)?;

    let base_points = grid_samples(problem, config.grid_intervals);
    let n_random = base_points.len();

    let mut runs = Vec::new();
    let mut failed = Vec::new();
    for &seed in &config.seeds {
        let start = Instant::now();
        let net = mlp_init(&sizes, seed)?;
        let meta = PinnField::new(net.clone(), config.embedding_order, lx, (z_min, z_max));
        let mut objective = TrainObjective::new(
            problem,
            &meta,
            base_points.clone(),
            config.nx,
            config.boundary_quadrature,
            config.lambda_r,
            lambda_bc,
        )?;

        let mut params = net;
        let mut adam = AdamState::new(&params, config.lr_adam);
        let mut rng = SplitMix64::new(seed ^ 0x5eed_b0a2_d15e_a5e5);
        let mut history = Vec::with_capacity(config.epochs_adam);
        let mut diverged = false;
        for epoch in 0..config.epochs_adam {
            if config.sampling == SamplingMode::RandomPerEpoch {
                objective =
                    objective.with_samples(random_samples(problem, n_random, &mut rng), problem);
            }
            let t0 = Instant::now();
            let (loss, breakdown, grads) = objective.loss_grad(&params)?;
            if !loss.is_finite() {
                diverged = true;
                break;
            }
            adam_step(&mut adam, &mut params, &grads)?;
            history.push(EpochRecord {
                epoch,
                loss,
                residual_term: breakdown.residual_term,
                boundary_term: breakdown.boundary_term,
                wall_secs: t0.elapsed().as_secs_f64(),
            });
        }

        if diverged {
            failed.push(seed);
            continue;
        }

        // Second stage: full-batch L-BFGS on the fixed grid.
        let mut final_loss = history.last().map(|r| r.loss).unwrap_or(f64::NAN);
        if config.iters_lbfgs > 0 {
            if config.sampling == SamplingMode::RandomPerEpoch {
                objective = objective.with_samples(base_points.clone(), problem);
            }
            // One L-BFGS "epoch" runs up to 20 quasi-Newton iterations on the
            // full batch, so a 5-epoch second stage is ~100 iterations.
            let outcome = lbfgs_minimize(
                |p| objective.loss_grad(p).map(|(l, _, g)| (l, g)),
                &params,
                &LbfgsConfig {
                    max_iter: config.iters_lbfgs * 20,
                    history: std::env::var("MASKWAVE_LBFGS_MEM")
                        .ok()
                        .and_then(|v| v.parse().ok())
                        .unwrap_or(10),
                    ..Default::default()
                },
            )?;
            params = outcome.params;
            if let Some(&l) = outcome.loss_history.last() {
                if l.is_finite() {
                    final_loss = l;
                }
            }
            let epoch0 = history.len();
            for (i, l) in outcome.loss_history.iter().enumerate() {
                history.push(EpochRecord {
                    epoch: epoch0 + i,
                    loss: *l,
                    residual_term: f64::NAN,
                    boundary_term: f64::NAN,
                    wall_secs: 0.0,
                });
            }
        }

        let field = PinnField { network: params, ..meta };
        let grid = field_on_grid(&field, &eval_x, &eval_z)?;
        let pred = grid_to_field(&eval_x, &eval_z, grid);
        let rel_l2 = relative_l2(&pred, &reference)?;
        runs.push(PinnRun {
            seed,
            field,
            history,
            rel_l2,
            final_loss,
            diverged: false,
            train_secs: start.elapsed().as_secs_f64(),
        });
    }

    if runs.is_empty() {
        return Err(Error::Divergence("all seeds diverged".into()));
    }
    let mut errs: Vec<f64> = runs.iter().map(|r| r.rel_l2).collect();
    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = errs[errs.len() / 2];
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    let std = (errs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>()
        / errs.len() as f64)
        .sqrt();
    Ok(PinnTrainReport {
        runs,
        median_rel_l2: median,
        mean_rel_l2: mean,
        std_rel_l2: std,
        failed_seeds: failed,
    })
}

fn grid_to_field(
    xs: &[f64],
    zs: &[f64],
    values: ndarray::Array2<Complex64>,
) -> FieldGrid {
    let mut arr = Array3::<Complex64>::default((xs.len(), 1, zs.len()));
    for ix in 0..xs.len() {
        for iz in 0..zs.len() {
            arr[(ix, 0, iz)] = values[(ix, iz)];
        }
    }
    FieldGrid {
        x: xs.to_vec(),
        y: None,
        z: zs.to_vec(),
        components: vec![(FieldComponent::Ey, arr)],
        normalization: UNIT_INCIDENT_E.to_string(),
    }
}
