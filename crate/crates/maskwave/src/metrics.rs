//! Error metrics and the wall-clock timing harness.

use std::time::Instant;

use crate::domain::FieldGrid;
use crate::error::{Error, Result};

/// Relative L2 error between a prediction and a reference sampled on the
/// same grid: sqrt(sum |p - r|^2) / sqrt(sum |r|^2), pooled over all shared
/// evaluation points and components.
pub fn relative_l2(pred: &FieldGrid, reference: &FieldGrid) -> Result<f64> {
    if pred.shape() != reference.shape() {
        return Err(Error::ShapeMismatch(format!(
            "grids differ: {:?} vs {:?}",
            pred.shape(),
            reference.shape()
        )));
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    let mut matched = 0usize;
    for (c, p) in &pred.components {
        if let Some(r) = reference.component(*c) {
            matched += 1;
            for (pv, rv) in p.iter().zip(r.iter()) {
                num += (pv - rv).norm_sqr();
                den += rv.norm_sqr();
            }
        }
    }
    if matched == 0 {
        return Err(Error::ShapeMismatch("no shared components to compare".into()));
    }
    if den == 0.0 {
        return Err(Error::invalid("reference field has zero norm"));
    }
    Ok((num / den).sqrt())
}

/// Per-component breakdown alongside the pooled error.
pub fn relative_l2_report(pred: &FieldGrid, reference: &FieldGrid) -> Result<ErrorReport> {
    let pooled = relative_l2(pred, reference)?;
    let mut per_component = Vec::new();
    for (c, p) in &pred.components {
        if let Some(r) = reference.component(*c) {
            let mut num = 0.0;
            let mut den = 0.0;
            for (pv, rv) in p.iter().zip(r.iter()) {
                num += (pv - rv).norm_sqr();
                den += rv.norm_sqr();
            }
            if den > 0.0 {
                per_component.push((c.name().to_string(), (num / den).sqrt()));
            }
        }
    }
    let shape = pred.shape();
    Ok(ErrorReport {
        rel_l2: pooled,
        n_points: shape.0 * shape.1 * shape.2,
        per_component,
        timings: Timings::default(),
    })
}

/// Wall-clock stages of one solver run, in seconds.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub assembly: Option<f64>,
    pub solve: Option<f64>,
    pub synthesis: Option<f64>,
    pub training: Option<f64>,
}

/// Accuracy and timing summary of one experiment.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub rel_l2: f64,
    pub n_points: usize,
    pub per_component: Vec<(String, f64)>,
    pub timings: Timings,
}

/// Result of timing a task: median and spread over enough repetitions for
/// sub-millisecond paths to be trustworthy.
#[derive(Debug, Clone)]
pub struct Timed<T> {
    pub value: T,
    pub median_secs: f64,
    pub spread_secs: f64,
    pub reps: usize,
}

/// Runs `task` under a monotonic clock. Tasks faster than ~50 ms are repeated
/// (at least 5 times) and the median is reported, along with the median
/// absolute deviation as the spread.
pub fn timed<T>(mut task: impl FnMut() -> T) -> Timed<T> {
    let start = Instant::now();
    let mut value = task();
    let first = start.elapsed().as_secs_f64();
    let mut samples = vec![first];
    if first < 0.05 {
        let reps = 5usize.max((0.05 / first.max(1e-9)).ceil() as usize).min(1000);
        for _ in 1..reps {
            let s = Instant::now();
            value = task();
            samples.push(s.elapsed().as_secs_f64());
        }
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = samples[samples.len() / 2];
    let mut deviations: Vec<f64> = samples.iter().map(|s| (s - median).abs()).collect();
    deviations.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let spread = deviations[deviations.len() / 2];
    Timed { value, median_secs: median, spread_secs: spread, reps: samples.len() }
}
