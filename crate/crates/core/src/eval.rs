//! Two-sample distances for 2D point clouds, KS conformance of λ samplers and
//! the multi-config training comparison.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sampler::{build_plan, sample, DEFAULT_T_MAX};
use crate::schedule::ScheduleSpec;
use crate::toydiff::{Dataset2D, TrainConfig, TrainState};
use crate::Point;

pub const DEFAULT_PROJECTIONS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub sliced_wasserstein: f64,
    pub energy_distance: f64,
    pub n_generated: usize,
    pub n_reference: usize,
    pub seed: u64,
}

/// Exact W1 between two empirical distributions on the line:
/// `∫ |F_a - F_b|` over the merged support.
pub fn wasserstein_1d(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut acc = 0.0;
    let mut prev = a[0].min(b[0]);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        acc += (i as f64 / na - j as f64 / nb).abs() * (next - prev);
        while i < a.len() && a[i] == next {
            i += 1;
        }
        while j < b.len() && b[j] == next {
            j += 1;
        }
        prev = next;
    }
    acc
}

fn check_nonempty(a: &[Point], b: &[Point]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("point sets must be non-empty"));
    }
    Ok(())
}

/// Mean 1-D Wasserstein-1 distance over `n_projections` random directions.
pub fn sliced_wasserstein(a: &[Point], b: &[Point], n_projections: usize, seed: u64) -> Result<f64> {
    check_nonempty(a, b)?;
    if n_projections == 0 {
        return Err(Error::domain("n_projections must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<(f64, f64)> = (0..n_projections).map(|_| (2.0 * PI * rng.random::<f64>()).sin_cos()).collect();
    let per: Vec<f64> = dirs
        .par_iter()
        .map(|&(s, c)| {
            let mut pa: Vec<f64> = a.iter().map(|p| c * p[0] + s * p[1]).collect();
            let mut pb: Vec<f64> = b.iter().map(|p| c * p[0] + s * p[1]).collect();
            wasserstein_1d(&mut pa, &mut pb)
        })
        .collect();
    Ok(per.iter().sum::<f64>() / n_projections as f64)
}

fn mean_pairwise(a: &[Point], b: &[Point]) -> f64 {
    let rows: Vec<f64> = a
        .par_iter()
        .map(|p| b.iter().map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()).sum::<f64>())
        .collect();
    rows.iter().sum::<f64>() / (a.len() as f64 * b.len() as f64)
}

/// Energy distance `2E‖X-Y‖ - E‖X-X′‖ - E‖Y-Y′‖` (V-statistic, ≥ 0).
pub fn energy_distance(a: &[Point], b: &[Point]) -> Result<f64> {
    check_nonempty(a, b)?;
    let d = 2.0 * mean_pairwise(a, b) - mean_pairwise(a, a) - mean_pairwise(b, b);
    Ok(d.max(0.0))
}

pub fn evaluate(generated: &[Point], reference: &[Point], n_projections: usize, seed: u64) -> Result<EvalReport> {
    Ok(EvalReport {
        sliced_wasserstein: sliced_wasserstein(generated, reference, n_projections, seed)?,
        energy_distance: energy_distance(generated, reference)?,
        n_generated: generated.len(),
        n_reference: reference.len(),
        seed,
    })
}

/// KS statistic of `λ(U)` against the law of the clamped log-SNR.
///
/// Clamping puts atoms at both bounds, so the reference CDF is
/// `1 - P(λ)` inside the range, `0` below and `1` at the upper bound; both
/// one-sided limits are checked at every distinct sample value.
pub fn ks_conformance(spec: &ScheduleSpec, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples < 1000 {
        return Err(Error::domain(format!("n_samples = {n_samples} must be >= 1000")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lams = (0..n_samples).map(|_| spec.lambda_of_t(rng.random::<f64>())).collect::<Result<Vec<_>>>()?;
    lams.sort_by(f64::total_cmp);
    let (lo, hi) = spec.clamp();
    let cdf = |l: f64| {
        if l < lo {
            0.0
        } else if l >= hi {
            1.0
        } else {
            1.0 - spec.survival(l)
        }
    };
    let left = |l: f64| {
        if l <= lo {
            0.0
        } else if l > hi {
            1.0
        } else {
            1.0 - spec.survival(l)
        }
    };
    let n = n_samples as f64;
    let mut stat = 0.0f64;
    let mut k = 0;
    while k < lams.len() {
        let v = lams[k];
        let below = k as f64 / n;
        while k < lams.len() && lams[k] == v {
            k += 1;
        }
        let upto = k as f64 / n;
        stat = stat.max((upto - cdf(v)).abs()).max((below - left(v)).abs());
    }
    Ok(stat)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub iterations: u64,
    pub eval_every: u64,
    pub n_eval: usize,
    pub steps: usize,
    pub t_max: f64,
    pub n_projections: usize,
    /// Shared by every config: data, time and noise streams, sampling noise
    /// and projection directions.
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            iterations: 20_000,
            eval_every: 4_000,
            n_eval: 2_000,
            steps: 50,
            t_max: DEFAULT_T_MAX,
            n_projections: DEFAULT_PROJECTIONS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub step: u64,
    pub sliced_wasserstein: f64,
    pub energy_distance: f64,
}

#[derive(Debug, Clone)]
pub struct ConfigOutcome {
    pub config_id: usize,
    pub config: TrainConfig,
    pub rows: Vec<CompareRow>,
    /// Set when training or sampling failed; `rows` holds checkpoints reached.
    pub error: Option<String>,
}

impl ConfigOutcome {
    pub fn final_row(&self) -> Option<&CompareRow> {
        self.rows.last()
    }
}

fn run_one(config_id: usize, config: &TrainConfig, train: &Dataset2D, reference: &[Point], opts: &CompareOptions) -> ConfigOutcome {
    let mut config = config.clone();
    config.seed = opts.seed;
    let mut out = ConfigOutcome { config_id, config: config.clone(), rows: vec![], error: None };
    let result = (|| -> Result<()> {
        let plan = build_plan(&config.schedule, opts.steps, opts.t_max)?;
        let mut state = TrainState::new(config.clone())?;
        let mut scratch = vec![];
        while state.step < opts.iterations {
            let chunk = opts.eval_every.min(opts.iterations - state.step);
            state.run(train, chunk, u64::MAX, &mut scratch)?;
            let generated = sample(&state, &plan, opts.n_eval, opts.seed)?;
            let r = evaluate(&generated, reference, opts.n_projections, opts.seed)?;
            out.rows.push(CompareRow {
                step: state.step,
                sliced_wasserstein: r.sliced_wasserstein,
                energy_distance: r.energy_distance,
            });
        }
        Ok(())
    })();
    out.error = result.err().map(|e| e.to_string());
    out
}

/// Trains every config under common random numbers and evaluates each at
/// every `eval_every` steps against `reference`. A failing config keeps its
/// partial rows and an error message; the others still run.
pub fn compare_schedules(
    configs: &[TrainConfig],
    train: &Dataset2D,
    reference: &[Point],
    opts: &CompareOptions,
) -> Result<Vec<ConfigOutcome>> {
    if configs.len() < 2 {
        return Err(Error::domain("compare needs at least 2 configs"));
    }
    if opts.iterations == 0 || opts.eval_every == 0 || opts.n_eval == 0 {
        return Err(Error::domain("iterations, eval_every and n_eval must be >= 1"));
    }
    if reference.is_empty() {
        return Err(Error::domain("reference set must be non-empty"));
    }
    for c in configs {
        c.validate()?;
    }
    Ok(configs
        .par_iter()
        .enumerate()
        .map(|(k, c)| run_one(k, c, train, reference, opts))
        .collect())
}
