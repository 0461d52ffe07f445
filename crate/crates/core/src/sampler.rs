//! Deterministic DDIM with log-SNR aligned step plans.
//!
//! Every schedule is sampled at the λ sequence the cosine schedule visits on
//! a uniform time grid. Each schedule conditions its network on its own time
//! `t′ = P(λ)` for those λ, so comparisons differ only in what the network
//! learned, never in the noise levels visited.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schedule::{alpha_sigma, ScheduleSpec};
use crate::toydiff::frame::{to_eps_residual, to_x0, PredictTarget};
use crate::toydiff::TrainState;
use crate::Point;

pub const DEFAULT_T_MAX: f64 = 0.99;

/// Points advanced together through the network.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanRow {
    pub i: usize,
    pub t: f64,
    pub lambda: f64,
    pub t_prime: f64,
    pub alpha: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub steps: usize,
    pub t_max: f64,
    /// Cosine grid times `t_max · (1 - i/steps)`, `i = 0..=steps`.
    pub times: Vec<f64>,
    /// Increasing along the trajectory.
    pub lambdas: Vec<f64>,
    /// Conditioning times for the plan's schedule.
    pub t_primes: Vec<f64>,
    pub schedule: ScheduleSpec,
}

impl SamplePlan {
    pub fn rows(&self) -> Vec<PlanRow> {
        (0..=self.steps)
            .map(|i| {
                let c = alpha_sigma(self.lambdas[i]);
                PlanRow {
                    i,
                    t: self.times[i],
                    lambda: self.lambdas[i],
                    t_prime: self.t_primes[i],
                    alpha: c.alpha,
                    sigma: c.sigma,
                }
            })
            .collect()
    }
}

/// Survival with the clamp made explicit: λ on or beyond a bound maps to the
/// matching end of `[0, 1]`, as `λ(t)` does.
fn clamped_survival(schedule: &ScheduleSpec, lam: f64) -> f64 {
    let (lo, hi) = schedule.clamp();
    if lam <= lo {
        1.0
    } else if lam >= hi {
        0.0
    } else {
        schedule.survival(lam)
    }
}

/// Plan for `schedule` with λ taken from the cosine schedule on the same clamp.
pub fn build_plan(schedule: &ScheduleSpec, steps: usize, t_max: f64) -> Result<SamplePlan> {
    if steps == 0 {
        return Err(Error::domain("steps must be >= 1"));
    }
    if !(t_max > 0.0 && t_max <= 1.0) {
        return Err(Error::ParameterDomain { name: "t_max", value: t_max, reason: "must lie in (0, 1]" });
    }
    let (lo, hi) = schedule.clamp();
    let cosine = ScheduleSpec::cosine().reclamped(lo, hi)?;
    let times: Vec<f64> = (0..=steps).map(|i| t_max * (1.0 - i as f64 / steps as f64)).collect();
    let lambdas = times.iter().map(|&t| cosine.lambda_of_t(t)).collect::<Result<Vec<_>>>()?;
    let t_primes = lambdas.iter().map(|&l| clamped_survival(schedule, l)).collect();
    Ok(SamplePlan { steps, t_max, times, lambdas, t_primes, schedule: *schedule })
}

/// `α(λ_next) x̂₀ + σ(λ_next) ε̂`.
pub fn ddim_step(x0_hat: Point, eps_hat: Point, lam_next: f64) -> Point {
    let c = alpha_sigma(lam_next);
    [c.alpha * x0_hat[0] + c.sigma * eps_hat[0], c.alpha * x0_hat[1] + c.sigma * eps_hat[1]]
}

/// Anything that predicts a regression target from a noisy batch.
pub trait Denoiser: Sync {
    fn target(&self) -> PredictTarget;
    /// Predictions for `xs`, all at conditioning time `t` and log-SNR `lambda`.
    fn predict_batch(&self, xs: &[Point], t: f64, lambda: f64) -> Vec<Point>;
}

impl Denoiser for TrainState {
    fn target(&self) -> PredictTarget {
        self.config.target
    }

    fn predict_batch(&self, xs: &[Point], t: f64, _lambda: f64) -> Vec<Point> {
        self.predict(xs, &vec![t; xs.len()])
    }
}

/// `(x̂₀, ε̂)` implied by a prediction.
pub fn decompose(target: PredictTarget, pred: Point, x_t: Point, lam: f64) -> Result<(Point, Point)> {
    Ok((to_x0(target, pred, x_t, lam)?, to_eps_residual(target, pred, x_t, lam)?))
}

/// Initial noise for point `index`: its own ChaCha stream under `seed`.
pub fn initial_noise(seed: u64, index: usize) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    [rng.sample(StandardNormal), rng.sample(StandardNormal)]
}

fn run_chunk(model: &dyn Denoiser, plan: &SamplePlan, mut xs: Vec<Point>) -> Result<Vec<Point>> {
    let target = model.target();
    for i in 0..plan.steps {
        let lam = plan.lambdas[i];
        let preds = model.predict_batch(&xs, plan.t_primes[i], lam);
        let last = i + 1 == plan.steps;
        for (x, pred) in xs.iter_mut().zip(preds) {
            let (x0, eps) = decompose(target, pred, *x, lam).map_err(|_| Error::SamplingDivergence { step: i })?;
            *x = if last { x0 } else { ddim_step(x0, eps, plan.lambdas[i + 1]) };
            if !(x[0].is_finite() && x[1].is_finite()) {
                return Err(Error::SamplingDivergence { step: i });
            }
        }
    }
    Ok(xs)
}

/// Draws `n` points from `x ~ N(0, I)` along the plan; the last step returns
/// `x̂₀`. Output is independent of thread count.
pub fn sample(model: &dyn Denoiser, plan: &SamplePlan, n: usize, seed: u64) -> Result<Vec<Point>> {
    let starts: Vec<Point> = (0..n).map(|i| initial_noise(seed, i)).collect();
    let chunks = starts
        .par_chunks(CHUNK)
        .map(|c| run_chunk(model, plan, c.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.into_iter().flatten().collect())
}
