use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset2D;
use super::frame::{eps_jacobian, forward_noise, to_eps_residual, PredictTarget};
use super::mlp::{self, MlpShape};
use crate::error::{Error, Result};
use crate::schedule::ScheduleSpec;
use crate::weighting::WeightStrategy;
use crate::Point;

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// ChaCha stream ids derived from one seed, so that ablations can vary one
/// factor while the others stay fixed.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Stream {
    Data = 0,
    Time = 1,
    Noise = 2,
    Init = 3,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn default_lr() -> f64 {
    1e-4
}

fn default_batch() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub schedule: ScheduleSpec,
    pub weighting: WeightStrategy,
    pub target: PredictTarget,
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_batch")]
    pub batch: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub shape: MlpShape,
}

impl TrainConfig {
    /// Adam at lr 1e-4, batch 256, seed 0, default network.
    pub fn new(schedule: ScheduleSpec, weighting: WeightStrategy, target: PredictTarget) -> Self {
        TrainConfig {
            schedule,
            weighting,
            target,
            lr: default_lr(),
            batch: default_batch(),
            seed: 0,
            shape: MlpShape::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weighting.validate()?;
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::ParameterDomain { name: "lr", value: self.lr, reason: "must be finite and > 0" });
        }
        if self.batch == 0 {
            return Err(Error::domain("batch must be >= 1"));
        }
        if self.shape.hidden == 0 {
            return Err(Error::domain("hidden width must be >= 1"));
        }
        Ok(())
    }
}

/// One minibatch: clean points, uniform times and Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub x: Vec<Point>,
    pub t: Vec<f64>,
    pub eps: Vec<Point>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Rngs {
    pub data: ChaCha8Rng,
    pub time: ChaCha8Rng,
    pub noise: ChaCha8Rng,
}

impl Rngs {
    pub fn new(seed: u64) -> Self {
        Rngs {
            data: stream_rng(seed, Stream::Data),
            time: stream_rng(seed, Stream::Time),
            noise: stream_rng(seed, Stream::Noise),
        }
    }

    /// Draws `n` points with replacement, `t ~ U[0, 1)` and `ε ~ N(0, I)`.
    pub fn draw(&mut self, data: &[Point], n: usize) -> Batch {
        let x = (0..n).map(|_| data[self.data.random_range(0..data.len())]).collect();
        let t = (0..n).map(|_| self.time.random::<f64>()).collect();
        let eps = (0..n)
            .map(|_| [self.noise.sample(StandardNormal), self.noise.sample(StandardNormal)])
            .collect();
        Batch { x, t, eps }
    }
}

/// Batch loss with gradient and the mean log-SNR of the batch.
#[derive(Debug, Clone)]
pub struct LossEval {
    pub loss: f64,
    pub grads: Vec<f64>,
    pub lambda_mean: f64,
}

/// Everything the loss needs about the model and objective.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    pub shape: &'a MlpShape,
    pub target: PredictTarget,
    pub weighting: &'a WeightStrategy,
}

/// Per-sample losses `m(λ) · ½‖ε̂ - ε‖²` where `m` is the weighting's loss
/// multiplier. The network is conditioned on `t_cond`; `lambdas` sets the
/// noise level. With `want_grad` the gradient of the batch mean is returned.
pub fn weighted_losses(
    obj: Objective<'_>,
    params: &[f64],
    xs: &[Point],
    eps: &[Point],
    lambdas: &[f64],
    t_cond: &[f64],
    want_grad: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = xs.len();
    if n == 0 {
        return Err(Error::domain("batch must be non-empty"));
    }
    let x_t: Vec<Point> = (0..n).map(|i| forward_noise(xs[i], lambdas[i], eps[i])).collect();
    let (out, cache) = mlp::forward_batch(obj.shape, params, &x_t, t_cond);
    let mut terms = Vec::with_capacity(n);
    let mut grad_out = Array2::zeros((n, 2));
    for i in 0..n {
        let pred = [out[[i, 0]], out[[i, 1]]];
        let eps_hat = to_eps_residual(obj.target, pred, x_t[i], lambdas[i])?;
        let r = [eps_hat[0] - eps[i][0], eps_hat[1] - eps[i][1]];
        let m = obj.weighting.loss_multiplier(lambdas[i])?;
        terms.push(0.5 * m * (r[0] * r[0] + r[1] * r[1]));
        let g = m * eps_jacobian(obj.target, lambdas[i]) / n as f64;
        grad_out[[i, 0]] = g * r[0];
        grad_out[[i, 1]] = g * r[1];
    }
    let grads = want_grad.then(|| mlp::backward(obj.shape, params, &cache, &grad_out));
    Ok((terms, grads))
}

/// Training loss on a batch: `λᵢ = λ(tᵢ)` under the config's schedule and
/// the network conditioned on `tᵢ`.
pub fn loss_and_grad(params: &[f64], config: &TrainConfig, batch: &Batch) -> Result<LossEval> {
    let lambdas = batch.t.iter().map(|&t| config.schedule.lambda_of_t(t)).collect::<Result<Vec<_>>>()?;
    let obj = Objective { shape: &config.shape, target: config.target, weighting: &config.weighting };
    let (terms, grads) = weighted_losses(obj, params, &batch.x, &batch.eps, &lambdas, &batch.t, true)?;
    let n = terms.len() as f64;
    Ok(LossEval {
        loss: terms.iter().sum::<f64>() / n,
        grads: grads.expect("requested"),
        lambda_mean: lambdas.iter().sum::<f64>() / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: u64,
    pub loss: f64,
    pub lambda_mean: f64,
}

/// Model parameters, Adam moments and RNG streams of one training run.
#[derive(Debug, Clone)]
pub struct TrainState {
    pub config: TrainConfig,
    pub params: Vec<f64>,
    pub adam_m: Vec<f64>,
    pub adam_v: Vec<f64>,
    pub step: u64,
    pub rngs: Rngs,
}

impl TrainState {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let params = config.shape.init(&mut stream_rng(config.seed, Stream::Init));
        let n = params.len();
        Ok(TrainState {
            rngs: Rngs::new(config.seed),
            config,
            params,
            adam_m: vec![0.0; n],
            adam_v: vec![0.0; n],
            step: 0,
        })
    }

    /// One Adam step on a fresh batch.
    pub fn train_step(&mut self, data: &Dataset2D) -> Result<TraceRow> {
        let batch = self.rngs.draw(&data.points, self.config.batch);
        let eval = loss_and_grad(&self.params, &self.config, &batch)?;
        let step = self.step + 1;
        if !eval.loss.is_finite() || eval.grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::TrainingDivergence { step, loss: eval.loss });
        }
        let lr = self.config.lr;
        let c1 = 1.0 - ADAM_BETA1.powf(step as f64);
        let c2 = 1.0 - ADAM_BETA2.powf(step as f64);
        for (k, &g) in eval.grads.iter().enumerate() {
            let m = ADAM_BETA1 * self.adam_m[k] + (1.0 - ADAM_BETA1) * g;
            let v = ADAM_BETA2 * self.adam_v[k] + (1.0 - ADAM_BETA2) * g * g;
            self.adam_m[k] = m;
            self.adam_v[k] = v;
            self.params[k] -= lr * (m / c1) / ((v / c2).sqrt() + ADAM_EPS);
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDivergence { step, loss: eval.loss });
        }
        self.step = step;
        Ok(TraceRow { step, loss: eval.loss, lambda_mean: eval.lambda_mean })
    }

    /// Runs `iterations` steps, appending a trace row every `log_every` steps.
    /// On divergence the rows logged so far stay in `trace`.
    pub fn run(&mut self, data: &Dataset2D, iterations: u64, log_every: u64, trace: &mut Vec<TraceRow>) -> Result<()> {
        let log_every = log_every.max(1);
        for _ in 0..iterations {
            let row = self.train_step(data)?;
            if row.step % log_every == 0 {
                trace.push(row);
            }
        }
        Ok(())
    }

    pub fn predict(&self, xs: &[Point], ts: &[f64]) -> Vec<Point> {
        mlp::predict(&self.config.shape, &self.params, xs, ts)
    }
}

/// Fresh state trained for `iterations ≥ 1` steps.
pub fn train(config: TrainConfig, data: &Dataset2D, iterations: u64, log_every: u64) -> Result<(TrainState, Vec<TraceRow>)> {
    if iterations == 0 {
        return Err(Error::domain("iterations must be >= 1"));
    }
    let mut state = TrainState::new(config)?;
    let mut trace = Vec::new();
    state.run(data, iterations, log_every, &mut trace)?;
    Ok((state, trace))
}
