use serde::{Deserialize, Serialize};

use snrforge::sampler::DEFAULT_T_MAX;
use snrforge::toydiff::{make_dataset, DatasetKind, MlpShape, PredictTarget, TrainConfig};
use snrforge::{Point, ScheduleSpec, WeightStrategy};

use crate::CliError;

fn default_dataset_size() -> usize {
    8192
}
fn default_holdout() -> usize {
    2000
}
fn default_hidden() -> usize {
    128
}
fn default_freqs() -> usize {
    16
}
fn default_steps() -> usize {
    50
}
fn default_t_max() -> f64 {
    DEFAULT_T_MAX
}
fn default_eval_every() -> u64 {
    4000
}
fn default_n_eval() -> usize {
    2000
}
fn default_log_every() -> u64 {
    100
}

/// One training run as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schedule: ScheduleSpec,
    pub weighting: WeightStrategy,
    pub target: PredictTarget,
    pub dataset: DatasetKind,
    pub iterations: u64,
    pub batch: usize,
    pub lr: f64,
    pub seed: u64,
    #[serde(default = "default_dataset_size")]
    pub dataset_size: usize,
    /// Points held out from training as the evaluation reference.
    #[serde(default = "default_holdout")]
    pub holdout: usize,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_freqs")]
    pub freqs: usize,
    #[serde(default = "default_steps")]
    pub sampler_steps: usize,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_eval_every")]
    pub eval_every: u64,
    #[serde(default = "default_n_eval")]
    pub n_eval: usize,
    #[serde(default = "default_log_every")]
    pub log_every: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.train_config().validate()?;
        let bad = |msg: &str| Err(CliError::Input(msg.to_string()));
        if self.iterations == 0 {
            return bad("`iterations` must be >= 1");
        }
        if self.dataset_size == 0 {
            return bad("`dataset_size` must be >= 1");
        }
        if self.sampler_steps == 0 {
            return bad("`sampler_steps` must be >= 1");
        }
        if !(self.t_max > 0.0 && self.t_max <= 1.0) {
            return bad("`t_max` must lie in (0, 1]");
        }
        if self.eval_every == 0 || self.n_eval == 0 || self.log_every == 0 {
            return bad("`eval_every`, `n_eval` and `log_every` must be >= 1");
        }
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            schedule: self.schedule,
            weighting: self.weighting.clone(),
            target: self.target,
            lr: self.lr,
            batch: self.batch,
            seed: self.seed,
            shape: MlpShape { hidden: self.hidden, freqs: self.freqs },
        }
    }

    /// Training points and the held-out reference, both from one draw.
    pub fn datasets(&self) -> Result<(snrforge::toydiff::Dataset2D, Vec<Point>), CliError> {
        let all = make_dataset(self.dataset, self.dataset_size + self.holdout, self.seed)?;
        if self.holdout == 0 {
            return Ok((all, vec![]));
        }
        Ok(all.split_holdout(self.holdout)?)
    }
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Fields every config in a comparison must share.
pub fn check_shared_protocol(configs: &[RunConfig]) -> Result<(), CliError> {
    let first = &configs[0];
    for (k, c) in configs.iter().enumerate().skip(1) {
        let mismatch = [
            ("dataset", c.dataset != first.dataset),
            ("dataset_size", c.dataset_size != first.dataset_size),
            ("holdout", c.holdout != first.holdout),
            ("iterations", c.iterations != first.iterations),
            ("seed", c.seed != first.seed),
            ("sampler_steps", c.sampler_steps != first.sampler_steps),
            ("t_max", c.t_max != first.t_max),
            ("eval_every", c.eval_every != first.eval_every),
            ("n_eval", c.n_eval != first.n_eval),
        ];
        if let Some((field, _)) = mismatch.iter().find(|(_, differs)| *differs) {
            return Err(CliError::Input(format!("config {k}: `{field}` differs from config 0; compare needs a shared protocol")));
        }
    }
    if first.holdout == 0 {
        return Err(CliError::Input("compare needs `holdout` >= 1 for the reference set".into()));
    }
    Ok(())
}
