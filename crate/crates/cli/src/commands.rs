use serde::Serialize;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snrforge::eval::{compare_schedules, CompareOptions, ConfigOutcome, DEFAULT_PROJECTIONS};
use snrforge::sampler::{build_plan, sample as draw_samples};
use snrforge::schedule::validate_schedule;
use snrforge::toydiff::{checkpoint, TraceRow, TrainState};
use snrforge::{alpha_sigma, report, Family, ScheduleReport, ScheduleSpec};

use crate::config::{check_shared_protocol, parse_run_config, RunConfig};
use crate::{CliError, PointFormat, Preset, SpecArg};

pub const MAX_NORMALIZATION_ERROR: f64 = 1e-4;
pub const MAX_ROUNDTRIP_ERROR: f64 = 1e-6;
pub const MAX_DERIVATIVE_ERROR: f64 = 1e-3;

/// Inline JSON if it looks like an object, otherwise a file path.
fn read_json_arg(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read `{arg}`: {e}")))
    }
}

fn parse_spec(arg: &str) -> Result<ScheduleSpec, CliError> {
    ScheduleSpec::from_json(&read_json_arg(arg)?).map_err(|e| CliError::Input(format!("schedule: {e}")))
}

fn resolve_spec(arg: &SpecArg) -> Result<ScheduleSpec, CliError> {
    let spec = match (&arg.spec, arg.preset) {
        (Some(s), _) => return parse_spec(s),
        (None, Some(Preset::LaplaceBest)) => ScheduleSpec::laplace(0.0, 0.5),
        (None, Some(Preset::CauchyBest)) => ScheduleSpec::cauchy(0.0, 0.5),
        (None, Some(Preset::CosineScaledBest)) => ScheduleSpec::new(Family::CosineScaled { s: 2.0 }),
        (None, None) => return Err(CliError::Input("one of --spec or --preset is required".into())),
    };
    Ok(spec?)
}

/// Writes to `path`, or stdout when absent.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Input(format!("csv: {e}"))
}

pub fn schedule_plot(
    arg: &SpecArg,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    points: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let spec = resolve_spec(arg)?;
    if points < 2 {
        return Err(CliError::Input(format!("--points = {points} must be >= 2")));
    }
    let lo = lambda_min.unwrap_or(spec.lambda_min());
    let hi = lambda_max.unwrap_or(spec.lambda_max());
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Input(format!("λ range [{lo}, {hi}] must be finite with min < max")));
    }
    with_output(out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["lambda", "pdf", "survival", "alpha", "sigma"]).map_err(csv_err)?;
        for k in 0..points {
            let lam = if k + 1 == points { hi } else { lo + (hi - lo) * k as f64 / (points - 1) as f64 };
            let c = alpha_sigma(lam);
            csv.serialize((lam, spec.pdf(lam), spec.survival(lam), c.alpha, c.sigma)).map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    })
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    schedule: &'a ScheduleSpec,
    report: &'a ScheduleReport,
    passed: bool,
    failures: Vec<&'static str>,
}

pub fn threshold_failures(r: &ScheduleReport) -> Vec<&'static str> {
    let mut failed = vec![];
    if !(r.normalization_error < MAX_NORMALIZATION_ERROR) {
        failed.push("normalization_error");
    }
    if !(r.max_roundtrip_error < MAX_ROUNDTRIP_ERROR) {
        failed.push("max_roundtrip_error");
    }
    if !(r.max_density_vs_derivative_error < MAX_DERIVATIVE_ERROR) {
        failed.push("max_density_vs_derivative_error");
    }
    failed
}

pub fn validate(arg: &SpecArg, grid: usize) -> Result<(), CliError> {
    let spec = resolve_spec(arg)?;
    let report = validate_schedule(&spec, grid)?;
    let failures = threshold_failures(&report);
    let out = ValidateOutput { schedule: &spec, report: &report, passed: failures.is_empty(), failures: failures.clone() };
    println!("{}", serde_json::to_string_pretty(&out)?);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Threshold(format!("threshold exceeded: {}", failures.join(", "))))
    }
}

pub fn sample_lambda(arg: &SpecArg, n: usize, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let spec = resolve_spec(arg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    with_output(out, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["t", "lambda"]).map_err(csv_err)?;
        for _ in 0..n {
            let t: f64 = rng.random();
            csv.serialize((t, spec.lambda_of_t(t)?)).map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn write_trace_file(path: &Path, rows: &[TraceRow]) -> Result<(), CliError> {
    report::write_trace(io::BufWriter::new(fs::File::create(path)?), rows)?;
    Ok(())
}

#[derive(Serialize)]
struct TrainOutput {
    step: u64,
    final_loss: f64,
    checkpoint: String,
    trace: String,
}

pub fn train(config: &Path, ckpt: &Path, trace_path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config).map_err(|e| CliError::Input(format!("cannot read {}: {e}", config.display())))?;
    let cfg = parse_run_config(&text)?;
    let (data, _) = cfg.datasets()?;
    let mut state = TrainState::new(cfg.train_config())?;
    let mut trace = vec![];
    let mut last = None;
    for _ in 0..cfg.iterations {
        match state.train_step(&data) {
            Ok(row) => {
                if row.step % cfg.log_every == 0 || row.step == cfg.iterations {
                    trace.push(row);
                }
                last = Some(row);
            }
            Err(e) => {
                write_trace_file(trace_path, &trace)?;
                return Err(e.into());
            }
        }
    }
    write_trace_file(trace_path, &trace)?;
    checkpoint::save(&state, ckpt)?;
    let out = TrainOutput {
        step: state.step,
        final_loss: last.map_or(f64::NAN, |r| r.loss),
        checkpoint: ckpt.display().to_string(),
        trace: trace_path.display().to_string(),
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(())
}

pub struct SampleArgs<'a> {
    pub checkpoint: &'a Path,
    pub schedule: Option<&'a str>,
    pub override_schedule: bool,
    pub steps: usize,
    pub t_max: f64,
    pub n: usize,
    pub seed: u64,
    pub out: &'a Path,
    pub format: PointFormat,
    pub plan_out: Option<&'a Path>,
}

pub fn sample(a: SampleArgs<'_>) -> Result<(), CliError> {
    let state = checkpoint::load(a.checkpoint)?;
    let trained = state.config.schedule;
    let schedule = match a.schedule {
        None => trained,
        Some(s) => {
            let spec = parse_spec(s)?;
            if spec != trained && !a.override_schedule {
                return Err(CliError::Input(format!(
                    "--schedule {} differs from the checkpoint's {}; pass --override-schedule to sample anyway",
                    spec.to_json(),
                    trained.to_json()
                )));
            }
            spec
        }
    };
    let plan = build_plan(&schedule, a.steps, a.t_max)?;
    let points = draw_samples(&state, &plan, a.n, a.seed)?;
    let file = io::BufWriter::new(fs::File::create(a.out)?);
    match a.format {
        PointFormat::Csv => report::write_points(file, &points)?,
        PointFormat::Json => serde_json::to_writer(file, &points)?,
    }
    if let Some(p) = a.plan_out {
        report::write_plan(io::BufWriter::new(fs::File::create(p)?), &plan)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ConfigSummary {
    config_id: usize,
    schedule: ScheduleSpec,
    weighting: snrforge::WeightStrategy,
    target: snrforge::toydiff::PredictTarget,
    final_step: Option<u64>,
    final_sliced_wasserstein: Option<f64>,
    final_energy_distance: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct TargetBest {
    target: snrforge::toydiff::PredictTarget,
    /// Every config sharing the lowest final sliced-Wasserstein.
    best_config_ids: Vec<usize>,
    best_sliced_wasserstein: f64,
}

#[derive(Serialize)]
struct CompareSummary {
    configs: Vec<ConfigSummary>,
    best_by_target: Vec<TargetBest>,
}

fn summarize(outcomes: &[ConfigOutcome]) -> CompareSummary {
    let configs = outcomes
        .iter()
        .map(|o| {
            let last = o.final_row();
            ConfigSummary {
                config_id: o.config_id,
                schedule: o.config.schedule,
                weighting: o.config.weighting.clone(),
                target: o.config.target,
                final_step: last.map(|r| r.step),
                final_sliced_wasserstein: last.map(|r| r.sliced_wasserstein),
                final_energy_distance: last.map(|r| r.energy_distance),
                error: o.error.clone(),
            }
        })
        .collect::<Vec<_>>();

    let mut targets = vec![];
    for o in outcomes {
        if !targets.contains(&o.config.target) {
            targets.push(o.config.target);
        }
    }
    let best_by_target = targets
        .into_iter()
        .filter_map(|target| {
            // Only configs that completed compete.
            let finished: Vec<(usize, f64)> = outcomes
                .iter()
                .filter(|o| o.config.target == target && o.error.is_none())
                .filter_map(|o| o.final_row().map(|r| (o.config_id, r.sliced_wasserstein)))
                .collect();
            let best = finished.iter().map(|&(_, v)| v).min_by(f64::total_cmp)?;
            Some(TargetBest {
                target,
                best_config_ids: finished.iter().filter(|&&(_, v)| v == best).map(|&(k, _)| k).collect(),
                best_sliced_wasserstein: best,
            })
        })
        .collect();
    CompareSummary { configs, best_by_target }
}

pub fn compare(configs_path: &Path, out: &Path, summary_path: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(configs_path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", configs_path.display())))?;
    let raw: Vec<serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("configs must be a JSON array: {e}")))?;
    if raw.len() < 2 {
        return Err(CliError::Input(format!("compare needs at least 2 configs, got {}", raw.len())));
    }
    let configs = raw
        .iter()
        .enumerate()
        .map(|(k, v)| {
            parse_run_config(&v.to_string()).map_err(|e| CliError::Input(format!("config {k}: {e}")))
        })
        .collect::<Result<Vec<RunConfig>, _>>()?;
    check_shared_protocol(&configs)?;

    let first = &configs[0];
    let (data, reference) = first.datasets()?;
    let opts = CompareOptions {
        iterations: first.iterations,
        eval_every: first.eval_every,
        n_eval: first.n_eval,
        steps: first.sampler_steps,
        t_max: first.t_max,
        n_projections: DEFAULT_PROJECTIONS,
        seed: first.seed,
    };
    let train_configs: Vec<_> = configs.iter().map(RunConfig::train_config).collect();
    let outcomes = compare_schedules(&train_configs, &data, &reference, &opts)?;

    report::write_compare(io::BufWriter::new(fs::File::create(out)?), &outcomes)?;
    let summary = summarize(&outcomes);
    fs::write(summary_path, serde_json::to_string_pretty(&summary)?)?;
    println!("{}", serde_json::to_string(&summary.best_by_target)?);

    let failed: Vec<String> =
        outcomes.iter().filter_map(|o| o.error.as_ref().map(|e| format!("config {}: {e}", o.config_id))).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Divergence(failed.join("; ")))
    }
}
