//! Noise-schedule design from the density of log-SNR.
//!
//! A schedule is described by the density `p(λ)` it induces over the log
//! signal-to-noise ratio `λ = log(α²/σ²)` when training time `t` is drawn
//! uniformly. The two views are linked by `t = P(λ) = 1 - ∫_{-∞}^{λ} p`, so
//! any density can be turned into a schedule `λ(t) = P⁻¹(t)` and vice versa.
//!
//! Modules:
//!
//! - [`schedule`]: densities, survival functions, inverse schedules and the
//!   variance-preserving coefficients for nine schedule families.
//! - [`weighting`]: loss weights `w(λ)` and the importance coefficient `w/p`.
//! - [`toydiff`]: a 2D diffusion lab (datasets, MLP with hand-written
//!   reverse-mode gradients, Adam training loop).
//! - [`sampler`]: deterministic DDIM with log-SNR aligned step plans.
//! - [`eval`]: sliced Wasserstein, energy distance, KS conformance and the
//!   multi-config comparison driver.
//! - [`report`]: CSV writers for traces, plans, samples and comparisons.

pub mod error;
pub mod eval;
pub mod report;
pub mod sampler;
pub mod schedule;
pub mod toydiff;
pub mod weighting;

pub use error::{Error, Result};
pub use schedule::{alpha_sigma, poly_time_warp, Family, ScheduleReport, ScheduleSpec, VpCoeffs};
pub use weighting::WeightStrategy;

/// A point in the plane.
pub type Point = [f64; 2];
