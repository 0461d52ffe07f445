//! Variance-preserving frame algebra: noising, regression targets and
//! conversions between ε, x₀ and v predictions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{alpha_sigma, VpCoeffs};
use crate::Point;

/// `σ` below this makes x₀ ↔ ε conversion meaningless.
pub const SIGMA_FLOOR: f64 = 1e-150;
/// `α` below this makes ε ↔ x₀ conversion meaningless.
pub const ALPHA_FLOOR: f64 = 1e-150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictTarget {
    Epsilon,
    X0,
    V,
}

impl PredictTarget {
    pub fn name(&self) -> &'static str {
        match self {
            PredictTarget::Epsilon => "epsilon",
            PredictTarget::X0 => "x0",
            PredictTarget::V => "v",
        }
    }
}

fn axpby(a: f64, x: Point, b: f64, y: Point) -> Point {
    [a * x[0] + b * y[0], a * x[1] + b * y[1]]
}

/// `x_t = α x + σ ε`.
pub fn forward_noise(x: Point, lam: f64, eps: Point) -> Point {
    let VpCoeffs { alpha, sigma } = alpha_sigma(lam);
    axpby(alpha, x, sigma, eps)
}

/// Regression target for a clean point `x` noised with `eps` at `lam`.
pub fn make_target(target: PredictTarget, x: Point, eps: Point, lam: f64) -> Point {
    match target {
        PredictTarget::Epsilon => eps,
        PredictTarget::X0 => x,
        PredictTarget::V => {
            let VpCoeffs { alpha, sigma } = alpha_sigma(lam);
            axpby(alpha, eps, -sigma, x)
        }
    }
}

/// Noise estimate implied by a prediction in any target convention.
///
/// V: `ε̂ = σ x_t + α v̂`; X0: `ε̂ = (x_t - α x̂₀) / σ`.
pub fn to_eps_residual(target: PredictTarget, prediction: Point, x_t: Point, lam: f64) -> Result<Point> {
    let VpCoeffs { alpha, sigma } = alpha_sigma(lam);
    match target {
        PredictTarget::Epsilon => Ok(prediction),
        PredictTarget::V => Ok(axpby(sigma, x_t, alpha, prediction)),
        PredictTarget::X0 => {
            if !(sigma >= SIGMA_FLOOR) {
                return Err(Error::DegenerateConversion { lambda: lam, sigma });
            }
            Ok(axpby(1.0 / sigma, x_t, -alpha / sigma, prediction))
        }
    }
}

/// `∂ε̂/∂prediction`, a scalar multiple of the identity for each target.
pub fn eps_jacobian(target: PredictTarget, lam: f64) -> f64 {
    let VpCoeffs { alpha, sigma } = alpha_sigma(lam);
    match target {
        PredictTarget::Epsilon => 1.0,
        PredictTarget::V => alpha,
        PredictTarget::X0 => -alpha / sigma,
    }
}

/// Clean-data estimate implied by a prediction.
///
/// Eps: `x̂₀ = (x_t - σ ε̂) / α`; V: `x̂₀ = α x_t - σ v̂`.
pub fn to_x0(target: PredictTarget, prediction: Point, x_t: Point, lam: f64) -> Result<Point> {
    let VpCoeffs { alpha, sigma } = alpha_sigma(lam);
    match target {
        PredictTarget::X0 => Ok(prediction),
        PredictTarget::V => Ok(axpby(alpha, x_t, -sigma, prediction)),
        PredictTarget::Epsilon => {
            if !(alpha >= ALPHA_FLOOR) {
                return Err(Error::DegenerateConversion { lambda: lam, sigma });
            }
            Ok(axpby(1.0 / alpha, x_t, -sigma / alpha, prediction))
        }
    }
}
