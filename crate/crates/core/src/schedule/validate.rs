use serde::Serialize;

use super::ScheduleSpec;
use crate::error::{Error, Result};

/// Survival values this close to 0 or 1 are excluded from the roundtrip
/// check: `1 - t` is only representable to ~1e-16 absolute, so the inverse
/// there is ill-conditioned for reasons unrelated to the schedule.
pub const ROUNDTRIP_TAIL: f64 = 1e-9;

/// Central-difference step for the density check.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// Numerical self-consistency of a schedule over its clamp range.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleReport {
    /// `|∫ pdf - (P(λ_min) - P(λ_max))|` with composite Simpson over the clamp range.
    pub normalization_error: f64,
    /// `max |λ(P(λ)) - λ|` over the interior grid.
    pub max_roundtrip_error: f64,
    /// `max |pdf(λ) + ΔP/Δλ|` with central differences.
    pub max_density_vs_derivative_error: f64,
    pub grid_size: usize,
    /// Analytic probability mass inside the clamp range.
    pub in_range_mass: f64,
    /// Quadrature estimate of the same mass.
    pub quadrature_mass: f64,
}

/// Composite Simpson over `[a, b]` with an even number of intervals.
fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Checks a schedule's density, survival function and inverse against one
/// another on a grid of `grid_points` over the clamp range.
///
/// The quadrature is split at the family's kinks so that Simpson sees only
/// smooth pieces. The derivative check skips points within two steps of a
/// kink, where the density has no derivative to compare to.
pub fn validate_schedule(spec: &ScheduleSpec, grid_points: usize) -> Result<ScheduleReport> {
    if grid_points < 100 {
        return Err(Error::domain(format!("grid_points = {grid_points} must be >= 100")));
    }
    let (lo, hi) = spec.clamp();
    let width = hi - lo;
    let pdf = |l: f64| spec.pdf(l);

    let mut breaks = vec![lo];
    breaks.extend(spec.kinks().into_iter().filter(|&k| k > lo && k < hi));
    breaks.push(hi);
    let quadrature_mass: f64 = breaks
        .windows(2)
        .map(|w| {
            let share = ((w[1] - w[0]) / width * grid_points as f64).round() as usize;
            simpson(&pdf, w[0], w[1], share)
        })
        .sum();
    let in_range_mass = spec.survival(lo) - spec.survival(hi);

    let kinks = spec.kinks();
    let h = DERIVATIVE_STEP;
    let mut max_roundtrip_error = 0.0f64;
    let mut max_deriv_error = 0.0f64;
    for k in 0..grid_points {
        let lam = lo + (k as f64 + 0.5) * width / grid_points as f64;

        let t = spec.survival(lam);
        if t > ROUNDTRIP_TAIL && 1.0 - t > ROUNDTRIP_TAIL {
            let back = spec.lambda_of_t(t)?;
            max_roundtrip_error = max_roundtrip_error.max((back - lam).abs());
        }

        if kinks.iter().all(|&c| (lam - c).abs() > 2.0 * h) {
            let fd = (spec.survival(lam - h) - spec.survival(lam + h)) / (2.0 * h);
            max_deriv_error = max_deriv_error.max((spec.pdf(lam) - fd).abs());
        }
    }

    Ok(ScheduleReport {
        normalization_error: (quadrature_mass - in_range_mass).abs(),
        max_roundtrip_error,
        max_density_vs_derivative_error: max_deriv_error,
        grid_size: grid_points,
        in_range_mass,
        quadrature_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Family;

    #[test]
    fn cosine_normalizes() {
        let r = validate_schedule(&ScheduleSpec::cosine(), 10_000).unwrap();
        assert!(r.normalization_error < 1e-6, "{r:?}");
        // Analytic tail outside [-15, 15] is 2 · (2/π) atan(e^{-7.5}).
        let tail = 4.0 / std::f64::consts::PI * (-7.5f64).exp().atan();
        assert!((1.0 - r.in_range_mass - tail).abs() < 1e-15);
    }

    #[test]
    fn laplace_roundtrip_on_narrow_clamp() {
        let s = ScheduleSpec::with_clamp(Family::Laplace { mu: 0.0, b: 1.0 }, -10.0, 10.0).unwrap();
        let r = validate_schedule(&s, 10_000).unwrap();
        assert!(r.max_roundtrip_error < 1e-9, "{r:?}");
    }

    #[test]
    fn cauchy_density_matches_derivative() {
        let r = validate_schedule(&ScheduleSpec::cauchy(1.0, 1.0).unwrap(), 10_000).unwrap();
        assert!(r.max_density_vs_derivative_error < 1e-4, "{r:?}");
        // In-range mass from the arctan CDF.
        let pi = std::f64::consts::PI;
        let analytic = ((14.0f64).atan() - (-16.0f64).atan()) / pi;
        assert!((r.in_range_mass - analytic).abs() < 1e-14);
        assert!(r.normalization_error < 1e-6);
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(validate_schedule(&ScheduleSpec::cosine(), 99).is_err());
    }
}
