//! Noise schedules as distributions over log-SNR.
//!
//! Every family is described three ways, all closed form:
//!
//! - `pdf(λ)`: density of log-SNR when training time is uniform,
//! - `survival(λ)`: the time `t = P(λ) = 1 - ∫_{-∞}^{λ} p` at which the
//!   schedule reaches `λ` (non-increasing),
//! - `lambda_of_t(t)`: the schedule itself, `λ = P⁻¹(t)`, clamped to the
//!   spec's log-SNR range.
//!
//! Tail-sensitive expressions are evaluated through their symmetric forms so
//! that `t` near 0 keeps full relative precision. `t` near 1 cannot, since
//! `1 - t` is only known to about 1e-16 absolute.

pub mod normal;
mod validate;
mod vp;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

pub use validate::{validate_schedule, ScheduleReport};
pub use vp::{alpha_sigma, VpCoeffs};
pub(crate) use vp::sigmoid;

/// Default log-SNR clamp range.
pub const DEFAULT_CLAMP: (f64, f64) = (-15.0, 15.0);

/// Schedule family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `p(λ) = sech(λ/2) / 2π`, `λ(t) = 2 log cot(πt/2)`.
    Cosine,
    Laplace { mu: f64, b: f64 },
    Cauchy { mu: f64, gamma: f64 },
    CosineShifted { mu: f64 },
    CosineScaled { s: f64 },
    /// Cosine schedule with polynomially warped timestep sampling.
    CosinePoly { n: u32 },
    /// Gaussian log-SNR, `λ ~ N(mean, std²)`.
    EdmLogNormal { mean: f64, std: f64 },
    /// Rectified flow, `λ(t) = 2 log((1 - t)/t)`.
    FlowMatchOt,
    /// Rectified flow with logit-normal time sampling; `λ ~ N(-2μ, 4σ²)`.
    FmLogitNormal { mu: f64, sigma: f64 },
}

impl Family {
    /// snake_case name used in JSON.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Cosine => "cosine",
            Family::Laplace { .. } => "laplace",
            Family::Cauchy { .. } => "cauchy",
            Family::CosineShifted { .. } => "cosine_shifted",
            Family::CosineScaled { .. } => "cosine_scaled",
            Family::CosinePoly { .. } => "cosine_poly",
            Family::EdmLogNormal { .. } => "edm_log_normal",
            Family::FlowMatchOt => "flow_match_ot",
            Family::FmLogitNormal { .. } => "fm_logit_normal",
        }
    }

    fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::ParameterDomain { name, value: v, reason: "must be finite" })
            }
        }
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::ParameterDomain { name, value: v, reason: "must be finite and > 0" })
            }
        }
        match *self {
            Family::Cosine | Family::FlowMatchOt | Family::CosinePoly { .. } => Ok(()),
            Family::Laplace { mu, b } => finite("mu", mu).and(positive("b", b)),
            Family::Cauchy { mu, gamma } => finite("mu", mu).and(positive("gamma", gamma)),
            Family::CosineShifted { mu } => finite("mu", mu),
            Family::CosineScaled { s } => positive("s", s),
            Family::EdmLogNormal { mean, std } => finite("mean", mean).and(positive("std", std)),
            Family::FmLogitNormal { mu, sigma } => finite("mu", mu).and(positive("sigma", sigma)),
        }
    }
}

/// A validated schedule: family, parameters and log-SNR clamp range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSpec {
    family: Family,
    clamp: (f64, f64),
}

impl ScheduleSpec {
    /// Builds a spec with the default clamp `[-15, 15]`.
    pub fn new(family: Family) -> Result<Self> {
        Self::with_clamp(family, DEFAULT_CLAMP.0, DEFAULT_CLAMP.1)
    }

    pub fn with_clamp(family: Family, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        family.validate()?;
        if !(lambda_min.is_finite() && lambda_min < 0.0) {
            return Err(Error::ParameterDomain {
                name: "lambda_min",
                value: lambda_min,
                reason: "must be finite and < 0",
            });
        }
        if !(lambda_max.is_finite() && lambda_max > 0.0) {
            return Err(Error::ParameterDomain {
                name: "lambda_max",
                value: lambda_max,
                reason: "must be finite and > 0",
            });
        }
        Ok(Self { family, clamp: (lambda_min, lambda_max) })
    }

    pub fn cosine() -> Self {
        Self { family: Family::Cosine, clamp: DEFAULT_CLAMP }
    }

    pub fn laplace(mu: f64, b: f64) -> Result<Self> {
        Self::new(Family::Laplace { mu, b })
    }

    pub fn cauchy(mu: f64, gamma: f64) -> Result<Self> {
        Self::new(Family::Cauchy { mu, gamma })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn clamp(&self) -> (f64, f64) {
        self.clamp
    }

    pub fn lambda_min(&self) -> f64 {
        self.clamp.0
    }

    pub fn lambda_max(&self) -> f64 {
        self.clamp.1
    }

    /// Same family with a different clamp range.
    pub fn reclamped(&self, lambda_min: f64, lambda_max: f64) -> Result<Self> {
        Self::with_clamp(self.family, lambda_min, lambda_max)
    }

    /// Density `p(λ)` of log-SNR. Integrates to 1 over the real line.
    pub fn pdf(&self, lam: f64) -> f64 {
        match self.family {
            Family::Cosine => cosine_pdf(lam),
            Family::Laplace { mu, b } => (-(lam - mu).abs() / b).exp() / (2.0 * b),
            Family::Cauchy { mu, gamma } => {
                let z = (lam - mu) / gamma;
                1.0 / (PI * gamma * (1.0 + z * z))
            }
            Family::CosineShifted { mu } => cosine_pdf(lam - mu),
            Family::CosineScaled { s } => s * cosine_pdf(s * lam),
            Family::CosinePoly { n } => cosine_poly_pdf(lam, n),
            Family::EdmLogNormal { mean, std } => normal::pdf((lam - mean) / std) / std,
            Family::FlowMatchOt => {
                let c = (lam / 4.0).cosh();
                1.0 / (8.0 * c * c)
            }
            Family::FmLogitNormal { mu, sigma } => {
                let std = 2.0 * sigma;
                normal::pdf((lam + 2.0 * mu) / std) / std
            }
        }
    }

    /// Survival function `t = P(λ)`, the uniform time that maps to `λ`.
    ///
    /// Unclamped: this is the analytic function on the whole real line.
    pub fn survival(&self, lam: f64) -> f64 {
        match self.family {
            Family::Cosine => cosine_survival(lam),
            Family::Laplace { mu, b } => {
                let z = (lam - mu) / b;
                if z >= 0.0 {
                    0.5 * (-z).exp()
                } else {
                    1.0 - 0.5 * z.exp()
                }
            }
            Family::Cauchy { mu, gamma } => {
                let z = (lam - mu) / gamma;
                if z > 0.0 {
                    (1.0 / z).atan() / PI
                } else if z < 0.0 {
                    1.0 - (-1.0 / z).atan() / PI
                } else {
                    0.5
                }
            }
            Family::CosineShifted { mu } => cosine_survival(lam - mu),
            Family::CosineScaled { s } => cosine_survival(s * lam),
            Family::CosinePoly { n } => {
                let scale = 2f64.powi(n as i32);
                if lam >= 0.0 {
                    scale * cosine_survival(lam).powi(n as i32 + 1)
                } else {
                    1.0 - scale * cosine_survival(-lam).powi(n as i32 + 1)
                }
            }
            Family::EdmLogNormal { mean, std } => normal::sf((lam - mean) / std),
            Family::FlowMatchOt => sigmoid(-lam / 2.0),
            Family::FmLogitNormal { mu, sigma } => normal::sf((lam + 2.0 * mu) / (2.0 * sigma)),
        }
    }

    /// The schedule `λ(t) = P⁻¹(t)`, clamped to `[λ_min, λ_max]`.
    ///
    /// `t = 0` maps to `λ_max` and `t = 1` to `λ_min`. Times outside `[0, 1]`
    /// are a domain error.
    pub fn lambda_of_t(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::domain(format!("time {t} outside [0, 1]")));
        }
        let (lo, hi) = self.clamp;
        if t == 0.0 {
            return Ok(hi);
        }
        if t == 1.0 {
            return Ok(lo);
        }
        let lam = self.lambda_unclamped(t);
        Ok(if lam.is_nan() { lo } else { lam.clamp(lo, hi) })
    }

    fn lambda_unclamped(&self, t: f64) -> f64 {
        match self.family {
            Family::Cosine => cosine_lambda(t),
            Family::Laplace { mu, b } => {
                if t < 0.5 {
                    mu - b * (2.0 * t).ln()
                } else {
                    mu + b * (2.0 * (1.0 - t)).ln()
                }
            }
            Family::Cauchy { mu, gamma } => {
                // μ + γ tan(π/2 (1 - 2t)) = μ + γ cot(πt)
                if t <= 0.5 {
                    mu + gamma / (PI * t).tan()
                } else {
                    mu - gamma / (PI * (1.0 - t)).tan()
                }
            }
            Family::CosineShifted { mu } => mu + cosine_lambda(t),
            Family::CosineScaled { s } => cosine_lambda(t) / s,
            Family::CosinePoly { n } => {
                let n = n as i64;
                if t < 0.5 {
                    cosine_lambda(warp_lower(t, n))
                } else {
                    -cosine_lambda(warp_lower(1.0 - t, n))
                }
            }
            Family::EdmLogNormal { mean, std } => mean - std * normal::quantile(t),
            Family::FlowMatchOt => 2.0 * ((-t).ln_1p() - t.ln()),
            Family::FmLogitNormal { mu, sigma } => -2.0 * mu - 2.0 * sigma * normal::quantile(t),
        }
    }

    /// Points where the density is continuous but not differentiable.
    pub fn kinks(&self) -> Vec<f64> {
        match self.family {
            Family::Laplace { mu, .. } => vec![mu],
            Family::CosinePoly { n } if n > 0 => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// Parses the JSON object form, e.g.
    /// `{"family": "laplace", "mu": 0.0, "b": 0.5, "lambda_clamp": [-15.0, 15.0]}`.
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule spec serializes")
    }
}

fn cosine_pdf(lam: f64) -> f64 {
    1.0 / (2.0 * PI * (lam / 2.0).cosh())
}

fn cosine_survival(lam: f64) -> f64 {
    FRAC_2_PI * (-lam / 2.0).exp().atan()
}

fn cosine_lambda(t: f64) -> f64 {
    if t <= 0.5 {
        -2.0 * (PI * t / 2.0).tan().ln()
    } else {
        2.0 * (PI * (1.0 - t) / 2.0).tan().ln()
    }
}

fn cosine_poly_pdf(lam: f64, n: u32) -> f64 {
    let a = lam.abs();
    let e = (-a / 2.0).exp();
    let n = n as i32;
    (n + 1) as f64 * 4f64.powi(n) / PI.powi(n + 1) * e.atan().powi(n) * e / (1.0 + e * e)
}

/// Lower branch of the polynomial warp, valid for `t < 1/2`.
fn warp_lower(t: f64, n: i64) -> f64 {
    let k = n as f64 + 1.0;
    0.5f64.powf(n as f64 / k) * t.powf(1.0 / k)
}

/// Polynomial timestep warp: maps uniform `t` to `t'` with density
/// `C t'^n` below 1/2 and its mirror above, `C = (n + 1) 2^n`.
///
/// Monotone bijection of `[0, 1]` fixing 0, 1/2 and 1; identity for `n = 0`.
pub fn poly_time_warp(t: f64, n: i64) -> Result<f64> {
    if n < 0 {
        return Err(Error::domain(format!("polynomial order {n} must be >= 0")));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("time {t} outside [0, 1]")));
    }
    Ok(if t < 0.5 {
        warp_lower(t, n)
    } else {
        1.0 - warp_lower(1.0 - t, n)
    })
}

/// Flat JSON form of a spec. All parameters are optional here so the
/// per-family check can report which field is missing or foreign.
#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_clamp: Option<[f64; 2]>,
}

impl RawSpec {
    fn into_spec(self) -> std::result::Result<ScheduleSpec, String> {
        let present: Vec<&str> = [
            ("mu", self.mu.is_some()),
            ("b", self.b.is_some()),
            ("gamma", self.gamma.is_some()),
            ("s", self.s.is_some()),
            ("n", self.n.is_some()),
            ("mean", self.mean.is_some()),
            ("std", self.std.is_some()),
            ("sigma", self.sigma.is_some()),
        ]
        .into_iter()
        .filter_map(|(k, p)| p.then_some(k))
        .collect();
        let allowed: &[&str] = match self.family.as_str() {
            "cosine" | "flow_match_ot" => &[],
            "laplace" => &["mu", "b"],
            "cauchy" => &["mu", "gamma"],
            "cosine_shifted" => &["mu"],
            "cosine_scaled" => &["s"],
            "cosine_poly" => &["n"],
            "edm_log_normal" => &["mean", "std"],
            "fm_logit_normal" => &["mu", "sigma"],
            other => return Err(format!("unknown schedule family `{other}`")),
        };
        if let Some(extra) = present.iter().find(|k| !allowed.contains(k)) {
            return Err(format!("unknown field `{extra}` for family `{}`", self.family));
        }
        if let Some(missing) = allowed.iter().find(|k| !present.contains(k)) {
            return Err(format!("missing field `{missing}` for family `{}`", self.family));
        }
        let family = match self.family.as_str() {
            "cosine" => Family::Cosine,
            "flow_match_ot" => Family::FlowMatchOt,
            "laplace" => Family::Laplace { mu: self.mu.unwrap(), b: self.b.unwrap() },
            "cauchy" => Family::Cauchy { mu: self.mu.unwrap(), gamma: self.gamma.unwrap() },
            "cosine_shifted" => Family::CosineShifted { mu: self.mu.unwrap() },
            "cosine_scaled" => Family::CosineScaled { s: self.s.unwrap() },
            "cosine_poly" => {
                let n = self.n.unwrap();
                let n = u32::try_from(n)
                    .map_err(|_| format!("invalid parameter `n` = {n}: must be a non-negative integer"))?;
                Family::CosinePoly { n }
            }
            "edm_log_normal" => Family::EdmLogNormal { mean: self.mean.unwrap(), std: self.std.unwrap() },
            "fm_logit_normal" => Family::FmLogitNormal { mu: self.mu.unwrap(), sigma: self.sigma.unwrap() },
            _ => unreachable!(),
        };
        let [lo, hi] = self.lambda_clamp.unwrap_or([DEFAULT_CLAMP.0, DEFAULT_CLAMP.1]);
        ScheduleSpec::with_clamp(family, lo, hi).map_err(|e| e.to_string())
    }

    fn from_spec(spec: &ScheduleSpec) -> Self {
        let mut raw = RawSpec {
            family: spec.family.name().to_string(),
            lambda_clamp: Some([spec.clamp.0, spec.clamp.1]),
            ..Default::default()
        };
        match spec.family {
            Family::Cosine | Family::FlowMatchOt => {}
            Family::Laplace { mu, b } => (raw.mu, raw.b) = (Some(mu), Some(b)),
            Family::Cauchy { mu, gamma } => (raw.mu, raw.gamma) = (Some(mu), Some(gamma)),
            Family::CosineShifted { mu } => raw.mu = Some(mu),
            Family::CosineScaled { s } => raw.s = Some(s),
            Family::CosinePoly { n } => raw.n = Some(n as i64),
            Family::EdmLogNormal { mean, std } => (raw.mean, raw.std) = (Some(mean), Some(std)),
            Family::FmLogitNormal { mu, sigma } => (raw.mu, raw.sigma) = (Some(mu), Some(sigma)),
        }
        raw
    }
}

impl Serialize for ScheduleSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec::from_spec(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ScheduleSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        RawSpec::deserialize(deserializer)?
            .into_spec()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family) -> ScheduleSpec {
        ScheduleSpec::new(family).unwrap()
    }

    /// Bisection on the survival function; independent of the closed-form inverses.
    fn bisect_lambda(s: &ScheduleSpec, t: f64) -> f64 {
        let (mut lo, mut hi) = (-200.0, 200.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if s.survival(mid) > t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Trapezoid rule on a fine grid, for spot values only.
    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
        h * (0.5 * (f(a) + f(b)) + inner)
    }

    #[test]
    fn pdf_spot_values() {
        assert!((ScheduleSpec::cosine().pdf(0.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((ScheduleSpec::cosine().pdf(0.0) - 0.159_155).abs() < 1e-6);
        assert!((spec(Family::Laplace { mu: 0.0, b: 0.5 }).pdf(0.0) - 1.0).abs() < 1e-15);
        assert!((spec(Family::Cauchy { mu: 0.0, gamma: 1.0 }).pdf(0.0) - 0.318_310).abs() < 1e-6);
    }

    #[test]
    fn cosine_poly_pdf_matches_finite_difference_of_survival() {
        let s = spec(Family::CosinePoly { n: 2 });
        // Left and right derivatives straddle the kink at 0.
        for &lam in &[-3.0, -0.7, 0.0, 0.4, 2.5] {
            let h = 1e-6;
            let left = (s.survival(lam - h) - s.survival(lam)) / h;
            let right = (s.survival(lam) - s.survival(lam + h)) / h;
            let fd = 0.5 * (left + right);
            assert!((s.pdf(lam) - fd).abs() < 1e-5, "lam={lam}: {} vs {fd}", s.pdf(lam));
        }
        // Value at the peak: 3/(2π).
        assert!((s.pdf(0.0) - 3.0 / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn survival_spot_values() {
        let lap = spec(Family::Laplace { mu: 1.3, b: 0.7 });
        assert_eq!(lap.survival(1.3), 0.5);
        assert!((ScheduleSpec::cosine().survival(0.0) - 0.5).abs() < 1e-15);
        let cau = spec(Family::Cauchy { mu: 0.0, gamma: 0.5 });
        assert!((cau.survival(0.5) - 0.25).abs() < 1e-12);
        // Quadrature of the density from λ to a far cutoff, plus the analytic far tail.
        let tail = quad(|l| cau.pdf(l), 0.5, 2000.0, 2_000_000) + cau.survival(2000.0);
        assert!((tail - 0.25).abs() < 1e-6, "quadrature tail {tail}");
    }

    #[test]
    fn lambda_of_t_spot_values() {
        assert!(ScheduleSpec::cosine().lambda_of_t(0.5).unwrap().abs() < 1e-15);

        let lap = spec(Family::Laplace { mu: 0.0, b: 0.5 });
        let expected = 0.5 * 2f64.ln();
        assert!((lap.lambda_of_t(0.25).unwrap() - expected).abs() < 1e-12);
        assert!((bisect_lambda(&lap, 0.25) - expected).abs() < 1e-10);
        assert!((expected - 0.346_574).abs() < 1e-6);

        let shifted = spec(Family::CosineShifted { mu: 1.0 });
        assert!((shifted.lambda_of_t(0.5).unwrap() - 1.0).abs() < 1e-15);

        let scaled = spec(Family::CosineScaled { s: 2.0 });
        let v = scaled.lambda_of_t(0.25).unwrap();
        assert!((v - (1.0 / (PI / 8.0).tan()).ln()).abs() < 1e-14);
        assert!((v - 0.881_374).abs() < 1e-6);
        assert!((bisect_lambda(&scaled, 0.25) - v).abs() < 1e-10);
    }

    #[test]
    fn endpoints_map_to_clamp_bounds() {
        let s = spec(Family::Cauchy { mu: 0.0, gamma: 1.0 });
        assert_eq!(s.lambda_of_t(0.0).unwrap(), 15.0);
        assert_eq!(s.lambda_of_t(1.0).unwrap(), -15.0);
        // Unclamped λ would be ~ 3e5 here.
        assert_eq!(s.lambda_of_t(1e-6).unwrap(), 15.0);
        assert!(s.lambda_of_t(-0.1).is_err());
        assert!(s.lambda_of_t(1.5).is_err());
        assert!(s.lambda_of_t(f64::NAN).is_err());
    }

    #[test]
    fn closed_forms_invert_against_bisection() {
        let families = [
            Family::Cosine,
            Family::Laplace { mu: 0.3, b: 0.8 },
            Family::Cauchy { mu: -0.5, gamma: 0.7 },
            Family::CosineShifted { mu: -1.0 },
            Family::CosineScaled { s: 1.7 },
            Family::CosinePoly { n: 3 },
            Family::EdmLogNormal { mean: 2.4, std: 2.4 },
            Family::FlowMatchOt,
            Family::FmLogitNormal { mu: 0.5, sigma: 1.0 },
        ];
        for f in families {
            let s = spec(f);
            for &t in &[0.01, 0.2, 0.5, 0.63, 0.97] {
                let closed = s.lambda_of_t(t).unwrap();
                let bis = bisect_lambda(&s, t).clamp(-15.0, 15.0);
                assert!((closed - bis).abs() < 1e-8, "{f:?} t={t}: {closed} vs {bis}");
            }
        }
    }

    #[test]
    fn poly_warp_cases() {
        assert_eq!(poly_time_warp(0.3, 0).unwrap(), 0.3);
        for n in 0..6 {
            assert!((poly_time_warp(0.5, n).unwrap() - 0.5).abs() < 1e-15);
            assert_eq!(poly_time_warp(0.0, n).unwrap(), 0.0);
            assert_eq!(poly_time_warp(1.0, n).unwrap(), 1.0);
        }
        let v = poly_time_warp(0.125, 2).unwrap();
        assert!((v - 0.5f64.powf(2.0 / 3.0) * 0.5).abs() < 1e-15);
        assert!((v - 0.314_980).abs() < 1e-6);
        assert!(poly_time_warp(0.5, -1).is_err());
    }

    #[test]
    fn poly_warp_distribution_matches_polynomial_density() {
        // Empirical CDF of warped uniforms vs ∫ C t'^n: F(x) = 2^n x^{n+1} for x < 1/2.
        let n = 2;
        let m = 200_000;
        let mut warped: Vec<f64> =
            (0..m).map(|i| poly_time_warp((i as f64 + 0.5) / m as f64, n).unwrap()).collect();
        warped.sort_by(f64::total_cmp);
        for &x in &[0.1, 0.25, 0.4, 0.5, 0.7, 0.9] {
            let emp = warped.partition_point(|&w| w <= x) as f64 / m as f64;
            let exact = if x < 0.5 {
                4.0 * x.powi(3)
            } else {
                1.0 - 4.0 * (1.0 - x).powi(3)
            };
            assert!((emp - exact).abs() < 1e-4, "x={x}: {emp} vs {exact}");
        }
    }

    #[test]
    fn parameter_domain_errors() {
        assert!(matches!(
            ScheduleSpec::laplace(0.0, -1.0),
            Err(Error::ParameterDomain { name: "b", .. })
        ));
        assert!(ScheduleSpec::cauchy(0.0, 0.0).is_err());
        assert!(ScheduleSpec::new(Family::CosineScaled { s: f64::NAN }).is_err());
        assert!(ScheduleSpec::with_clamp(Family::Cosine, 1.0, 15.0).is_err());
        assert!(ScheduleSpec::with_clamp(Family::Cosine, -15.0, 0.0).is_err());
    }

    #[test]
    fn json_form() {
        let s = ScheduleSpec::from_json(
            r#"{"family": "laplace", "mu": 0.0, "b": 0.5, "lambda_clamp": [-15.0, 15.0]}"#,
        )
        .unwrap();
        assert_eq!(s, ScheduleSpec::laplace(0.0, 0.5).unwrap());
        assert_eq!(ScheduleSpec::from_json(&s.to_json()).unwrap(), s);

        let c = ScheduleSpec::from_json(r#"{"family": "cosine"}"#).unwrap();
        assert_eq!(c.clamp(), DEFAULT_CLAMP);

        for bad in [
            r#"{"family": "laplace", "mu": 0.0}"#,
            r#"{"family": "laplace", "mu": 0.0, "b": 0.5, "gamma": 1.0}"#,
            r#"{"family": "laplace", "mu": 0.0, "b": 0.5, "extra": 1}"#,
            r#"{"family": "warp_drive"}"#,
            r#"{"family": "cosine_poly", "n": -2}"#,
            r#"{"family": "laplace", "mu": 0.0, "b": -1.0}"#,
        ] {
            assert!(ScheduleSpec::from_json(bad).is_err(), "{bad}");
        }
        let err = ScheduleSpec::from_json(r#"{"family": "cauchy", "mu": 0.0}"#).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
    }
}
