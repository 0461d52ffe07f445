//! Loss weights over log-SNR.
//!
//! The unified objective is
//!
//! ```text
//! L = ½ E_{λ ~ p} [ w(λ)/p(λ) · ‖ε̂(x_λ; λ) - ε‖² ]
//! ```
//!
//! so a weight `w` fixes the objective and the sampling density `p` only
//! decides how it is estimated. [`WeightStrategy::weight`] returns `w(λ)` in
//! ε-prediction convention and [`WeightStrategy::effective_coefficient`] the
//! ratio `w/p` for a given sampler.
//!
//! The trainer uses [`WeightStrategy::loss_multiplier`]: the factor applied to
//! the plain ε-loss under whatever schedule draws `λ`. For the strategies
//! defined by a (weight, density) pair in the literature that is `w / p_native`;
//! `Constant` is the plain loss and `ScheduleAsWeight` is the density ratio,
//! which turns sampling from `numerator` into a weight on `denominator`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{normal, Family, ScheduleSpec};

/// Densities below this are treated as zero.
pub const DENSITY_FLOOR: f64 = 1e-300;

fn default_gamma() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightStrategy {
    /// `w ≡ 1`.
    Constant,
    /// `e^{-λ/2}`; with the cosine density this is the v-prediction MSE.
    CosineEps,
    /// `e^{-λ/2} · min{1, γ e^{-λ}}`.
    MinSnr {
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    /// `e^{-λ/2} · γ / (e^λ + γ)`.
    SoftMinSnr {
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    /// `(1 + e^{-λ}) sech²(λ/4)`.
    FmOt,
    /// `(1 + e^{-λ})(0.5² + e^{-λ}) N(λ; 2.4, 2.4²)`.
    Edm,
    /// `p_numerator(λ) / p_denominator(λ)`.
    ScheduleAsWeight {
        numerator: ScheduleSpec,
        denominator: ScheduleSpec,
    },
}

impl WeightStrategy {
    pub fn min_snr() -> Self {
        WeightStrategy::MinSnr { gamma: default_gamma() }
    }

    pub fn soft_min_snr() -> Self {
        WeightStrategy::SoftMinSnr { gamma: default_gamma() }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightStrategy::MinSnr { gamma } | WeightStrategy::SoftMinSnr { gamma }
                if !(gamma.is_finite() && gamma > 0.0) =>
            {
                Err(Error::ParameterDomain { name: "gamma", value: gamma, reason: "must be finite and > 0" })
            }
            _ => Ok(()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let w: WeightStrategy = serde_json::from_str(s)?;
        w.validate()?;
        Ok(w)
    }

    /// Loss weight `w(λ)`.
    pub fn weight(&self, lam: f64) -> Result<f64> {
        self.validate()?;
        let w = match self {
            WeightStrategy::Constant => 1.0,
            WeightStrategy::CosineEps => (-lam / 2.0).exp(),
            WeightStrategy::MinSnr { gamma } => (-lam / 2.0).exp() * (gamma * (-lam).exp()).min(1.0),
            WeightStrategy::SoftMinSnr { gamma } => (-lam / 2.0).exp() * gamma / (lam.exp() + gamma),
            WeightStrategy::FmOt => {
                let c = (lam / 4.0).cosh();
                (1.0 + (-lam).exp()) / (c * c)
            }
            WeightStrategy::Edm => {
                let e = (-lam).exp();
                (1.0 + e) * (0.25 + e) * normal::pdf((lam - 2.4) / 2.4) / 2.4
            }
            WeightStrategy::ScheduleAsWeight { numerator, denominator } => {
                let den = denominator.pdf(lam);
                if !(den >= DENSITY_FLOOR) {
                    return Err(Error::DegenerateWeight { lambda: lam, density: den });
                }
                numerator.pdf(lam) / den
            }
        };
        Ok(w)
    }

    /// Importance coefficient `w(λ) / p(λ)` for `λ` drawn from `sampling`.
    pub fn effective_coefficient(&self, sampling: &ScheduleSpec, lam: f64) -> Result<f64> {
        let p = sampling.pdf(lam);
        if !(p >= DENSITY_FLOOR) {
            return Err(Error::DegenerateWeight { lambda: lam, density: p });
        }
        Ok(self.weight(lam)? / p)
    }

    /// The log-SNR density a strategy's weight was written against, if any.
    ///
    /// The EDM row uses the bare Gaussian here; its `(0.5² + e^{-λ})` factor
    /// stays in the weight.
    pub fn native_density(&self) -> Option<ScheduleSpec> {
        let family = match self {
            WeightStrategy::CosineEps | WeightStrategy::MinSnr { .. } | WeightStrategy::SoftMinSnr { .. } => {
                Family::Cosine
            }
            WeightStrategy::FmOt => Family::FlowMatchOt,
            WeightStrategy::Edm => Family::EdmLogNormal { mean: 2.4, std: 2.4 },
            WeightStrategy::Constant | WeightStrategy::ScheduleAsWeight { .. } => return None,
        };
        Some(ScheduleSpec::new(family).expect("native densities are valid"))
    }

    /// Per-sample factor on `½‖ε̂ - ε‖²` used in training.
    pub fn loss_multiplier(&self, lam: f64) -> Result<f64> {
        match self.native_density() {
            Some(native) => self.effective_coefficient(&native, lam),
            None => self.weight(lam),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `π (1 + e^{-λ})`: the cosine-eps multiplier in closed form.
    fn cosine_eps_multiplier(lam: f64) -> f64 {
        PI * (1.0 + (-lam).exp())
    }

    #[test]
    fn spot_values() {
        let ms = WeightStrategy::min_snr();
        assert!((ms.weight(0.0).unwrap() - 1.0).abs() < 1e-15);
        let k = 5f64.ln();
        assert!((ms.weight(k).unwrap() - 5f64.powf(-0.5)).abs() < 1e-15);
        assert!((ms.weight(k).unwrap() - 0.4472).abs() < 1e-4);
        // Both branches agree at the kink.
        let left = (-k / 2.0).exp() * 1.0;
        let right = (-k / 2.0).exp() * 5.0 * (-k).exp();
        assert!((left - right).abs() < 1e-15);

        let sms = WeightStrategy::soft_min_snr();
        assert!((sms.weight(0.0).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn min_snr_closed_forms() {
        for i in -60..=60 {
            let lam = i as f64 * 0.25;
            let g: f64 = 3.0;
            let hard = WeightStrategy::MinSnr { gamma: g }.weight(lam).unwrap();
            let soft = WeightStrategy::SoftMinSnr { gamma: g }.weight(lam).unwrap();
            let snr = lam.exp();
            assert!((hard - snr.powf(-0.5) * snr.min(g) / snr).abs() <= 1e-12 * hard.max(1.0));
            assert!((soft - (-lam / 2.0).exp() * g / (snr + g)).abs() <= 1e-12 * soft.max(1.0));
        }
    }

    #[test]
    fn min_snr_caps_cosine_weight() {
        let g = 5.0f64;
        let ms = WeightStrategy::MinSnr { gamma: g };
        for i in -300..=300 {
            let lam = i as f64 * 0.05;
            let a = ms.weight(lam).unwrap();
            let b = WeightStrategy::CosineEps.weight(lam).unwrap();
            assert!(a <= b);
            // The cap binds only above log γ.
            if lam <= g.ln() {
                assert_eq!(a, b, "lam={lam}");
            } else {
                assert!(a < b, "lam={lam}");
            }
        }
    }

    #[test]
    fn effective_coefficient_cases() {
        let cos = ScheduleSpec::cosine();
        let c = WeightStrategy::Constant.effective_coefficient(&cos, 0.0).unwrap();
        assert!((c - 2.0 * PI).abs() < 1e-12);

        let lap = ScheduleSpec::laplace(0.0, 0.5).unwrap();
        let self_ratio = WeightStrategy::ScheduleAsWeight { numerator: lap, denominator: lap };
        for &lam in &[-3.0, 0.0, 1.5] {
            assert!((self_ratio.weight(lam).unwrap() - 1.0).abs() < 1e-15);
            let coef = self_ratio.effective_coefficient(&lap, lam).unwrap();
            assert!((coef - 1.0 / lap.pdf(lam)).abs() < 1e-12 * coef);
        }

        let ratio = WeightStrategy::ScheduleAsWeight { numerator: lap, denominator: cos };
        let coef = ratio.effective_coefficient(&cos, 0.0).unwrap();
        let by_hand = lap.pdf(0.0) / (cos.pdf(0.0) * cos.pdf(0.0));
        assert!((coef - by_hand).abs() < 1e-12);
        assert!((coef - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_density() {
        let narrow = ScheduleSpec::laplace(0.0, 0.01).unwrap();
        let w = WeightStrategy::ScheduleAsWeight { numerator: ScheduleSpec::cosine(), denominator: narrow };
        assert!(matches!(w.weight(14.0), Err(Error::DegenerateWeight { .. })));
        assert!(matches!(
            WeightStrategy::Constant.effective_coefficient(&narrow, 14.0),
            Err(Error::DegenerateWeight { .. })
        ));
    }

    #[test]
    fn loss_multipliers() {
        for &lam in &[-10.0, -1.0, 0.0, 2.0, 12.0] {
            let m = WeightStrategy::CosineEps.loss_multiplier(lam).unwrap();
            assert!((m - cosine_eps_multiplier(lam)).abs() < 1e-12 * m);
            assert_eq!(WeightStrategy::Constant.loss_multiplier(lam).unwrap(), 1.0);
            // EDM: w / N(λ; 2.4, 2.4²) = (1 + e^{-λ})(0.25 + e^{-λ}).
            let e = (-lam).exp();
            let m = WeightStrategy::Edm.loss_multiplier(lam).unwrap();
            assert!((m - (1.0 + e) * (0.25 + e)).abs() < 1e-10 * m);
            // FM-OT: w / (sech²(λ/4)/8) = 8 (1 + e^{-λ}).
            let m = WeightStrategy::FmOt.loss_multiplier(lam).unwrap();
            assert!((m - 8.0 * (1.0 + e)).abs() < 1e-10 * m);
        }
    }

    #[test]
    fn json_form() {
        let w = WeightStrategy::from_json(r#"{"kind": "min_snr", "gamma": 5.0}"#).unwrap();
        assert_eq!(w, WeightStrategy::min_snr());
        assert_eq!(WeightStrategy::from_json(r#"{"kind": "soft_min_snr"}"#).unwrap(), WeightStrategy::soft_min_snr());
        let saw = WeightStrategy::from_json(
            r#"{"kind": "schedule_as_weight",
                "numerator": {"family": "laplace", "mu": 0.0, "b": 0.5},
                "denominator": {"family": "cosine"}}"#,
        )
        .unwrap();
        let back: WeightStrategy = serde_json::from_str(&serde_json::to_string(&saw).unwrap()).unwrap();
        assert_eq!(back, saw);
        assert!(WeightStrategy::from_json(r#"{"kind": "min_snr", "gamma": -1.0}"#).is_err());
        assert!(WeightStrategy::from_json(r#"{"kind": "min_snr", "gamma": 5.0, "beta": 1}"#).is_err());
        assert!(WeightStrategy::from_json(r#"{"kind": "p2"}"#).is_err());
    }
}
