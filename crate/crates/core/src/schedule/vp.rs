use serde::Serialize;

/// Coefficients `(α, σ)` of the variance-preserving forward process
/// `x_t = α x + σ ε` with `α² + σ² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VpCoeffs {
    pub alpha: f64,
    pub sigma: f64,
}

/// Logistic function written to avoid overflow for either sign.
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// VP coefficients at log-SNR `lam`: `α² = e^λ / (e^λ + 1)`, `σ² = 1 / (e^λ + 1)`.
pub fn alpha_sigma(lam: f64) -> VpCoeffs {
    VpCoeffs {
        alpha: sigmoid(lam).sqrt(),
        sigma: sigmoid(-lam).sqrt(),
    }
}

impl VpCoeffs {
    /// Log signal-to-noise ratio implied by the coefficients.
    pub fn log_snr(&self) -> f64 {
        2.0 * (self.alpha.ln() - self.sigma.ln())
    }
}
