//! Problem model: the bivariate Gaussian source, the degraded broadcast
//! channel, the power split between the coded and uncoded branches, and the
//! transceiver constants derived from them.
//!
//! The hybrid transmitter sends
//!
//! ```text
//! X1 = [payload + beta*gamma*S2 + U] mod L
//! X  = alpha*X1 + gamma*S2
//! ```
//!
//! where the payload is `S1` for independent sources and the innovation
//! `V = S1 - rho*S2` for correlated ones. [`SchemeParams`] holds every
//! constant in that chain.

use serde::{Deserialize, Serialize};

/// Errors raised when validating model parameters.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    /// A parameter violates one of the model invariants.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    /// The coded branch receives no power, so the lattice second moment is unbounded.
    #[error("degenerate power split: alpha1 = {0} leaves the lattice branch without power")]
    DegeneratePowerSplit(f64),
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidParams(msg.into())
}

/// Law of the i.i.d. source pair `(S1, S2)`: zero mean, equal variances
/// `sigma2` and correlation coefficient `rho`.
///
/// Only `0 <= rho < 1` is accepted. For a negatively correlated pair negate
/// one of the two sources before constructing the `SourceSpec`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    sigma2: f64,
    rho: f64,
}

impl SourceSpec {
    pub fn new(sigma2: f64, rho: f64) -> Result<Self, ModelError> {
        if !(sigma2.is_finite() && sigma2 > 0.0) {
            return Err(invalid(format!(
                "sigma2 must be finite and > 0 (got {sigma2})"
            )));
        }
        if !(rho.is_finite() && (0.0..1.0).contains(&rho)) {
            return Err(invalid(format!(
                "rho must satisfy 0 <= rho < 1 (got {rho})"
            )));
        }
        Ok(Self { sigma2, rho })
    }

    /// Independent sources of variance `sigma2`.
    pub fn independent(sigma2: f64) -> Result<Self, ModelError> {
        Self::new(sigma2, 0.0)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn is_independent(&self) -> bool {
        self.rho == 0.0
    }

    /// Covariance matrix of `(S1, S2)`.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.rho * self.sigma2;
        [[self.sigma2, c], [c, self.sigma2]]
    }

    /// Variance of `V = S1 - rho*S2`, i.e. the conditional variance of `S1` given `S2`.
    pub fn innovation_variance(&self) -> f64 {
        self.sigma2 * (1.0 - self.rho * self.rho)
    }
}

/// Physically degraded scalar Gaussian broadcast channel `Y_k = X + Z_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    power: f64,
    n1: f64,
    n2: f64,
}

impl ChannelSpec {
    pub fn new(power: f64, n1: f64, n2: f64) -> Result<Self, ModelError> {
        if !(power.is_finite() && power > 0.0) {
            return Err(invalid(format!(
                "power must be finite and > 0 (got {power})"
            )));
        }
        if !(n1.is_finite() && n1 > 0.0) {
            return Err(invalid(format!("n1 must be finite and > 0 (got {n1})")));
        }
        if !(n2.is_finite() && n2 > n1) {
            return Err(invalid(format!(
                "channel must be degraded: n2 > n1 required (got n1 = {n1}, n2 = {n2})"
            )));
        }
        Ok(Self { power, n1, n2 })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }

    /// Signal-to-noise ratio `P/N1` at the strong receiver.
    pub fn snr1(&self) -> f64 {
        self.power / self.n1
    }
}

/// Fraction of the power budget given to the lattice-coded branch.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct PowerSplit(f64);

impl PowerSplit {
    pub fn new(alpha1: f64) -> Result<Self, ModelError> {
        if !(alpha1.is_finite() && (0.0..=1.0).contains(&alpha1)) {
            return Err(invalid(format!("alpha1 must lie in [0, 1] (got {alpha1})")));
        }
        Ok(Self(alpha1))
    }

    pub fn alpha1(self) -> f64 {
        self.0
    }
}

/// Transmitter and receiver constants of the hybrid scheme at one power split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub alpha1: f64,
    /// Lattice second moment `P'`.
    pub p_prime: f64,
    /// Scaling of the coded branch.
    pub alpha: f64,
    /// Scaling of the uncoded branch.
    pub gamma: f64,
    /// Receiver 1 front-end scaling.
    pub delta: f64,
    /// Pre-subtraction coefficient, always `-delta`.
    pub beta: f64,
    /// Variance of the lattice-coded payload.
    pub target_variance: f64,
}

/// Derives the hybrid scheme constants.
///
/// `P'` is chosen so that the correct-decoding condition
/// `target_variance + P'N1/(alpha^2 P' + N1) <= P'` holds with equality.
/// With `correlated_mode` the coded payload is the innovation `V` and its
/// variance is `sigma2 (1 - rho^2)`.
pub fn derive_scheme_params(
    source: &SourceSpec,
    channel: &ChannelSpec,
    split: PowerSplit,
    correlated_mode: bool,
) -> Result<SchemeParams, ModelError> {
    let alpha1 = split.alpha1();
    if alpha1 == 0.0 {
        return Err(ModelError::DegeneratePowerSplit(alpha1));
    }
    let target_variance = if correlated_mode {
        source.innovation_variance()
    } else {
        source.sigma2()
    };
    let coded_power = alpha1 * channel.power();
    let p_prime = target_variance * (coded_power + channel.n1()) / coded_power;
    let alpha = (coded_power / p_prime).sqrt();
    let gamma = ((1.0 - alpha1) * channel.power() / source.sigma2()).sqrt();
    let delta = alpha * p_prime / (coded_power + channel.n1());
    Ok(SchemeParams {
        alpha1,
        p_prime,
        alpha,
        gamma,
        delta,
        beta: -delta,
        target_variance,
    })
}

impl SchemeParams {
    /// Same split, payload and branch gains, but with the lattice second
    /// moment multiplied by `kappa >= 1`.
    ///
    /// `alpha` and `gamma` keep their nominal values, so the coded branch now
    /// carries `kappa * alpha1 * P` and the transmit power becomes
    /// `kappa alpha1 P + (1 - alpha1) P`. `delta` is re-optimised for the
    /// larger lattice. The larger cell makes modulo overload rarer at the cost
    /// of exceeding the power budget.
    pub fn inflated(&self, channel: &ChannelSpec, kappa: f64) -> Result<SchemeParams, ModelError> {
        if !(kappa.is_finite() && kappa >= 1.0) {
            return Err(invalid(format!(
                "inflation must be finite and >= 1 (got {kappa})"
            )));
        }
        let p_prime = kappa * self.p_prime;
        let delta = self.alpha * p_prime / (self.alpha * self.alpha * p_prime + channel.n1());
        Ok(SchemeParams {
            p_prime,
            delta,
            beta: -delta,
            ..*self
        })
    }

    /// Average transmit power `alpha^2 P' + gamma^2 sigma2`.
    pub fn transmit_power(&self, source: &SourceSpec) -> f64 {
        self.alpha * self.alpha * self.p_prime + self.gamma * self.gamma * source.sigma2()
    }
}

/// Variance of the effective noise `W1` seen by the coded branch at
/// Receiver 1 once `beta = -delta` cancels the uncoded interference:
/// `P'N1/(alpha^2 P' + N1)`.
pub fn effective_noise_variance(params: &SchemeParams, channel: &ChannelSpec) -> f64 {
    let p = params.p_prime;
    p * channel.n1() / (params.alpha * params.alpha * p + channel.n1())
}

/// A mean-squared-error pair. When `conditional` is set, `d1` is the
/// distortion of `S1` given `S2` as side information at Receiver 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionPair {
    pub d1: f64,
    pub d2: f64,
    pub conditional: bool,
}

impl DistortionPair {
    pub fn new(d1: f64, d2: f64) -> Self {
        Self {
            d1,
            d2,
            conditional: false,
        }
    }
}
