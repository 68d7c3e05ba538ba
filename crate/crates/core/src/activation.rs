//! Activation functions: the probability that a susceptible node adopts in
//! one round, as a function of the number of currently infectious
//! neighbors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adoption-probability function of the infectious-neighbor count `x`.
///
/// `NoisyThreshold` is the workhorse: adoption is certain-ish (probability
/// `rho`) at or above the absolute threshold `theta`, happens with small
/// probability `q` below it, and never happens with zero infectious
/// neighbors. Probit and logit are smooth noisy thresholds that also allow
/// spontaneous adoption at `x = 0`; `Simple` is the independent-exposure
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ActivationSpec {
    Simple { beta: f64 },
    NoisyThreshold { theta: u32, q: f64, rho: f64 },
    Probit { theta: f64, sigma: f64 },
    Logit { theta: f64, sigma: f64 },
    FractionalThreshold { theta_star: f64, q: f64, rho: f64 },
}

impl ActivationSpec {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidParameters(format!(
                    "{name} must be in [0, 1], got {p}"
                )))
            }
        };
        match *self {
            ActivationSpec::Simple { beta } => prob("beta", beta),
            ActivationSpec::NoisyThreshold { theta, q, rho } => {
                if theta < 1 {
                    return Err(Error::InvalidParameters("theta must be >= 1".into()));
                }
                prob("q", q)?;
                prob("rho", rho)?;
                // Sub-threshold adoption is the rare event; allowing q > rho
                // would make the activation function decreasing in x.
                if q > rho {
                    return Err(Error::InvalidParameters(format!(
                        "q ({q}) must not exceed rho ({rho})"
                    )));
                }
                Ok(())
            }
            ActivationSpec::Probit { theta, sigma } | ActivationSpec::Logit { theta, sigma } => {
                if theta < 1.0 {
                    return Err(Error::InvalidParameters("theta must be >= 1".into()));
                }
                if sigma <= 0.0 || !sigma.is_finite() {
                    return Err(Error::InvalidParameters(format!(
                        "sigma must be > 0, got {sigma}"
                    )));
                }
                Ok(())
            }
            ActivationSpec::FractionalThreshold { theta_star, q, rho } => {
                if !(theta_star > 0.0 && theta_star <= 1.0) {
                    return Err(Error::InvalidParameters(format!(
                        "theta_star must be in (0, 1], got {theta_star}"
                    )));
                }
                prob("q", q)?;
                prob("rho", rho)?;
                if q > rho {
                    return Err(Error::InvalidParameters(format!(
                        "q ({q}) must not exceed rho ({rho})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// True for probit/logit, which give positive adoption probability even
    /// with zero infectious neighbors.
    pub fn allows_spontaneous(&self) -> bool {
        matches!(self, ActivationSpec::Probit { .. } | ActivationSpec::Logit { .. })
    }
}

/// Probability of adoption with `x` infectious neighbors out of `degree`.
///
/// This is the unrestricted activation function; the round update applies
/// the edge-label restriction for sub-threshold adoptions on top of it.
pub fn activation_probability(spec: &ActivationSpec, x: u32, degree: u32) -> Result<f64> {
    if x > degree {
        return Err(Error::InvalidParameters(format!(
            "infected neighbor count {x} exceeds degree {degree}"
        )));
    }
    Ok(match *spec {
        ActivationSpec::Simple { beta } => 1.0 - (1.0 - beta).powi(x as i32),
        ActivationSpec::NoisyThreshold { theta, q, rho } => {
            if x == 0 {
                0.0
            } else if x < theta {
                q
            } else {
                rho
            }
        }
        ActivationSpec::Probit { theta, sigma } => normal_cdf(x as f64, theta, sigma),
        ActivationSpec::Logit { theta, sigma } => {
            1.0 / (1.0 + ((theta - x as f64) / sigma).exp())
        }
        ActivationSpec::FractionalThreshold { theta_star, q, rho } => {
            if x == 0 {
                0.0
            } else if meets_fractional_threshold(x, degree, theta_star) {
                rho
            } else {
                q
            }
        }
    })
}

/// `x >= theta_star * degree` with a tiny slack so that exact fractions
/// like 3/10 vs 0.3 are not lost to binary rounding.
pub(crate) fn meets_fractional_threshold(x: u32, degree: u32, theta_star: f64) -> bool {
    x as f64 >= theta_star * degree as f64 - 1e-9
}

/// CDF of the normal distribution with mean `mu` and standard deviation
/// `sigma`.
fn normal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * libm::erfc(-(x - mu) / (sigma * std::f64::consts::SQRT_2))
}
