//! Exponential interrupt process shared by every pattern model.
//!
//! Events (faults, errors, failures) arrive as a Poisson process with mean
//! time to interrupt `mtti`. The interrupt probability over a window `t` is
//! `1 - exp(-t / mtti)`; its complement `exp(-t / mtti)` is the survival
//! probability.
//!
//! Several pattern formulas use the exponential term as printed, which reads
//! as a failure CDF where a reliability is expected. [`Convention`] selects
//! between evaluating those formulas exactly as written (`Literal`) and
//! substituting the complementary event term (`Survival`).

use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, positive, Result};

/// How the exponential event term inside a reliability formula is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Evaluate each formula exactly as printed.
    #[default]
    Literal,
    /// Replace the exponential event term with its complement.
    Survival,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Literal => "literal",
            Convention::Survival => "survival",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(Convention::Literal),
            "survival" => Ok(Convention::Survival),
            other => Err(format!(
                "unknown convention `{other}` (expected literal or survival)"
            )),
        }
    }
}

/// A probability in `[0, 1]` that remembers whether it had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    value: f64,
    clamped: bool,
}

impl Probability {
    pub const ZERO: Probability = Probability {
        value: 0.0,
        clamped: false,
    };
    pub const ONE: Probability = Probability {
        value: 1.0,
        clamped: false,
    };

    /// Accepts only values already inside `[0, 1]`.
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability {
                value,
                clamped: false,
            })
        } else {
            Err(domain("probability", "in [0, 1]", value))
        }
    }

    /// Clamps a raw formula value into `[0, 1]`, flagging out-of-range input.
    pub fn clamp(raw: f64) -> Self {
        debug_assert!(!raw.is_nan(), "probability formula produced NaN");
        if raw < 0.0 {
            Probability {
                value: 0.0,
                clamped: true,
            }
        } else if raw > 1.0 {
            Probability {
                value: 1.0,
                clamped: true,
            }
        } else {
            Probability {
                value: raw,
                clamped: false,
            }
        }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn clamped(self) -> bool {
        self.clamped
    }

    pub fn complement(self) -> Self {
        Probability {
            value: 1.0 - self.value,
            clamped: self.clamped,
        }
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.value
    }
}

/// Exponential interrupt process with mean time to interrupt `mtti`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventModel {
    mtti: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
}

impl EventModel {
    pub fn new(mtti: f64) -> Result<Self> {
        Ok(EventModel {
            mtti: positive("mtti", mtti)?,
            description: None,
        })
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn mtti(&self) -> f64 {
        self.mtti
    }

    /// Failure rate, `1 / mtti`.
    pub fn rate(&self) -> f64 {
        1.0 / self.mtti
    }

    pub fn description(&self) -> Option<&str> {
        self.description.as_deref()
    }
}

/// Validates an elapsed time. `+inf` is accepted so limits can be evaluated.
pub(crate) fn check_time(field: &'static str, t: f64) -> Result<f64> {
    if t >= 0.0 {
        Ok(t)
    } else {
        Err(domain(field, ">= 0", t))
    }
}

/// Probability that at least one event occurs within `t`: `1 - exp(-t / mtti)`.
pub fn interrupt_probability(t: f64, model: &EventModel) -> Result<Probability> {
    let t = check_time("t", t)?;
    // -expm1 keeps precision for t << mtti.
    Ok(Probability::clamp(-(-t / model.mtti).exp_m1()))
}

/// Probability that no event occurs within `t`: `exp(-t / mtti)`.
pub fn survival_probability(t: f64, model: &EventModel) -> Result<Probability> {
    let t = check_time("t", t)?;
    Ok(Probability::clamp((-t / model.mtti).exp()))
}

/// Inverse-CDF transform `-mtti * ln(u)` for `u` in `(0, 1]`.
pub fn interarrival_from_uniform(u: f64, model: &EventModel) -> Result<f64> {
    if u > 0.0 && u <= 1.0 {
        Ok(-model.mtti * u.ln())
    } else {
        Err(domain("u", "in (0, 1]", u))
    }
}

/// Draws one exponential interarrival time.
///
/// `u` is taken from the open interval, so every draw is finite and strictly
/// positive.
pub fn sample_interarrival<R: Rng + ?Sized>(rng: &mut R, model: &EventModel) -> f64 {
    let u: f64 = rng.sample(Open01);
    -model.mtti * u.ln()
}
