//! Space or time redundancy with majority voting.

use serde::{Deserialize, Serialize};

use crate::error::{domain, nonnegative, positive, unit_interval, Result};
use crate::event::{check_time, Probability};
use crate::patterns::ModelOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RedundancyMode {
    /// Replicas run concurrently.
    Space,
    /// The protected scope is executed `d` times in sequence.
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyParams {
    pub serial_time: f64,
    /// Share of the work that is replicated.
    pub replicated_fraction: f64,
    pub degree: u32,
    pub mode: RedundancyMode,
    pub voting_time: f64,
    pub replica_mtti: f64,
}

impl RedundancyParams {
    pub fn validate(&self) -> Result<()> {
        positive("serial_time", self.serial_time)?;
        unit_interval("replicated_fraction", self.replicated_fraction)?;
        if self.degree < 1 {
            return Err(domain("degree", ">= 1", f64::from(self.degree)));
        }
        nonnegative("voting_time", self.voting_time)?;
        positive("replica_mtti", self.replica_mtti)?;
        Ok(())
    }

    /// 1 for space redundancy, `d` for time redundancy.
    pub fn time_multiplier(&self) -> f64 {
        match self.mode {
            RedundancyMode::Space => 1.0,
            RedundancyMode::Time => f64::from(self.degree),
        }
    }
}

/// `T_S * ((1 - A) + beta * A) + T_MV`.
pub fn redundancy_time(p: &RedundancyParams) -> Result<ModelOutput> {
    p.validate()?;
    let a = p.replicated_fraction;
    let t = p.serial_time * ((1.0 - a) + p.time_multiplier() * a) + p.voting_time;
    Ok(ModelOutput::time(t))
}

/// `1 - (t / λ)^d`, clamped at 0 once `t > λ`.
pub fn redundancy_reliability(t: f64, p: &RedundancyParams) -> Result<Probability> {
    let t = check_time("t", t)?;
    p.validate()?;
    let raw = 1.0 - (t / p.replica_mtti).powi(p.degree as i32);
    Ok(Probability::clamp(raw))
}

pub fn redundancy_model(t: f64, p: &RedundancyParams) -> Result<ModelOutput> {
    let out = redundancy_time(p)?;
    let r = redundancy_reliability(t, p)?;
    let out = if r.clamped() {
        out.note(format!(
            "redundancy reliability formula is only meaningful for t <= replica_mtti (t = {t}, replica_mtti = {})",
            p.replica_mtti
        ))
    } else {
        out
    };
    Ok(out.with_reliability(r, "redundancy reliability"))
}
