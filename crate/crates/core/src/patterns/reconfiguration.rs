//! Reconfiguration: a failed component is isolated and the remaining `n - 1`
//! carry on at degraded capacity. Times are normalized to the mission length.

use crate::error::{domain, nonnegative, unit_interval, ModelError, Result};
use crate::event::Probability;
use crate::patterns::{ModelOutput, ReconfigMode};

#[derive(Debug, Clone, PartialEq)]
pub struct ReconfigurationParams {
    /// Fraction of the mission completed before the event.
    pub progress_fraction: f64,
    pub component_count: u32,
    /// Normalized downtime spent reconfiguring.
    pub reconfig_downtime: f64,
    /// Per-component reliabilities. Empty means no reliability is evaluated.
    pub component_reliabilities: Vec<Probability>,
}

impl ReconfigurationParams {
    pub fn validate(&self) -> Result<()> {
        unit_interval("progress_fraction", self.progress_fraction)?;
        if self.component_count < 2 {
            return Err(domain(
                "component_count",
                ">= 2",
                f64::from(self.component_count),
            ));
        }
        nonnegative("reconfig_downtime", self.reconfig_downtime)?;
        if !self.component_reliabilities.is_empty()
            && self.component_reliabilities.len() != self.component_count as usize
        {
            return Err(ModelError::Length {
                field: "component_reliabilities",
                expected: self.component_count as usize,
                actual: self.component_reliabilities.len(),
            });
        }
        Ok(())
    }
}

/// `T_FF + (1 - T_FF) * factor + T_R`, with `factor` chosen by `mode`.
pub fn reconfiguration_performance(
    p: &ReconfigurationParams,
    mode: ReconfigMode,
) -> Result<ModelOutput> {
    p.validate()?;
    let n = f64::from(p.component_count);
    let factor = match mode {
        ReconfigMode::Literal => (n - 1.0) / n,
        ReconfigMode::Corrected => n / (n - 1.0),
    };
    let remaining = 1.0 - p.progress_fraction;
    let time = p.progress_fraction + remaining * factor + p.reconfig_downtime;
    Ok(ModelOutput::time(time).note(format!(
        "reconfiguration time uses the {} degraded-capacity factor",
        mode.as_str()
    )))
}

/// Parallel reliability of independent components: `1 - prod(1 - R_i)`.
pub fn reconfiguration_reliability(component_reliabilities: &[Probability]) -> Result<Probability> {
    if component_reliabilities.is_empty() {
        return Err(ModelError::Empty("component_reliabilities"));
    }
    let all_fail: f64 = component_reliabilities
        .iter()
        .map(|r| 1.0 - r.value())
        .product();
    Ok(Probability::clamp(1.0 - all_fail))
}

/// Time and (when component reliabilities are given) reliability together.
pub fn reconfiguration_model(p: &ReconfigurationParams, mode: ReconfigMode) -> Result<ModelOutput> {
    let out = reconfiguration_performance(p, mode)?;
    if p.component_reliabilities.is_empty() {
        return Ok(out.note("no component reliabilities given; reliability not evaluated"));
    }
    let r = reconfiguration_reliability(&p.component_reliabilities)?;
    Ok(out.with_reliability(r, "reconfiguration reliability"))
}
