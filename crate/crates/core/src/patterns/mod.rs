//! Analytic performance and reliability models, one per resilience pattern.

mod checkpoint;
mod diagnosis;
mod nversion;
mod output;
mod reconfiguration;
mod redundancy;

pub use checkpoint::{
    rollback_failure_free_time, rollback_with_failures, rollforward_reliability,
    rollforward_time, CheckpointParams, RecoveryMode,
};
pub use diagnosis::{diagnosis_overhead, DiagnosisParams};
pub use nversion::{
    event_factor, nversion_exclusive_success, nversion_failure_density, nversion_model,
    nversion_reliability, ExclusiveSuccess, NVersionParams, VersionInputs,
};
pub use output::{EvalOptions, ModelOutput, ReconfigMode, TimeKind};
pub use reconfiguration::{
    reconfiguration_model, reconfiguration_performance, reconfiguration_reliability,
    ReconfigurationParams,
};
pub use redundancy::{
    redundancy_model, redundancy_reliability, redundancy_time, RedundancyMode, RedundancyParams,
};

use crate::error::Result;
use crate::event::{interrupt_probability, survival_probability, Convention, EventModel, Probability};

/// The exponential event term `1 - exp(-x)`, or `exp(-x)` under the survival
/// convention.
pub(crate) fn exponential_term(x: f64, convention: Convention) -> Probability {
    match convention {
        Convention::Literal => Probability::clamp(-(-x).exp_m1()),
        Convention::Survival => Probability::clamp((-x).exp()),
    }
}

/// A pattern bound to its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternInstance {
    /// No resilience pattern; reliability comes from the bare event process.
    /// `None` uses the enclosing system's event model.
    Unprotected(Option<EventModel>),
    Diagnosis(DiagnosisParams),
    Reconfiguration(ReconfigurationParams),
    Rollback(CheckpointParams),
    RollForward(CheckpointParams),
    Redundancy(RedundancyParams),
    NVersion(NVersionParams),
}

impl PatternInstance {
    pub fn kind(&self) -> &'static str {
        match self {
            PatternInstance::Unprotected(_) => "unprotected",
            PatternInstance::Diagnosis(_) => "diagnosis",
            PatternInstance::Reconfiguration(_) => "reconfiguration",
            PatternInstance::Rollback(_) => "rollback",
            PatternInstance::RollForward(_) => "rollforward",
            PatternInstance::Redundancy(_) => "redundancy",
            PatternInstance::NVersion(_) => "nversion",
        }
    }

    /// Evaluates the pattern's model at elapsed time `t`.
    ///
    /// Models whose reliability does not depend on `t` ignore it.
    pub fn evaluate(&self, t: f64, system_events: &EventModel, opts: EvalOptions) -> Result<ModelOutput> {
        match self {
            PatternInstance::Unprotected(own) => {
                let model = own.as_ref().unwrap_or(system_events);
                let r = match opts.convention {
                    Convention::Literal => interrupt_probability(t, model)?,
                    Convention::Survival => survival_probability(t, model)?,
                };
                Ok(ModelOutput::time(0.0)
                    .note(format!(
                        "unprotected reliability from the bare event process ({} convention)",
                        opts.convention
                    ))
                    .with_reliability(r, "unprotected reliability"))
            }
            PatternInstance::Diagnosis(p) => diagnosis_overhead(p),
            PatternInstance::Reconfiguration(p) => reconfiguration_model(p, opts.reconfig_mode),
            PatternInstance::Rollback(p) => rollback_with_failures(p, opts.convention),
            PatternInstance::RollForward(p) => rollforward_time(p, opts.convention),
            PatternInstance::Redundancy(p) => redundancy_model(t, p),
            PatternInstance::NVersion(p) => nversion_model(t, p, opts.convention),
        }
    }
}
