//! Rollback and roll-forward recovery.
//!
//! Both split operation into regular execution `o`, checkpoint creation `δ`
//! taken at rate `r`, and recovery `γ`. The failure-free time is
//! `T_FF = o + δ / r`. With failures the model yields `(T_FF + γ) / η`,
//! which is a ratio rather than a time, and the exponential event term
//! `1 - exp(-(T_FF + γ) / η)` as the reliability.
//!
//! Roll-forward with message logging replaces `δ` by `M * t_logging`.

use crate::error::{domain, nonnegative, positive, ModelError, Result};
use crate::event::{Convention, EventModel, Probability};
use crate::patterns::{exponential_term, ModelOutput};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecoveryMode {
    Checkpointing,
    MessageLogging {
        message_count: u64,
        log_time_per_message: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointParams {
    pub regular_time: f64,
    pub checkpoint_cost: f64,
    pub checkpoint_rate: f64,
    pub recovery_cost: f64,
    pub event_model: EventModel,
    pub mode: RecoveryMode,
}

impl CheckpointParams {
    /// Checkpointing-mode parameters.
    pub fn checkpointing(
        regular_time: f64,
        checkpoint_cost: f64,
        checkpoint_rate: f64,
        recovery_cost: f64,
        event_model: EventModel,
    ) -> Self {
        CheckpointParams {
            regular_time,
            checkpoint_cost,
            checkpoint_rate,
            recovery_cost,
            event_model,
            mode: RecoveryMode::Checkpointing,
        }
    }

    pub fn validate(&self) -> Result<()> {
        nonnegative("regular_time", self.regular_time)?;
        nonnegative("checkpoint_cost", self.checkpoint_cost)?;
        positive("checkpoint_rate", self.checkpoint_rate)?;
        nonnegative("recovery_cost", self.recovery_cost)?;
        if let RecoveryMode::MessageLogging {
            log_time_per_message,
            ..
        } = self.mode
        {
            nonnegative("log_time_per_message", log_time_per_message)?;
        }
        Ok(())
    }

    /// `δ`, or `M * t_logging` under message logging.
    pub fn effective_checkpoint_cost(&self) -> f64 {
        match self.mode {
            RecoveryMode::Checkpointing => self.checkpoint_cost,
            RecoveryMode::MessageLogging {
                message_count,
                log_time_per_message,
            } => message_count as f64 * log_time_per_message,
        }
    }

    /// `T_FF = o + δ / r`.
    pub fn failure_free_time(&self) -> f64 {
        self.regular_time + self.effective_checkpoint_cost() / self.checkpoint_rate
    }

    fn exposure_ratio(&self) -> f64 {
        (self.failure_free_time() + self.recovery_cost) / self.event_model.mtti()
    }
}

fn require_checkpointing(p: &CheckpointParams) -> Result<()> {
    match p.mode {
        RecoveryMode::Checkpointing => Ok(()),
        RecoveryMode::MessageLogging { .. } => Err(ModelError::Invalid(
            "rollback recovery requires checkpointing mode".into(),
        )),
    }
}

/// `o + δ / r`.
pub fn rollback_failure_free_time(p: &CheckpointParams) -> Result<ModelOutput> {
    p.validate()?;
    require_checkpointing(p)?;
    Ok(ModelOutput::time(p.failure_free_time()))
}

fn with_failures(p: &CheckpointParams, convention: Convention, what: &str) -> ModelOutput {
    let t_ff = p.failure_free_time();
    let r = exponential_term(p.exposure_ratio(), convention);
    ModelOutput::ratio(p.exposure_ratio())
        .note(format!(
            "{what} time estimate (T_FF + recovery) / mtti is dimensionless; T_FF = {t_ff}"
        ))
        .note(format!("reliability evaluated under the {convention} convention"))
        .with_reliability(r, what)
}

/// `(T_FF + γ) / η` and reliability `1 - exp(-(T_FF + γ) / η)`.
pub fn rollback_with_failures(p: &CheckpointParams, convention: Convention) -> Result<ModelOutput> {
    p.validate()?;
    require_checkpointing(p)?;
    Ok(with_failures(p, convention, "rollback"))
}

/// Same arithmetic as rollback; logging mode substitutes `δ = M * t_logging`.
pub fn rollforward_time(p: &CheckpointParams, convention: Convention) -> Result<ModelOutput> {
    p.validate()?;
    let mut out = with_failures(p, convention, "roll-forward");
    out.reliability = Some(rollforward_reliability(p, convention)?);
    Ok(out)
}

/// Logging: `1 - exp(-(T_FF + M t_logging) / η)`; checkpointing:
/// `1 - exp(-(T_FF + γ) / η)`.
pub fn rollforward_reliability(p: &CheckpointParams, convention: Convention) -> Result<Probability> {
    p.validate()?;
    let window = match p.mode {
        RecoveryMode::Checkpointing => p.failure_free_time() + p.recovery_cost,
        RecoveryMode::MessageLogging { .. } => {
            p.failure_free_time() + p.effective_checkpoint_cost()
        }
    };
    if !window.is_finite() {
        return Err(domain("exposure window", "finite", window));
    }
    Ok(exponential_term(window / p.event_model.mtti(), convention))
}
