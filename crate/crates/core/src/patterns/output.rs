use serde::{Deserialize, Serialize};

use crate::event::{Convention, Probability};

/// Whether a `time_estimate` is a duration or a dimensionless ratio.
///
/// The failure-aware checkpoint expressions divide a time by the MTTI, so
/// their "time" is a ratio. Summing the two kinds is allowed but flagged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeKind {
    #[default]
    Time,
    Ratio,
}

/// Degraded-performance factor used by the reconfiguration time model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconfigMode {
    /// `(n - 1) / n`, as printed.
    #[default]
    Literal,
    /// `n / (n - 1)`: the remaining work runs on fewer components and slows down.
    Corrected,
}

impl ReconfigMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReconfigMode::Literal => "literal",
            ReconfigMode::Corrected => "corrected",
        }
    }
}

/// Evaluation-wide switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub convention: Convention,
    pub reconfig_mode: ReconfigMode,
}

impl EvalOptions {
    pub fn with_convention(convention: Convention) -> Self {
        EvalOptions {
            convention,
            ..Default::default()
        }
    }
}

/// Result of evaluating one pattern model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelOutput {
    pub time_estimate: f64,
    pub time_kind: TimeKind,
    pub reliability: Option<Probability>,
    pub notes: Vec<String>,
}

impl ModelOutput {
    pub fn time(time_estimate: f64) -> Self {
        ModelOutput {
            time_estimate,
            time_kind: TimeKind::Time,
            reliability: None,
            notes: Vec::new(),
        }
    }

    pub fn ratio(time_estimate: f64) -> Self {
        ModelOutput {
            time_kind: TimeKind::Ratio,
            ..ModelOutput::time(time_estimate)
        }
    }

    pub(crate) fn with_reliability(mut self, p: Probability, what: &str) -> Self {
        if p.clamped() {
            self.notes
                .push(format!("{what} left [0, 1] and was clamped to {}", p.value()));
        }
        self.reliability = Some(p);
        self
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}
