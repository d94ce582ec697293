use serde::{Deserialize, Serialize};

use crate::error::{domain, positive, ModelError, Result};
use crate::patterns::RedundancyMode;

/// Whether `fault_mtti` describes one node or the whole system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MttiScope {
    /// Each of `node_count` nodes faults independently; the system MTTI is
    /// `fault_mtti / node_count`.
    PerNode,
    #[default]
    System,
}

impl MttiScope {
    pub fn as_str(self) -> &'static str {
        match self {
            MttiScope::PerNode => "per_node",
            MttiScope::System => "system",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// The first fault ends the trial.
    None,
    /// Save state every `interval` units of work at `cost`; a fault rolls
    /// back to the last checkpoint and pays `recovery` before resuming.
    Checkpoint {
        interval: f64,
        cost: f64,
        recovery: f64,
    },
    /// `degree` replicas; the run survives while at least
    /// `survival_threshold` replicas (space) or executions (time) are good.
    Replication {
        degree: u32,
        mode: RedundancyMode,
        survival_threshold: u32,
        voting_cost: f64,
    },
    /// `components` share the work; each failure removes one, costs
    /// `downtime`, and slows progress to `alive / components`.
    Reconfiguration {
        components: u32,
        downtime: f64,
        min_components: u32,
    },
}

impl Policy {
    pub fn kind(&self) -> &'static str {
        match self {
            Policy::None => "none",
            Policy::Checkpoint { .. } => "checkpoint",
            Policy::Replication { .. } => "replication",
            Policy::Reconfiguration { .. } => "reconfiguration",
        }
    }
}

/// An executable description of one simulated workload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub work: f64,
    /// Number of processors. Only used to scale a per-node MTTI.
    pub node_count: u32,
    /// May be `+inf` for a fault-free run.
    pub fault_mtti: f64,
    pub mtti_scope: MttiScope,
    pub policy: Policy,
    pub deadline: Option<f64>,
    pub max_sim_time: f64,
}

impl SimScenario {
    pub fn new(work: f64, fault_mtti: f64, policy: Policy) -> Self {
        SimScenario {
            work,
            node_count: 1,
            fault_mtti,
            mtti_scope: MttiScope::System,
            policy,
            deadline: None,
            max_sim_time: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("work", self.work)?;
        if self.node_count < 1 {
            return Err(domain("node_count", ">= 1", f64::from(self.node_count)));
        }
        if self.fault_mtti.is_nan() || self.fault_mtti <= 0.0 {
            return Err(domain("fault_mtti", "> 0", self.fault_mtti));
        }
        if let Some(d) = self.deadline {
            if d.is_nan() || d <= 0.0 {
                return Err(domain("deadline", "> 0", d));
            }
        }
        if self.max_sim_time.is_nan() || self.max_sim_time <= 0.0 {
            return Err(domain("max_sim_time", "> 0", self.max_sim_time));
        }
        match self.policy {
            Policy::None => {}
            Policy::Checkpoint {
                interval,
                cost,
                recovery,
            } => {
                positive("interval", interval)?;
                crate::error::nonnegative("cost", cost)?;
                crate::error::nonnegative("recovery", recovery)?;
            }
            Policy::Replication {
                degree,
                survival_threshold,
                voting_cost,
                ..
            } => {
                if degree < 1 {
                    return Err(domain("degree", ">= 1", f64::from(degree)));
                }
                if survival_threshold < 1 || survival_threshold > degree {
                    return Err(ModelError::Invalid(format!(
                        "survival_threshold must be in [1, degree = {degree}], got {survival_threshold}"
                    )));
                }
                crate::error::nonnegative("voting_cost", voting_cost)?;
            }
            Policy::Reconfiguration {
                components,
                downtime,
                min_components,
            } => {
                if min_components < 1 {
                    return Err(domain("min_components", ">= 1", f64::from(min_components)));
                }
                if components < min_components {
                    return Err(ModelError::Invalid(format!(
                        "components ({components}) must be >= min_components ({min_components})"
                    )));
                }
                crate::error::nonnegative("downtime", downtime)?;
            }
        }
        Ok(())
    }

    /// MTTI of the whole system (and of each replica under replication).
    pub fn system_mtti(&self) -> f64 {
        match self.mtti_scope {
            MttiScope::System => self.fault_mtti,
            MttiScope::PerNode => self.fault_mtti / f64::from(self.node_count),
        }
    }

    /// MTTI of one component under the reconfiguration policy.
    pub fn component_mtti(&self, components: u32) -> f64 {
        match self.mtti_scope {
            MttiScope::PerNode => self.fault_mtti,
            MttiScope::System => self.fault_mtti * f64::from(components),
        }
    }

    /// Earliest of the deadline and the simulation cap.
    pub fn time_limit(&self) -> f64 {
        self.deadline
            .map_or(self.max_sim_time, |d| d.min(self.max_sim_time))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = SimScenario::new(10.0, 5.0, Policy::None);
        assert!(ok.validate().is_ok());
        assert!(SimScenario::new(0.0, 5.0, Policy::None).validate().is_err());
        assert!(SimScenario::new(1.0, f64::INFINITY, Policy::None).validate().is_ok());
        let bad_k = SimScenario::new(
            1.0,
            5.0,
            Policy::Replication {
                degree: 2,
                mode: RedundancyMode::Space,
                survival_threshold: 3,
                voting_cost: 0.0,
            },
        );
        assert!(bad_k.validate().is_err());
        let bad_tau = SimScenario::new(
            1.0,
            5.0,
            Policy::Checkpoint {
                interval: 0.0,
                cost: 0.0,
                recovery: 0.0,
            },
        );
        assert!(bad_tau.validate().is_err());
    }

    #[test]
    fn mtti_scaling() {
        let mut s = SimScenario::new(1.0, 100.0, Policy::None);
        s.node_count = 4;
        assert_eq!(s.system_mtti(), 100.0);
        s.mtti_scope = MttiScope::PerNode;
        assert_eq!(s.system_mtti(), 25.0);
        assert_eq!(s.component_mtti(4), 100.0);
    }
}
