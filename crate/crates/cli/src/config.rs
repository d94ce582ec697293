//! Config document: schema, validation, and conversion into model types.
//!
//! The document is TOML with a fixed, versioned schema. Unknown keys are
//! rejected so that a misspelled parameter cannot silently fall back to a
//! default.

use std::path::Path;

use respat::composition::{Component, SystemModel};
use respat::patterns::{
    CheckpointParams, DiagnosisParams, NVersionParams, PatternInstance, ReconfigMode,
    ReconfigurationParams, RecoveryMode, RedundancyMode, RedundancyParams, VersionInputs,
};
use respat::sim::{MttiScope, Policy, SimScenario};
use respat::{Convention, EventModel, ModelError, Probability};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::sweep::SweepSpec;

pub const SCHEMA_VERSION: &str = "1";

fn default_scope() -> f64 {
    1.0
}

fn default_nodes() -> u32 {
    1
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub version: String,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default, skip_serializing_if = "is_default")]
    pub reconfiguration_mode: ReconfigMode,
    pub system: SystemSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub base_time: f64,
    /// System-level MTTI, used by components that do not set their own.
    pub mtti: f64,
    /// Time at which reliabilities are evaluated. Defaults to `base_time`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_time: Option<f64>,
    pub components: Vec<ComponentSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSection {
    pub name: String,
    #[serde(default = "default_scope")]
    pub scope_fraction: f64,
    pub pattern: PatternSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RollForwardMode {
    #[default]
    Checkpointing,
    MessageLogging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternSection {
    Unprotected {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mtti: Option<f64>,
    },
    Diagnosis {
        base_time: f64,
        observed_params: u32,
        inference_time: f64,
        polling_frequency: f64,
    },
    Reconfiguration {
        progress_fraction: f64,
        component_count: u32,
        reconfig_downtime: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        component_reliabilities: Vec<f64>,
    },
    Rollback {
        regular_time: f64,
        checkpoint_cost: f64,
        checkpoint_rate: f64,
        recovery_cost: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mtti: Option<f64>,
    },
    Rollforward {
        regular_time: f64,
        #[serde(default)]
        checkpoint_cost: f64,
        checkpoint_rate: f64,
        recovery_cost: f64,
        #[serde(default)]
        mode: RollForwardMode,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        message_count: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        log_time_per_message: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mtti: Option<f64>,
    },
    Redundancy {
        serial_time: f64,
        replicated_fraction: f64,
        degree: u32,
        mode: RedundancyMode,
        #[serde(default)]
        voting_time: f64,
        replica_mtti: f64,
    },
    Nversion {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        version_success_probs: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exclusive_success_probs: Option<Vec<f64>>,
        #[serde(default)]
        voter_failure_prob: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mtti: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub work: f64,
    #[serde(default = "default_nodes")]
    pub node_count: u32,
    pub fault_mtti: f64,
    #[serde(default)]
    pub mtti_scope: MttiScope,
    pub policy: PolicySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadline: Option<f64>,
    /// Defaults to 1000 x `work`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_sim_time: Option<f64>,
    /// Times at which the empirical reliability curve is reported.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub report_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySection {
    None,
    Checkpoint {
        interval: f64,
        cost: f64,
        recovery: f64,
    },
    Replication {
        degree: u32,
        mode: RedundancyMode,
        survival_threshold: u32,
        #[serde(default)]
        voting_cost: f64,
    },
    Reconfiguration {
        components: u32,
        downtime: f64,
        min_components: u32,
    },
}

/// Collects validation errors with their field paths.
#[derive(Default)]
struct Checker {
    errors: Vec<String>,
}

impl Checker {
    fn fail(&mut self, path: &str, msg: impl AsRef<str>) {
        self.errors.push(format!("{path}: {}", msg.as_ref()));
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.fail(path, format!("must be finite and > 0, got {v}"));
        }
    }

    /// `> 0`, allowing `+inf`.
    fn positive_or_inf(&mut self, path: &str, v: f64) {
        if v.is_nan() || v <= 0.0 {
            self.fail(path, format!("must be > 0, got {v}"));
        }
    }

    fn nonnegative(&mut self, path: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.fail(path, format!("must be finite and >= 0, got {v}"));
        }
    }

    fn unit(&mut self, path: &str, v: f64) {
        if !(0.0..=1.0).contains(&v) {
            self.fail(path, format!("must be in [0, 1], got {v}"));
        }
    }

    fn at_least(&mut self, path: &str, v: u64, min: u64) {
        if v < min {
            self.fail(path, format!("must be >= {min}, got {v}"));
        }
    }
}

impl ConfigDocument {
    /// Parses and validates a document held in memory.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let doc: ConfigDocument =
            toml::from_str(text).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
        let errors = doc.validate();
        if !errors.is_empty() {
            return Err(CliError::Validation(errors));
        }
        Ok(doc)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config documents always serialize")
    }

    pub fn eval_time(&self) -> f64 {
        self.system.eval_time.unwrap_or(self.system.base_time)
    }

    /// Checks every field and returns all problems found.
    pub fn validate(&self) -> Vec<String> {
        let mut c = Checker::default();
        if self.version != SCHEMA_VERSION {
            c.fail(
                "version",
                format!(
                    "unsupported schema version `{}` (this build reads `{SCHEMA_VERSION}`)",
                    self.version
                ),
            );
        }
        self.check_system(&mut c);
        if let Some(s) = &self.scenario {
            check_scenario(s, &mut c);
        }
        if let Some(sw) = &self.sweep {
            if let Err(e) = sw.resolve(self) {
                c.errors.extend(e);
            }
        }
        c.errors
    }

    fn check_system(&self, c: &mut Checker) {
        let s = &self.system;
        c.positive("system.base_time", s.base_time);
        c.positive("system.mtti", s.mtti);
        if let Some(t) = s.eval_time {
            if t.is_nan() || t < 0.0 {
                c.fail("system.eval_time", format!("must be >= 0, got {t}"));
            }
        }
        if s.components.is_empty() {
            c.fail("system.components", "at least one component is required");
        }
        for (i, comp) in s.components.iter().enumerate() {
            let path = format!("system.components[{i}]");
            if comp.name.is_empty() {
                c.fail(&format!("{path}.name"), "must not be empty");
            }
            if s.components[..i].iter().any(|o| o.name == comp.name) {
                c.fail(&format!("{path}.name"), format!("duplicate component name `{}`", comp.name));
            }
            c.unit(&format!("{path}.scope_fraction"), comp.scope_fraction);
            check_pattern(&comp.pattern, &format!("{path}.pattern"), c);
        }
    }

    /// Builds the analytic system model.
    pub fn system_model(&self) -> Result<SystemModel, ModelError> {
        let events = EventModel::new(self.system.mtti)?;
        let components = self
            .system
            .components
            .iter()
            .map(|c| {
                Ok(Component {
                    name: c.name.clone(),
                    pattern: c.pattern.to_instance(&events)?,
                    scope_fraction: c.scope_fraction,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        SystemModel::new(components, self.system.base_time, events)
    }

    /// Builds the simulation scenario, if the document has one.
    pub fn sim_scenario(&self) -> Option<Result<SimScenario, ModelError>> {
        self.scenario.as_ref().map(|s| {
            let sc = s.to_scenario();
            sc.validate().map(|_| sc)
        })
    }
}

fn check_pattern(p: &PatternSection, path: &str, c: &mut Checker) {
    let f = |name: &str| format!("{path}.{name}");
    match p {
        PatternSection::Unprotected { mtti } => {
            if let Some(m) = mtti {
                c.positive(&f("mtti"), *m);
            }
        }
        PatternSection::Diagnosis {
            base_time,
            observed_params,
            inference_time,
            polling_frequency,
        } => {
            c.nonnegative(&f("base_time"), *base_time);
            c.at_least(&f("observed_params"), u64::from(*observed_params), 1);
            c.nonnegative(&f("inference_time"), *inference_time);
            c.positive(&f("polling_frequency"), *polling_frequency);
        }
        PatternSection::Reconfiguration {
            progress_fraction,
            component_count,
            reconfig_downtime,
            component_reliabilities,
        } => {
            c.unit(&f("progress_fraction"), *progress_fraction);
            c.at_least(&f("component_count"), u64::from(*component_count), 2);
            c.nonnegative(&f("reconfig_downtime"), *reconfig_downtime);
            if !component_reliabilities.is_empty()
                && component_reliabilities.len() != *component_count as usize
            {
                c.fail(
                    &f("component_reliabilities"),
                    format!(
                        "needs component_count = {component_count} entries, got {}",
                        component_reliabilities.len()
                    ),
                );
            }
            for (i, r) in component_reliabilities.iter().enumerate() {
                c.unit(&f(&format!("component_reliabilities[{i}]")), *r);
            }
        }
        PatternSection::Rollback {
            regular_time,
            checkpoint_cost,
            checkpoint_rate,
            recovery_cost,
            mtti,
        } => {
            c.nonnegative(&f("regular_time"), *regular_time);
            c.nonnegative(&f("checkpoint_cost"), *checkpoint_cost);
            c.positive(&f("checkpoint_rate"), *checkpoint_rate);
            c.nonnegative(&f("recovery_cost"), *recovery_cost);
            if let Some(m) = mtti {
                c.positive(&f("mtti"), *m);
            }
        }
        PatternSection::Rollforward {
            regular_time,
            checkpoint_cost,
            checkpoint_rate,
            recovery_cost,
            mode,
            message_count,
            log_time_per_message,
            mtti,
        } => {
            c.nonnegative(&f("regular_time"), *regular_time);
            c.nonnegative(&f("checkpoint_cost"), *checkpoint_cost);
            c.positive(&f("checkpoint_rate"), *checkpoint_rate);
            c.nonnegative(&f("recovery_cost"), *recovery_cost);
            if let Some(m) = mtti {
                c.positive(&f("mtti"), *m);
            }
            if *mode == RollForwardMode::MessageLogging {
                if message_count.is_none() {
                    c.fail(&f("message_count"), "required when mode = \"message_logging\"");
                }
                match log_time_per_message {
                    None => c.fail(
                        &f("log_time_per_message"),
                        "required when mode = \"message_logging\"",
                    ),
                    Some(t) => c.nonnegative(&f("log_time_per_message"), *t),
                }
            }
        }
        PatternSection::Redundancy {
            serial_time,
            replicated_fraction,
            degree,
            voting_time,
            replica_mtti,
            ..
        } => {
            c.positive(&f("serial_time"), *serial_time);
            c.unit(&f("replicated_fraction"), *replicated_fraction);
            c.at_least(&f("degree"), u64::from(*degree), 1);
            c.nonnegative(&f("voting_time"), *voting_time);
            c.positive(&f("replica_mtti"), *replica_mtti);
        }
        PatternSection::Nversion {
            version_success_probs,
            exclusive_success_probs,
            voter_failure_prob,
            mtti,
        } => {
            let list = match (version_success_probs, exclusive_success_probs) {
                (Some(v), None) => Some(("version_success_probs", v)),
                (None, Some(v)) => Some(("exclusive_success_probs", v)),
                _ => {
                    c.fail(
                        path,
                        "exactly one of version_success_probs and exclusive_success_probs is required",
                    );
                    None
                }
            };
            if let Some((name, v)) = list {
                if v.len() < 2 {
                    c.fail(&f(name), format!("needs at least 2 versions, got {}", v.len()));
                }
                for (i, p) in v.iter().enumerate() {
                    c.unit(&f(&format!("{name}[{i}]")), *p);
                }
            }
            c.unit(&f("voter_failure_prob"), *voter_failure_prob);
            if let Some(m) = mtti {
                c.positive(&f("mtti"), *m);
            }
        }
    }
}

fn check_scenario(s: &ScenarioSection, c: &mut Checker) {
    c.positive("scenario.work", s.work);
    c.at_least("scenario.node_count", u64::from(s.node_count), 1);
    c.positive_or_inf("scenario.fault_mtti", s.fault_mtti);
    if let Some(d) = s.deadline {
        c.positive_or_inf("scenario.deadline", d);
    }
    if let Some(m) = s.max_sim_time {
        c.positive_or_inf("scenario.max_sim_time", m);
    }
    for (i, t) in s.report_times.iter().enumerate() {
        c.nonnegative(&format!("scenario.report_times[{i}]"), *t);
    }
    match &s.policy {
        PolicySection::None => {}
        PolicySection::Checkpoint {
            interval,
            cost,
            recovery,
        } => {
            c.positive("scenario.policy.interval", *interval);
            c.nonnegative("scenario.policy.cost", *cost);
            c.nonnegative("scenario.policy.recovery", *recovery);
        }
        PolicySection::Replication {
            degree,
            survival_threshold,
            voting_cost,
            ..
        } => {
            c.at_least("scenario.policy.degree", u64::from(*degree), 1);
            if *survival_threshold < 1 || survival_threshold > degree {
                c.fail(
                    "scenario.policy.survival_threshold",
                    format!("must be in [1, degree = {degree}], got {survival_threshold}"),
                );
            }
            c.nonnegative("scenario.policy.voting_cost", *voting_cost);
        }
        PolicySection::Reconfiguration {
            components,
            downtime,
            min_components,
        } => {
            c.at_least("scenario.policy.min_components", u64::from(*min_components), 1);
            if components < min_components {
                c.fail(
                    "scenario.policy.components",
                    format!("must be >= min_components = {min_components}, got {components}"),
                );
            }
            c.nonnegative("scenario.policy.downtime", *downtime);
        }
    }
}

fn prob(v: f64) -> Result<Probability, ModelError> {
    Probability::new(v)
}

fn own_events(mtti: Option<f64>, system: &EventModel) -> Result<EventModel, ModelError> {
    match mtti {
        Some(m) => EventModel::new(m),
        None => Ok(system.clone()),
    }
}

impl PatternSection {
    pub fn kind(&self) -> &'static str {
        match self {
            PatternSection::Unprotected { .. } => "unprotected",
            PatternSection::Diagnosis { .. } => "diagnosis",
            PatternSection::Reconfiguration { .. } => "reconfiguration",
            PatternSection::Rollback { .. } => "rollback",
            PatternSection::Rollforward { .. } => "rollforward",
            PatternSection::Redundancy { .. } => "redundancy",
            PatternSection::Nversion { .. } => "nversion",
        }
    }

    pub fn to_instance(&self, system: &EventModel) -> Result<PatternInstance, ModelError> {
        Ok(match self {
            PatternSection::Unprotected { mtti } => {
                PatternInstance::Unprotected(mtti.map(EventModel::new).transpose()?)
            }
            PatternSection::Diagnosis {
                base_time,
                observed_params,
                inference_time,
                polling_frequency,
            } => PatternInstance::Diagnosis(DiagnosisParams {
                base_time: *base_time,
                observed_params: *observed_params,
                inference_time: *inference_time,
                polling_frequency: *polling_frequency,
            }),
            PatternSection::Reconfiguration {
                progress_fraction,
                component_count,
                reconfig_downtime,
                component_reliabilities,
            } => PatternInstance::Reconfiguration(ReconfigurationParams {
                progress_fraction: *progress_fraction,
                component_count: *component_count,
                reconfig_downtime: *reconfig_downtime,
                component_reliabilities: component_reliabilities
                    .iter()
                    .map(|&r| prob(r))
                    .collect::<Result<_, _>>()?,
            }),
            PatternSection::Rollback {
                regular_time,
                checkpoint_cost,
                checkpoint_rate,
                recovery_cost,
                mtti,
            } => PatternInstance::Rollback(CheckpointParams::checkpointing(
                *regular_time,
                *checkpoint_cost,
                *checkpoint_rate,
                *recovery_cost,
                own_events(*mtti, system)?,
            )),
            PatternSection::Rollforward {
                regular_time,
                checkpoint_cost,
                checkpoint_rate,
                recovery_cost,
                mode,
                message_count,
                log_time_per_message,
                mtti,
            } => PatternInstance::RollForward(CheckpointParams {
                regular_time: *regular_time,
                checkpoint_cost: *checkpoint_cost,
                checkpoint_rate: *checkpoint_rate,
                recovery_cost: *recovery_cost,
                event_model: own_events(*mtti, system)?,
                mode: match mode {
                    RollForwardMode::Checkpointing => RecoveryMode::Checkpointing,
                    RollForwardMode::MessageLogging => RecoveryMode::MessageLogging {
                        message_count: message_count.unwrap_or(0),
                        log_time_per_message: log_time_per_message.unwrap_or(0.0),
                    },
                },
            }),
            PatternSection::Redundancy {
                serial_time,
                replicated_fraction,
                degree,
                mode,
                voting_time,
                replica_mtti,
            } => PatternInstance::Redundancy(RedundancyParams {
                serial_time: *serial_time,
                replicated_fraction: *replicated_fraction,
                degree: *degree,
                mode: *mode,
                voting_time: *voting_time,
                replica_mtti: *replica_mtti,
            }),
            PatternSection::Nversion {
                version_success_probs,
                exclusive_success_probs,
                voter_failure_prob,
                mtti,
            } => {
                let to_probs = |v: &Vec<f64>| v.iter().map(|&p| prob(p)).collect::<Result<Vec<_>, _>>();
                let versions = match (version_success_probs, exclusive_success_probs) {
                    (Some(v), _) => VersionInputs::SuccessProbabilities(to_probs(v)?),
                    (None, Some(a)) => VersionInputs::ExclusiveSuccess(to_probs(a)?),
                    (None, None) => {
                        return Err(ModelError::Invalid("n-version inputs missing".into()))
                    }
                };
                PatternInstance::NVersion(NVersionParams {
                    versions,
                    voter_failure_prob: prob(*voter_failure_prob)?,
                    event_model: own_events(*mtti, system)?,
                })
            }
        })
    }
}

impl ScenarioSection {
    pub fn to_scenario(&self) -> SimScenario {
        SimScenario {
            work: self.work,
            node_count: self.node_count,
            fault_mtti: self.fault_mtti,
            mtti_scope: self.mtti_scope,
            policy: match &self.policy {
                PolicySection::None => Policy::None,
                PolicySection::Checkpoint {
                    interval,
                    cost,
                    recovery,
                } => Policy::Checkpoint {
                    interval: *interval,
                    cost: *cost,
                    recovery: *recovery,
                },
                PolicySection::Replication {
                    degree,
                    mode,
                    survival_threshold,
                    voting_cost,
                } => Policy::Replication {
                    degree: *degree,
                    mode: *mode,
                    survival_threshold: *survival_threshold,
                    voting_cost: *voting_cost,
                },
                PolicySection::Reconfiguration {
                    components,
                    downtime,
                    min_components,
                } => Policy::Reconfiguration {
                    components: *components,
                    downtime: *downtime,
                    min_components: *min_components,
                },
            },
            deadline: self.deadline,
            max_sim_time: self.max_sim_time.unwrap_or(1000.0 * self.work),
        }
    }
}

/// Reads, parses, and validates a config file.
pub fn parse_config(path: &Path) -> Result<ConfigDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(vec![format!("cannot read config {}: {e}", path.display())])
    })?;
    ConfigDocument::from_toml_str(&text)
}
