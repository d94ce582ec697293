//! Series composition of pattern-protected components.
//!
//! The system fails as soon as any component fails, so its reliability is
//! the product of component reliabilities. Overheads add up.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{positive, unit_interval, ModelError, Result};
use crate::event::{EventModel, Probability};
use crate::patterns::{EvalOptions, ModelOutput, PatternInstance, TimeKind};

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub name: String,
    pub pattern: PatternInstance,
    /// Share of system state covered by the pattern's protection domain.
    /// Recorded in reports; the pattern model applies to the whole component.
    pub scope_fraction: f64,
}

impl Component {
    pub fn new(name: impl Into<String>, pattern: PatternInstance) -> Self {
        Component {
            name: name.into(),
            pattern,
            scope_fraction: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    components: Vec<Component>,
    base_time: f64,
    event_model: EventModel,
}

impl SystemModel {
    pub fn new(components: Vec<Component>, base_time: f64, event_model: EventModel) -> Result<Self> {
        if components.is_empty() {
            return Err(ModelError::Empty("components"));
        }
        positive("base_time", base_time)?;
        let mut seen = HashSet::new();
        for c in &components {
            unit_interval("scope_fraction", c.scope_fraction)?;
            if !seen.insert(c.name.as_str()) {
                return Err(ModelError::Invalid(format!(
                    "duplicate component name `{}`",
                    c.name
                )));
            }
        }
        Ok(SystemModel {
            components,
            base_time,
            event_model,
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn base_time(&self) -> f64 {
        self.base_time
    }

    pub fn event_model(&self) -> &EventModel {
        &self.event_model
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentResult {
    pub name: String,
    pub pattern: &'static str,
    pub scope_fraction: f64,
    pub output: ModelOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub eval_time: f64,
    pub per_component: Vec<ComponentResult>,
    pub system_reliability: Probability,
    pub total_overhead: f64,
    pub diagnostics: Vec<String>,
}

/// `R_1 * R_2 * ... * R_N`.
pub fn series_reliability(values: &[Probability]) -> Result<Probability> {
    if values.is_empty() {
        return Err(ModelError::Empty("reliabilities"));
    }
    Ok(Probability::clamp(values.iter().map(|p| p.value()).product()))
}

/// Sum of component time estimates, taken as given.
pub fn total_overhead(outputs: &[ModelOutput]) -> Result<f64> {
    if outputs.is_empty() {
        return Err(ModelError::Empty("outputs"));
    }
    Ok(outputs.iter().map(|o| o.time_estimate).sum())
}

/// True when durations and dimensionless ratios are summed together.
pub fn mixes_time_kinds(outputs: &[ModelOutput]) -> bool {
    let ratios = outputs.iter().filter(|o| o.time_kind == TimeKind::Ratio).count();
    ratios != 0 && ratios != outputs.len()
}

/// Evaluates every component at `t` and combines them in series.
pub fn evaluate_system(system: &SystemModel, t: f64, opts: EvalOptions) -> Result<EvaluationReport> {
    let mut per_component = Vec::with_capacity(system.components.len());
    for c in &system.components {
        let output = c
            .pattern
            .evaluate(t, &system.event_model, opts)
            .map_err(|e| ModelError::Component {
                name: c.name.clone(),
                source: Box::new(e),
            })?;
        per_component.push(ComponentResult {
            name: c.name.clone(),
            pattern: c.pattern.kind(),
            scope_fraction: c.scope_fraction,
            output,
        });
    }

    let mut diagnostics: Vec<String> = per_component
        .iter()
        .flat_map(|r| r.output.notes.iter().map(move |n| format!("{}: {n}", r.name)))
        .collect();

    let reliabilities: Vec<Probability> = per_component
        .iter()
        .filter_map(|r| r.output.reliability)
        .collect();
    for r in per_component.iter().filter(|r| r.output.reliability.is_none()) {
        diagnostics.push(format!(
            "{}: no reliability term; treated as 1 in the series product",
            r.name
        ));
    }
    let system_reliability = if reliabilities.is_empty() {
        Probability::ONE
    } else {
        series_reliability(&reliabilities)?
    };

    let outputs: Vec<ModelOutput> = per_component.iter().map(|r| r.output.clone()).collect();
    let total = total_overhead(&outputs)?;
    if mixes_time_kinds(&outputs) {
        diagnostics.push(
            "total overhead sums durations with dimensionless (T_FF + recovery) / mtti ratios".into(),
        );
    }

    Ok(EvaluationReport {
        eval_time: t,
        per_component,
        system_reliability,
        total_overhead: total,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::Convention;
    use crate::patterns::{
        DiagnosisParams, NVersionParams, ReconfigurationParams, RedundancyMode, RedundancyParams,
        VersionInputs,
    };
    use approx::assert_relative_eq;

    fn p(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn series_examples() {
        assert_eq!(series_reliability(&[p(1.0), p(1.0), p(1.0)]).unwrap().value(), 1.0);
        assert_relative_eq!(
            series_reliability(&[p(0.9), p(0.9)]).unwrap().value(),
            0.81,
            max_relative = 1e-12
        );
        assert_eq!(series_reliability(&[p(0.5), p(0.0)]).unwrap().value(), 0.0);
        assert!(series_reliability(&[]).is_err());
    }

    #[test]
    fn overhead_examples() {
        assert_eq!(total_overhead(&[ModelOutput::time(5.0)]).unwrap(), 5.0);
        assert_eq!(
            total_overhead(&[ModelOutput::time(101.0), ModelOutput::time(262.0)]).unwrap(),
            363.0
        );
        assert_eq!(total_overhead(&vec![ModelOutput::time(0.0); 3]).unwrap(), 0.0);
        assert!(total_overhead(&[]).is_err());
        assert!(mixes_time_kinds(&[ModelOutput::time(1.0), ModelOutput::ratio(0.1)]));
        assert!(!mixes_time_kinds(&[ModelOutput::ratio(0.2), ModelOutput::ratio(0.1)]));
    }

    fn reconfig(r: &[f64]) -> PatternInstance {
        PatternInstance::Reconfiguration(ReconfigurationParams {
            progress_fraction: 0.5,
            component_count: r.len() as u32,
            reconfig_downtime: 0.1,
            component_reliabilities: r.iter().map(|&x| p(x)).collect(),
        })
    }

    fn redundancy() -> PatternInstance {
        PatternInstance::Redundancy(RedundancyParams {
            serial_time: 100.0,
            replicated_fraction: 0.8,
            degree: 2,
            mode: RedundancyMode::Space,
            voting_time: 2.0,
            replica_mtti: 1000.0,
        })
    }

    #[test]
    fn single_unprotected_survival() {
        let sys = SystemModel::new(
            vec![Component::new("node", PatternInstance::Unprotected(None))],
            100.0,
            EventModel::new(100.0).unwrap(),
        )
        .unwrap();
        let rep = evaluate_system(&sys, 100.0, EvalOptions::with_convention(Convention::Survival)).unwrap();
        assert_relative_eq!(
            rep.system_reliability.value(),
            (-1.0f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn two_component_product() {
        // 0.99 from two 0.9 reconfigurable components, 0.75 from d=2 redundancy at t = λ/2
        let sys = SystemModel::new(
            vec![
                Component::new("pool", reconfig(&[0.9, 0.9])),
                Component::new("solver", redundancy()),
            ],
            1000.0,
            EventModel::new(1000.0).unwrap(),
        )
        .unwrap();
        let rep = evaluate_system(&sys, 500.0, EvalOptions::default()).unwrap();
        assert_relative_eq!(rep.system_reliability.value(), 0.7425, max_relative = 1e-12);
        assert_eq!(rep.per_component[0].name, "pool");
        assert_eq!(rep.per_component[1].name, "solver");
        let sum: f64 = rep.per_component.iter().map(|c| c.output.time_estimate).sum();
        assert!((rep.total_overhead - sum).abs() <= 1e-12);
    }

    #[test]
    fn neutral_component_changes_nothing() {
        let base = vec![
            Component::new("pool", reconfig(&[0.9, 0.8])),
            Component::new("solver", redundancy()),
        ];
        let em = EventModel::new(1000.0).unwrap();
        let a = evaluate_system(&SystemModel::new(base.clone(), 10.0, em.clone()).unwrap(), 100.0, EvalOptions::default()).unwrap();
        // perfect versions and voter: reliability 1, overhead 0
        let perfect = PatternInstance::NVersion(NVersionParams {
            versions: VersionInputs::ExclusiveSuccess(vec![p(0.0), p(0.0)]),
            voter_failure_prob: p(0.0),
            event_model: em.clone(),
        });
        let mut more = base;
        more.push(Component::new("perfect", perfect));
        let b = evaluate_system(&SystemModel::new(more, 10.0, em).unwrap(), 100.0, EvalOptions::default()).unwrap();
        assert_eq!(a.system_reliability, b.system_reliability);
        assert_eq!(a.total_overhead, b.total_overhead);
    }

    #[test]
    fn diagnosis_has_no_reliability() {
        let sys = SystemModel::new(
            vec![Component::new(
                "monitor",
                PatternInstance::Diagnosis(DiagnosisParams {
                    base_time: 100.0,
                    observed_params: 4,
                    inference_time: 0.5,
                    polling_frequency: 2.0,
                }),
            )],
            100.0,
            EventModel::new(10.0).unwrap(),
        )
        .unwrap();
        let rep = evaluate_system(&sys, 1.0, EvalOptions::default()).unwrap();
        assert_eq!(rep.system_reliability, Probability::ONE);
        assert!(rep.diagnostics.iter().any(|d| d.contains("treated as 1")));
    }

    #[test]
    fn errors_carry_component_name() {
        let mut bad = redundancy();
        if let PatternInstance::Redundancy(r) = &mut bad {
            r.replicated_fraction = 1.5;
        }
        let sys = SystemModel::new(vec![Component::new("broken", bad)], 1.0, EventModel::new(1.0).unwrap()).unwrap();
        let err = evaluate_system(&sys, 1.0, EvalOptions::default()).unwrap_err();
        assert!(err.to_string().contains("broken"));
        assert!(err.to_string().contains("replicated_fraction"));
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        let em = EventModel::new(1.0).unwrap();
        assert!(SystemModel::new(vec![], 1.0, em.clone()).is_err());
        let c = Component::new("a", PatternInstance::Unprotected(None));
        assert!(SystemModel::new(vec![c.clone(), c], 1.0, em).is_err());
    }
}
