//! Parameter sweeps over a single numeric config field.
//!
//! A parameter path is a dotted walk through the config document. Array
//! elements are selected by their `name` field or by numeric index, e.g.
//! `scenario.policy.interval` or `system.components.solver.pattern.degree`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ConfigDocument;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
    #[serde(default)]
    pub scale: Scale,
}

/// Inclusive grid of `steps` points from `start` to `stop`.
pub fn grid(start: f64, stop: f64, steps: u32, scale: Scale) -> Vec<f64> {
    let n = steps as usize;
    if n == 1 {
        return vec![start];
    }
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == n - 1 {
                return stop;
            }
            let f = i as f64 / last;
            match scale {
                Scale::Linear => start + (stop - start) * f,
                Scale::Log => (start.ln() + (stop.ln() - start.ln()) * f).exp(),
            }
        })
        .collect()
}

fn lookup<'a>(root: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(root, |v, seg| match v {
        Value::Object(m) => m.get(seg),
        Value::Array(items) => select(items, seg).map(|i| &items[i]),
        _ => None,
    })
}

fn lookup_mut<'a>(root: &'a mut Value, path: &str) -> Option<&'a mut Value> {
    path.split('.').try_fold(root, |v, seg| match v {
        Value::Object(m) => m.get_mut(seg),
        Value::Array(items) => {
            let i = select(items, seg)?;
            items.get_mut(i)
        }
        _ => None,
    })
}

fn select(items: &[Value], seg: &str) -> Option<usize> {
    items
        .iter()
        .position(|it| it.get("name").and_then(Value::as_str) == Some(seg))
        .or_else(|| seg.parse::<usize>().ok().filter(|&i| i < items.len()))
}

fn is_integral(x: f64) -> bool {
    x.is_finite() && x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64
}

impl SweepSpec {
    /// Checks the sweep against `doc` and returns the grid.
    pub fn resolve(&self, doc: &ConfigDocument) -> Result<Vec<f64>, Vec<String>> {
        let mut errors = Vec::new();
        if self.steps < 2 {
            errors.push(format!("sweep.steps: must be >= 2, got {}", self.steps));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            errors.push("sweep.start, sweep.stop: must be finite".to_string());
        } else if self.start == self.stop {
            errors.push("sweep.stop: must differ from sweep.start".to_string());
        }
        if self.scale == Scale::Log && !(self.start > 0.0 && self.stop > 0.0) {
            errors.push(format!(
                "sweep.scale: log grid needs start > 0 and stop > 0, got {} and {}",
                self.start, self.stop
            ));
        }

        let root = serde_json::to_value(doc).expect("config documents always serialize");
        let integer = match lookup(&root, &self.parameter) {
            // report columns are named after these, so they stay fixed
            Some(_) if self.parameter.starts_with("scenario.report_times") => {
                errors.push("sweep.parameter: report_times cannot be swept".to_string());
                false
            }
            Some(Value::Number(n)) => !n.is_f64(),
            Some(_) => {
                errors.push(format!(
                    "sweep.parameter: `{}` is not a numeric field",
                    self.parameter
                ));
                false
            }
            None => {
                errors.push(format!(
                    "sweep.parameter: `{}` does not resolve to a field of this document",
                    self.parameter
                ));
                false
            }
        };
        if !errors.is_empty() {
            return Err(errors);
        }

        let points = grid(self.start, self.stop, self.steps, self.scale);
        let ascending = self.stop > self.start;
        if points
            .windows(2)
            .any(|w| if ascending { w[1] <= w[0] } else { w[1] >= w[0] })
        {
            errors.push("sweep: grid points are not strictly monotone".to_string());
        }
        if integer {
            if let Some(x) = points.iter().find(|&&x| !is_integral(x)) {
                errors.push(format!(
                    "sweep: `{}` is an integer field but grid point {x} is not an integer",
                    self.parameter
                ));
            }
        }
        if errors.is_empty() {
            Ok(points)
        } else {
            Err(errors)
        }
    }
}

/// Copy of `doc` with the swept parameter set to `value`, revalidated.
pub fn apply_point(doc: &ConfigDocument, path: &str, value: f64) -> Result<ConfigDocument, CliError> {
    let mut root = serde_json::to_value(doc).expect("config documents always serialize");
    let slot = lookup_mut(&mut root, path)
        .ok_or_else(|| CliError::Validation(vec![format!("sweep.parameter: `{path}` not found")]))?;
    let integer = matches!(slot, Value::Number(n) if !n.is_f64());
    *slot = if integer {
        Value::from(value as u64)
    } else {
        Value::from(value)
    };
    let out: ConfigDocument = serde_json::from_value(root)
        .map_err(|e| CliError::Validation(vec![format!("{path} = {value}: {e}")]))?;
    let errors = out.validate();
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Validation(errors))
    }
}
