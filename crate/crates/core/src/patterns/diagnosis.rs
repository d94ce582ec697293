//! Fault diagnosis: a monitor polls `n` system parameters and infers faults.
//! It adds time but no reliability.

use crate::error::{domain, nonnegative, positive, Result};
use crate::patterns::ModelOutput;

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisParams {
    /// Operation time without the monitor.
    pub base_time: f64,
    pub observed_params: u32,
    /// Inference time per observed parameter.
    pub inference_time: f64,
    pub polling_frequency: f64,
}

impl DiagnosisParams {
    pub fn validate(&self) -> Result<()> {
        nonnegative("base_time", self.base_time)?;
        if self.observed_params < 1 {
            return Err(domain(
                "observed_params",
                ">= 1",
                f64::from(self.observed_params),
            ));
        }
        nonnegative("inference_time", self.inference_time)?;
        positive("polling_frequency", self.polling_frequency)?;
        Ok(())
    }
}

/// `T0 + sum_{k=1..n} t_inference / beta`.
pub fn diagnosis_overhead(p: &DiagnosisParams) -> Result<ModelOutput> {
    p.validate()?;
    let per_param = p.inference_time / p.polling_frequency;
    Ok(
        ModelOutput::time(p.base_time + f64::from(p.observed_params) * per_param)
            .note("diagnosis adds no reliability term"),
    )
}
