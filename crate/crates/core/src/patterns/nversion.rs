//! N-version design: independently built versions run side by side and a
//! majority voter picks the result.
//!
//! `P(A_k)` is the probability that only version `k` is correct. The
//! failure mass is `Q = (1 - P(V)) * sum_k P(A_k) + P(V)` and the reliability
//! at `t` is `1 - Q * F(t)`, where `F(t) = exp(-t / η)` as printed.

use crate::error::{domain, ModelError, Result};
use crate::event::{check_time, Convention, EventModel, Probability};
use crate::patterns::ModelOutput;

#[derive(Debug, Clone, PartialEq)]
pub enum VersionInputs {
    /// Per-version success probabilities, assumed independent.
    SuccessProbabilities(Vec<Probability>),
    /// `P(A_k)` supplied directly.
    ExclusiveSuccess(Vec<Probability>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NVersionParams {
    pub versions: VersionInputs,
    pub voter_failure_prob: Probability,
    pub event_model: EventModel,
}

impl NVersionParams {
    pub fn validate(&self) -> Result<()> {
        let n = match &self.versions {
            VersionInputs::SuccessProbabilities(v) | VersionInputs::ExclusiveSuccess(v) => v.len(),
        };
        if n < 2 {
            return Err(domain("versions", ">= 2 entries", n as f64));
        }
        Ok(())
    }

    /// `sum_k P(A_k)` for whichever form the inputs take.
    pub fn exclusive_sum(&self) -> Result<Probability> {
        self.validate()?;
        match &self.versions {
            VersionInputs::SuccessProbabilities(p) => Ok(nversion_exclusive_success(p)?.total),
            VersionInputs::ExclusiveSuccess(a) => {
                Ok(Probability::clamp(a.iter().map(|p| p.value()).sum()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusiveSuccess {
    pub per_version: Vec<Probability>,
    pub total: Probability,
}

/// `P(A_k) = p_k * prod_{j != k} (1 - p_j)` for each version, and their sum.
pub fn nversion_exclusive_success(probs: &[Probability]) -> Result<ExclusiveSuccess> {
    if probs.len() < 2 {
        return Err(ModelError::Invalid(format!(
            "n-version design needs at least 2 versions, got {}",
            probs.len()
        )));
    }
    let per_version: Vec<Probability> = (0..probs.len())
        .map(|k| {
            let others: f64 = probs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, p)| 1.0 - p.value())
                .product();
            Probability::clamp(probs[k].value() * others)
        })
        .collect();
    // The events are disjoint, so the sum is a probability.
    let total = Probability::clamp(per_version.iter().map(|p| p.value()).sum());
    Ok(ExclusiveSuccess { per_version, total })
}

/// `(1 - P(V)) * P(A) + P(V)`.
pub fn nversion_failure_density(exclusive_sum: Probability, voter_fail: Probability) -> Probability {
    let v = voter_fail.value();
    Probability::clamp((1.0 - v) * exclusive_sum.value() + v)
}

/// `1 - Q * F(t)` where `F(t) = exp(-t/η)` (literal) or `1 - exp(-t/η)` (survival).
pub fn nversion_reliability(t: f64, p: &NVersionParams, convention: Convention) -> Result<Probability> {
    let t = check_time("t", t)?;
    let q = nversion_failure_density(p.exclusive_sum()?, p.voter_failure_prob);
    Ok(Probability::clamp(1.0 - q.value() * event_factor(t, &p.event_model, convention)))
}

/// The `F(t)` factor. Printed as `exp(-t/η)`, the complement of the event
/// term used by the other models; the survival convention swaps it.
pub fn event_factor(t: f64, model: &EventModel, convention: Convention) -> f64 {
    let x = t / model.mtti();
    match convention {
        Convention::Literal => (-x).exp(),
        Convention::Survival => -(-x).exp_m1(),
    }
}

pub fn nversion_model(t: f64, p: &NVersionParams, convention: Convention) -> Result<ModelOutput> {
    let r = nversion_reliability(t, p, convention)?;
    let note = match convention {
        Convention::Literal => "n-version F(t) = exp(-t/mtti) as printed; this is the complement of the interrupt probability used by the other models",
        Convention::Survival => "n-version F(t) replaced by the interrupt probability 1 - exp(-t/mtti)",
    };
    Ok(ModelOutput::time(0.0)
        .note("n-version design has no performance model; overhead reported as 0")
        .note(note)
        .with_reliability(r, "n-version reliability"))
}
