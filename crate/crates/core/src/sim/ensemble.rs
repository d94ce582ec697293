//! Many independent trials and their aggregate statistics.
//!
//! Trial `i` of an ensemble with master seed `m` runs with seed
//! [`trial_seed`]`(m, i)`, the `(i + 1)`-th output of a SplitMix64 generator
//! started at `m`. Outcomes are collected in trial order and reduced
//! sequentially, so parallel and serial runs produce bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::event::{check_time, Probability};
use crate::sim::scenario::SimScenario;
use crate::sim::trial::{simulate, TrialOutcome};
use crate::stats::{count_at_or_below, proportion_std_error, MeanEstimate};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `index`: `mix64(master + (index + 1) * 0x9E3779B97F4A7C15)`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub trials: usize,
    pub master_seed: u64,
    pub completed: usize,
    /// Mean completion time over completed trials.
    pub mean_time: Option<MeanEstimate>,
    pub mean_events: f64,
    pub mean_wasted_work: f64,
    /// Ascending completion times of completed trials.
    pub completion_times: Vec<f64>,
    /// Ascending failure times of trials that did not complete.
    pub failure_times: Vec<f64>,
    /// Ascending first-fault times, for trials that saw at least one fault.
    pub first_faults: Vec<f64>,
}

impl EnsembleStats {
    /// Reduces outcomes in the order given.
    pub fn from_outcomes(outcomes: &[TrialOutcome], master_seed: u64) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(ModelError::Empty("trials"));
        }
        let n = outcomes.len();
        let mut completion_times: Vec<f64> =
            outcomes.iter().filter_map(|o| o.completion_time).collect();
        let mut failure_times: Vec<f64> = outcomes.iter().filter_map(|o| o.failure_time).collect();
        let mut first_faults: Vec<f64> = outcomes.iter().filter_map(|o| o.first_fault).collect();
        let mean_time = MeanEstimate::from_samples(&completion_times);
        completion_times.sort_by(f64::total_cmp);
        failure_times.sort_by(f64::total_cmp);
        first_faults.sort_by(f64::total_cmp);

        let events: u64 = outcomes.iter().map(|o| o.events).sum();
        let wasted: f64 = outcomes.iter().map(|o| o.wasted_work).sum();
        Ok(EnsembleStats {
            trials: n,
            master_seed,
            completed: completion_times.len(),
            mean_time,
            mean_events: events as f64 / n as f64,
            mean_wasted_work: wasted / n as f64,
            completion_times,
            failure_times,
            first_faults,
        })
    }

    pub fn completed_fraction(&self) -> f64 {
        self.completed as f64 / self.trials as f64
    }

    /// Fraction of trials that completed at or before `t`.
    pub fn completion_fraction_by(&self, t: f64) -> f64 {
        count_at_or_below(&self.completion_times, t) as f64 / self.trials as f64
    }

    /// Standard error of [`empirical_reliability`] at `t`.
    pub fn reliability_std_error(&self, t: f64) -> f64 {
        let p = 1.0 - count_at_or_below(&self.failure_times, t) as f64 / self.trials as f64;
        proportion_std_error(p, self.trials)
    }
}

/// Fraction of trials with no terminal failure by `t`.
///
/// Evaluated exactly on the empirical step function; no interpolation is
/// needed because every failure time is kept.
pub fn empirical_reliability(stats: &EnsembleStats, t: f64) -> Result<Probability> {
    let t = check_time("t", t)?;
    let failed = count_at_or_below(&stats.failure_times, t);
    Ok(Probability::clamp(1.0 - failed as f64 / stats.trials as f64))
}

fn outcomes_sequential(scenario: &SimScenario, trials: usize, master_seed: u64) -> Vec<TrialOutcome> {
    (0..trials as u64)
        .map(|i| simulate(scenario, trial_seed(master_seed, i), None))
        .collect()
}

#[cfg(feature = "parallel")]
fn outcomes_parallel(scenario: &SimScenario, trials: usize, master_seed: u64) -> Vec<TrialOutcome> {
    (0..trials)
        .into_par_iter()
        // trials are cheap; coarser splits keep scheduling overhead down
        .with_min_len(256)
        .map(|i| simulate(scenario, trial_seed(master_seed, i as u64), None))
        .collect()
}

fn check_ensemble(scenario: &SimScenario, trials: usize) -> Result<()> {
    scenario.validate()?;
    if trials == 0 {
        return Err(ModelError::Empty("trials"));
    }
    Ok(())
}

/// Runs `trials` independent trials, in parallel when the `parallel`
/// feature is on. Uses the current rayon pool.
pub fn run_ensemble(scenario: &SimScenario, trials: usize, master_seed: u64) -> Result<EnsembleStats> {
    check_ensemble(scenario, trials)?;
    #[cfg(feature = "parallel")]
    let outcomes = outcomes_parallel(scenario, trials, master_seed);
    #[cfg(not(feature = "parallel"))]
    let outcomes = outcomes_sequential(scenario, trials, master_seed);
    EnsembleStats::from_outcomes(&outcomes, master_seed)
}

/// Single-threaded [`run_ensemble`]; always available.
pub fn run_ensemble_sequential(
    scenario: &SimScenario,
    trials: usize,
    master_seed: u64,
) -> Result<EnsembleStats> {
    check_ensemble(scenario, trials)?;
    EnsembleStats::from_outcomes(&outcomes_sequential(scenario, trials, master_seed), master_seed)
}
