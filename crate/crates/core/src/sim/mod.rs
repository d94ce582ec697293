//! Seeded Monte Carlo fault-injection simulator.
//!
//! The simulator has its own operational semantics for each policy and does
//! not reuse the analytic formulas, so it can serve as an independent check
//! on them.

mod ensemble;
mod scenario;
mod trial;

pub use ensemble::{
    empirical_reliability, run_ensemble, run_ensemble_sequential, trial_seed, EnsembleStats,
};
pub use scenario::{MttiScope, Policy, SimScenario};
pub use trial::{run_trial, run_trial_traced, TraceEvent, TrialOutcome};
