//! Reliability and performance models for HPC resilience design patterns.
//!
//! - [`event`]: the exponential interrupt process.
//! - [`patterns`]: closed-form models for diagnosis, reconfiguration,
//!   rollback and roll-forward recovery, redundancy, and n-version design.
//! - [`composition`]: series composition of protected components.
//! - [`sim`]: a Monte Carlo fault-injection simulator used to check the
//!   closed-form models.

pub mod composition;
pub mod error;
pub mod event;
pub mod patterns;
pub mod sim;
pub mod stats;

pub use error::{ModelError, Result};
pub use event::{Convention, EventModel, Probability};
