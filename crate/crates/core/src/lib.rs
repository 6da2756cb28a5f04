//! Simulator and analysis toolkit for interactive estimation: a learner
//! repeatedly queries alternatives and observes noisy similarity-to-target
//! rewards. The crate provides the protocol runtime, the least-squares and
//! optimistic learners with their structured-bandit reductions, online
//! regression oracles, exact combinatorial dimension calculators with
//! witness certificates, instance generators for the standard families,
//! and closed-form evaluators for the regret / sample-complexity bounds.

pub mod bounds;
pub mod dims;
pub mod error;
pub mod instances;
pub mod learners;
pub mod oracle;
pub mod protocol;

pub use error::{Error, Result};
pub use protocol::{AlternativeId, Instance, Learner, NoiseMode, Transcript};
