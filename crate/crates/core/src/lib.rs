//! Generalised stable partitions for the Stable Fixtures problem.

pub mod cycles;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod sr;
pub mod violation;

pub use instance::{AgentId, Rank, SfInstance};
pub use violation::Violation;
pub mod gsp;
pub mod ilp;
pub mod reduction;
pub mod nearfeasible;
pub mod oracle;
