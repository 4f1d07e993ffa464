//! Joint moments of mixed q-Gaussian systems and of SYK Hamiltonians built on
//! partially overlapping index sets.
//!
//! The combinatorial side ([`partitions`], [`fock`]) computes exact limit
//! moments; the simulation side ([`majorana`], [`syk`], [`overlap_stats`])
//! estimates the finite-size quantities that converge to them, and
//! [`epsilon_graph`] builds overlap families whose limits are ε-free.

pub mod epsilon_graph;
pub mod error;
pub mod estimate;
pub mod fock;
pub mod majorana;
pub mod overlap_stats;
pub mod partitions;
pub mod rng;
pub mod syk;

pub use error::{Error, Result};
pub use estimate::{Method, MomentEstimate};
