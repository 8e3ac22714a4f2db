//! Core engine for compound AI systems deployed over a terrestrial, aerial
//! and satellite compute continuum.
//!
//! The crate is organised around the three parts of a compound system:
//!
//! - [`model`]: the structural graph of modules, implementation pools, the
//!   implementation mapping and the logical graph executor.
//! - [`continuum`]: node mobility, visibility and time-varying link latency.
//! - [`placement`]: joint implementation/node selection under a weighted
//!   latency/energy/accuracy objective.
//! - [`ops`]: monitoring aggregation, placement policy predicates and the
//!   orchestration decision table.
//! - [`sim`]: the deterministic discrete-event simulator that ties them
//!   together.

// validation deliberately phrases checks as !(x > 0.0) so NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuum;
pub mod ids;
pub mod model;
pub mod ops;
pub mod placement;
pub mod sim;
pub mod validation;

mod serde_util;

pub use ids::{ImplId, ModuleId, NodeId};
pub use validation::{ValidationReport, Violation, ViolationCode};
