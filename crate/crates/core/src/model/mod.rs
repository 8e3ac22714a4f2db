//! Structural and functional parts of a compound AI system.
//!
//! A system is a DAG of [`ModuleSpec`]s with typed ports
//! ([`StructuralGraph`]), one [`ImplementationPool`] per module, and a
//! [`Mapping`] choosing one implementation per module. [`execute`] propagates
//! a [`Payload`] descriptor through the chosen implementations.

mod exec;
mod functional;
mod graph;

pub use exec::{execute, propagate, ExecError, Execution, TraceRecord};
pub use functional::{validate_mapping, validate_pools, Implementation, ImplementationPool, Mapping, Payload};
pub use graph::{topological_order, validate_graph, Edge, GraphError, ModuleSpec, Port, StructuralGraph};
