//! Operational layer: monitoring aggregation, placement policy predicates
//! (security and governance rules) and the orchestration decision table.

mod metrics;
mod orchestrator;
mod policy;

pub use metrics::{nearest_rank, summarize, MetricsReport, RunCounters};
pub use orchestrator::{decide, Action, EpochObservation, OrchestratorState, ReconfigurationPolicy, ResolveReason};
pub use policy::{check_policies, validate_predicates, OpsError, PolicyPredicate};
