//! Deterministic discrete-event simulation of a placed compound system over
//! a time-varying topology.
//!
//! The topology is re-sampled at t = 0 and at every epoch tick and held
//! constant in between. Each request binds to the assignment active at its
//! arrival and runs module computations and inter-node transfers as events.

mod engine;
mod queue;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::run;
pub use queue::{Event, EventKind, EventQueue};

use crate::continuum::{snapshot, validate_network, LinkRules, NodeSpec, TopologySnapshot};
use crate::ids::NodeId;
use crate::model::{validate_graph, validate_pools, ImplementationPool, StructuralGraph};
use crate::ops::{validate_predicates, MetricsReport, PolicyPredicate, ReconfigurationPolicy};
use crate::placement::{Budgets, PlacementError, PlacementProblem, RequestProfile, Solution, Weights};
use crate::validation::{ValidationReport, ViolationCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalProcess {
    /// Arrivals at k / rate, k = 1, 2, …
    Fixed,
    /// Exponential inter-arrival times drawn from the run's seeded generator.
    Poisson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub arrival: ArrivalProcess,
    /// Requests per second.
    pub rate: f64,
    pub entry_bytes: f64,
    /// Seconds simulated; arrivals happen strictly before it.
    pub duration: f64,
    pub origin: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slo {
    /// End-to-end latency bound, seconds.
    pub latency: f64,
    pub min_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub nodes: Vec<NodeSpec>,
    pub link_rules: LinkRules,
    pub graph: StructuralGraph,
    pub pools: Vec<ImplementationPool>,
    pub constraints: Vec<PolicyPredicate>,
    pub workload: Workload,
    pub slo: Slo,
    /// Seconds between topology re-snapshots.
    pub epoch: f64,
    pub policy: ReconfigurationPolicy,
    pub weights: Weights,
    pub budgets: Budgets,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> ValidationReport {
        let mut report = validate_graph(&self.graph);
        report.extend(validate_pools(&self.graph, &self.pools));
        report.extend(validate_network(&self.nodes, &self.link_rules));
        report.extend(validate_predicates(&self.constraints, &self.graph, &self.nodes));
        let w = &self.workload;
        if !(w.duration > 0.0 && w.duration.is_finite()) {
            report.push(
                ViolationCode::InvalidWorkload,
                format!("duration {} must be > 0", w.duration),
            );
        }
        if !(w.rate >= 0.0 && w.rate.is_finite()) {
            report.push(ViolationCode::InvalidWorkload, format!("rate {} must be >= 0", w.rate));
        }
        if !(w.entry_bytes >= 0.0 && w.entry_bytes.is_finite()) {
            report.push(
                ViolationCode::InvalidWorkload,
                format!("entry_bytes {} must be >= 0", w.entry_bytes),
            );
        }
        if let Some(origin) = &w.origin {
            if !self.nodes.iter().any(|n| n.id == *origin) {
                report.push(
                    ViolationCode::UnknownReference,
                    format!("workload origin {origin} is not a node"),
                );
            }
        }
        if !(self.slo.latency > 0.0) || !(self.slo.min_accuracy >= 0.0 && self.slo.min_accuracy <= 1.0) {
            report.push(
                ViolationCode::InvalidSlo,
                "slo latency must be > 0 and min_accuracy in [0,1]",
            );
        }
        if !(self.epoch > 0.0 && self.epoch.is_finite()) {
            report.push(ViolationCode::InvalidEpoch, format!("epoch {} must be > 0", self.epoch));
        }
        if let ReconfigurationPolicy::Predictive { lead, step } = self.policy {
            if !(lead >= 0.0 && step > 0.0) {
                report.push(
                    ViolationCode::InvalidPolicy,
                    "predictive policy needs lead >= 0 and step > 0",
                );
            }
        }
        if !self.weights.is_valid() {
            report.push(
                ViolationCode::InvalidWeights,
                "weights must be >= 0 with at least one > 0",
            );
        }
        if !(self.budgets.latency > 0.0 && self.budgets.energy > 0.0) {
            report.push(ViolationCode::InvalidBudgets, "latency and energy budgets must be > 0");
        }
        report
    }

    pub fn snapshot_at(&self, t: f64) -> TopologySnapshot {
        snapshot(&self.nodes, &self.link_rules, t)
    }

    pub fn problem_with(&self, snapshot: TopologySnapshot) -> PlacementProblem {
        PlacementProblem {
            graph: self.graph.clone(),
            pools: self.pools.clone(),
            snapshot,
            nodes: self.nodes.clone(),
            request: RequestProfile {
                entry_bytes: self.workload.entry_bytes,
                rate: self.workload.rate,
                origin: self.workload.origin.clone(),
            },
            weights: self.weights,
            budgets: self.budgets,
            constraints: self.constraints.clone(),
        }
    }

    pub fn problem_at(&self, t: f64) -> PlacementProblem {
        self.problem_with(self.snapshot_at(t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub id: u64,
    pub arrival: f64,
    /// `None` marks a failed request.
    pub completion: Option<f64>,
    pub latency: Option<f64>,
    pub energy: f64,
    pub accuracy: f64,
    pub slo_violated: bool,
    pub degradation_events: u32,
}

/// One line of the orchestration log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogEntry {
    pub epoch: u64,
    pub time: f64,
    pub action: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub report: MetricsReport,
    /// Finished requests in id order.
    pub records: Vec<RequestRecord>,
    pub log: Vec<LogEntry>,
    pub initial: Solution,
    /// Times at which snapshots were taken.
    pub snapshot_times: Vec<f64>,
    /// Number of events popped from the queue.
    pub events_processed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario:\n{0}")]
    InvalidScenario(ValidationReport),
    #[error("initial placement failed: {0}")]
    InitialPlacement(PlacementError),
}
