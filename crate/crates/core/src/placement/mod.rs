//! Joint implementation and node selection across the continuum.
//!
//! An [`Assignment`] extends the implementation mapping with a hosting node
//! per module. [`evaluate`] scores it with the normalized objective
//!
//! `J = w_lat·latency/latency_budget + w_energy·energy/energy_budget − w_acc·accuracy`
//!
//! where latency is the critical path through the module DAG. Solvers:
//! [`brute_force_solve`] (exact), [`greedy_solve`] and [`local_search`].

mod evaluate;
mod solvers;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use evaluate::evaluate;
pub(crate) use evaluate::Evaluator;
pub use solvers::{
    brute_force_solve, brute_force_solve_with_cap, greedy_solve, local_search, random_feasible, search_space_size,
    solve, LocalSearchConfig, LocalSearchOutcome, Solution, Solver, DEFAULT_SEARCH_CAP,
};
pub use sweep::{sweep, SweepPoint};

use crate::continuum::{NodeSpec, TopologySnapshot};
use crate::ids::{ImplId, ModuleId, NodeId};
use crate::model::{ImplementationPool, Mapping, StructuralGraph};
use crate::ops::{OpsError, PolicyPredicate};
use crate::validation::{ValidationReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub latency: f64,
    pub energy: f64,
    pub accuracy: f64,
}

impl Weights {
    pub fn new(latency: f64, energy: f64, accuracy: f64) -> Self {
        Self {
            latency,
            energy,
            accuracy,
        }
    }

    pub fn is_valid(&self) -> bool {
        let all = [self.latency, self.energy, self.accuracy];
        all.iter().all(|w| *w >= 0.0 && w.is_finite()) && all.iter().any(|w| *w > 0.0)
    }
}

/// Normalizers that make latency and energy commensurable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    /// Seconds.
    pub latency: f64,
    /// Joules.
    pub energy: f64,
}

impl Budgets {
    pub fn new(latency: f64, energy: f64) -> Self {
        Self { latency, energy }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestProfile {
    /// Bytes entering each entry module.
    pub entry_bytes: f64,
    /// Requests per second.
    pub rate: f64,
    /// Node where request data originates; `None` means it is already
    /// present wherever entry modules run.
    pub origin: Option<NodeId>,
}

impl RequestProfile {
    pub fn new(entry_bytes: f64, rate: f64) -> Self {
        Self {
            entry_bytes,
            rate,
            origin: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlacementProblem {
    pub graph: StructuralGraph,
    pub pools: Vec<ImplementationPool>,
    pub snapshot: TopologySnapshot,
    pub nodes: Vec<NodeSpec>,
    pub request: RequestProfile,
    pub weights: Weights,
    pub budgets: Budgets,
    pub constraints: Vec<PolicyPredicate>,
}

impl PlacementProblem {
    pub fn node(&self, id: &str) -> Option<&NodeSpec> {
        self.nodes.iter().find(|n| n.id.as_str() == id)
    }

    pub fn with_weights(&self, weights: Weights) -> Self {
        Self {
            weights,
            ..self.clone()
        }
    }

    pub fn with_snapshot(&self, snapshot: TopologySnapshot) -> Self {
        Self {
            snapshot,
            ..self.clone()
        }
    }
}

/// Where one module runs and which implementation it uses.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub implementation: ImplId,
    pub node: NodeId,
}

impl Placement {
    pub fn new(implementation: impl Into<ImplId>, node: impl Into<NodeId>) -> Self {
        Self {
            implementation: implementation.into(),
            node: node.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    pub placements: BTreeMap<ModuleId, Placement>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(
        mut self,
        module: impl Into<ModuleId>,
        implementation: impl Into<ImplId>,
        node: impl Into<NodeId>,
    ) -> Self {
        self.placements
            .insert(module.into(), Placement::new(implementation, node));
        self
    }

    pub fn get(&self, module: &str) -> Option<&Placement> {
        self.placements.get(module)
    }

    pub fn node_of(&self, module: &str) -> Option<&NodeId> {
        self.placements.get(module).map(|p| &p.node)
    }

    pub fn mapping(&self) -> Mapping {
        Mapping {
            choices: self
                .placements
                .iter()
                .map(|(m, p)| (m.clone(), p.implementation.clone()))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    /// Critical-path seconds.
    #[serde(serialize_with = "crate::serde_util::finite_or_null")]
    pub latency: f64,
    /// Joules per request.
    pub energy: f64,
    pub accuracy: f64,
    /// `+∞` when infeasible.
    #[serde(serialize_with = "crate::serde_util::finite_or_null")]
    pub objective: f64,
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlacementError {
    #[error("invalid placement problem:\n{0}")]
    InvalidProblem(ValidationReport),
    #[error("malformed assignment:\n{0}")]
    Malformed(ValidationReport),
    #[error("search space exceeds cap ({size} > {cap})")]
    SearchSpaceExceeded { size: u128, cap: u128 },
    #[error("no feasible assignment")]
    NoFeasibleAssignment,
    #[error("no feasible choice at module {0}")]
    NoFeasibleChoice(ModuleId),
    #[error("initial assignment is infeasible: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InfeasibleInitial(Vec<Violation>),
    #[error("weight list is empty")]
    EmptySweep,
    #[error(transparent)]
    Policy(#[from] OpsError),
}
