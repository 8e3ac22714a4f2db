use serde::{Deserialize, Serialize};

use crate::placement::Assignment;

/// When and how the orchestrator reconfigures a running placement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReconfigurationPolicy {
    /// Keep the initial placement for the whole run.
    Static,
    /// Re-solve at an epoch tick once the placement is infeasible or the
    /// last epoch saw SLO violations.
    Reactive,
    /// Forecast the next topology change by scanning at `step` seconds and
    /// migrate `lead` seconds ahead of it.
    Predictive { lead: f64, step: f64 },
}

impl ReconfigurationPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            ReconfigurationPolicy::Static => "static",
            ReconfigurationPolicy::Reactive => "reactive",
            ReconfigurationPolicy::Predictive { .. } => "predictive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrchestratorState {
    pub assignment: Assignment,
    pub last_epoch_violation_rate: f64,
    /// Activation time of a migration already under way.
    pub pending_migration: Option<f64>,
}

/// What the orchestrator sees at an epoch boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochObservation {
    pub time: f64,
    pub epoch: f64,
    /// Current assignment evaluated against the fresh snapshot.
    pub current_feasible: bool,
    /// Next forecast topology change, predictive policies only.
    pub forecast_change: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolveReason {
    Infeasible,
    SloViolated,
}

impl ResolveReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ResolveReason::Infeasible => "infeasible",
            ResolveReason::SloViolated => "slo_violated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Keep,
    Resolve(ResolveReason),
    /// Re-solve against the forecast topology at `change_at` and start the
    /// migration at `at`.
    ScheduleMigration {
        at: f64,
        change_at: f64,
    },
}

/// The reconfiguration decision table.
///
/// Predictive policies fall back to a reactive re-solve when the current
/// placement is already infeasible and no change is forecast in time.
pub fn decide(policy: &ReconfigurationPolicy, state: &OrchestratorState, obs: &EpochObservation) -> Action {
    match policy {
        ReconfigurationPolicy::Static => Action::Keep,
        ReconfigurationPolicy::Reactive => {
            if !obs.current_feasible {
                Action::Resolve(ResolveReason::Infeasible)
            } else if state.last_epoch_violation_rate > 0.0 {
                Action::Resolve(ResolveReason::SloViolated)
            } else {
                Action::Keep
            }
        }
        ReconfigurationPolicy::Predictive { lead, .. } => {
            if state.pending_migration.is_some() {
                return Action::Keep;
            }
            if let Some(change_at) = obs.forecast_change {
                let at = change_at - lead;
                if at <= obs.time + obs.epoch {
                    return Action::ScheduleMigration {
                        at: at.max(obs.time),
                        change_at,
                    };
                }
            }
            if obs.current_feasible {
                Action::Keep
            } else {
                Action::Resolve(ResolveReason::Infeasible)
            }
        }
    }
}
