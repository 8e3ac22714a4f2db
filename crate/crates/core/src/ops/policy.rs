use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::continuum::{Domain, NodeSpec};
use crate::ids::ModuleId;
use crate::model::StructuralGraph;
use crate::placement::{Assignment, PlacementProblem};
use crate::validation::{ValidationReport, Violation, ViolationCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpsError {
    #[error("unresolved reference: {0}")]
    Unresolved(String),
}

/// Declarative placement constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyPredicate {
    /// The module must run on a node of one of `domains`.
    DomainAffinity {
        module: ModuleId,
        domains: BTreeSet<Domain>,
    },
    /// Both modules must share a node.
    Colocation { first: ModuleId, second: ModuleId },
    /// Data on edge `source → target` may not transit a node of a forbidden domain.
    DataLocality {
        source: ModuleId,
        target: ModuleId,
        forbidden: BTreeSet<Domain>,
    },
}

impl PolicyPredicate {
    fn modules(&self) -> Vec<&ModuleId> {
        match self {
            PolicyPredicate::DomainAffinity { module, .. } => vec![module],
            PolicyPredicate::Colocation { first, second } => vec![first, second],
            PolicyPredicate::DataLocality { source, target, .. } => vec![source, target],
        }
    }
}

fn has_edge(graph: &StructuralGraph, source: &ModuleId, target: &ModuleId) -> bool {
    graph.edges.iter().any(|e| e.source == *source && e.target == *target)
}

pub fn validate_predicates(
    predicates: &[PolicyPredicate],
    graph: &StructuralGraph,
    _nodes: &[NodeSpec],
) -> ValidationReport {
    let mut report = ValidationReport::new();
    for p in predicates {
        for m in p.modules() {
            if !graph.contains(m.as_str()) {
                report.push(
                    ViolationCode::UnknownReference,
                    format!("constraint references unknown module {m}"),
                );
            }
        }
        if let PolicyPredicate::DataLocality { source, target, .. } = p {
            if graph.contains(source.as_str()) && graph.contains(target.as_str()) && !has_edge(graph, source, target) {
                report.push(
                    ViolationCode::UnknownReference,
                    format!("data locality constraint names missing edge {source}→{target}"),
                );
            }
        }
    }
    report
}

/// Lists the predicates `assignment` breaks. Predicates over modules the
/// assignment does not (yet) place are skipped.
pub fn check_policies(
    assignment: &Assignment,
    problem: &PlacementProblem,
    predicates: &[PolicyPredicate],
) -> Result<Vec<Violation>, OpsError> {
    let mut out = Vec::new();
    for predicate in predicates {
        for m in predicate.modules() {
            if !problem.graph.contains(m.as_str()) {
                return Err(OpsError::Unresolved(format!("module {m}")));
            }
        }
        let host = |m: &ModuleId| -> Result<Option<&NodeSpec>, OpsError> {
            match assignment.node_of(m.as_str()) {
                None => Ok(None),
                Some(n) => problem
                    .node(n.as_str())
                    .map(Some)
                    .ok_or_else(|| OpsError::Unresolved(format!("node {n}"))),
            }
        };
        match predicate {
            PolicyPredicate::DomainAffinity { module, domains } => {
                if let Some(node) = host(module)? {
                    if !domains.contains(&node.domain) {
                        out.push(Violation::new(
                            ViolationCode::DomainAffinity,
                            format!(
                                "module {module} runs on {} ({}) outside its allowed domains",
                                node.id, node.domain
                            ),
                        ));
                    }
                }
            }
            PolicyPredicate::Colocation { first, second } => {
                if let (Some(a), Some(b)) = (host(first)?, host(second)?) {
                    if a.id != b.id {
                        out.push(Violation::new(
                            ViolationCode::Colocation,
                            format!(
                                "modules {first} and {second} run on different nodes ({} vs {})",
                                a.id, b.id
                            ),
                        ));
                    }
                }
            }
            PolicyPredicate::DataLocality {
                source,
                target,
                forbidden,
            } => {
                if !has_edge(&problem.graph, source, target) {
                    return Err(OpsError::Unresolved(format!("edge {source}→{target}")));
                }
                let (Some(a), Some(b)) = (host(source)?, host(target)?) else {
                    continue;
                };
                let snap = &problem.snapshot;
                let (Some(i), Some(j)) = (snap.index_of(a.id.as_str()), snap.index_of(b.id.as_str())) else {
                    return Err(OpsError::Unresolved(format!("snapshot node {} or {}", a.id, b.id)));
                };
                let Some(route) = snap.route(i, j) else {
                    continue;
                };
                let transit = route.len().saturating_sub(1);
                let crossed: Vec<String> = route[1.min(transit)..transit]
                    .iter()
                    .filter_map(|&k| problem.node(snap.node_ids()[k].as_str()))
                    .filter(|n| forbidden.contains(&n.domain))
                    .map(|n| format!("{} ({})", n.id, n.domain))
                    .collect();
                if !crossed.is_empty() {
                    out.push(Violation::new(
                        ViolationCode::DataLocality,
                        format!("edge {source}→{target} transits forbidden {}", crossed.join(", ")),
                    ));
                }
            }
        }
    }
    Ok(out)
}
