use std::collections::BTreeMap;

use super::{Assignment, Evaluation, PlacementError, PlacementProblem};
use crate::continuum::{validate_network, LinkRules, NodeSpec};
use crate::model::{
    propagate, topological_order, validate_graph, validate_mapping, validate_pools, Implementation, ModuleSpec, Payload,
};
use crate::ops::{check_policies, validate_predicates};
use crate::validation::{ValidationReport, Violation, ViolationCode};

/// Scores a complete assignment against a problem.
pub fn evaluate(assignment: &Assignment, problem: &PlacementProblem) -> Result<Evaluation, PlacementError> {
    Evaluator::new(problem)?.evaluate(assignment)
}

pub(crate) fn validate_problem(problem: &PlacementProblem) -> ValidationReport {
    let mut report = validate_graph(&problem.graph);
    report.extend(validate_pools(&problem.graph, &problem.pools));
    report.extend(validate_network(&problem.nodes, &LinkRules::default()));
    for n in &problem.nodes {
        if problem.snapshot.index_of(n.id.as_str()).is_none() {
            report.push(
                ViolationCode::UnknownNode,
                format!("node {} is missing from the topology snapshot", n.id),
            );
        }
    }
    if problem.snapshot.len() != problem.nodes.len() {
        report.push(ViolationCode::UnknownNode, "topology snapshot and node list differ");
    }
    if !problem.weights.is_valid() {
        report.push(
            ViolationCode::InvalidWeights,
            "weights must be >= 0 with at least one > 0",
        );
    }
    if !(problem.budgets.latency > 0.0 && problem.budgets.energy > 0.0) {
        report.push(ViolationCode::InvalidBudgets, "latency and energy budgets must be > 0");
    }
    let r = &problem.request;
    if !(r.entry_bytes >= 0.0 && r.entry_bytes.is_finite() && r.rate >= 0.0 && r.rate.is_finite()) {
        report.push(
            ViolationCode::InvalidWorkload,
            "entry bytes and request rate must be finite and >= 0",
        );
    }
    if let Some(origin) = &r.origin {
        if problem.node(origin.as_str()).is_none() {
            report.push(
                ViolationCode::UnknownReference,
                format!("request origin {origin} is not a node"),
            );
        }
    }
    report.extend(validate_predicates(
        &problem.constraints,
        &problem.graph,
        &problem.nodes,
    ));
    report
}

/// Per-module timing and payload for an assessed placement.
#[derive(Debug, Clone)]
pub(crate) struct ModuleCost {
    /// Snapshot index of the hosting node.
    pub node: usize,
    pub compute_time: f64,
    pub finish: f64,
    pub output: Payload,
}

#[derive(Debug, Clone)]
pub(crate) struct Assessment {
    pub evaluation: Evaluation,
    /// Indexed like [`Evaluator::order`]; `None` for unassigned modules.
    pub modules: Vec<Option<ModuleCost>>,
}

/// Precomputed problem structure shared by repeated evaluations.
pub(crate) struct Evaluator<'p> {
    pub problem: &'p PlacementProblem,
    /// Modules in topological order.
    pub order: Vec<&'p ModuleSpec>,
    /// Predecessor positions per module, in port order.
    pub preds: Vec<Vec<usize>>,
    pub exit: usize,
    nodes: BTreeMap<&'p str, &'p NodeSpec>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p PlacementProblem) -> Result<Self, PlacementError> {
        let report = validate_problem(problem);
        if !report.is_valid() {
            return Err(PlacementError::InvalidProblem(report));
        }
        let ids = topological_order(&problem.graph).expect("validated graph is acyclic");
        let order: Vec<&ModuleSpec> = ids
            .iter()
            .map(|id| problem.graph.module(id.as_str()).unwrap())
            .collect();
        let position: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, m)| (m.id.as_str(), i)).collect();
        let preds = order
            .iter()
            .map(|m| {
                problem
                    .graph
                    .incoming(m.id.as_str())
                    .iter()
                    .map(|e| position[e.source.as_str()])
                    .collect()
            })
            .collect();
        let exit = position[problem.graph.exit().expect("validated graph has one exit").as_str()];
        let nodes = problem.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
        Ok(Self {
            problem,
            order,
            preds,
            exit,
            nodes,
        })
    }

    pub fn implementation(&self, module: &str, id: &str) -> Option<&'p Implementation> {
        self.problem
            .pools
            .iter()
            .find(|p| p.module_id.as_str() == module)
            .and_then(|p| p.get(id))
    }

    pub fn evaluate(&self, assignment: &Assignment) -> Result<Evaluation, PlacementError> {
        Ok(self.assess(assignment, false)?.evaluation)
    }

    fn check_well_formed(&self, assignment: &Assignment, partial: bool) -> Result<(), PlacementError> {
        let mut report = if partial {
            let mut r = ValidationReport::new();
            for (module, p) in &assignment.placements {
                if !self.problem.graph.contains(module.as_str()) {
                    r.push(
                        ViolationCode::UnknownModule,
                        format!("assignment names unknown module {module}"),
                    );
                } else if self
                    .implementation(module.as_str(), p.implementation.as_str())
                    .is_none()
                {
                    r.push(
                        ViolationCode::NotInPool,
                        format!("δ({module}) = {} is not in the pool of {module}", p.implementation),
                    );
                }
            }
            r
        } else {
            validate_mapping(&self.problem.graph, &self.problem.pools, &assignment.mapping())
        };
        for (module, p) in &assignment.placements {
            if !self.nodes.contains_key(p.node.as_str()) {
                report.push(
                    ViolationCode::UnknownNode,
                    format!("module {module} placed on unknown node {}", p.node),
                );
            }
        }
        if report.is_valid() {
            Ok(())
        } else {
            Err(PlacementError::Malformed(report))
        }
    }

    /// Scores `assignment`. In partial mode, unassigned modules (and modules
    /// whose predecessors are unassigned) are skipped, latency is the latest
    /// finish so far and accuracy is that of the last assigned module.
    pub fn assess(&self, assignment: &Assignment, partial: bool) -> Result<Assessment, PlacementError> {
        self.check_well_formed(assignment, partial)?;
        let problem = self.problem;
        let snap = &problem.snapshot;
        let request = &problem.request;
        let origin = request
            .origin
            .as_ref()
            .map(|o| snap.index_of(o.as_str()).expect("validated origin"));
        let entry_payload = Payload::new(request.entry_bytes, 1.0);

        let mut violations = Vec::new();
        let mut modules: Vec<Option<ModuleCost>> = vec![None; self.order.len()];
        let mut memory: BTreeMap<usize, f64> = BTreeMap::new();
        let mut load: BTreeMap<usize, f64> = BTreeMap::new();
        let mut energy = 0.0;
        let mut last_accuracy = None;

        for (i, module) in self.order.iter().enumerate() {
            let Some(placement) = assignment.get(module.id.as_str()) else {
                continue;
            };
            if self.preds[i].iter().any(|&p| modules[p].is_none()) {
                continue;
            }
            let implementation = self
                .implementation(module.id.as_str(), placement.implementation.as_str())
                .expect("well-formed");
            let node = self.nodes[placement.node.as_str()];
            let host = snap.index_of(node.id.as_str()).expect("validated node");

            if !implementation.allows(node.domain) {
                violations.push(Violation::new(
                    ViolationCode::ImplementationAffinity,
                    format!(
                        "implementation {} may not run in domain {} (node {})",
                        implementation.id, node.domain, node.id
                    ),
                ));
            }

            let mut ready: f64 = 0.0;
            let incoming: Vec<Payload> = if module.is_entry() {
                if let Some(o) = origin {
                    let t = if o == host {
                        0.0
                    } else {
                        snap.pairwise_latency(o, host, request.entry_bytes)
                    };
                    if t.is_infinite() {
                        violations.push(Violation::new(
                            ViolationCode::UnreachableRoute,
                            format!("no route from origin {} to {}", snap.node_ids()[o], node.id),
                        ));
                    }
                    ready = t;
                }
                vec![entry_payload]
            } else {
                self.preds[i]
                    .iter()
                    .map(|&p| {
                        let src = modules[p].as_ref().expect("checked above");
                        let t = if src.node == host {
                            0.0
                        } else {
                            snap.pairwise_latency(src.node, host, src.output.size)
                        };
                        if t.is_infinite() {
                            violations.push(Violation::new(
                                ViolationCode::UnreachableRoute,
                                format!(
                                    "no route for edge {}→{} ({} to {})",
                                    self.order[p].id,
                                    module.id,
                                    snap.node_ids()[src.node],
                                    node.id
                                ),
                            ));
                        }
                        ready = ready.max(src.finish + t);
                        src.output
                    })
                    .collect()
            };
            let output = propagate(implementation, &incoming);
            let compute_time = implementation.compute_demand / node.compute_capacity;
            energy += implementation.compute_demand * node.energy_cost;
            *memory.entry(host).or_default() += implementation.memory_required;
            *load.entry(host).or_default() += implementation.compute_demand * request.rate;
            last_accuracy = Some(output.accuracy);
            modules[i] = Some(ModuleCost {
                node: host,
                compute_time,
                finish: ready + compute_time,
                output,
            });
        }

        for (&host, &used) in &memory {
            let node = self.nodes[snap.node_ids()[host].as_str()];
            if used > node.memory_capacity {
                violations.push(Violation::new(
                    ViolationCode::MemoryCapacity,
                    format!("node {} needs {used} MB of {} MB", node.id, node.memory_capacity),
                ));
            }
        }
        for (&host, &demand) in &load {
            let node = self.nodes[snap.node_ids()[host].as_str()];
            if demand > node.compute_capacity {
                violations.push(Violation::new(
                    ViolationCode::ComputeCapacity,
                    format!("node {} needs {demand} giga-op/s of {}", node.id, node.compute_capacity),
                ));
            }
        }
        violations.extend(check_policies(assignment, problem, &problem.constraints)?);

        let (latency, accuracy) = if partial {
            let latest = modules.iter().flatten().map(|m| m.finish).fold(0.0, f64::max);
            (latest, last_accuracy.unwrap_or(1.0))
        } else {
            let exit = modules[self.exit].as_ref().expect("complete assignment covers exit");
            (exit.finish, exit.output.accuracy)
        };
        let feasible = violations.is_empty();
        let objective = if feasible {
            self.objective(latency, energy, accuracy)
        } else {
            f64::INFINITY
        };
        Ok(Assessment {
            evaluation: Evaluation {
                latency,
                energy,
                accuracy,
                objective,
                feasible,
                violations,
            },
            modules,
        })
    }

    pub fn objective(&self, latency: f64, energy: f64, accuracy: f64) -> f64 {
        let (w, b) = (&self.problem.weights, &self.problem.budgets);
        w.latency * (latency / b.latency) + w.energy * (energy / b.energy) - w.accuracy * accuracy
    }
}
