use std::collections::{BTreeMap, BTreeSet};

use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::ModuleId;
use crate::validation::{ValidationReport, ViolationCode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Port {
    pub name: String,
    pub data_type: String,
}

impl Port {
    pub fn new(name: impl Into<String>, data_type: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            data_type: data_type.into(),
        }
    }
}

/// One module of the structural graph. A module without input ports is an
/// entry module and receives the system input directly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub id: ModuleId,
    pub name: String,
    pub input_ports: Vec<Port>,
    pub output_type: String,
    /// Bytes of state moved when the module migrates between nodes.
    pub state_size: u64,
}

impl ModuleSpec {
    pub fn new(id: impl Into<ModuleId>, input_ports: Vec<Port>, output_type: impl Into<String>) -> Self {
        let id = id.into();
        Self {
            name: id.to_string(),
            id,
            input_ports,
            output_type: output_type.into(),
            state_size: 0,
        }
    }

    pub fn is_entry(&self) -> bool {
        self.input_ports.is_empty()
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.input_ports.iter().find(|p| p.name == name)
    }
}

/// Directed connection: the output of `source` feeds `port` of `target`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: ModuleId,
    pub target: ModuleId,
    pub port: String,
}

impl Edge {
    pub fn new(source: impl Into<ModuleId>, target: impl Into<ModuleId>, port: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            port: port.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cycle detected among modules {}", join(.0))]
    Cycle(Vec<ModuleId>),
    #[error("edge references unknown module {0}")]
    UnknownModule(ModuleId),
}

fn join(ids: &[ModuleId]) -> String {
    ids.iter().map(ModuleId::as_str).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralGraph {
    pub modules: Vec<ModuleSpec>,
    pub edges: Vec<Edge>,
}

impl StructuralGraph {
    pub fn new(modules: Vec<ModuleSpec>, edges: Vec<Edge>) -> Self {
        Self { modules, edges }
    }

    pub fn module(&self, id: &str) -> Option<&ModuleSpec> {
        self.modules.iter().find(|m| m.id.as_str() == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.module(id).is_some()
    }

    /// Incoming edges of `id`, ordered by the target's port declaration order.
    pub fn incoming(&self, id: &str) -> Vec<&Edge> {
        let Some(module) = self.module(id) else {
            return Vec::new();
        };
        let mut edges: Vec<&Edge> = self.edges.iter().filter(|e| e.target.as_str() == id).collect();
        edges.sort_by_key(|e| {
            module
                .input_ports
                .iter()
                .position(|p| p.name == e.port)
                .unwrap_or(usize::MAX)
        });
        edges
    }

    pub fn outgoing(&self, id: &str) -> Vec<&Edge> {
        self.edges.iter().filter(|e| e.source.as_str() == id).collect()
    }

    /// Modules with no outgoing edges, in id order.
    pub fn exits(&self) -> Vec<&ModuleId> {
        let sources: BTreeSet<&str> = self.edges.iter().map(|e| e.source.as_str()).collect();
        let mut exits: Vec<&ModuleId> = self
            .modules
            .iter()
            .map(|m| &m.id)
            .filter(|id| !sources.contains(id.as_str()))
            .collect();
        exits.sort();
        exits
    }

    /// The unique exit module of a valid graph.
    pub fn exit(&self) -> Option<&ModuleId> {
        match self.exits().as_slice() {
            [only] => Some(only),
            _ => None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_graph(self)
    }

    pub fn topological_order(&self) -> Result<Vec<ModuleId>, GraphError> {
        topological_order(self)
    }
}

pub fn validate_graph(graph: &StructuralGraph) -> ValidationReport {
    let mut report = ValidationReport::new();
    if graph.modules.is_empty() {
        report.push(ViolationCode::EmptyGraph, "graph has no modules");
        return report;
    }

    let mut by_id: BTreeMap<&str, &ModuleSpec> = BTreeMap::new();
    for m in &graph.modules {
        if by_id.insert(m.id.as_str(), m).is_some() {
            report.push(ViolationCode::DuplicateModule, format!("duplicate module id {}", m.id));
        }
        let mut names = BTreeSet::new();
        for p in &m.input_ports {
            if !names.insert(p.name.as_str()) {
                report.push(
                    ViolationCode::DuplicatePort,
                    format!("module {} declares port {} twice", m.id, p.name),
                );
            }
        }
    }

    // (target, port) -> number of incoming edges
    let mut port_feeds: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for e in &graph.edges {
        let label = format!("{}→{}", e.source, e.target);
        let Some(source) = by_id.get(e.source.as_str()) else {
            report.push(
                ViolationCode::UnknownModule,
                format!("edge {label} has unknown source {}", e.source),
            );
            continue;
        };
        let Some(target) = by_id.get(e.target.as_str()) else {
            report.push(
                ViolationCode::UnknownModule,
                format!("edge {label} has unknown target {}", e.target),
            );
            continue;
        };
        let Some(port) = target.port(&e.port) else {
            report.push(
                ViolationCode::UnknownPort,
                format!("edge {label} targets unknown port {} of {}", e.port, e.target),
            );
            continue;
        };
        if source.output_type != port.data_type {
            report.push(
                ViolationCode::TypeMismatch,
                format!(
                    "type mismatch on edge {label}: source emits {:?}, port {} expects {:?}",
                    source.output_type, port.name, port.data_type
                ),
            );
        }
        *port_feeds.entry((e.target.as_str(), e.port.as_str())).or_default() += 1;
    }

    for m in by_id.values() {
        for p in &m.input_ports {
            match port_feeds.get(&(m.id.as_str(), p.name.as_str())).copied().unwrap_or(0) {
                0 => report.push(
                    ViolationCode::UnconnectedPort,
                    format!("port {} of module {} has no incoming edge", p.name, m.id),
                ),
                1 => {}
                n => report.push(
                    ViolationCode::MultiplyConnectedPort,
                    format!("port {} of module {} has {n} incoming edges", p.name, m.id),
                ),
            }
        }
    }

    for cycle in cycles(graph) {
        report.push(ViolationCode::Cycle, format!("cycle: {}", join(&cycle)));
    }

    let exits = graph.exits();
    if exits.len() != 1 {
        report.push(
            ViolationCode::ExitCount,
            format!(
                "expected exactly one exit module, found {} ({})",
                exits.len(),
                exits.iter().map(|id| id.as_str()).collect::<Vec<_>>().join(",")
            ),
        );
    }
    report
}

/// Strongly connected components that contain a cycle, each sorted by id.
fn cycles(graph: &StructuralGraph) -> Vec<Vec<ModuleId>> {
    let mut ids: Vec<&ModuleId> = graph.modules.iter().map(|m| &m.id).collect();
    ids.sort();
    ids.dedup();
    let mut g = DiGraph::<&ModuleId, ()>::new();
    let index: BTreeMap<&str, _> = ids.iter().map(|id| (id.as_str(), g.add_node(*id))).collect();
    for e in &graph.edges {
        if let (Some(&a), Some(&b)) = (index.get(e.source.as_str()), index.get(e.target.as_str())) {
            g.add_edge(a, b, ());
        }
    }
    let mut out: Vec<Vec<ModuleId>> = petgraph::algo::tarjan_scc(&g)
        .into_iter()
        .filter(|scc| scc.len() > 1 || g.contains_edge(scc[0], scc[0]))
        .map(|scc| {
            let mut members: Vec<ModuleId> = scc.into_iter().map(|n| g[n].clone()).collect();
            members.sort();
            members
        })
        .collect();
    out.sort();
    out
}

/// Kahn's algorithm, always releasing the smallest ready id first.
pub fn topological_order(graph: &StructuralGraph) -> Result<Vec<ModuleId>, GraphError> {
    let mut indegree: BTreeMap<&ModuleId, usize> = graph.modules.iter().map(|m| (&m.id, 0)).collect();
    let mut successors: BTreeMap<&ModuleId, Vec<&ModuleId>> = BTreeMap::new();
    for e in &graph.edges {
        if !indegree.contains_key(&e.source) {
            return Err(GraphError::UnknownModule(e.source.clone()));
        }
        let Some(d) = indegree.get_mut(&e.target) else {
            return Err(GraphError::UnknownModule(e.target.clone()));
        };
        *d += 1;
        successors.entry(&e.source).or_default().push(&e.target);
    }

    let mut ready: BTreeSet<&ModuleId> = indegree.iter().filter(|(_, d)| **d == 0).map(|(id, _)| *id).collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(next) = ready.pop_first() {
        order.push(next.clone());
        for succ in successors.get(next).into_iter().flatten() {
            let d = indegree.get_mut(succ).expect("successor is a known module");
            *d -= 1;
            if *d == 0 {
                ready.insert(succ);
            }
        }
    }

    if order.len() < indegree.len() {
        let placed: BTreeSet<&ModuleId> = order.iter().collect();
        let remaining = indegree
            .keys()
            .filter(|id| !placed.contains(*id))
            .map(|id| (*id).clone())
            .collect();
        return Err(GraphError::Cycle(remaining));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(id: &str, inputs: &[(&str, &str)], output: &str) -> ModuleSpec {
        ModuleSpec::new(id, inputs.iter().map(|(n, t)| Port::new(*n, *t)).collect(), output)
    }

    fn diamond() -> StructuralGraph {
        StructuralGraph::new(
            vec![
                m("D", &[("left", "t"), ("right", "t")], "t"),
                m("C", &[("in", "t")], "t"),
                m("B", &[("in", "t")], "t"),
                m("A", &[], "t"),
            ],
            vec![
                Edge::new("A", "B", "in"),
                Edge::new("A", "C", "in"),
                Edge::new("B", "D", "left"),
                Edge::new("C", "D", "right"),
            ],
        )
    }

    #[test]
    fn single_module_is_valid() {
        let g = StructuralGraph::new(vec![m("A", &[], "frames")], vec![]);
        assert!(validate_graph(&g).is_valid());
    }

    #[test]
    fn two_cycle_is_named() {
        let g = StructuralGraph::new(
            vec![m("A", &[("in", "t")], "t"), m("B", &[("in", "t")], "t")],
            vec![Edge::new("A", "B", "in"), Edge::new("B", "A", "in")],
        );
        let report = validate_graph(&g);
        let cycle: Vec<_> = report
            .violations()
            .iter()
            .filter(|v| v.code == ViolationCode::Cycle)
            .collect();
        assert_eq!(cycle.len(), 1);
        assert_eq!(cycle[0].message, "cycle: A,B");
    }

    #[test]
    fn type_mismatch_is_the_only_violation() {
        let g = StructuralGraph::new(
            vec![m("A", &[], "frames"), m("B", &[("in", "detections")], "detections")],
            vec![Edge::new("A", "B", "in")],
        );
        let report = validate_graph(&g);
        assert_eq!(report.codes(), vec![ViolationCode::TypeMismatch]);
        assert!(report.violations()[0].message.starts_with("type mismatch on edge A→B"));
    }

    #[test]
    fn port_wiring_rules() {
        let g = StructuralGraph::new(
            vec![
                m("A", &[], "t"),
                m("B", &[], "t"),
                m("C", &[("x", "t"), ("y", "t")], "t"),
            ],
            vec![
                Edge::new("A", "C", "x"),
                Edge::new("B", "C", "x"),
                Edge::new("A", "C", "zz"),
            ],
        );
        let codes = validate_graph(&g).codes();
        assert!(codes.contains(&ViolationCode::MultiplyConnectedPort));
        assert!(codes.contains(&ViolationCode::UnconnectedPort));
        assert!(codes.contains(&ViolationCode::UnknownPort));
    }

    #[test]
    fn two_exits_rejected() {
        let g = StructuralGraph::new(vec![m("A", &[], "t"), m("B", &[], "t")], vec![]);
        assert_eq!(validate_graph(&g).codes(), vec![ViolationCode::ExitCount]);
    }

    #[test]
    fn chain_order() {
        let g = StructuralGraph::new(
            vec![
                m("C", &[("in", "t")], "t"),
                m("A", &[], "t"),
                m("B", &[("in", "t")], "t"),
            ],
            vec![Edge::new("B", "C", "in"), Edge::new("A", "B", "in")],
        );
        let order = topological_order(&g).unwrap();
        assert_eq!(order, vec!["A".into(), "B".into(), "C".into()] as Vec<ModuleId>);
    }

    #[test]
    fn diamond_breaks_ties_by_id() {
        let g = diamond();
        assert!(validate_graph(&g).is_valid());
        let order: Vec<String> = topological_order(&g)
            .unwrap()
            .into_iter()
            .map(|id| id.to_string())
            .collect();
        assert_eq!(order, ["A", "B", "C", "D"]);
    }

    #[test]
    fn cyclic_order_is_rejected() {
        let g = StructuralGraph::new(
            vec![m("A", &[("in", "t")], "t"), m("B", &[("in", "t")], "t")],
            vec![Edge::new("A", "B", "in"), Edge::new("B", "A", "in")],
        );
        let err = topological_order(&g).unwrap_err();
        assert!(matches!(err, GraphError::Cycle(_)));
        assert!(err.to_string().starts_with("cycle detected"));
    }

    #[test]
    fn incoming_follows_port_order() {
        let g = diamond();
        let sources: Vec<&str> = g.incoming("D").iter().map(|e| e.source.as_str()).collect();
        assert_eq!(sources, ["B", "C"]);
    }
}
