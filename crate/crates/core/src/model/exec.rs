use serde::Serialize;
use thiserror::Error;

use super::functional::{
    pool_for, validate_mapping, validate_pools, Implementation, ImplementationPool, Mapping, Payload,
};
use super::graph::{topological_order, validate_graph, StructuralGraph};
use crate::ids::{ImplId, ModuleId};
use crate::validation::ValidationReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    #[error("invalid graph:\n{0}")]
    InvalidGraph(ValidationReport),
    #[error("invalid mapping:\n{0}")]
    InvalidMapping(ValidationReport),
    #[error("input payload must have size >= 0 and accuracy in (0,1], got ({size}, {accuracy})")]
    InvalidInput { size: f64, accuracy: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub module: ModuleId,
    pub implementation: ImplId,
    pub input_bytes: f64,
    pub output_bytes: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Execution {
    pub output: Payload,
    /// One record per module, in execution order.
    pub trace: Vec<TraceRecord>,
}

impl Execution {
    pub fn record(&self, module: &str) -> Option<&TraceRecord> {
        self.trace.iter().find(|r| r.module.as_str() == module)
    }
}

/// Applies one implementation to its incoming payloads.
///
/// Sizes add up before `output_scale` applies. A single input carries its
/// accuracy through `accuracy_factor`; several inputs are fused by noisy-or
/// first.
pub fn propagate(implementation: &Implementation, incoming: &[Payload]) -> Payload {
    let size: f64 = incoming.iter().map(|p| p.size).sum::<f64>() * implementation.output_scale;
    let combined = match incoming {
        [single] => single.accuracy,
        many => 1.0 - many.iter().map(|p| 1.0 - p.accuracy).product::<f64>(),
    };
    Payload::new(size, combined * implementation.accuracy_factor)
}

/// Runs the logical graph: modules in topological order, entry modules fed
/// with `input`, and the exit module's payload returned.
pub fn execute(
    graph: &StructuralGraph,
    pools: &[ImplementationPool],
    mapping: &Mapping,
    input: Payload,
) -> Result<Execution, ExecError> {
    let graph_report = validate_graph(graph);
    if !graph_report.is_valid() {
        return Err(ExecError::InvalidGraph(graph_report));
    }
    let mut mapping_report = validate_pools(graph, pools);
    mapping_report.extend(validate_mapping(graph, pools, mapping));
    if !mapping_report.is_valid() {
        return Err(ExecError::InvalidMapping(mapping_report));
    }
    if !input.is_valid() {
        return Err(ExecError::InvalidInput {
            size: input.size,
            accuracy: input.accuracy,
        });
    }

    let order = topological_order(graph).expect("validated graph is acyclic");
    let mut outputs: Vec<(ModuleId, Payload)> = Vec::with_capacity(order.len());
    let mut trace = Vec::with_capacity(order.len());
    for id in &order {
        let module = graph.module(id.as_str()).expect("ordered id exists");
        let choice = &mapping.choices[id];
        let implementation = pool_for(pools, id.as_str())
            .and_then(|p| p.get(choice.as_str()))
            .expect("validated mapping");
        let incoming: Vec<Payload> = if module.is_entry() {
            vec![input]
        } else {
            graph
                .incoming(id.as_str())
                .iter()
                .map(|e| {
                    outputs
                        .iter()
                        .find(|(m, _)| *m == e.source)
                        .map(|(_, p)| *p)
                        .expect("predecessor already evaluated")
                })
                .collect()
        };
        let out = propagate(implementation, &incoming);
        trace.push(TraceRecord {
            module: id.clone(),
            implementation: choice.clone(),
            input_bytes: incoming.iter().map(|p| p.size).sum(),
            output_bytes: out.size,
            accuracy: out.accuracy,
        });
        outputs.push((id.clone(), out));
    }

    let exit = graph.exit().expect("validated graph has one exit");
    let output = outputs
        .iter()
        .find(|(m, _)| m == exit)
        .map(|(_, p)| *p)
        .expect("exit evaluated");
    Ok(Execution { output, trace })
}
