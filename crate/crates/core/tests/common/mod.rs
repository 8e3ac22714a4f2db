#![allow(dead_code)]

use std::collections::BTreeSet;

use cai_core::continuum::*;
use cai_core::model::*;
use cai_core::ops::PolicyPredicate;
use cai_core::placement::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn ground(id: &str, lat: f64, lon: f64) -> NodeSpec {
    NodeSpec::new(
        id,
        Domain::Terrestrial,
        MobilityModel::Static(GeoPoint::new(lat, lon, 0.0)),
    )
}

pub fn ground_rules(bandwidth: f64) -> LinkRules {
    LinkRules::new(vec![LinkRule::new(Domain::Terrestrial, Domain::Terrestrial, bandwidth)
        .with_range(2_000_000.0)
        .with_overhead(0.001)])
}

pub fn chain(ids: &[&str]) -> StructuralGraph {
    let modules = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let ports = if i == 0 { vec![] } else { vec![Port::new("in", "t")] };
            ModuleSpec::new(*id, ports, "t")
        })
        .collect();
    let edges = ids.windows(2).map(|w| Edge::new(w[0], w[1], "in")).collect();
    StructuralGraph::new(modules, edges)
}

/// Random instance with up to `max_modules` modules (chain or two-branch
/// fusion), `max_impls` implementations each and `max_nodes` ground nodes.
pub fn random_problem(seed: u64, max_modules: usize, max_impls: usize, max_nodes: usize) -> PlacementProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=max_modules);
    let ids: Vec<String> = (0..m).map(|i| format!("m{i}")).collect();
    let graph = if m == 3 && rng.gen_bool(0.4) {
        StructuralGraph::new(
            vec![
                ModuleSpec::new("m0", vec![], "t"),
                ModuleSpec::new("m1", vec![], "t"),
                ModuleSpec::new("m2", vec![Port::new("a", "t"), Port::new("b", "t")], "t"),
            ],
            vec![Edge::new("m0", "m2", "a"), Edge::new("m1", "m2", "b")],
        )
    } else {
        chain(&ids.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let pools = ids
        .iter()
        .map(|id| {
            let k = rng.gen_range(1..=max_impls);
            let impls = (0..k)
                .map(|j| {
                    Implementation::new(format!("{id}-i{j}").as_str(), id.as_str())
                        .with_demand(rng.gen_range(0.1..20.0))
                        .with_memory(rng.gen_range(10.0..3000.0))
                        .with_accuracy(rng.gen_range(0.5..1.0))
                        .with_scale(rng.gen_range(0.05..2.0))
                })
                .collect();
            ImplementationPool::new(id.as_str(), impls)
        })
        .collect();
    let n = rng.gen_range(1..=max_nodes);
    let nodes: Vec<NodeSpec> = (0..n)
        .map(|i| {
            ground(&format!("n{i}"), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
                .with_compute(rng.gen_range(5.0..500.0))
                .with_memory(rng.gen_range(1000.0..8000.0))
                .with_energy_cost(rng.gen_range(0.1..2.0))
                .with_access_latency(rng.gen_range(0.0..0.01))
        })
        .collect();
    let rules = ground_rules(rng.gen_range(1e7..1e9));
    let snap = snapshot(&nodes, &rules, 0.0);
    PlacementProblem {
        graph,
        pools,
        snapshot: snap,
        nodes,
        request: RequestProfile::new(rng.gen_range(1e4..1e6), rng.gen_range(0.0..2.0)),
        weights: Weights::new(
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.1..2.0),
        ),
        budgets: Budgets::new(1.0, 50.0),
        constraints: Vec::new(),
    }
}

/// Every complete assignment, enumerated independently of the solvers.
pub fn all_assignments(problem: &PlacementProblem) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for module in &problem.graph.modules {
        let pool = problem.pools.iter().find(|p| p.module_id == module.id).unwrap();
        let mut next = Vec::new();
        for a in &out {
            for imp in &pool.implementations {
                for node in &problem.nodes {
                    next.push(a.clone().with(module.id.clone(), imp.id.clone(), node.id.clone()));
                }
            }
        }
        out = next;
    }
    out
}

pub fn affinity(module: &str, domains: &[Domain]) -> PolicyPredicate {
    PolicyPredicate::DomainAffinity {
        module: module.into(),
        domains: domains.iter().copied().collect::<BTreeSet<_>>(),
    }
}
