use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::StructuralGraph;
use crate::continuum::Domain;
use crate::ids::{ImplId, ModuleId};
use crate::validation::{ValidationReport, ViolationCode};

/// One interchangeable realization of a module, described by its
/// synthetic performance profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Implementation {
    pub id: ImplId,
    pub module_id: ModuleId,
    /// Giga-operations per request.
    pub compute_demand: f64,
    /// Megabytes resident on the hosting node.
    pub memory_required: f64,
    /// Multiplicative quality factor in (0, 1].
    pub accuracy_factor: f64,
    /// Output bytes per byte of total input.
    pub output_scale: f64,
    /// Domains allowed to host this implementation; `None` allows all.
    pub domain_affinity: Option<BTreeSet<Domain>>,
}

impl Implementation {
    pub fn new(id: impl Into<ImplId>, module_id: impl Into<ModuleId>) -> Self {
        Self {
            id: id.into(),
            module_id: module_id.into(),
            compute_demand: 0.0,
            memory_required: 0.0,
            accuracy_factor: 1.0,
            output_scale: 1.0,
            domain_affinity: None,
        }
    }

    pub fn with_demand(mut self, compute_demand: f64) -> Self {
        self.compute_demand = compute_demand;
        self
    }

    pub fn with_memory(mut self, memory_required: f64) -> Self {
        self.memory_required = memory_required;
        self
    }

    pub fn with_accuracy(mut self, accuracy_factor: f64) -> Self {
        self.accuracy_factor = accuracy_factor;
        self
    }

    pub fn with_scale(mut self, output_scale: f64) -> Self {
        self.output_scale = output_scale;
        self
    }

    pub fn with_affinity(mut self, domains: impl IntoIterator<Item = Domain>) -> Self {
        self.domain_affinity = Some(domains.into_iter().collect());
        self
    }

    pub fn allows(&self, domain: Domain) -> bool {
        self.domain_affinity.as_ref().is_none_or(|d| d.contains(&domain))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplementationPool {
    pub module_id: ModuleId,
    pub implementations: Vec<Implementation>,
}

impl ImplementationPool {
    pub fn new(module_id: impl Into<ModuleId>, implementations: Vec<Implementation>) -> Self {
        Self {
            module_id: module_id.into(),
            implementations,
        }
    }

    pub fn get(&self, id: &str) -> Option<&Implementation> {
        self.implementations.iter().find(|i| i.id.as_str() == id)
    }
}

/// The implementation choice per module.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mapping {
    pub choices: BTreeMap<ModuleId, ImplId>,
}

impl Mapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, module: impl Into<ModuleId>, implementation: impl Into<ImplId>) -> Self {
        self.choices.insert(module.into(), implementation.into());
        self
    }

    /// Maps every module to the first entry of its pool.
    pub fn first_of_each(pools: &[ImplementationPool]) -> Self {
        let choices = pools
            .iter()
            .filter_map(|p| p.implementations.first().map(|i| (p.module_id.clone(), i.id.clone())))
            .collect();
        Self { choices }
    }
}

/// Descriptor of the data flowing between modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payload {
    /// Bytes.
    pub size: f64,
    /// Quality carried by the data, in (0, 1].
    pub accuracy: f64,
}

impl Payload {
    pub fn new(size: f64, accuracy: f64) -> Self {
        Self { size, accuracy }
    }

    pub fn is_valid(&self) -> bool {
        self.size >= 0.0 && self.size.is_finite() && self.accuracy > 0.0 && self.accuracy <= 1.0
    }
}

pub(crate) fn pool_for<'p>(pools: &'p [ImplementationPool], module: &str) -> Option<&'p ImplementationPool> {
    pools.iter().find(|p| p.module_id.as_str() == module)
}

pub fn validate_pools(graph: &StructuralGraph, pools: &[ImplementationPool]) -> ValidationReport {
    let mut report = ValidationReport::new();
    let mut seen_pools = BTreeSet::new();
    for pool in pools {
        if !seen_pools.insert(pool.module_id.as_str()) {
            report.push(
                ViolationCode::DuplicatePool,
                format!("module {} has more than one pool", pool.module_id),
            );
        }
        if !graph.contains(pool.module_id.as_str()) {
            report.push(
                ViolationCode::UnknownModule,
                format!("pool references unknown module {}", pool.module_id),
            );
        }
        if pool.implementations.is_empty() {
            report.push(
                ViolationCode::EmptyPool,
                format!("pool of module {} is empty", pool.module_id),
            );
        }
        let mut ids = BTreeSet::new();
        for imp in &pool.implementations {
            if !ids.insert(imp.id.as_str()) {
                report.push(
                    ViolationCode::DuplicateImplementation,
                    format!("implementation {} appears twice in pool of {}", imp.id, pool.module_id),
                );
            }
            if imp.module_id != pool.module_id {
                report.push(
                    ViolationCode::PoolModuleMismatch,
                    format!(
                        "implementation {} belongs to {} but sits in pool of {}",
                        imp.id, imp.module_id, pool.module_id
                    ),
                );
            }
            let mut bad = Vec::new();
            if !(imp.accuracy_factor > 0.0 && imp.accuracy_factor <= 1.0) {
                bad.push(format!("accuracy_factor {} outside (0,1]", imp.accuracy_factor));
            }
            if !(imp.compute_demand >= 0.0 && imp.compute_demand.is_finite()) {
                bad.push(format!("compute_demand {} is negative", imp.compute_demand));
            }
            if !(imp.output_scale > 0.0 && imp.output_scale.is_finite()) {
                bad.push(format!("output_scale {} is not positive", imp.output_scale));
            }
            if !(imp.memory_required >= 0.0 && imp.memory_required.is_finite()) {
                bad.push(format!("memory_required {} is negative", imp.memory_required));
            }
            if imp.domain_affinity.as_ref().is_some_and(BTreeSet::is_empty) {
                bad.push("domain affinity allows no domain".to_owned());
            }
            for b in bad {
                report.push(
                    ViolationCode::InvalidImplementation,
                    format!("implementation {}: {b}", imp.id),
                );
            }
        }
    }
    for m in &graph.modules {
        if !seen_pools.contains(m.id.as_str()) {
            report.push(
                ViolationCode::MissingPool,
                format!("module {} has no implementation pool", m.id),
            );
        }
    }
    report
}

pub fn validate_mapping(graph: &StructuralGraph, pools: &[ImplementationPool], mapping: &Mapping) -> ValidationReport {
    let mut report = ValidationReport::new();
    for m in &graph.modules {
        let Some(choice) = mapping.choices.get(&m.id) else {
            report.push(ViolationCode::Unmapped, format!("unmapped module {}", m.id));
            continue;
        };
        let in_pool = pool_for(pools, m.id.as_str()).is_some_and(|p| p.get(choice.as_str()).is_some());
        if !in_pool {
            report.push(
                ViolationCode::NotInPool,
                format!("δ({}) = {choice} is not in the pool of {}", m.id, m.id),
            );
        }
    }
    for module in mapping.choices.keys() {
        if !graph.contains(module.as_str()) {
            report.push(
                ViolationCode::UnknownModule,
                format!("mapping names unknown module {module}"),
            );
        }
    }
    report
}
