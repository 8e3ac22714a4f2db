//! On-disk scenario format.
//!
//! Every field carries its unit in the key name and unknown keys are
//! rejected, so a typo never silently falls back to a default.

use std::collections::BTreeSet;
use std::path::Path;

use cai_core::continuum::{Domain, GeoPoint, LinkRule, LinkRules, MobilityModel, NodeSpec};
use cai_core::model::{Edge, Implementation, ImplementationPool, ModuleSpec, Port, StructuralGraph};
use cai_core::ops::{PolicyPredicate, ReconfigurationPolicy};
use cai_core::placement::{Budgets, Weights};
use cai_core::sim::{ArrivalProcess, Scenario, Slo, Workload};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub seed: u64,
    pub epoch: EpochSection,
    pub workload: WorkloadSection,
    pub slo: SloSection,
    pub policy: PolicySection,
    pub weights: WeightsSection,
    pub budgets: BudgetsSection,
    pub modules: Vec<ModuleEntry>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    pub pools: Vec<PoolEntry>,
    pub nodes: Vec<NodeEntry>,
    pub link_rules: Vec<LinkRuleEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpochSection {
    pub interval_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadSection {
    pub arrival: ArrivalProcess,
    pub rate_per_s: f64,
    pub entry_bytes: f64,
    pub duration_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SloSection {
    pub latency_s: f64,
    pub min_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySection {
    Static,
    Reactive,
    Predictive { lead_s: f64, step_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSection {
    pub latency: f64,
    pub energy: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetsSection {
    pub latency_s: f64,
    pub energy_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortEntry {
    pub name: String,
    #[serde(rename = "type")]
    pub data_type: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub inputs: Vec<PortEntry>,
    pub output: String,
    #[serde(default)]
    pub state_size_bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub source: String,
    pub target: String,
    pub port: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplementationEntry {
    pub id: String,
    pub compute_demand_gop: f64,
    pub memory_required_mb: f64,
    pub accuracy_factor: f64,
    pub output_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domains: Option<BTreeSet<Domain>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolEntry {
    pub module: String,
    pub implementations: Vec<ImplementationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoEntry {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MobilityEntry {
    Static {
        lat_deg: f64,
        lon_deg: f64,
        alt_m: f64,
    },
    CircularOrbit {
        altitude_m: f64,
        inclination_deg: f64,
        phase_deg: f64,
    },
    WaypointLoop {
        speed_mps: f64,
        waypoints: Vec<GeoEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeEntry {
    pub id: String,
    pub domain: Domain,
    pub compute_capacity_gops: f64,
    pub memory_capacity_mb: f64,
    pub energy_cost_j_per_gop: f64,
    #[serde(default)]
    pub access_latency_s: f64,
    pub mobility: MobilityEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkRuleEntry {
    pub domains: [Domain; 2],
    pub bandwidth_bps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_range_m: Option<f64>,
    pub per_hop_overhead_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstraintEntry {
    DomainAffinity {
        module: String,
        domains: BTreeSet<Domain>,
    },
    Colocation {
        first: String,
        second: String,
    },
    DataLocality {
        source: String,
        target: String,
        forbidden: BTreeSet<Domain>,
    },
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario documents contain only tables, arrays and scalars")
    }

    pub fn to_scenario(&self) -> Scenario {
        let modules = self
            .modules
            .iter()
            .map(|m| {
                let ports = m.inputs.iter().map(|p| Port::new(&p.name, &p.data_type)).collect();
                let mut spec = ModuleSpec::new(m.id.as_str(), ports, &m.output);
                spec.name = m.name.clone().unwrap_or_else(|| m.id.clone());
                spec.state_size = m.state_size_bytes;
                spec
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.source.as_str(), e.target.as_str(), &e.port))
            .collect();
        let pools = self
            .pools
            .iter()
            .map(|p| {
                let implementations = p
                    .implementations
                    .iter()
                    .map(|i| Implementation {
                        id: i.id.as_str().into(),
                        module_id: p.module.as_str().into(),
                        compute_demand: i.compute_demand_gop,
                        memory_required: i.memory_required_mb,
                        accuracy_factor: i.accuracy_factor,
                        output_scale: i.output_scale,
                        domain_affinity: i.domains.clone(),
                    })
                    .collect();
                ImplementationPool::new(p.module.as_str(), implementations)
            })
            .collect();
        let nodes = self
            .nodes
            .iter()
            .map(|n| NodeSpec {
                id: n.id.as_str().into(),
                domain: n.domain,
                compute_capacity: n.compute_capacity_gops,
                memory_capacity: n.memory_capacity_mb,
                energy_cost: n.energy_cost_j_per_gop,
                access_latency: n.access_latency_s,
                mobility: n.mobility.to_model(),
            })
            .collect();
        let link_rules = LinkRules::new(
            self.link_rules
                .iter()
                .map(|r| LinkRule {
                    domains: (r.domains[0], r.domains[1]),
                    bandwidth: r.bandwidth_bps,
                    max_range: r.max_range_m,
                    per_hop_overhead: r.per_hop_overhead_s,
                })
                .collect(),
        );
        let constraints = self.constraints.iter().map(ConstraintEntry::to_predicate).collect();
        Scenario {
            name: self.name.clone(),
            nodes,
            link_rules,
            graph: StructuralGraph::new(modules, edges),
            pools,
            constraints,
            workload: Workload {
                arrival: self.workload.arrival,
                rate: self.workload.rate_per_s,
                entry_bytes: self.workload.entry_bytes,
                duration: self.workload.duration_s,
                origin: self.workload.origin.as_deref().map(Into::into),
            },
            slo: Slo {
                latency: self.slo.latency_s,
                min_accuracy: self.slo.min_accuracy,
            },
            epoch: self.epoch.interval_s,
            policy: self.policy.to_policy(),
            weights: Weights::new(self.weights.latency, self.weights.energy, self.weights.accuracy),
            budgets: Budgets::new(self.budgets.latency_s, self.budgets.energy_j),
            seed: self.seed,
        }
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        ScenarioFile {
            name: s.name.clone(),
            seed: s.seed,
            epoch: EpochSection { interval_s: s.epoch },
            workload: WorkloadSection {
                arrival: s.workload.arrival,
                rate_per_s: s.workload.rate,
                entry_bytes: s.workload.entry_bytes,
                duration_s: s.workload.duration,
                origin: s.workload.origin.as_ref().map(|o| o.to_string()),
            },
            slo: SloSection {
                latency_s: s.slo.latency,
                min_accuracy: s.slo.min_accuracy,
            },
            policy: PolicySection::from_policy(&s.policy),
            weights: WeightsSection {
                latency: s.weights.latency,
                energy: s.weights.energy,
                accuracy: s.weights.accuracy,
            },
            budgets: BudgetsSection {
                latency_s: s.budgets.latency,
                energy_j: s.budgets.energy,
            },
            modules: s
                .graph
                .modules
                .iter()
                .map(|m| ModuleEntry {
                    id: m.id.to_string(),
                    name: (m.name != m.id.as_str()).then(|| m.name.clone()),
                    inputs: m
                        .input_ports
                        .iter()
                        .map(|p| PortEntry {
                            name: p.name.clone(),
                            data_type: p.data_type.clone(),
                        })
                        .collect(),
                    output: m.output_type.clone(),
                    state_size_bytes: m.state_size,
                })
                .collect(),
            edges: s
                .graph
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    source: e.source.to_string(),
                    target: e.target.to_string(),
                    port: e.port.clone(),
                })
                .collect(),
            pools: s
                .pools
                .iter()
                .map(|p| PoolEntry {
                    module: p.module_id.to_string(),
                    implementations: p
                        .implementations
                        .iter()
                        .map(|i| ImplementationEntry {
                            id: i.id.to_string(),
                            compute_demand_gop: i.compute_demand,
                            memory_required_mb: i.memory_required,
                            accuracy_factor: i.accuracy_factor,
                            output_scale: i.output_scale,
                            domains: i.domain_affinity.clone(),
                        })
                        .collect(),
                })
                .collect(),
            nodes: s
                .nodes
                .iter()
                .map(|n| NodeEntry {
                    id: n.id.to_string(),
                    domain: n.domain,
                    compute_capacity_gops: n.compute_capacity,
                    memory_capacity_mb: n.memory_capacity,
                    energy_cost_j_per_gop: n.energy_cost,
                    access_latency_s: n.access_latency,
                    mobility: MobilityEntry::from_model(&n.mobility),
                })
                .collect(),
            link_rules: s
                .link_rules
                .rules
                .iter()
                .map(|r| LinkRuleEntry {
                    domains: [r.domains.0, r.domains.1],
                    bandwidth_bps: r.bandwidth,
                    max_range_m: r.max_range,
                    per_hop_overhead_s: r.per_hop_overhead,
                })
                .collect(),
            constraints: s.constraints.iter().map(ConstraintEntry::from_predicate).collect(),
        }
    }
}

impl PolicySection {
    pub fn to_policy(&self) -> ReconfigurationPolicy {
        match *self {
            PolicySection::Static => ReconfigurationPolicy::Static,
            PolicySection::Reactive => ReconfigurationPolicy::Reactive,
            PolicySection::Predictive { lead_s, step_s } => ReconfigurationPolicy::Predictive {
                lead: lead_s,
                step: step_s,
            },
        }
    }

    pub fn from_policy(policy: &ReconfigurationPolicy) -> Self {
        match *policy {
            ReconfigurationPolicy::Static => PolicySection::Static,
            ReconfigurationPolicy::Reactive => PolicySection::Reactive,
            ReconfigurationPolicy::Predictive { lead, step } => PolicySection::Predictive {
                lead_s: lead,
                step_s: step,
            },
        }
    }
}

impl GeoEntry {
    fn to_point(&self) -> GeoPoint {
        GeoPoint::new(self.lat_deg, self.lon_deg, self.alt_m)
    }

    fn from_point(p: &GeoPoint) -> Self {
        GeoEntry {
            lat_deg: p.lat_deg,
            lon_deg: p.lon_deg,
            alt_m: p.alt_m,
        }
    }
}

impl MobilityEntry {
    pub fn to_model(&self) -> MobilityModel {
        match self {
            MobilityEntry::Static {
                lat_deg,
                lon_deg,
                alt_m,
            } => MobilityModel::Static(GeoPoint::new(*lat_deg, *lon_deg, *alt_m)),
            MobilityEntry::CircularOrbit {
                altitude_m,
                inclination_deg,
                phase_deg,
            } => MobilityModel::CircularOrbit {
                altitude_m: *altitude_m,
                inclination_deg: *inclination_deg,
                phase_deg: *phase_deg,
            },
            MobilityEntry::WaypointLoop { speed_mps, waypoints } => MobilityModel::WaypointLoop {
                waypoints: waypoints.iter().map(GeoEntry::to_point).collect(),
                speed_mps: *speed_mps,
            },
        }
    }

    pub fn from_model(model: &MobilityModel) -> Self {
        match model {
            MobilityModel::Static(p) => MobilityEntry::Static {
                lat_deg: p.lat_deg,
                lon_deg: p.lon_deg,
                alt_m: p.alt_m,
            },
            MobilityModel::CircularOrbit {
                altitude_m,
                inclination_deg,
                phase_deg,
            } => MobilityEntry::CircularOrbit {
                altitude_m: *altitude_m,
                inclination_deg: *inclination_deg,
                phase_deg: *phase_deg,
            },
            MobilityModel::WaypointLoop { waypoints, speed_mps } => MobilityEntry::WaypointLoop {
                speed_mps: *speed_mps,
                waypoints: waypoints.iter().map(GeoEntry::from_point).collect(),
            },
        }
    }
}

impl ConstraintEntry {
    fn to_predicate(&self) -> PolicyPredicate {
        match self {
            ConstraintEntry::DomainAffinity { module, domains } => PolicyPredicate::DomainAffinity {
                module: module.as_str().into(),
                domains: domains.clone(),
            },
            ConstraintEntry::Colocation { first, second } => PolicyPredicate::Colocation {
                first: first.as_str().into(),
                second: second.as_str().into(),
            },
            ConstraintEntry::DataLocality {
                source,
                target,
                forbidden,
            } => PolicyPredicate::DataLocality {
                source: source.as_str().into(),
                target: target.as_str().into(),
                forbidden: forbidden.clone(),
            },
        }
    }

    fn from_predicate(p: &PolicyPredicate) -> Self {
        match p {
            PolicyPredicate::DomainAffinity { module, domains } => ConstraintEntry::DomainAffinity {
                module: module.to_string(),
                domains: domains.clone(),
            },
            PolicyPredicate::Colocation { first, second } => ConstraintEntry::Colocation {
                first: first.to_string(),
                second: second.to_string(),
            },
            PolicyPredicate::DataLocality {
                source,
                target,
                forbidden,
            } => ConstraintEntry::DataLocality {
                source: source.to_string(),
                target: target.to_string(),
                forbidden: forbidden.clone(),
            },
        }
    }
}
