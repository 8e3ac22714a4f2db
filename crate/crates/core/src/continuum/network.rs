use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::mobility::MobilityModel;
use super::{Position, EARTH_RADIUS_M};
use crate::ids::NodeId;
use crate::validation::{ValidationReport, ViolationCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Terrestrial,
    Aerial,
    Satellite,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Terrestrial, Domain::Aerial, Domain::Satellite];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Terrestrial => "terrestrial",
            Domain::Aerial => "aerial",
            Domain::Satellite => "satellite",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub domain: Domain,
    /// Giga-operations per second.
    pub compute_capacity: f64,
    /// Megabytes.
    pub memory_capacity: f64,
    /// Joules per giga-operation.
    pub energy_cost: f64,
    /// Seconds added to every link incident to this node.
    pub access_latency: f64,
    pub mobility: MobilityModel,
}

impl NodeSpec {
    pub fn new(id: impl Into<NodeId>, domain: Domain, mobility: MobilityModel) -> Self {
        Self {
            id: id.into(),
            domain,
            compute_capacity: 1.0,
            memory_capacity: f64::MAX,
            energy_cost: 0.0,
            access_latency: 0.0,
            mobility,
        }
    }

    pub fn with_compute(mut self, capacity: f64) -> Self {
        self.compute_capacity = capacity;
        self
    }

    pub fn with_memory(mut self, capacity: f64) -> Self {
        self.memory_capacity = capacity;
        self
    }

    pub fn with_energy_cost(mut self, cost: f64) -> Self {
        self.energy_cost = cost;
        self
    }

    pub fn with_access_latency(mut self, latency: f64) -> Self {
        self.access_latency = latency;
        self
    }

    pub fn position_at(&self, t: f64) -> Position {
        self.mobility.position_at(t)
    }
}

/// Link parameters for one unordered pair of domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRule {
    pub domains: (Domain, Domain),
    /// Bits per second.
    pub bandwidth: f64,
    /// Optional maximum link distance, metres.
    pub max_range: Option<f64>,
    /// Seconds added per traversed hop.
    pub per_hop_overhead: f64,
}

impl LinkRule {
    pub fn new(a: Domain, b: Domain, bandwidth: f64) -> Self {
        Self {
            domains: (a, b),
            bandwidth,
            max_range: None,
            per_hop_overhead: 0.0,
        }
    }

    pub fn with_range(mut self, max_range: f64) -> Self {
        self.max_range = Some(max_range);
        self
    }

    pub fn with_overhead(mut self, overhead: f64) -> Self {
        self.per_hop_overhead = overhead;
        self
    }

    fn key(&self) -> (Domain, Domain) {
        ordered(self.domains.0, self.domains.1)
    }
}

fn ordered(a: Domain, b: Domain) -> (Domain, Domain) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The per-domain-pair rule set. Pairs without a rule never form links.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkRules {
    pub rules: Vec<LinkRule>,
}

impl LinkRules {
    pub fn new(rules: Vec<LinkRule>) -> Self {
        Self { rules }
    }

    pub fn get(&self, a: Domain, b: Domain) -> Option<&LinkRule> {
        let key = ordered(a, b);
        self.rules.iter().find(|r| r.key() == key)
    }
}

/// Tolerance on the Earth-occlusion test, so a segment that merely touches
/// the surface at a ground endpoint still counts as line of sight.
const OCCLUSION_TOLERANCE_M: f64 = 1e-3;

/// True when the closed segment `p`–`q` stays outside the Earth ball.
pub(crate) fn line_of_sight(p: &Position, q: &Position) -> bool {
    let d = q - p;
    let len2 = d.norm_squared();
    let s = if len2 == 0.0 {
        0.0
    } else {
        (-p.dot(&d) / len2).clamp(0.0, 1.0)
    };
    let closest = p + d * s;
    closest.norm() >= EARTH_RADIUS_M - OCCLUSION_TOLERANCE_M
}

/// Link-level visibility between two nodes at time `t`.
///
/// Requires Earth line of sight and, where the domain-pair rule sets one,
/// distance within `max_range`. Terrestrial–terrestrial pairs model ground
/// backhaul and are bounded by range only.
pub fn visible(a: &NodeSpec, b: &NodeSpec, t: f64, rules: &LinkRules) -> bool {
    // canonical endpoint order keeps the float path identical both ways
    let (a, b) = if a.id <= b.id { (a, b) } else { (b, a) };
    let (pa, pb) = (a.position_at(t), b.position_at(t));
    pair_visible(a.domain, b.domain, &pa, &pb, rules)
}

pub(crate) fn pair_visible(da: Domain, db: Domain, pa: &Position, pb: &Position, rules: &LinkRules) -> bool {
    if let Some(range) = rules.get(da, db).and_then(|r| r.max_range) {
        if (pb - pa).norm() > range {
            return false;
        }
    }
    if da == Domain::Terrestrial && db == Domain::Terrestrial {
        return true;
    }
    line_of_sight(pa, pb)
}

pub fn validate_network(nodes: &[NodeSpec], rules: &LinkRules) -> ValidationReport {
    let mut report = ValidationReport::new();
    let mut ids = BTreeSet::new();
    for n in nodes {
        if !ids.insert(n.id.as_str()) {
            report.push(ViolationCode::DuplicateNode, format!("duplicate node id {}", n.id));
        }
        let mut bad = Vec::new();
        if !(n.compute_capacity > 0.0 && n.compute_capacity.is_finite()) {
            bad.push(format!("compute_capacity {} must be > 0", n.compute_capacity));
        }
        if !(n.memory_capacity >= 0.0) {
            bad.push(format!("memory_capacity {} must be >= 0", n.memory_capacity));
        }
        if !(n.energy_cost >= 0.0 && n.energy_cost.is_finite()) {
            bad.push(format!("energy_cost {} must be >= 0", n.energy_cost));
        }
        if !(n.access_latency >= 0.0 && n.access_latency.is_finite()) {
            bad.push(format!("access_latency {} must be >= 0", n.access_latency));
        }
        for b in bad {
            report.push(ViolationCode::InvalidNode, format!("node {}: {b}", n.id));
        }
        if (n.domain == Domain::Satellite) != n.mobility.is_orbit() {
            report.push(
                ViolationCode::MobilityDomainMismatch,
                format!(
                    "node {}: domain {} requires {} mobility",
                    n.id,
                    n.domain,
                    if n.domain == Domain::Satellite {
                        "an orbit"
                    } else {
                        "non-orbit"
                    }
                ),
            );
        }
        match &n.mobility {
            MobilityModel::CircularOrbit { altitude_m, .. } if !(*altitude_m > 0.0) => report.push(
                ViolationCode::InvalidMobility,
                format!("node {}: orbit altitude {altitude_m} must be > 0", n.id),
            ),
            MobilityModel::WaypointLoop { waypoints, speed_mps } => {
                if waypoints.is_empty() {
                    report.push(
                        ViolationCode::InvalidMobility,
                        format!("node {}: waypoint list is empty", n.id),
                    );
                }
                if !(*speed_mps > 0.0) {
                    report.push(
                        ViolationCode::InvalidMobility,
                        format!("node {}: waypoint speed {speed_mps} must be > 0", n.id),
                    );
                }
            }
            _ => {}
        }
    }
    let mut pairs = BTreeSet::new();
    for r in &rules.rules {
        let (a, b) = r.key();
        if !pairs.insert((a, b)) {
            report.push(
                ViolationCode::DuplicateLinkRule,
                format!("more than one link rule for {a}-{b}"),
            );
        }
        if !(r.bandwidth > 0.0) {
            report.push(
                ViolationCode::InvalidLinkRule,
                format!("link rule {a}-{b}: bandwidth must be > 0"),
            );
        }
        if !(r.per_hop_overhead >= 0.0) {
            report.push(
                ViolationCode::InvalidLinkRule,
                format!("link rule {a}-{b}: per_hop_overhead must be >= 0"),
            );
        }
        if r.max_range.is_some_and(|m| !(m > 0.0)) {
            report.push(
                ViolationCode::InvalidLinkRule,
                format!("link rule {a}-{b}: max_range must be > 0"),
            );
        }
    }
    report
}
