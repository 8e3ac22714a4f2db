use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::network::{pair_visible, LinkRules, NodeSpec};
use super::{Position, SPEED_OF_LIGHT};
use crate::ids::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("nodes {0} and {1} are not directly linked")]
    NotAdjacent(NodeId, NodeId),
}

/// A direct link between node indices `a < b` of a snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    /// distance / c, seconds.
    pub propagation: f64,
    /// Bits per second.
    pub bandwidth: f64,
    /// Seconds per traversal: rule overhead plus both endpoints' access latency.
    pub overhead: f64,
}

impl Link {
    pub fn latency(&self, payload_bytes: f64) -> f64 {
        self.propagation + payload_bytes * 8.0 / self.bandwidth + self.overhead
    }
}

/// Positions and links of the network at one instant, with all-pairs
/// shortest routes under propagation + overhead cost.
///
/// Nodes are indexed in ascending id order.
#[derive(Debug, Clone)]
pub struct TopologySnapshot {
    pub time: f64,
    node_ids: Vec<NodeId>,
    index: BTreeMap<NodeId, usize>,
    positions: Vec<Position>,
    links: Vec<Link>,
    link_at: Vec<Option<usize>>,
    next_hop: Vec<Option<usize>>,
}

impl TopologySnapshot {
    pub fn len(&self) -> usize {
        self.node_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_ids.is_empty()
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn require(&self, id: &str) -> Result<usize, TopologyError> {
        self.index_of(id).ok_or_else(|| TopologyError::UnknownNode(id.into()))
    }

    pub fn position(&self, i: usize) -> Position {
        self.positions[i]
    }

    pub fn position_of(&self, id: &str) -> Option<Position> {
        self.index_of(id).map(|i| self.positions[i])
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, a: usize, b: usize) -> Option<&Link> {
        self.link_at[a * self.len() + b].map(|l| &self.links[l])
    }

    pub fn has_link(&self, a: usize, b: usize) -> bool {
        self.link(a, b).is_some()
    }

    /// Node sequence of the shortest route from `a` to `b`, both included.
    pub fn route(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if a == b {
            return Some(vec![a]);
        }
        let n = self.len();
        self.next_hop[a * n + b]?;
        let mut path = vec![a];
        let mut at = a;
        while at != b {
            at = self.next_hop[at * n + b].expect("reachable route is contiguous");
            path.push(at);
        }
        Some(path)
    }

    /// Shortest-route latency for a payload, or +∞ when unreachable.
    pub fn pairwise_latency(&self, a: usize, b: usize, payload_bytes: f64) -> f64 {
        match self.route(a, b) {
            Some(path) => path
                .windows(2)
                .map(|w| {
                    self.link(w[0], w[1])
                        .expect("route hops are links")
                        .latency(payload_bytes)
                })
                .sum(),
            None => f64::INFINITY,
        }
    }

    pub fn pairwise_latency_between(&self, a: &str, b: &str, payload_bytes: f64) -> Result<f64, TopologyError> {
        Ok(self.pairwise_latency(self.require(a)?, self.require(b)?, payload_bytes))
    }

    /// Smallest link bandwidth along the route, if reachable.
    pub fn route_bandwidth(&self, a: usize, b: usize) -> Option<f64> {
        let path = self.route(a, b)?;
        Some(
            path.windows(2)
                .map(|w| self.link(w[0], w[1]).expect("route hops are links").bandwidth)
                .fold(f64::INFINITY, f64::min),
        )
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        (self.positions[b] - self.positions[a]).norm()
    }

    /// Whether every consecutive hop of `path` is still a link here.
    pub fn route_intact(&self, path: &[usize]) -> bool {
        path.windows(2).all(|w| self.has_link(w[0], w[1]))
    }
}

/// Direct-link latency: distance/c + transmission + per-hop overhead.
pub fn link_latency(a: &str, b: &str, snapshot: &TopologySnapshot, payload_bytes: f64) -> Result<f64, TopologyError> {
    let (i, j) = (snapshot.require(a)?, snapshot.require(b)?);
    snapshot
        .link(i, j)
        .map(|l| l.latency(payload_bytes))
        .ok_or_else(|| TopologyError::NotAdjacent(a.into(), b.into()))
}

fn sorted_nodes(network: &[NodeSpec]) -> Vec<&NodeSpec> {
    let mut nodes: Vec<&NodeSpec> = network.iter().collect();
    nodes.sort_by(|a, b| a.id.cmp(&b.id));
    nodes
}

fn compute_links(nodes: &[&NodeSpec], positions: &[Position], rules: &LinkRules) -> Vec<Link> {
    let mut links = Vec::new();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let Some(rule) = rules.get(nodes[a].domain, nodes[b].domain) else {
                continue;
            };
            if !pair_visible(nodes[a].domain, nodes[b].domain, &positions[a], &positions[b], rules) {
                continue;
            }
            let distance = (positions[b] - positions[a]).norm();
            links.push(Link {
                a,
                b,
                distance,
                propagation: distance / SPEED_OF_LIGHT,
                bandwidth: rule.bandwidth,
                overhead: rule.per_hop_overhead + nodes[a].access_latency + nodes[b].access_latency,
            });
        }
    }
    links
}

/// Pairs `(a, b)`, `a < b` in id order, that form a link at `t`.
pub fn visibility_set(network: &[NodeSpec], rules: &LinkRules, t: f64) -> Vec<(usize, usize)> {
    let nodes = sorted_nodes(network);
    let positions: Vec<Position> = nodes.iter().map(|n| n.position_at(t)).collect();
    compute_links(&nodes, &positions, rules)
        .into_iter()
        .map(|l| (l.a, l.b))
        .collect()
}

pub fn snapshot(network: &[NodeSpec], rules: &LinkRules, t: f64) -> TopologySnapshot {
    let nodes = sorted_nodes(network);
    let n = nodes.len();
    let positions: Vec<Position> = nodes.iter().map(|node| node.position_at(t)).collect();
    let links = compute_links(&nodes, &positions, rules);

    let mut link_at = vec![None; n * n];
    let mut cost = vec![f64::INFINITY; n * n];
    let mut next_hop = vec![None; n * n];
    for i in 0..n {
        cost[i * n + i] = 0.0;
        next_hop[i * n + i] = Some(i);
    }
    for (k, l) in links.iter().enumerate() {
        let w = l.propagation + l.overhead;
        for (i, j) in [(l.a, l.b), (l.b, l.a)] {
            link_at[i * n + j] = Some(k);
            cost[i * n + j] = w;
            next_hop[i * n + j] = Some(j);
        }
    }
    // Floyd–Warshall; strict improvement keeps the lower-index intermediate on ties.
    for k in 0..n {
        for i in 0..n {
            let ik = cost[i * n + k];
            if !ik.is_finite() {
                continue;
            }
            for j in 0..n {
                let through = ik + cost[k * n + j];
                if through < cost[i * n + j] {
                    cost[i * n + j] = through;
                    next_hop[i * n + j] = next_hop[i * n + k];
                }
            }
        }
    }

    let node_ids: Vec<NodeId> = nodes.iter().map(|n| n.id.clone()).collect();
    let index = node_ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();
    TopologySnapshot {
        time: t,
        node_ids,
        index,
        positions,
        links,
        link_at,
        next_hop,
    }
}

/// First sampled instant in `(t, horizon]`, on the grid `t + k·step`, whose
/// link set differs from the one at `t`.
pub fn next_topology_change(network: &[NodeSpec], rules: &LinkRules, t: f64, horizon: f64, step: f64) -> Option<f64> {
    if !(step > 0.0) || !(horizon > t) {
        return None;
    }
    let reference = visibility_set(network, rules, t);
    let steps = ((horizon - t) / step * (1.0 + 1e-12)).floor() as u64;
    (1..=steps)
        .map(|k| t + k as f64 * step)
        .find(|&probe| visibility_set(network, rules, probe) != reference)
}
