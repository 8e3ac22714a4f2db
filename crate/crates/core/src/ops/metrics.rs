use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ids::NodeId;
use crate::sim::RequestRecord;

/// Run-level aggregate produced after a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub requests: u64,
    pub completed: u64,
    pub failed: u64,
    pub in_flight: u64,
    pub latency_p50: Option<f64>,
    pub latency_p95: Option<f64>,
    pub latency_p99: Option<f64>,
    pub mean_accuracy: Option<f64>,
    pub min_accuracy: Option<f64>,
    /// Joules over all finished requests.
    pub total_energy: f64,
    /// Violating share of finished (completed + failed) requests.
    pub slo_violation_rate: f64,
    /// Busy compute seconds / run duration.
    pub node_utilization: BTreeMap<NodeId, f64>,
    pub reconfigurations: u64,
    pub outage_seconds: f64,
}

/// Counters the simulator tracks outside per-request records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunCounters {
    pub duration: f64,
    pub in_flight: u64,
    pub busy_time: BTreeMap<NodeId, f64>,
    pub reconfigurations: u64,
    pub outage_seconds: f64,
}

/// Nearest-rank percentile: the ⌈p·n⌉-th order statistic of `sorted`.
pub fn nearest_rank(sorted: &[f64], p: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (p * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

pub fn summarize(records: &[RequestRecord], counters: &RunCounters) -> MetricsReport {
    // order by request id so float sums do not depend on input order
    let mut records: Vec<&RequestRecord> = records.iter().collect();
    records.sort_by_key(|r| r.id);

    let completed: Vec<&RequestRecord> = records.iter().copied().filter(|r| r.completion.is_some()).collect();
    let mut latencies: Vec<f64> = completed.iter().filter_map(|r| r.latency).collect();
    latencies.sort_by(f64::total_cmp);
    let accuracies: Vec<f64> = completed.iter().map(|r| r.accuracy).collect();
    let violated = records.iter().filter(|r| r.slo_violated).count();
    let finished = records.len();

    let node_utilization = counters
        .busy_time
        .iter()
        .map(|(n, busy)| {
            let u = if counters.duration > 0.0 {
                busy / counters.duration
            } else {
                0.0
            };
            (n.clone(), u)
        })
        .collect();

    MetricsReport {
        requests: finished as u64 + counters.in_flight,
        completed: completed.len() as u64,
        failed: (finished - completed.len()) as u64,
        in_flight: counters.in_flight,
        latency_p50: nearest_rank(&latencies, 0.50),
        latency_p95: nearest_rank(&latencies, 0.95),
        latency_p99: nearest_rank(&latencies, 0.99),
        mean_accuracy: (!accuracies.is_empty()).then(|| accuracies.iter().sum::<f64>() / accuracies.len() as f64),
        min_accuracy: accuracies.iter().copied().reduce(f64::min),
        total_energy: records.iter().map(|r| r.energy).sum(),
        slo_violation_rate: if finished == 0 {
            0.0
        } else {
            violated as f64 / finished as f64
        },
        node_utilization,
        reconfigurations: counters.reconfigurations,
        outage_seconds: counters.outage_seconds,
    }
}
