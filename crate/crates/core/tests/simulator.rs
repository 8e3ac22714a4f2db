mod common;

use cai_core::continuum::*;
use cai_core::model::*;
use cai_core::ops::ReconfigurationPolicy;
use cai_core::placement::*;
use cai_core::sim::*;
use common::*;
use proptest::prelude::*;

fn pipeline_scenario(rate: f64, duration: f64, arrival: ArrivalProcess) -> Scenario {
    let nodes = vec![
        ground("edge", 0.0, 0.0)
            .with_compute(40.0)
            .with_memory(2000.0)
            .with_energy_cost(0.5),
        ground("cloud", 0.0, 3.0)
            .with_compute(800.0)
            .with_memory(32000.0)
            .with_energy_cost(0.2)
            .with_access_latency(0.004),
    ];
    let pools = vec![
        ImplementationPool::new(
            "pre",
            vec![Implementation::new("pre", "pre")
                .with_demand(0.4)
                .with_memory(100.0)
                .with_scale(0.5)],
        ),
        ImplementationPool::new(
            "infer",
            vec![
                Implementation::new("big", "infer")
                    .with_demand(30.0)
                    .with_memory(6000.0)
                    .with_accuracy(0.95)
                    .with_scale(0.01),
                Implementation::new("small", "infer")
                    .with_demand(3.0)
                    .with_memory(500.0)
                    .with_accuracy(0.8)
                    .with_scale(0.01),
            ],
        ),
        ImplementationPool::new(
            "post",
            vec![Implementation::new("post", "post").with_demand(0.1).with_memory(50.0)],
        ),
    ];
    Scenario {
        name: "pipeline".into(),
        nodes,
        link_rules: ground_rules(1e8),
        graph: chain(&["pre", "infer", "post"]),
        pools,
        constraints: vec![],
        workload: Workload {
            arrival,
            rate,
            entry_bytes: 200_000.0,
            duration,
            origin: Some("edge".into()),
        },
        slo: Slo {
            latency: 0.2,
            min_accuracy: 0.5,
        },
        epoch: 5.0,
        policy: ReconfigurationPolicy::Static,
        weights: Weights::new(1.0, 0.1, 1.0),
        budgets: Budgets::new(0.2, 10.0),
        seed: 42,
    }
}

fn assert_conserved(out: &SimOutput) {
    let r = &out.report;
    assert_eq!(r.requests, r.completed + r.failed + r.in_flight);
}

#[test]
fn zero_rate_gives_empty_report() {
    let out = run(&pipeline_scenario(0.0, 30.0, ArrivalProcess::Fixed)).unwrap();
    assert_eq!(out.report.requests, 0);
    assert!(out.report.latency_p95.is_none());
    assert_eq!(out.report.slo_violation_rate, 0.0);
    assert!(out.records.is_empty());
}

#[test]
fn short_duration_gives_empty_report() {
    let out = run(&pipeline_scenario(1.0, 0.001, ArrivalProcess::Fixed)).unwrap();
    assert_eq!(out.report.requests, 0);
    assert_conserved(&out);
}

#[test]
fn static_run_matches_evaluation() {
    let scenario = pipeline_scenario(0.5, 60.0, ArrivalProcess::Fixed);
    let out = run(&scenario).unwrap();
    let expected = evaluate(&out.initial.assignment, &scenario.problem_at(0.0))
        .unwrap()
        .latency;
    assert_eq!(out.records.len(), 29);
    for r in &out.records {
        let latency = r.latency.expect("completed");
        assert!(
            (latency - expected).abs() <= 1e-9,
            "request {}: {latency} vs {expected}",
            r.id
        );
        assert_eq!(r.degradation_events, 0);
    }
}

#[test]
fn runs_are_deterministic() {
    let scenario = pipeline_scenario(3.0, 40.0, ArrivalProcess::Poisson);
    let (a, b) = (run(&scenario).unwrap(), run(&scenario).unwrap());
    assert_eq!(a.records, b.records);
    assert_eq!(a.report, b.report);
    assert_eq!(a.events_processed, b.events_processed);
    let mut reseeded = scenario.clone();
    reseeded.seed += 1;
    assert_ne!(run(&reseeded).unwrap().records, a.records);
}

#[test]
fn invalid_scenario_is_rejected() {
    let mut scenario = pipeline_scenario(1.0, 10.0, ArrivalProcess::Fixed);
    scenario.epoch = 0.0;
    assert!(matches!(run(&scenario), Err(SimError::InvalidScenario(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn requests_are_conserved(rate in 0.0..20.0f64, duration in 0.5..40.0f64, poisson in any::<bool>(), seed in 0u64..1000) {
        let arrival = if poisson { ArrivalProcess::Poisson } else { ArrivalProcess::Fixed };
        let mut scenario = pipeline_scenario(rate, duration, arrival);
        scenario.seed = seed;
        let out = run(&scenario).unwrap();
        let r = &out.report;
        prop_assert_eq!(r.requests, r.completed + r.failed + r.in_flight);
        prop_assert_eq!(out.records.len() as u64, r.completed + r.failed);
        for rec in &out.records {
            let expected = match rec.latency {
                Some(l) => l > scenario.slo.latency || rec.accuracy < scenario.slo.min_accuracy,
                None => true,
            };
            prop_assert_eq!(rec.slo_violated, expected);
        }
        let violated = out.records.iter().filter(|r| r.slo_violated).count() as f64;
        let expected_rate = if out.records.is_empty() { 0.0 } else { violated / out.records.len() as f64 };
        prop_assert_eq!(r.slo_violation_rate, expected_rate);
    }
}

/// Two ground sites that cannot share a node, bridged first by a setting
/// satellite and afterwards only by a slower aerial relay.
fn relay_scenario(with_backup: bool, policy: ReconfigurationPolicy) -> Scenario {
    let mut nodes = vec![
        ground("a", 0.0, 0.0).with_compute(100.0).with_memory(1500.0),
        ground("b", 0.0, 2.0).with_compute(100.0).with_memory(1500.0),
        NodeSpec::new(
            "sat",
            Domain::Satellite,
            MobilityModel::CircularOrbit {
                altitude_m: 550_000.0,
                inclination_deg: 0.0,
                phase_deg: 0.0,
            },
        )
        .with_compute(1.0)
        .with_memory(10.0),
    ];
    if with_backup {
        nodes.push(
            NodeSpec::new(
                "uav",
                Domain::Aerial,
                MobilityModel::Static(GeoPoint::new(0.0, 1.0, 20_000.0)),
            )
            .with_compute(1.0)
            .with_memory(10.0),
        );
    }
    let rules = LinkRules::new(vec![
        LinkRule::new(Domain::Terrestrial, Domain::Satellite, 1e6),
        LinkRule::new(Domain::Terrestrial, Domain::Aerial, 1e6).with_overhead(0.05),
    ]);
    let pools = vec![
        ImplementationPool::new(
            "src",
            vec![Implementation::new("s", "src")
                .with_demand(1.0)
                .with_memory(1000.0)
                .with_scale(5.0)],
        ),
        ImplementationPool::new(
            "dst",
            vec![Implementation::new("d", "dst").with_demand(1.0).with_memory(1000.0)],
        ),
    ];
    Scenario {
        name: "relay".into(),
        nodes,
        link_rules: rules,
        graph: chain(&["src", "dst"]),
        pools,
        constraints: vec![],
        workload: Workload {
            arrival: ArrivalProcess::Fixed,
            rate: 0.5,
            entry_bytes: 200_000.0,
            duration: 420.0,
            origin: None,
        },
        slo: Slo {
            latency: 60.0,
            min_accuracy: 0.0,
        },
        epoch: 10.0,
        policy,
        weights: Weights::new(1.0, 0.0, 0.0),
        budgets: Budgets::new(1.0, 1.0),
        seed: 1,
    }
}

#[test]
fn link_loss_reroutes_in_flight_transfers() {
    let scenario = relay_scenario(true, ReconfigurationPolicy::Static);
    let change = next_topology_change(&scenario.nodes, &scenario.link_rules, 0.0, 420.0, 1.0).expect("satellite sets");
    assert!(change > 300.0 && change < 400.0, "{change}");
    let out = run(&scenario).unwrap();
    assert_conserved(&out);
    assert_eq!(out.report.failed, 0);
    let degraded: Vec<_> = out.records.iter().filter(|r| r.degradation_events > 0).collect();
    assert!(!degraded.is_empty());
    // the topology is re-sampled at epoch ticks, so the loss lands on the first tick after it
    let tick = (change / scenario.epoch).ceil() * scenario.epoch;
    for r in degraded {
        assert!(r.arrival < tick && r.completion.unwrap() > tick, "{r:?} tick {tick}");
    }
}

#[test]
fn link_loss_without_backup_fails_requests() {
    let out = run(&relay_scenario(false, ReconfigurationPolicy::Static)).unwrap();
    assert_conserved(&out);
    assert!(out.report.failed > 0);
    assert!(out
        .records
        .iter()
        .filter(|r| r.completion.is_none())
        .all(|r| r.slo_violated));
}

#[test]
fn reactive_recovers_where_static_cannot() {
    let stat = run(&relay_scenario(false, ReconfigurationPolicy::Static)).unwrap();
    let reactive = run(&relay_scenario(false, ReconfigurationPolicy::Reactive)).unwrap();
    // with no route left, nothing can be done; outage accounting must say so
    assert!(reactive.report.outage_seconds > 0.0);
    assert!(reactive.report.slo_violation_rate <= stat.report.slo_violation_rate);
    assert_eq!(stat.report.reconfigurations, 0);
}
