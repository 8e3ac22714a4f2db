//! Bundled, ready-to-run scenarios.

use std::collections::BTreeSet;

use cai_core::continuum::Domain;
use cai_core::sim::ArrivalProcess;

use crate::scenario::*;
use crate::CliError;

pub const EXAMPLE_NAMES: [&str; 3] = ["vate-edge-cloud", "leo-handover", "tri-domain"];

/// Default one-way access latency of the cloud node, seconds.
pub const VATE_DEFAULT_CLOUD_LATENCY: f64 = 0.02;

/// Cloud access latency above which the solver switches the detector from
/// the cloud implementation to the edge one, located by bisection.
pub const VATE_CLOUD_LATENCY_THRESHOLD: f64 = 0.0855;

pub fn example(name: &str, cloud_latency: Option<f64>) -> Result<ScenarioFile, CliError> {
    match name {
        "vate-edge-cloud" => Ok(vate_edge_cloud(cloud_latency.unwrap_or(VATE_DEFAULT_CLOUD_LATENCY))),
        "leo-handover" => Ok(leo_handover()),
        "tri-domain" => Ok(tri_domain()),
        other => Err(CliError::Usage(format!(
            "unknown example `{other}` (expected one of {})",
            EXAMPLE_NAMES.join(", ")
        ))),
    }
}

/// Header comment placed above an emitted example.
pub fn header(name: &str) -> String {
    let body = match name {
        "vate-edge-cloud" => format!(
            "Edge-cloud collaborative detection and tracking.\n\
             An offload stage on the edge feeds a light edge detector + tracker branch\n\
             and a heavy detector branch; fusion combines tracks and detections.\n\
             The detector pool offers a cloud implementation (accurate, needs cloud memory)\n\
             and an edge implementation. `nodes.cloud.access_latency_s` is the\n\
             cloud_latency knob (default {VATE_DEFAULT_CLOUD_LATENCY} s): above {VATE_CLOUD_LATENCY_THRESHOLD} s the solver\n\
             prefers the edge detector."
        ),
        "leo-handover" => "Ground sensor offloading detection to a passing LEO satellite.\n\
             Near t = 300 s the satellite drops below the ground station's horizon;\n\
             traffic can still reach it through the aerial node, but the narrow\n\
             aerial-satellite link pushes latency past the SLO. Around t = 375 s the\n\
             aerial node loses the satellite too. Moving detection onto the aerial\n\
             node restores the SLO."
            .to_owned(),
        _ => "Three-domain pipeline spanning terrestrial, aerial and satellite nodes.".to_owned(),
    };
    let mut out = format!("# {name}\n#\n");
    for line in body.lines() {
        out.push_str("# ");
        out.push_str(line.trim_start());
        out.push('\n');
    }
    out.push_str("#\n# Units: seconds (_s), bytes, megabytes (_mb), meters (_m), giga-op (_gop).\n\n");
    out
}

pub fn render(name: &str, cloud_latency: Option<f64>) -> Result<String, CliError> {
    let file = example(name, cloud_latency)?;
    Ok(format!("{}{}", header(name), file.to_toml()))
}

fn port(name: &str, data_type: &str) -> PortEntry {
    PortEntry {
        name: name.into(),
        data_type: data_type.into(),
    }
}

fn module(id: &str, inputs: Vec<PortEntry>, output: &str, state_size_bytes: u64) -> ModuleEntry {
    ModuleEntry {
        id: id.into(),
        name: None,
        inputs,
        output: output.into(),
        state_size_bytes,
    }
}

fn edge(source: &str, target: &str, port: &str) -> EdgeEntry {
    EdgeEntry {
        source: source.into(),
        target: target.into(),
        port: port.into(),
    }
}

fn implementation(id: &str, demand: f64, memory: f64, accuracy: f64, scale: f64) -> ImplementationEntry {
    ImplementationEntry {
        id: id.into(),
        compute_demand_gop: demand,
        memory_required_mb: memory,
        accuracy_factor: accuracy,
        output_scale: scale,
        domains: None,
    }
}

fn pool(module: &str, implementations: Vec<ImplementationEntry>) -> PoolEntry {
    PoolEntry {
        module: module.into(),
        implementations,
    }
}

fn ground(lat_deg: f64, lon_deg: f64) -> MobilityEntry {
    MobilityEntry::Static {
        lat_deg,
        lon_deg,
        alt_m: 0.0,
    }
}

fn node(id: &str, domain: Domain, compute: f64, memory: f64, energy: f64, mobility: MobilityEntry) -> NodeEntry {
    NodeEntry {
        id: id.into(),
        domain,
        compute_capacity_gops: compute,
        memory_capacity_mb: memory,
        energy_cost_j_per_gop: energy,
        access_latency_s: 0.0,
        mobility,
    }
}

fn rule(a: Domain, b: Domain, bandwidth_bps: f64, max_range_m: Option<f64>, overhead: f64) -> LinkRuleEntry {
    LinkRuleEntry {
        domains: [a, b],
        bandwidth_bps,
        max_range_m,
        per_hop_overhead_s: overhead,
    }
}

pub fn vate_edge_cloud(cloud_latency: f64) -> ScenarioFile {
    let mut cloud = node("cloud", Domain::Terrestrial, 2000.0, 65536.0, 0.2, ground(4.5, 0.0));
    cloud.access_latency_s = cloud_latency;
    let mut detector_cloud = implementation("detector-cloud", 20.0, 8192.0, 0.98, 0.05);
    detector_cloud.domains = Some(BTreeSet::from([Domain::Terrestrial]));
    ScenarioFile {
        name: "vate-edge-cloud".into(),
        seed: 7,
        epoch: EpochSection { interval_s: 10.0 },
        workload: WorkloadSection {
            arrival: ArrivalProcess::Fixed,
            rate_per_s: 2.0,
            entry_bytes: 250_000.0,
            duration_s: 60.0,
            origin: Some("edge".into()),
        },
        slo: SloSection {
            latency_s: 0.5,
            min_accuracy: 0.8,
        },
        policy: PolicySection::Static,
        weights: WeightsSection {
            latency: 1.0,
            energy: 0.1,
            accuracy: 1.0,
        },
        budgets: BudgetsSection {
            latency_s: 0.2,
            energy_j: 20.0,
        },
        modules: vec![
            module("offload", vec![], "frame", 0),
            module("edge_detect", vec![port("frame", "frame")], "boxes", 1_000_000),
            module("tracker", vec![port("boxes", "boxes")], "tracks", 5_000_000),
            module("detector", vec![port("frame", "frame")], "boxes", 20_000_000),
            module(
                "fusion",
                vec![port("tracks", "tracks"), port("detections", "boxes")],
                "tracks",
                1_000_000,
            ),
        ],
        edges: vec![
            edge("offload", "edge_detect", "frame"),
            edge("edge_detect", "tracker", "boxes"),
            edge("offload", "detector", "frame"),
            edge("tracker", "fusion", "tracks"),
            edge("detector", "fusion", "detections"),
        ],
        pools: vec![
            pool("offload", vec![implementation("offload-gate", 0.1, 64.0, 1.0, 1.0)]),
            pool(
                "edge_detect",
                vec![implementation("edge-detect-lite", 2.0, 512.0, 0.6, 0.05)],
            ),
            pool("tracker", vec![implementation("kalman-tracker", 0.5, 128.0, 0.95, 1.0)]),
            pool(
                "detector",
                vec![detector_cloud, implementation("detector-edge", 4.0, 1024.0, 0.8, 0.05)],
            ),
            pool("fusion", vec![implementation("track-fusion", 0.2, 128.0, 1.0, 1.0)]),
        ],
        nodes: vec![
            node("edge", Domain::Terrestrial, 50.0, 4096.0, 0.5, ground(0.0, 0.0)),
            cloud,
        ],
        link_rules: vec![rule(
            Domain::Terrestrial,
            Domain::Terrestrial,
            1e9,
            Some(1_000_000.0),
            0.001,
        )],
        constraints: vec![ConstraintEntry::DomainAffinity {
            module: "offload".into(),
            domains: BTreeSet::from([Domain::Terrestrial]),
        }],
    }
}

pub fn leo_handover() -> ScenarioFile {
    ScenarioFile {
        name: "leo-handover".into(),
        seed: 11,
        epoch: EpochSection { interval_s: 5.0 },
        workload: WorkloadSection {
            arrival: ArrivalProcess::Fixed,
            rate_per_s: 2.0,
            entry_bytes: 100_000.0,
            duration_s: 600.0,
            origin: Some("ground".into()),
        },
        slo: SloSection {
            latency_s: 0.15,
            min_accuracy: 0.5,
        },
        policy: PolicySection::Predictive {
            lead_s: 10.0,
            step_s: 1.0,
        },
        weights: WeightsSection {
            latency: 1.0,
            energy: 0.2,
            accuracy: 1.0,
        },
        budgets: BudgetsSection {
            latency_s: 0.25,
            energy_j: 50.0,
        },
        modules: vec![
            module("sense", vec![], "frame", 0),
            module("detect", vec![port("frame", "frame")], "boxes", 5_000_000),
        ],
        edges: vec![edge("sense", "detect", "frame")],
        pools: vec![
            pool("sense", vec![implementation("camera", 0.05, 32.0, 1.0, 1.0)]),
            pool("detect", vec![implementation("detector", 10.0, 2048.0, 0.9, 0.01)]),
        ],
        nodes: vec![
            node("ground", Domain::Terrestrial, 5.0, 512.0, 1.0, ground(0.0, 0.0)),
            node(
                "sat",
                Domain::Satellite,
                400.0,
                8192.0,
                0.5,
                MobilityEntry::CircularOrbit {
                    altitude_m: 550_000.0,
                    inclination_deg: 53.0,
                    phase_deg: 4.2,
                },
            ),
            node(
                "uav",
                Domain::Aerial,
                100.0,
                4096.0,
                1.5,
                MobilityEntry::Static {
                    lat_deg: 0.2,
                    lon_deg: 0.0,
                    alt_m: 20_000.0,
                },
            ),
        ],
        link_rules: vec![
            rule(Domain::Terrestrial, Domain::Satellite, 50e6, None, 0.002),
            rule(Domain::Aerial, Domain::Satellite, 5e6, None, 0.002),
            rule(Domain::Terrestrial, Domain::Aerial, 50e6, Some(100_000.0), 0.001),
        ],
        constraints: vec![ConstraintEntry::DomainAffinity {
            module: "sense".into(),
            domains: BTreeSet::from([Domain::Terrestrial]),
        }],
    }
}

pub fn tri_domain() -> ScenarioFile {
    ScenarioFile {
        name: "tri-domain".into(),
        seed: 3,
        epoch: EpochSection { interval_s: 10.0 },
        workload: WorkloadSection {
            arrival: ArrivalProcess::Poisson,
            rate_per_s: 1.0,
            entry_bytes: 500_000.0,
            duration_s: 300.0,
            origin: Some("station".into()),
        },
        slo: SloSection {
            latency_s: 1.0,
            min_accuracy: 0.6,
        },
        policy: PolicySection::Reactive,
        weights: WeightsSection {
            latency: 1.0,
            energy: 0.5,
            accuracy: 1.0,
        },
        budgets: BudgetsSection {
            latency_s: 1.0,
            energy_j: 100.0,
        },
        modules: vec![
            module("ingest", vec![], "frame", 0),
            module("analyze", vec![port("frame", "frame")], "features", 10_000_000),
            module("report", vec![port("features", "features")], "summary", 1_000_000),
        ],
        edges: vec![
            edge("ingest", "analyze", "frame"),
            edge("analyze", "report", "features"),
        ],
        pools: vec![
            pool("ingest", vec![implementation("ingest", 0.1, 64.0, 1.0, 1.0)]),
            pool(
                "analyze",
                vec![
                    implementation("analyze-large", 30.0, 4096.0, 0.92, 0.1),
                    implementation("analyze-small", 4.0, 512.0, 0.75, 0.1),
                ],
            ),
            pool("report", vec![implementation("report", 0.2, 64.0, 1.0, 0.5)]),
        ],
        nodes: vec![
            node("station", Domain::Terrestrial, 20.0, 2048.0, 1.0, ground(10.0, 10.0)),
            node(
                "datacenter",
                Domain::Terrestrial,
                1000.0,
                65536.0,
                0.3,
                ground(12.0, 14.0),
            ),
            node(
                "hap",
                Domain::Aerial,
                80.0,
                8192.0,
                0.8,
                MobilityEntry::WaypointLoop {
                    speed_mps: 30.0,
                    waypoints: vec![
                        GeoEntry {
                            lat_deg: 10.2,
                            lon_deg: 10.0,
                            alt_m: 18_000.0,
                        },
                        GeoEntry {
                            lat_deg: 10.2,
                            lon_deg: 10.4,
                            alt_m: 18_000.0,
                        },
                    ],
                },
            ),
            node(
                "leo",
                Domain::Satellite,
                300.0,
                16384.0,
                0.6,
                MobilityEntry::CircularOrbit {
                    altitude_m: 550_000.0,
                    inclination_deg: 53.0,
                    phase_deg: 0.0,
                },
            ),
        ],
        link_rules: vec![
            rule(Domain::Terrestrial, Domain::Terrestrial, 1e9, Some(1_000_000.0), 0.002),
            rule(Domain::Terrestrial, Domain::Aerial, 100e6, Some(200_000.0), 0.001),
            rule(Domain::Terrestrial, Domain::Satellite, 50e6, None, 0.002),
            rule(Domain::Aerial, Domain::Satellite, 50e6, None, 0.002),
        ],
        constraints: vec![ConstraintEntry::DataLocality {
            source: "ingest".into(),
            target: "analyze".into(),
            forbidden: BTreeSet::from([Domain::Satellite]),
        }],
    }
}
