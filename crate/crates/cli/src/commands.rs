use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cai_core::continuum::TopologySnapshot;
use cai_core::ops::{MetricsReport, ReconfigurationPolicy};
use cai_core::placement::{sweep as sweep_weights, LocalSearchConfig, Solution, Solver, Weights, DEFAULT_SEARCH_CAP};
use cai_core::sim::{run, Scenario, SimError, SimOutput};
use cai_core::ValidationReport;
use clap::ValueEnum;
use log::{debug, info};
use serde::Serialize;

use crate::{CliError, ScenarioFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Brute,
    Greedy,
    Local,
}

impl SolverKind {
    pub fn solver(self, seed: u64) -> Solver {
        match self {
            SolverKind::Brute => Solver::BruteForce {
                cap: DEFAULT_SEARCH_CAP,
            },
            SolverKind::Greedy => Solver::Greedy,
            SolverKind::Local => Solver::Local(LocalSearchConfig {
                seed,
                ..Default::default()
            }),
        }
    }

    fn name(self) -> &'static str {
        match self {
            SolverKind::Brute => "brute",
            SolverKind::Greedy => "greedy",
            SolverKind::Local => "local",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyKind {
    Static,
    Reactive,
    Predictive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Toml,
}

/// Parses and validates a scenario file.
pub fn load_valid(path: &Path) -> Result<Scenario, CliError> {
    let scenario = ScenarioFile::load(path)?.to_scenario();
    let report = scenario.validate();
    if report.is_valid() {
        Ok(scenario)
    } else {
        Err(CliError::Invalid(report))
    }
}

/// One violation per line as `CODE: message`; empty when valid.
pub fn validate(path: &Path) -> Result<ValidationReport, CliError> {
    Ok(ScenarioFile::load(path)?.to_scenario().validate())
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    scenario: &'a str,
    solver: &'a str,
    #[serde(flatten)]
    solution: &'a Solution,
}

pub fn solve(path: &Path, kind: SolverKind) -> Result<String, CliError> {
    let scenario = load_valid(path)?;
    let problem = scenario.problem_at(0.0);
    let solution = cai_core::placement::solve(&problem, kind.solver(scenario.seed))
        .map_err(|e| CliError::Infeasible(e.to_string()))?;
    info!(
        "solved {} with {}: J = {}",
        scenario.name,
        kind.name(),
        solution.evaluation.objective
    );
    let doc = SolveDocument {
        scenario: &scenario.name,
        solver: kind.name(),
        solution: &solution,
    };
    Ok(serde_json::to_string_pretty(&doc).expect("solution serializes") + "\n")
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub seed: Option<u64>,
    pub policy: Option<PolicyKind>,
    pub lead: Option<f64>,
    pub step: Option<f64>,
    pub duration: Option<f64>,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    scenario: &'a str,
    policy: &'a str,
    seed: u64,
    duration_s: f64,
    metrics: &'a MetricsReport,
}

pub fn apply_overrides(mut scenario: Scenario, opts: &SimulateOptions) -> Scenario {
    if let Some(seed) = opts.seed {
        scenario.seed = seed;
    }
    if let Some(duration) = opts.duration {
        scenario.workload.duration = duration;
    }
    let (lead0, step0) = match scenario.policy {
        ReconfigurationPolicy::Predictive { lead, step } => (lead, step),
        _ => (2.0 * scenario.epoch, scenario.epoch / 5.0),
    };
    let policy = opts.policy.map(|p| match p {
        PolicyKind::Static => ReconfigurationPolicy::Static,
        PolicyKind::Reactive => ReconfigurationPolicy::Reactive,
        PolicyKind::Predictive => ReconfigurationPolicy::Predictive {
            lead: lead0,
            step: step0,
        },
    });
    if let Some(policy) = policy {
        scenario.policy = policy;
    }
    if let ReconfigurationPolicy::Predictive { lead, step } = &mut scenario.policy {
        *lead = opts.lead.unwrap_or(*lead);
        *step = opts.step.unwrap_or(*step);
    }
    scenario
}

pub fn simulate_scenario(scenario: &Scenario) -> Result<SimOutput, CliError> {
    run(scenario).map_err(|e| match e {
        SimError::InvalidScenario(report) => CliError::Invalid(report),
        other => CliError::Simulation(other.to_string()),
    })
}

pub fn report_body(scenario: &Scenario, output: &SimOutput, format: ReportFormat) -> String {
    let doc = ReportDocument {
        scenario: &scenario.name,
        policy: scenario.policy.name(),
        seed: scenario.seed,
        duration_s: scenario.workload.duration,
        metrics: &output.report,
    };
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(&doc).expect("report serializes") + "\n",
        ReportFormat::Toml => toml::to_string(&doc).expect("report serializes"),
    }
}

pub fn trace_csv(output: &SimOutput) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "id",
        "arrival_s",
        "completion_s",
        "latency_s",
        "energy_j",
        "accuracy",
        "slo_violated",
        "degradation_events",
    ])
    .expect("in-memory write");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in &output.records {
        w.write_record([
            r.id.to_string(),
            r.arrival.to_string(),
            opt(r.completion),
            opt(r.latency),
            r.energy.to_string(),
            r.accuracy.to_string(),
            r.slo_violated.to_string(),
            r.degradation_events.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn orchestration_log(output: &SimOutput) -> String {
    let mut out = String::new();
    for e in &output.log {
        writeln!(
            out,
            "epoch={} t={} action={} reason={}",
            e.epoch, e.time, e.action, e.reason
        )
        .unwrap();
    }
    out
}

fn positions_csv(scenario: &Scenario, times: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time_s", "node", "x_m", "y_m", "z_m"])
        .expect("in-memory write");
    for &t in times {
        let snap = scenario.snapshot_at(t);
        for (i, id) in snap.node_ids().iter().enumerate() {
            let p = snap.position(i);
            w.write_record([
                t.to_string(),
                id.to_string(),
                p.x.to_string(),
                p.y.to_string(),
                p.z.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn topology_csv(scenario: &Scenario, times: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["time_s", "a", "b", "distance_m", "propagation_s", "bandwidth_bps"])
        .expect("in-memory write");
    for &t in times {
        let snap: TopologySnapshot = scenario.snapshot_at(t);
        for link in snap.links() {
            let ids = snap.node_ids();
            w.write_record([
                t.to_string(),
                ids[link.a].to_string(),
                ids[link.b].to_string(),
                link.distance.to_string(),
                link.propagation.to_string(),
                link.bandwidth.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn summary_line(output: &SimOutput) -> String {
    let r = &output.report;
    let p95 = r.latency_p95.map_or_else(|| "none".to_owned(), |v| format!("{v:.6}"));
    format!(
        "requests={} completed={} failed={} in_flight={} p95_latency_s={} slo_violation_rate={:.6} reconfigurations={}",
        r.requests, r.completed, r.failed, r.in_flight, p95, r.slo_violation_rate, r.reconfigurations
    )
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs the simulator and, when `out` is given, writes the report, the
/// per-request trace and the orchestration log there. Returns the summary.
pub fn simulate(
    path: &Path,
    opts: &SimulateOptions,
    out: Option<&Path>,
    format: ReportFormat,
    dump_topology: bool,
) -> Result<String, CliError> {
    let scenario = apply_overrides(load_valid(path)?, opts);
    let output = simulate_scenario(&scenario)?;
    debug!("{} events processed", output.events_processed);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let ext = match format {
            ReportFormat::Json => "json",
            ReportFormat::Toml => "toml",
        };
        write_file(
            &dir.join(format!("report.{ext}")),
            &report_body(&scenario, &output, format),
        )?;
        write_file(&dir.join("trace.csv"), &trace_csv(&output))?;
        write_file(&dir.join("orchestration.log"), &orchestration_log(&output))?;
        if dump_topology {
            write_file(
                &dir.join("topology.csv"),
                &topology_csv(&scenario, &output.snapshot_times),
            )?;
            write_file(
                &dir.join("topology_nodes.csv"),
                &positions_csv(&scenario, &output.snapshot_times),
            )?;
        }
    }
    Ok(summary_line(&output))
}

/// Parses `"a,b,c;d,e,f"` into weight vectors (latency, energy, accuracy).
pub fn parse_grid(grid: &str) -> Result<Vec<Weights>, CliError> {
    let points: Vec<&str> = grid.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
    if points.is_empty() {
        return Err(CliError::Usage("weight grid is empty".into()));
    }
    points
        .into_iter()
        .map(|p| {
            let values: Vec<f64> = p
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Usage(format!("bad weight vector `{p}`: {e}")))?;
            match values[..] {
                [l, e, a] => Ok(Weights::new(l, e, a)),
                _ => Err(CliError::Usage(format!("weight vector `{p}` needs three values"))),
            }
        })
        .collect()
}

pub fn sweep(path: &Path, grid: &str, kind: SolverKind) -> Result<String, CliError> {
    let scenario = load_valid(path)?;
    let weights = parse_grid(grid)?;
    let problem = scenario.problem_at(0.0);
    let points =
        sweep_weights(&problem, &weights, kind.solver(scenario.seed)).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["w_lat", "w_energy", "w_acc", "latency", "energy", "accuracy", "J"])
        .expect("in-memory write");
    for point in points {
        let mut row = vec![
            point.weights.latency.to_string(),
            point.weights.energy.to_string(),
            point.weights.accuracy.to_string(),
        ];
        match point.outcome {
            Ok(s) => {
                let e = s.evaluation;
                row.extend([e.latency, e.energy, e.accuracy, e.objective].map(|v| v.to_string()));
            }
            Err(e) => {
                info!("sweep point {:?} infeasible: {e}", point.weights);
                row.extend(std::iter::repeat_n("infeasible".to_owned(), 4));
            }
        }
        w.write_record(&row).expect("in-memory write");
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8"))
}
