//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use cai_cli::examples::{self, VATE_CLOUD_LATENCY_THRESHOLD, VATE_DEFAULT_CLOUD_LATENCY};
use cai_cli::ScenarioFile;
use cai_core::continuum::*;
use cai_core::model::*;
use cai_core::ops::{check_policies, PolicyPredicate};
use cai_core::placement::*;
use cai_core::sim::run;
use cai_core::ViolationCode;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn cai(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cai"))
        .args(args)
        .env_remove("CAI_LOG")
        .output()
        .expect("cai binary runs")
}

fn write_example(dir: &Path, name: &str, cloud_latency: Option<f64>) -> PathBuf {
    let path = dir.join(format!(
        "{name}-{}.toml",
        cloud_latency.map_or("default".into(), |k| k.to_string())
    ));
    std::fs::write(&path, examples::render(name, cloud_latency).unwrap()).unwrap();
    path
}

const DOMAINS: [Domain; 3] = Domain::ALL;

fn random_node(rng: &mut ChaCha8Rng, id: &str) -> NodeSpec {
    let (domain, mobility) = match rng.gen_range(0..3) {
        0 => (
            Domain::Terrestrial,
            MobilityModel::Static(GeoPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 0.0)),
        ),
        1 => (
            Domain::Aerial,
            MobilityModel::Static(GeoPoint::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(1e3..2e4),
            )),
        ),
        _ => (
            Domain::Satellite,
            MobilityModel::CircularOrbit {
                altitude_m: rng.gen_range(4e5..1.2e6),
                inclination_deg: rng.gen_range(0.0..90.0),
                phase_deg: rng.gen_range(-10.0..10.0),
            },
        ),
    };
    NodeSpec::new(id, domain, mobility)
        .with_compute(rng.gen_range(5.0..500.0))
        .with_memory(rng.gen_range(500.0..8000.0))
        .with_energy_cost(rng.gen_range(0.1..2.0))
        .with_access_latency(rng.gen_range(0.0..0.01))
}

fn random_rules(rng: &mut ChaCha8Rng) -> LinkRules {
    let mut rules = Vec::new();
    for (i, &a) in DOMAINS.iter().enumerate() {
        for &b in &DOMAINS[i..] {
            let mut r = LinkRule::new(a, b, rng.gen_range(1e7..1e9)).with_overhead(rng.gen_range(0.0..0.005));
            if a == b && a == Domain::Terrestrial {
                r = r.with_range(1_000_000.0);
            }
            rules.push(r);
        }
    }
    LinkRules::new(rules)
}

/// ≤3 modules, ≤3 implementations each, ≤4 nodes across all domains.
fn random_problem(seed: u64, with_constraints: bool) -> PlacementProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=3);
    let ids: Vec<String> = (0..m).map(|i| format!("m{i}")).collect();
    let fusion = m == 3 && rng.gen_bool(0.3);
    let modules = (0..m)
        .map(|i| {
            let ports = match (fusion, i) {
                (true, 2) => vec![Port::new("a", "t"), Port::new("b", "t")],
                (true, _) | (false, 0) => vec![],
                _ => vec![Port::new("in", "t")],
            };
            ModuleSpec::new(ids[i].as_str(), ports, "t")
        })
        .collect();
    let edges = if fusion {
        vec![Edge::new("m0", "m2", "a"), Edge::new("m1", "m2", "b")]
    } else {
        ids.windows(2)
            .map(|w| Edge::new(w[0].as_str(), w[1].as_str(), "in"))
            .collect()
    };
    let pools = ids
        .iter()
        .map(|id| {
            let impls = (0..rng.gen_range(1..=3))
                .map(|j| {
                    let mut imp = Implementation::new(format!("{id}-{j}").as_str(), id.as_str())
                        .with_demand(rng.gen_range(0.1..20.0))
                        .with_memory(rng.gen_range(10.0..3000.0))
                        .with_accuracy(rng.gen_range(0.5..1.0))
                        .with_scale(rng.gen_range(0.05..2.0));
                    if with_constraints && rng.gen_bool(0.2) {
                        imp = imp.with_affinity([*DOMAINS.choose(&mut rng).unwrap()]);
                    }
                    imp
                })
                .collect();
            ImplementationPool::new(id.as_str(), impls)
        })
        .collect();
    let nodes: Vec<NodeSpec> = (0..rng.gen_range(1..=4))
        .map(|i| random_node(&mut rng, &format!("n{i}")))
        .collect();
    let rules = random_rules(&mut rng);
    let mut constraints = Vec::new();
    if with_constraints {
        if rng.gen_bool(0.3) {
            constraints.push(PolicyPredicate::DomainAffinity {
                module: ids[0].as_str().into(),
                domains: [Domain::Terrestrial, *DOMAINS.choose(&mut rng).unwrap()].into(),
            });
        }
        if m >= 2 && rng.gen_bool(0.3) {
            constraints.push(PolicyPredicate::Colocation {
                first: ids[0].as_str().into(),
                second: ids[1].as_str().into(),
            });
        }
        if m >= 2 && !fusion && rng.gen_bool(0.3) {
            constraints.push(PolicyPredicate::DataLocality {
                source: "m0".into(),
                target: "m1".into(),
                forbidden: [Domain::Satellite].into(),
            });
        }
    }
    PlacementProblem {
        graph: StructuralGraph::new(modules, edges),
        pools,
        snapshot: snapshot(&nodes, &rules, 0.0),
        nodes,
        request: RequestProfile::new(rng.gen_range(1e4..1e6), rng.gen_range(0.0..2.0)),
        weights: Weights::new(
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0),
            rng.gen_range(0.0..2.0) + 0.01,
        ),
        budgets: Budgets::new(0.5, 20.0),
        constraints,
    }
}

fn criterion_1() -> Verdict {
    let started = Instant::now();
    let (mut instances, mut within, mut seed) = (0u32, 0u32, 0u64);
    while instances < 150 {
        let problem = random_problem(seed, false);
        seed += 1;
        let Ok(exact) = brute_force_solve(&problem) else {
            continue;
        };
        instances += 1;
        let config = LocalSearchConfig {
            restarts: 8,
            seed,
            ..Default::default()
        };
        if let Ok(ls) = solve(&problem, Solver::Local(config)) {
            let (j_ls, j_bf) = (ls.evaluation.objective, exact.evaluation.objective);
            if j_ls <= j_bf + 0.05 * j_bf.abs() {
                within += 1;
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    let share = within as f64 / instances as f64;
    let detail = format!(
        "{within}/{instances} instances within 5% of exact ({:.1}%), {secs:.2} s",
        share * 100.0
    );
    if share >= 0.9 && secs < 30.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Verdict {
    let mut checked = 0;
    for seed in 0..1000u64 {
        let problem = random_problem(10_000 + seed, true);
        for solver in [
            Solver::BruteForce {
                cap: DEFAULT_SEARCH_CAP,
            },
            Solver::Greedy,
            Solver::Local(LocalSearchConfig {
                seed,
                ..Default::default()
            }),
        ] {
            let Ok(s) = solve(&problem, solver) else { continue };
            checked += 1;
            if !validate_mapping(&problem.graph, &problem.pools, &s.assignment.mapping()).is_valid() {
                return Err(format!("seed {seed}: solver mapping fails validation"));
            }
            let eval = evaluate(&s.assignment, &problem).map_err(|e| e.to_string())?;
            if !eval.feasible
                || !check_policies(&s.assignment, &problem, &problem.constraints)
                    .unwrap()
                    .is_empty()
            {
                return Err(format!("seed {seed}: solver output infeasible"));
            }
        }
    }

    // corrupted fixtures, each with the code it has to be rejected with
    let mut rejected = 0;
    let mut expect = |what: &str, ok: bool| -> Result<(), String> {
        rejected += 1;
        if ok {
            Ok(())
        } else {
            Err(format!("corrupted fixture not rejected as documented: {what}"))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..200u64 {
        let problem = random_problem(20_000 + seed, false);
        let Ok(s) = brute_force_solve(&problem) else { continue };
        let module = problem.graph.modules.choose(&mut rng).unwrap().id.clone();

        let mut missing = s.assignment.clone();
        missing.placements.remove(&module);
        let report = validate_mapping(&problem.graph, &problem.pools, &missing.mapping());
        expect("missing module", report.has(ViolationCode::Unmapped))?;

        let mut foreign = s.assignment.clone().mapping();
        foreign.choices.insert(module.clone(), "no-such-impl".into());
        let report = validate_mapping(&problem.graph, &problem.pools, &foreign);
        expect("foreign implementation", report.has(ViolationCode::NotInPool))?;

        let mut ghost = s.assignment.clone();
        ghost.placements.get_mut(&module).unwrap().node = "ghost".into();
        let rejected_node = matches!(evaluate(&ghost, &problem), Err(PlacementError::Malformed(r)) if r.has(ViolationCode::UnknownNode));
        expect("unknown node", rejected_node)?;

        let mut tight = problem.clone();
        for n in &mut tight.nodes {
            n.memory_capacity = 1.0;
        }
        let eval = evaluate(&s.assignment, &tight).unwrap();
        expect(
            "memory over capacity",
            !eval.feasible && eval.violations.iter().any(|v| v.code == ViolationCode::MemoryCapacity),
        )?;
        expect(
            "memory over capacity",
            matches!(brute_force_solve(&tight), Err(PlacementError::NoFeasibleAssignment)),
        )?;
    }

    let cyclic = StructuralGraph::new(
        vec![
            ModuleSpec::new("a", vec![Port::new("in", "t")], "t"),
            ModuleSpec::new("b", vec![Port::new("in", "t")], "t"),
        ],
        vec![Edge::new("a", "b", "in"), Edge::new("b", "a", "in")],
    );
    expect("cycle", validate_graph(&cyclic).has(ViolationCode::Cycle))?;
    let mismatched = StructuralGraph::new(
        vec![
            ModuleSpec::new("a", vec![], "image"),
            ModuleSpec::new("b", vec![Port::new("in", "text")], "t"),
        ],
        vec![Edge::new("a", "b", "in")],
    );
    expect(
        "type mismatch",
        validate_graph(&mismatched).has(ViolationCode::TypeMismatch),
    )?;

    Ok(format!(
        "{checked} solver outputs sound, {rejected} corrupted fixtures rejected with their codes"
    ))
}

fn criterion_3() -> Verdict {
    let period = orbital_period(550_000.0);
    let orbit = MobilityModel::CircularOrbit {
        altitude_m: 550_000.0,
        inclination_deg: 53.0,
        phase_deg: 0.0,
    };
    // simulated period: first return to the start after half a revolution
    let start = orbit.position_at(0.0);
    let (mut t, dt) = (0.0, 0.01);
    let mut prev = f64::INFINITY;
    let mut simulated = None;
    while t < 8000.0 {
        t += dt;
        let d = (orbit.position_at(t) - start).norm();
        if t > 3000.0 && d > prev {
            simulated = Some(t - dt);
            break;
        }
        prev = d;
    }
    let simulated = simulated.ok_or("orbit never returned")?;
    let radius = EARTH_RADIUS_M + 550_000.0;
    let mut worst: f64 = 0.0;
    for k in 0..=10_000 {
        let r = orbit.position_at(period * k as f64 / 10_000.0).norm();
        worst = worst.max(((r - radius) / radius).abs());
    }
    let gap = (simulated - 5731.0).abs() / 5731.0;
    let detail = format!(
        "simulated period {simulated:.2} s (Kepler {period:.2} s, {:.3}% from 5731 s), radius drift {worst:.1e}",
        gap * 100.0
    );
    if gap < 0.01 && worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rules = random_rules(&mut rng);
    let mut visible_pairs = 0;
    for i in 0..10_000 {
        let a = random_node(&mut rng, "a");
        let b = random_node(&mut rng, "b");
        let t = rng.gen_range(0.0..20_000.0);
        let ab = visible(&a, &b, t, &rules);
        if ab != visible(&b, &a, t, &rules) {
            return Err(format!("asymmetric visibility at pair {i}"));
        }
        visible_pairs += ab as u32;
    }
    for _ in 0..2_000 {
        let (lat, lon) = (rng.gen_range(-80.0..80.0), rng.gen_range(-180.0..180.0));
        let alt = rng.gen_range(3e5..2e6);
        let g = NodeSpec::new(
            "g",
            Domain::Terrestrial,
            MobilityModel::Static(GeoPoint::new(lat, lon, 0.0)),
        );
        let over = NodeSpec::new(
            "s",
            Domain::Satellite,
            MobilityModel::Static(GeoPoint::new(lat, lon, alt)),
        );
        let anti = NodeSpec::new(
            "s",
            Domain::Satellite,
            MobilityModel::Static(GeoPoint::new(-lat, lon + 180.0, alt)),
        );
        if !visible(&g, &over, 0.0, &rules) {
            return Err(format!("overhead pair hidden at ({lat}, {lon})"));
        }
        if visible(&g, &anti, 0.0, &rules) {
            return Err(format!("antipodal pair visible at ({lat}, {lon})"));
        }
    }
    let mut finite = 0;
    for _ in 0..500 {
        let nodes: Vec<NodeSpec> = (0..5).map(|i| random_node(&mut rng, &format!("n{i}"))).collect();
        let snap = snapshot(&nodes, &rules, rng.gen_range(0.0..10_000.0));
        for i in 0..5 {
            for j in 0..5 {
                let l = snap.pairwise_latency(i, j, rng.gen_range(0.0..1e6));
                if l.is_finite() {
                    finite += 1;
                    if l < snap.distance(i, j) / SPEED_OF_LIGHT {
                        return Err(format!("latency {l} below light time"));
                    }
                }
            }
        }
    }
    Ok(format!(
        "10000 pairs symmetric ({visible_pairs} visible), 2000 overhead/antipodal checks, {finite} finite latencies ≥ d/c"
    ))
}

fn criterion_5(dir: &Path) -> Verdict {
    let path = write_example(dir, "vate-edge-cloud", None);
    let mut file = ScenarioFile::load(&path).map_err(|e| e.to_string())?;
    file.workload.rate_per_s = 1.0;
    file.workload.duration_s = 120.0;
    let scenario = file.to_scenario();
    let out = run(&scenario).map_err(|e| e.to_string())?;
    let expected = evaluate(&out.initial.assignment, &scenario.problem_at(0.0))
        .unwrap()
        .latency;
    let mut worst: f64 = 0.0;
    for r in &out.records {
        let l = r.latency.ok_or(format!("request {} failed", r.id))?;
        worst = worst.max((l - expected).abs());
    }
    let detail = format!(
        "{} requests, max |simulated - evaluated| = {worst:.1e} s",
        out.records.len()
    );
    if worst <= 1e-9 && out.records.len() == 119 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6(dir: &Path) -> Verdict {
    let mut runs = 0;
    for name in examples::EXAMPLE_NAMES {
        let path = write_example(dir, name, None);
        for policy in ["static", "reactive", "predictive"] {
            let mut bodies = Vec::new();
            for attempt in 0..2 {
                let out = dir.join(format!("{name}-{policy}-{attempt}"));
                let res = cai(&[
                    "simulate",
                    path.to_str().unwrap(),
                    "--seed",
                    "1",
                    "--policy",
                    policy,
                    "--out",
                    out.to_str().unwrap(),
                ]);
                if !res.status.success() {
                    return Err(format!("{name}/{policy}: {}", String::from_utf8_lossy(&res.stderr)));
                }
                let report = std::fs::read(out.join("report.json")).unwrap();
                let trace = std::fs::read(out.join("trace.csv")).unwrap();
                let doc: serde_json::Value = serde_json::from_slice(&report).unwrap();
                let m = &doc["metrics"];
                let count = |k: &str| m[k].as_u64().unwrap();
                if count("requests") != count("completed") + count("failed") + count("in_flight") {
                    return Err(format!("{name}/{policy}: conservation broken"));
                }
                bodies.push((report, trace, res.stdout));
                runs += 1;
            }
            if bodies[0] != bodies[1] {
                return Err(format!("{name}/{policy}: outputs differ between runs"));
            }
        }
    }
    Ok(format!(
        "{runs} runs, byte-identical in pairs, arrived = completed + failed + in-flight in all"
    ))
}

fn criterion_7(dir: &Path) -> Verdict {
    let path = write_example(dir, "leo-handover", None);
    let mut rates = Vec::new();
    for policy in ["predictive", "reactive", "static"] {
        let out = dir.join(format!("leo-{policy}"));
        let res = cai(&[
            "simulate",
            path.to_str().unwrap(),
            "--policy",
            policy,
            "--out",
            out.to_str().unwrap(),
        ]);
        if !res.status.success() {
            return Err(String::from_utf8_lossy(&res.stderr).into_owned());
        }
        let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
        rates.push(doc["metrics"]["slo_violation_rate"].as_f64().unwrap());
    }
    let detail = format!(
        "violation rate predictive {:.4} ≤ reactive {:.4} ≤ static {:.4}",
        rates[0], rates[1], rates[2]
    );
    if rates[0] <= rates[1] && rates[1] <= rates[2] && rates[2] > 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn detector_choice(dir: &Path, knob: Option<f64>) -> Result<String, String> {
    let path = write_example(dir, "vate-edge-cloud", knob);
    let res = cai(&["solve", path.to_str().unwrap(), "--solver", "brute"]);
    if !res.status.success() {
        return Err(String::from_utf8_lossy(&res.stderr).into_owned());
    }
    let doc: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    Ok(doc["assignment"]["detector"]["implementation"]
        .as_str()
        .unwrap()
        .to_owned())
}

fn criterion_8(dir: &Path) -> Verdict {
    let low = detector_choice(dir, None)?;
    let high = detector_choice(dir, Some(10.0 * VATE_DEFAULT_CLOUD_LATENCY))?;
    let below = detector_choice(dir, Some(0.99 * VATE_CLOUD_LATENCY_THRESHOLD))?;
    let above = detector_choice(dir, Some(1.01 * VATE_CLOUD_LATENCY_THRESHOLD))?;
    let detail = format!(
        "cloud_latency {VATE_DEFAULT_CLOUD_LATENCY} s → {low}, {} s → {high}; threshold {VATE_CLOUD_LATENCY_THRESHOLD} s: {below} below, {above} above",
        10.0 * VATE_DEFAULT_CLOUD_LATENCY
    );
    if low == "detector-cloud" && high == "detector-edge" && below == "detector-cloud" && above == "detector-edge" {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9(dir: &Path) -> Verdict {
    let path = write_example(dir, "vate-edge-cloud", None);
    let file = ScenarioFile::load(&path).map_err(|e| e.to_string())?;
    let problem = file.to_scenario().problem_at(0.0);
    let w_acc: Vec<f64> = (0..=20).map(|k| 0.1 * k as f64).collect();
    let grid = w_acc
        .iter()
        .map(|a| format!("{},{},{a}", file.weights.latency, file.weights.energy))
        .collect::<Vec<_>>()
        .join(";");
    let res = cai(&["sweep", path.to_str().unwrap(), "--grid", &grid, "--solver", "brute"]);
    if !res.status.success() {
        return Err(String::from_utf8_lossy(&res.stderr).into_owned());
    }
    let mut reader = csv::Reader::from_reader(res.stdout.as_slice());
    let mut accuracies = Vec::new();
    for (row, &a) in reader.records().zip(&w_acc) {
        let row = row.map_err(|e| e.to_string())?;
        let acc: f64 = row[5]
            .parse()
            .map_err(|_| format!("row for w_acc={a} is {}", &row[5]))?;
        let weights = Weights::new(file.weights.latency, file.weights.energy, a);
        let oracle = brute_force_solve(&problem.with_weights(weights)).map_err(|e| e.to_string())?;
        if oracle.evaluation.accuracy.to_string() != row[5] {
            return Err(format!(
                "w_acc={a}: sweep accuracy {acc} differs from independent solve {}",
                oracle.evaluation.accuracy
            ));
        }
        accuracies.push(acc);
    }
    let monotone = accuracies.windows(2).all(|w| w[1] >= w[0]);
    let distinct = {
        let mut d = accuracies.clone();
        d.dedup();
        d.len()
    };
    let detail = format!(
        "{} points, {distinct} distinct accuracy levels, from {:.4} to {:.4}",
        accuracies.len(),
        accuracies[0],
        accuracies[accuracies.len() - 1]
    );
    if monotone && accuracies.len() == w_acc.len() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let criteria: Vec<(&str, Check)> = vec![
        ("oracle optimality gap", Box::new(criterion_1)),
        ("solver soundness", Box::new(criterion_2)),
        ("orbital mechanics", Box::new(criterion_3)),
        ("geometry", Box::new(criterion_4)),
        ("simulator/analytic agreement", Box::new(|| criterion_5(d))),
        ("determinism and conservation", Box::new(|| criterion_6(d))),
        ("policy ordering", Box::new(|| criterion_7(d))),
        ("cloud latency flips detector", Box::new(|| criterion_8(d))),
        ("trade-off monotonicity", Box::new(|| criterion_9(d))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
