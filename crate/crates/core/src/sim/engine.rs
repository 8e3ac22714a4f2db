use std::collections::BTreeMap;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::queue::{EventKind, EventQueue};
use super::{ArrivalProcess, LogEntry, RequestRecord, Scenario, SimError, SimOutput};
use crate::continuum::{next_topology_change, TopologySnapshot};
use crate::ops::{decide, summarize, Action, EpochObservation, OrchestratorState, ReconfigurationPolicy, RunCounters};
use crate::placement::{
    brute_force_solve, local_search, search_space_size, solve, Assignment, Evaluator, LocalSearchConfig,
    PlacementError, PlacementProblem, Solution, Solver,
};

/// Search spaces up to this size are solved exactly.
const EXACT_SOLVE_LIMIT: u128 = 100_000;

/// Graph structure in topological positions, fixed for the run.
struct Structure {
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    entries: Vec<usize>,
    exit: usize,
    state_size: Vec<u64>,
}

/// An assignment resolved to per-module nodes, durations and payloads.
struct Bound {
    node: Vec<usize>,
    compute: Vec<f64>,
    energy: Vec<f64>,
    output_bytes: Vec<f64>,
    /// Earliest start per module; later than activation while a moved
    /// module's state is still in transit.
    ready_at: Vec<f64>,
    accuracy: f64,
    total_energy: f64,
    feasible: bool,
}

struct Request {
    arrival: f64,
    bound: Rc<Bound>,
    waiting: Vec<usize>,
    energy: f64,
    degradations: u32,
}

struct Transfer {
    request: u64,
    target: usize,
    src: usize,
    dst: usize,
    bytes: f64,
    route: Vec<usize>,
}

struct Engine<'s> {
    scenario: &'s Scenario,
    structure: Structure,
    queue: EventQueue,
    rng: ChaCha8Rng,
    snapshot: TopologySnapshot,
    snapshot_times: Vec<f64>,
    active: Rc<Bound>,
    state: OrchestratorState,
    pending: Option<Assignment>,
    requests: BTreeMap<u64, Request>,
    transfers: BTreeMap<u64, Transfer>,
    records: Vec<RequestRecord>,
    busy: Vec<f64>,
    arrivals: u64,
    next_transfer: u64,
    reconfigurations: u64,
    outage_since: Option<f64>,
    outage_seconds: f64,
    epoch_index: u64,
    epoch_finished: u64,
    epoch_violated: u64,
    log: Vec<LogEntry>,
    events: u64,
}

fn bind(evaluator: &Evaluator<'_>, assignment: &Assignment, ready_at: f64) -> Result<Bound, PlacementError> {
    let assessment = evaluator.assess(assignment, false)?;
    let n = evaluator.order.len();
    let (mut node, mut compute, mut energy, mut output_bytes) = (vec![0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (i, module) in evaluator.order.iter().enumerate() {
        let cost = assessment.modules[i].as_ref().expect("complete assignment");
        let placement = assignment.get(module.id.as_str()).expect("complete assignment");
        let implementation = evaluator
            .implementation(module.id.as_str(), placement.implementation.as_str())
            .expect("well-formed");
        let host = evaluator.problem.node(placement.node.as_str()).expect("well-formed");
        node[i] = cost.node;
        compute[i] = cost.compute_time;
        energy[i] = implementation.compute_demand * host.energy_cost;
        output_bytes[i] = cost.output.size;
    }
    Ok(Bound {
        node,
        compute,
        energy,
        output_bytes,
        ready_at: vec![ready_at; n],
        accuracy: assessment.evaluation.accuracy,
        total_energy: assessment.evaluation.energy,
        feasible: assessment.evaluation.feasible,
    })
}

fn initial_solution(problem: &PlacementProblem, seed: u64) -> Result<Solution, PlacementError> {
    if search_space_size(problem) <= EXACT_SOLVE_LIMIT {
        brute_force_solve(problem)
    } else {
        solve(
            problem,
            Solver::Local(LocalSearchConfig {
                seed,
                ..Default::default()
            }),
        )
    }
}

/// Re-solve seeded from `current` when it is still feasible, otherwise from
/// scratch.
fn resolve(problem: &PlacementProblem, current: &Assignment, seed: u64) -> Result<Assignment, PlacementError> {
    let config = LocalSearchConfig {
        max_iters: 200,
        restarts: 4,
        seed,
    };
    let evaluator = Evaluator::new(problem)?;
    if evaluator.evaluate(current)?.feasible {
        return Ok(local_search(problem, current, config)?.assignment);
    }
    Ok(initial_solution(problem, seed)?.assignment)
}

/// Runs the scenario to its duration and aggregates the finished requests.
pub fn run(scenario: &Scenario) -> Result<SimOutput, SimError> {
    let report = scenario.validate();
    if !report.is_valid() {
        return Err(SimError::InvalidScenario(report));
    }
    let problem = scenario.problem_at(0.0);
    let initial = initial_solution(&problem, scenario.seed).map_err(SimError::InitialPlacement)?;
    let evaluator = Evaluator::new(&problem).map_err(SimError::InitialPlacement)?;
    let n = evaluator.order.len();
    let mut succs = vec![Vec::new(); n];
    for (i, preds) in evaluator.preds.iter().enumerate() {
        for &p in preds {
            succs[p].push(i);
        }
    }
    let structure = Structure {
        entries: (0..n).filter(|&i| evaluator.order[i].is_entry()).collect(),
        preds: evaluator.preds.clone(),
        succs,
        exit: evaluator.exit,
        state_size: evaluator.order.iter().map(|m| m.state_size).collect(),
    };
    let active = Rc::new(bind(&evaluator, &initial.assignment, 0.0).map_err(SimError::InitialPlacement)?);
    let node_count = problem.snapshot.len();

    let mut engine = Engine {
        scenario,
        structure,
        queue: EventQueue::new(),
        rng: ChaCha8Rng::seed_from_u64(scenario.seed),
        snapshot: problem.snapshot.clone(),
        snapshot_times: vec![0.0],
        active,
        state: OrchestratorState {
            assignment: initial.assignment.clone(),
            last_epoch_violation_rate: 0.0,
            pending_migration: None,
        },
        pending: None,
        requests: BTreeMap::new(),
        transfers: BTreeMap::new(),
        records: Vec::new(),
        busy: vec![0.0; node_count],
        arrivals: 0,
        next_transfer: 0,
        reconfigurations: 0,
        outage_since: None,
        outage_seconds: 0.0,
        epoch_index: 0,
        epoch_finished: 0,
        epoch_violated: 0,
        log: Vec::new(),
        events: 0,
    };
    engine.queue.schedule(0.0, EventKind::EpochTick { index: 0 });
    engine.schedule_next_arrival();
    engine.run_loop();
    Ok(engine.finish(initial))
}

impl<'s> Engine<'s> {
    fn duration(&self) -> f64 {
        self.scenario.workload.duration
    }

    fn run_loop(&mut self) {
        while let Some(t) = self.queue.peek_time() {
            if t > self.duration() {
                break;
            }
            let event = self.queue.pop().expect("peeked");
            self.events += 1;
            match event.kind {
                EventKind::Arrival => self.on_arrival(),
                EventKind::ComputeDone { request, module } => self.on_compute_done(request, module),
                EventKind::TransferDone { transfer } => self.on_transfer_done(transfer),
                EventKind::EpochTick { index } => self.on_epoch_tick(index),
                EventKind::PolicyCheck { change_at } => self.on_policy_check(change_at),
                EventKind::Reconfigured => self.on_reconfigured(),
            }
        }
    }

    fn now(&self) -> f64 {
        self.queue.now()
    }

    fn log(&mut self, action: &str, reason: impl Into<String>) {
        self.log.push(LogEntry {
            epoch: self.epoch_index,
            time: self.now(),
            action: action.to_owned(),
            reason: reason.into(),
        });
    }

    fn schedule_next_arrival(&mut self) {
        let w = &self.scenario.workload;
        if w.rate <= 0.0 {
            return;
        }
        let t = match w.arrival {
            ArrivalProcess::Fixed => (self.arrivals + 1) as f64 / w.rate,
            ArrivalProcess::Poisson => {
                let u: f64 = self.rng.gen();
                self.now() - (1.0 - u).ln() / w.rate
            }
        };
        if t < w.duration {
            self.queue.schedule(t, EventKind::Arrival);
        }
    }

    fn on_arrival(&mut self) {
        let id = self.arrivals;
        self.arrivals += 1;
        let bound = Rc::clone(&self.active);
        let waiting = (0..self.structure.preds.len())
            .map(|i| self.structure.preds[i].len().max(1))
            .collect();
        self.requests.insert(
            id,
            Request {
                arrival: self.now(),
                bound: Rc::clone(&bound),
                waiting,
                energy: 0.0,
                degradations: 0,
            },
        );
        let origin = self
            .scenario
            .workload
            .origin
            .as_ref()
            .map(|o| self.snapshot.index_of(o.as_str()).expect("validated origin"));
        for e in self.structure.entries.clone() {
            match origin {
                Some(o) if o != bound.node[e] => {
                    let bytes = self.scenario.workload.entry_bytes;
                    self.start_transfer(id, e, o, bound.node[e], bytes);
                }
                _ => self.deliver(id, e),
            }
            if !self.requests.contains_key(&id) {
                break;
            }
        }
        self.schedule_next_arrival();
    }

    fn deliver(&mut self, id: u64, module: usize) {
        let now = self.now();
        let Some(req) = self.requests.get_mut(&id) else {
            return;
        };
        req.waiting[module] -= 1;
        if req.waiting[module] > 0 {
            return;
        }
        let b = &req.bound;
        let start = now.max(b.ready_at[module]);
        let done = start + b.compute[module];
        self.busy[b.node[module]] += b.compute[module];
        req.energy += b.energy[module];
        self.queue
            .schedule(done, EventKind::ComputeDone { request: id, module });
    }

    fn start_transfer(&mut self, id: u64, target: usize, src: usize, dst: usize, bytes: f64) {
        match self.snapshot.route(src, dst) {
            Some(route) => {
                let latency = self.snapshot.pairwise_latency(src, dst, bytes);
                let tid = self.next_transfer;
                self.next_transfer += 1;
                self.transfers.insert(
                    tid,
                    Transfer {
                        request: id,
                        target,
                        src,
                        dst,
                        bytes,
                        route,
                    },
                );
                self.queue
                    .schedule(self.now() + latency, EventKind::TransferDone { transfer: tid });
            }
            None => self.fail(id),
        }
    }

    fn on_compute_done(&mut self, id: u64, module: usize) {
        let Some(req) = self.requests.get(&id) else {
            return;
        };
        if module == self.structure.exit {
            self.complete(id);
            return;
        }
        let bound = Rc::clone(&req.bound);
        for s in self.structure.succs[module].clone() {
            if bound.node[module] == bound.node[s] {
                self.deliver(id, s);
            } else {
                self.start_transfer(id, s, bound.node[module], bound.node[s], bound.output_bytes[module]);
            }
            if !self.requests.contains_key(&id) {
                return;
            }
        }
    }

    fn on_transfer_done(&mut self, tid: u64) {
        if let Some(t) = self.transfers.remove(&tid) {
            self.deliver(t.request, t.target);
        }
    }

    fn finish_request(&mut self, record: RequestRecord) {
        self.epoch_finished += 1;
        if record.slo_violated {
            self.epoch_violated += 1;
        }
        self.records.push(record);
    }

    fn complete(&mut self, id: u64) {
        let req = self.requests.remove(&id).expect("live request");
        let now = self.now();
        let latency = now - req.arrival;
        let slo = &self.scenario.slo;
        let accuracy = req.bound.accuracy;
        self.finish_request(RequestRecord {
            id,
            arrival: req.arrival,
            completion: Some(now),
            latency: Some(latency),
            energy: req.bound.total_energy,
            accuracy,
            slo_violated: latency > slo.latency || accuracy < slo.min_accuracy,
            degradation_events: req.degradations,
        });
    }

    fn fail(&mut self, id: u64) {
        let Some(req) = self.requests.remove(&id) else {
            return;
        };
        self.transfers.retain(|_, t| t.request != id);
        self.finish_request(RequestRecord {
            id,
            arrival: req.arrival,
            completion: None,
            latency: None,
            energy: req.energy,
            accuracy: 0.0,
            slo_violated: true,
            degradation_events: req.degradations,
        });
    }

    /// Restart transfers whose route lost a hop in the new snapshot.
    fn handle_link_loss(&mut self) {
        let broken: Vec<u64> = self
            .transfers
            .iter()
            .filter(|(_, t)| !self.snapshot.route_intact(&t.route))
            .map(|(id, _)| *id)
            .collect();
        for tid in broken {
            let Some(t) = self.transfers.remove(&tid) else {
                continue;
            };
            if let Some(req) = self.requests.get_mut(&t.request) {
                req.degradations += 1;
            }
            self.start_transfer(t.request, t.target, t.src, t.dst, t.bytes);
        }
    }

    fn evaluator_problem(&self) -> PlacementProblem {
        self.scenario.problem_with(self.snapshot.clone())
    }

    fn end_outage(&mut self) {
        if let Some(since) = self.outage_since.take() {
            self.outage_seconds += self.now() - since;
            self.log("outage_end", "feasible placement restored");
        }
    }

    fn begin_outage(&mut self, reason: String) {
        if self.outage_since.is_none() {
            self.outage_since = Some(self.now());
        }
        self.log("outage", reason);
    }

    fn on_epoch_tick(&mut self, index: u64) {
        self.epoch_index = index;
        let now = self.now();
        if index > 0 {
            self.snapshot = self.scenario.snapshot_at(now);
            self.snapshot_times.push(now);
            self.handle_link_loss();
        }
        self.state.last_epoch_violation_rate = if self.epoch_finished == 0 {
            0.0
        } else {
            self.epoch_violated as f64 / self.epoch_finished as f64
        };
        self.epoch_finished = 0;
        self.epoch_violated = 0;

        let problem = self.evaluator_problem();
        let current_feasible = Evaluator::new(&problem)
            .and_then(|ev| ev.evaluate(&self.state.assignment))
            .map(|e| e.feasible)
            .unwrap_or(false);
        if current_feasible {
            self.end_outage();
        }
        let epoch = self.scenario.epoch;
        let forecast_change = match self.scenario.policy {
            ReconfigurationPolicy::Predictive { lead, step } => next_topology_change(
                &self.scenario.nodes,
                &self.scenario.link_rules,
                now,
                now + epoch + lead,
                step,
            ),
            _ => None,
        };
        let observation = EpochObservation {
            time: now,
            epoch,
            current_feasible,
            forecast_change,
        };
        match decide(&self.scenario.policy, &self.state, &observation) {
            Action::Keep => self.log("keep", if current_feasible { "feasible" } else { "infeasible" }),
            Action::Resolve(reason) => {
                let seed = self.scenario.seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
                match resolve(&problem, &self.state.assignment, seed) {
                    Ok(next) if next == self.state.assignment => {
                        self.log("keep", format!("{}: re-solve kept placement", reason.as_str()))
                    }
                    Ok(next) => {
                        self.end_outage();
                        self.activate_with_downtime(&problem, next);
                        self.log("reconfigure", reason.as_str());
                    }
                    Err(e) => self.begin_outage(format!("{}: {e}", reason.as_str())),
                }
            }
            Action::ScheduleMigration { at, change_at } => {
                self.queue.schedule(at, EventKind::PolicyCheck { change_at });
                self.state.pending_migration = Some(at);
                self.log("schedule_migration", format!("change forecast at {change_at}"));
            }
        }

        let next = (index + 1) as f64 * epoch;
        if next <= self.duration() {
            self.queue.schedule(next, EventKind::EpochTick { index: index + 1 });
        }
    }

    /// Stop-and-copy migration: the new assignment serves immediately and a
    /// moved module starts once its state has crossed the network.
    fn activate_with_downtime(&mut self, problem: &PlacementProblem, next: Assignment) {
        let now = self.now();
        let evaluator = Evaluator::new(problem).expect("validated problem");
        let mut bound = bind(&evaluator, &next, now).expect("solver output is well-formed");
        for i in 0..bound.node.len() {
            bound.ready_at[i] = now + self.state_transfer_time(i, bound.node[i]);
        }
        self.install(next, bound);
    }

    fn state_transfer_time(&self, module: usize, new_node: usize) -> f64 {
        let old = self.active.node[module];
        if old == new_node {
            return 0.0;
        }
        // unreachable: state is dropped and the module restarts cold
        self.snapshot
            .route_bandwidth(old, new_node)
            .map_or(0.0, |bw| self.structure.state_size[module] as f64 * 8.0 / bw)
    }

    fn install(&mut self, assignment: Assignment, bound: Bound) {
        self.active = Rc::new(bound);
        self.state.assignment = assignment;
        self.reconfigurations += 1;
    }

    /// Predictive re-solve against the forecast snapshot. The current
    /// placement keeps serving while state is pre-copied; the switch happens
    /// when the slowest moved module's state has arrived.
    fn on_policy_check(&mut self, change_at: f64) {
        let forecast = self.scenario.problem_with(self.scenario.snapshot_at(change_at));
        let seed = self.scenario.seed ^ change_at.to_bits();
        match resolve(&forecast, &self.state.assignment, seed) {
            Ok(next) if next == self.state.assignment => {
                self.state.pending_migration = None;
                self.log("keep", "forecast placement unchanged");
            }
            Ok(next) => {
                let problem = self.evaluator_problem();
                let evaluator = Evaluator::new(&problem).expect("validated problem");
                let bound = bind(&evaluator, &next, 0.0).expect("solver output is well-formed");
                let copy_time = (0..bound.node.len())
                    .map(|i| self.state_transfer_time(i, bound.node[i]))
                    .fold(0.0, f64::max);
                let at = self.now() + copy_time;
                self.pending = Some(next);
                self.state.pending_migration = Some(at);
                self.queue.schedule(at, EventKind::Reconfigured);
                self.log(
                    "migrate",
                    format!("pre-copy {copy_time} s ahead of change at {change_at}"),
                );
            }
            Err(e) => {
                self.state.pending_migration = None;
                self.log("keep", format!("no feasible forecast placement: {e}"));
            }
        }
    }

    fn on_reconfigured(&mut self) {
        let Some(next) = self.pending.take() else {
            return;
        };
        let now = self.now();
        let problem = self.evaluator_problem();
        let evaluator = Evaluator::new(&problem).expect("validated problem");
        let bound = bind(&evaluator, &next, now).expect("solver output is well-formed");
        if !bound.feasible {
            self.log("activate", "placement infeasible on current topology");
        } else {
            self.log("activate", "migration complete");
        }
        self.state.pending_migration = None;
        self.install(next, bound);
    }

    fn finish(mut self, initial: Solution) -> SimOutput {
        if let Some(since) = self.outage_since.take() {
            self.outage_seconds += self.duration() - since;
        }
        self.records.sort_by_key(|r| r.id);
        let busy_time = self
            .snapshot
            .node_ids()
            .iter()
            .cloned()
            .zip(self.busy.iter().copied())
            .collect();
        let counters = RunCounters {
            duration: self.duration(),
            in_flight: self.requests.len() as u64,
            busy_time,
            reconfigurations: self.reconfigurations,
            outage_seconds: self.outage_seconds,
        };
        let report = summarize(&self.records, &counters);
        debug_assert_eq!(report.requests, self.arrivals);
        SimOutput {
            report,
            records: self.records,
            log: self.log,
            initial,
            snapshot_times: self.snapshot_times,
            events_processed: self.events,
        }
    }
}
