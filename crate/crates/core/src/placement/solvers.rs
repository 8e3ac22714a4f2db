use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::evaluate::Evaluator;
use super::{Assignment, Evaluation, PlacementError, PlacementProblem};
use crate::ids::ModuleId;
use crate::placement::Placement;

/// Default upper bound on the number of assignments brute force enumerates.
pub const DEFAULT_SEARCH_CAP: u128 = 1_000_000;

const RANDOM_ATTEMPTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub assignment: Assignment,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchConfig {
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for LocalSearchConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            restarts: 8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSearchOutcome {
    pub assignment: Assignment,
    pub evaluation: Evaluation,
    /// Objective after each accepted move, one list per descent (the first
    /// starts from the supplied initial assignment).
    pub descents: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    BruteForce {
        cap: u128,
    },
    Greedy,
    /// Greedy start (or a seeded random feasible one) refined by local search.
    Local(LocalSearchConfig),
}

impl Solver {
    pub fn brute_force() -> Self {
        Solver::BruteForce {
            cap: DEFAULT_SEARCH_CAP,
        }
    }
}

/// Candidate `(implementation, node)` pairs per module, module ids ascending
/// and candidates in lexicographic order.
fn candidates(problem: &PlacementProblem) -> Vec<(ModuleId, Vec<Placement>)> {
    let mut nodes: Vec<_> = problem.nodes.iter().map(|n| n.id.clone()).collect();
    nodes.sort();
    let mut modules: Vec<_> = problem.graph.modules.iter().map(|m| m.id.clone()).collect();
    modules.sort();
    modules
        .into_iter()
        .map(|m| {
            let mut impls: Vec<_> = problem
                .pools
                .iter()
                .find(|p| p.module_id == m)
                .map(|p| p.implementations.iter().map(|i| i.id.clone()).collect())
                .unwrap_or_default();
            impls.sort();
            let choices = impls
                .iter()
                .flat_map(|i| nodes.iter().map(move |n| Placement::new(i.clone(), n.clone())))
                .collect();
            (m, choices)
        })
        .collect()
}

/// Π over modules of |pool| × |nodes|, saturating.
pub fn search_space_size(problem: &PlacementProblem) -> u128 {
    candidates(problem)
        .iter()
        .fold(1u128, |acc, (_, c)| acc.saturating_mul(c.len() as u128))
}

pub fn brute_force_solve(problem: &PlacementProblem) -> Result<Solution, PlacementError> {
    brute_force_solve_with_cap(problem, DEFAULT_SEARCH_CAP)
}

/// Exhaustive enumeration in lexicographic assignment order; the first
/// minimum wins ties.
pub fn brute_force_solve_with_cap(problem: &PlacementProblem, cap: u128) -> Result<Solution, PlacementError> {
    let evaluator = Evaluator::new(problem)?;
    let cands = candidates(problem);
    let size = search_space_size(problem);
    if size > cap {
        return Err(PlacementError::SearchSpaceExceeded { size, cap });
    }
    if cands.iter().any(|(_, c)| c.is_empty()) {
        return Err(PlacementError::NoFeasibleAssignment);
    }

    let mut digits = vec![0usize; cands.len()];
    let mut assignment = Assignment {
        placements: cands.iter().map(|(m, c)| (m.clone(), c[0].clone())).collect(),
    };
    let mut best: Option<Solution> = None;
    loop {
        let evaluation = evaluator.evaluate(&assignment)?;
        if evaluation.feasible
            && best
                .as_ref()
                .is_none_or(|b| evaluation.objective < b.evaluation.objective)
        {
            best = Some(Solution {
                assignment: assignment.clone(),
                evaluation,
            });
        }
        // odometer, last module fastest
        let mut pos = cands.len();
        loop {
            if pos == 0 {
                return best.ok_or(PlacementError::NoFeasibleAssignment);
            }
            pos -= 1;
            digits[pos] += 1;
            let (module, choices) = &cands[pos];
            if digits[pos] < choices.len() {
                assignment
                    .placements
                    .insert(module.clone(), choices[digits[pos]].clone());
                break;
            }
            digits[pos] = 0;
            assignment.placements.insert(module.clone(), choices[0].clone());
        }
    }
}

/// Assigns modules in topological order, each to the candidate minimizing
/// the partial objective among those keeping the partial assignment feasible.
pub fn greedy_solve(problem: &PlacementProblem) -> Result<Solution, PlacementError> {
    let evaluator = Evaluator::new(problem)?;
    let cands = candidates(problem);
    let mut partial = Assignment::new();
    for module in &evaluator.order {
        let choices = &cands
            .iter()
            .find(|(m, _)| *m == module.id)
            .expect("module has candidates")
            .1;
        let mut best: Option<(f64, &Placement)> = None;
        for choice in choices {
            partial.placements.insert(module.id.clone(), choice.clone());
            let e = evaluator.assess(&partial, true)?.evaluation;
            if e.feasible && best.is_none_or(|(j, _)| e.objective < j) {
                best = Some((e.objective, choice));
            }
        }
        match best {
            Some((_, choice)) => {
                partial.placements.insert(module.id.clone(), choice.clone());
            }
            None => return Err(PlacementError::NoFeasibleChoice(module.id.clone())),
        }
    }
    let evaluation = evaluator.evaluate(&partial)?;
    Ok(Solution {
        assignment: partial,
        evaluation,
    })
}

/// Uniformly sampled feasible assignment, if one turns up within a fixed
/// number of draws.
pub fn random_feasible(problem: &PlacementProblem, rng: &mut ChaCha8Rng) -> Result<Option<Assignment>, PlacementError> {
    let evaluator = Evaluator::new(problem)?;
    random_feasible_with(&evaluator, &candidates(problem), rng)
}

fn random_feasible_with(
    evaluator: &Evaluator<'_>,
    cands: &[(ModuleId, Vec<Placement>)],
    rng: &mut ChaCha8Rng,
) -> Result<Option<Assignment>, PlacementError> {
    if cands.iter().any(|(_, c)| c.is_empty()) {
        return Ok(None);
    }
    for _ in 0..RANDOM_ATTEMPTS {
        let assignment = Assignment {
            placements: cands
                .iter()
                .map(|(m, c)| (m.clone(), c[rng.gen_range(0..c.len())].clone()))
                .collect(),
        };
        if evaluator.evaluate(&assignment)?.feasible {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

fn descend(
    evaluator: &Evaluator<'_>,
    cands: &[(ModuleId, Vec<Placement>)],
    start: Assignment,
    start_eval: Evaluation,
    max_iters: usize,
) -> Result<(Assignment, Evaluation, Vec<f64>), PlacementError> {
    let (mut current, mut current_eval) = (start, start_eval);
    let mut trace = vec![current_eval.objective];
    for _ in 0..max_iters {
        let mut best: Option<(Assignment, Evaluation)> = None;
        for (module, choices) in cands {
            let here = &current.placements[module];
            for choice in choices.iter().filter(|c| *c != here) {
                let mut neighbor = current.clone();
                neighbor.placements.insert(module.clone(), choice.clone());
                let e = evaluator.evaluate(&neighbor)?;
                let bar = best.as_ref().map_or(current_eval.objective, |(_, b)| b.objective);
                if e.feasible && e.objective < bar {
                    best = Some((neighbor, e));
                }
            }
        }
        match best {
            Some((a, e)) => {
                trace.push(e.objective);
                current = a;
                current_eval = e;
            }
            None => break,
        }
    }
    Ok((current, current_eval, trace))
}

/// Steepest descent over single-module moves, plus `restarts` descents from
/// seeded random feasible assignments; returns the best local optimum.
pub fn local_search(
    problem: &PlacementProblem,
    initial: &Assignment,
    config: LocalSearchConfig,
) -> Result<LocalSearchOutcome, PlacementError> {
    let evaluator = Evaluator::new(problem)?;
    let cands = candidates(problem);
    let initial_eval = evaluator.evaluate(initial)?;
    if !initial_eval.feasible {
        return Err(PlacementError::InfeasibleInitial(initial_eval.violations));
    }
    let (mut best, mut best_eval, trace) =
        descend(&evaluator, &cands, initial.clone(), initial_eval, config.max_iters)?;
    let mut descents = vec![trace];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.restarts {
        let Some(start) = random_feasible_with(&evaluator, &cands, &mut rng)? else {
            continue;
        };
        let start_eval = evaluator.evaluate(&start)?;
        let (a, e, trace) = descend(&evaluator, &cands, start, start_eval, config.max_iters)?;
        descents.push(trace);
        if e.objective < best_eval.objective {
            best = a;
            best_eval = e;
        }
    }
    Ok(LocalSearchOutcome {
        assignment: best,
        evaluation: best_eval,
        descents,
    })
}

pub fn solve(problem: &PlacementProblem, solver: Solver) -> Result<Solution, PlacementError> {
    match solver {
        Solver::BruteForce { cap } => brute_force_solve_with_cap(problem, cap),
        Solver::Greedy => greedy_solve(problem),
        Solver::Local(config) => {
            let initial = match greedy_solve(problem) {
                Ok(s) => s.assignment,
                Err(PlacementError::NoFeasibleChoice(_)) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
                    random_feasible(problem, &mut rng)?.ok_or(PlacementError::NoFeasibleAssignment)?
                }
                Err(e) => return Err(e),
            };
            let out = local_search(problem, &initial, config)?;
            Ok(Solution {
                assignment: out.assignment,
                evaluation: out.evaluation,
            })
        }
    }
}
