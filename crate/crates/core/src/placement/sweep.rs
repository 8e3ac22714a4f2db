use rayon::prelude::*;

use super::solvers::{solve, Solution, Solver};
use super::{PlacementError, PlacementProblem, Weights};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub weights: Weights,
    pub outcome: Result<Solution, PlacementError>,
}

/// Solves once per weight vector with a fixed solver. Points are solved in
/// parallel; output order follows `weights`.
pub fn sweep(
    problem: &PlacementProblem,
    weights: &[Weights],
    solver: Solver,
) -> Result<Vec<SweepPoint>, PlacementError> {
    if weights.is_empty() {
        return Err(PlacementError::EmptySweep);
    }
    Ok(weights
        .par_iter()
        .map(|w| SweepPoint {
            weights: *w,
            outcome: solve(&problem.with_weights(*w), solver),
        })
        .collect())
}
