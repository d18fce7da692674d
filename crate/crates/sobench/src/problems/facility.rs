//! Facility location: place two facilities in the unit square to minimize
//! the expected distance from a random demand point to its nearer facility.

use super::{ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;

const DEMANDS_PER_REP: usize = 30;

/// Average distance from each demand point to the nearer of two facilities.
pub fn mean_min_distance(a: (f64, f64), b: (f64, f64), demands: &[(f64, f64)]) -> f64 {
    assert!(!demands.is_empty());
    let total: f64 = demands
        .iter()
        .map(|&(dx, dy)| {
            let da = ((dx - a.0).powi(2) + (dy - a.1).powi(2)).sqrt();
            let db = ((dx - b.0).powi(2) + (dy - b.1).powi(2)).sqrt();
            da.min(db)
        })
        .sum();
    total / demands.len() as f64
}

pub struct FacilityLocation {
    spec: ProblemSpec,
}

impl FacilityLocation {
    pub fn new() -> Self {
        FacilityLocation {
            spec: ProblemSpec {
                id: "facloc".to_string(),
                dim: 4,
                domain: Domain::bounded(vec![0.0; 4], vec![1.0; 4]).expect("static domain"),
                sense: ObjectiveSense::Minimize,
                samples_per_solution: 30,
                default_budget: 15_000,
                known_optimum: None,
                bad_start: None,
            },
        }
    }
}

impl Problem for FacilityLocation {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        let mut demands = [(0.0, 0.0); DEMANDS_PER_REP];
        for d in &mut demands {
            *d = (rng.uniform(), rng.uniform());
        }
        Observation::new(mean_min_distance((x[0], x[1]), (x[2], x[3]), &demands))
    }
}
