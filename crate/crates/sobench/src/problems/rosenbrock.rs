//! Rosenbrock's valley in 40 dimensions, observed under additive normal
//! noise; the highest-dimensional problem in the testbed.

use super::{KnownOptimum, ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;

const DIM: usize = 40;
const NOISE_SD: f64 = 5.0;

/// The deterministic Rosenbrock sum.
pub fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
        .sum()
}

pub struct Rosenbrock {
    spec: ProblemSpec,
}

impl Rosenbrock {
    pub fn new() -> Self {
        Rosenbrock {
            spec: ProblemSpec {
                id: "rosenbrock".to_string(),
                dim: DIM,
                domain: Domain::bounded(vec![-2.0; DIM], vec![2.0; DIM]).expect("static domain"),
                sense: ObjectiveSense::Minimize,
                samples_per_solution: 30,
                default_budget: 120_000,
                known_optimum: Some(KnownOptimum {
                    point: Point::new(vec![1.0; DIM]),
                    value: 0.0,
                }),
                bad_start: None,
            },
        }
    }
}

impl Problem for Rosenbrock {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        Observation::new(rosenbrock(x.coords()) + rng.normal(0.0, NOISE_SD))
    }

    fn expected_value(&self, x: &Point) -> Option<f64> {
        Some(rosenbrock(x.coords()))
    }
}
