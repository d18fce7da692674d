//! Economic order quantity: choose an order size minimizing expected
//! ordering-plus-holding cost under a noisy demand rate.
//!
//! The cost surface is steeply increasing to the left of the minimum and
//! very flat to the right, which is what makes small initial solutions
//! interesting for robustness experiments.

use super::{KnownOptimum, ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;

const SETUP_COST: f64 = 100.0;
const HOLDING_COST: f64 = 1.0;
const DEMAND_SHAPE: u32 = 100;
const DEMAND_SCALE: f64 = 0.1;
const MEAN_DEMAND: f64 = DEMAND_SHAPE as f64 * DEMAND_SCALE;

/// Cost of order size `x` at a realized demand rate.
pub fn cost(x: f64, demand: f64) -> f64 {
    SETUP_COST * demand / x + HOLDING_COST * x / 2.0
}

/// Expected cost of order size `x`.
pub fn expected_cost(x: f64) -> f64 {
    cost(x, MEAN_DEMAND)
}

/// The classic EOQ formula on the expected model: sqrt(2 K E[D] / h).
pub fn optimal_quantity() -> f64 {
    (2.0 * SETUP_COST * MEAN_DEMAND / HOLDING_COST).sqrt()
}

pub struct Eoq {
    spec: ProblemSpec,
}

impl Eoq {
    pub fn new() -> Self {
        let x_star = optimal_quantity();
        Eoq {
            spec: ProblemSpec {
                id: "eoq".to_string(),
                dim: 1,
                domain: Domain::bounded(vec![1.0], vec![200.0]).expect("static domain"),
                sense: ObjectiveSense::Minimize,
                samples_per_solution: 30,
                default_budget: 15_000,
                known_optimum: Some(KnownOptimum {
                    point: Point::new(vec![x_star]),
                    value: expected_cost(x_star),
                }),
                bad_start: Some(Point::new(vec![10.0])),
            },
        }
    }
}

impl Problem for Eoq {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        let demand = rng.erlang(DEMAND_SHAPE, DEMAND_SCALE);
        Observation::new(cost(x[0], demand))
    }

    fn expected_value(&self, x: &Point) -> Option<f64> {
        Some(expected_cost(x[0]))
    }
}
