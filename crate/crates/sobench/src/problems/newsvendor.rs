//! Continuous newsvendor: choose an order quantity maximizing expected
//! profit under exponentially distributed demand.

use super::{KnownOptimum, ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;

const PRICE: f64 = 9.0;
const SALVAGE: f64 = 1.0;
const UNIT_COST: f64 = 5.0;
const MEAN_DEMAND: f64 = 5.0;

/// Profit of ordering `x` units against a realized demand.
pub fn profit(x: f64, demand: f64) -> f64 {
    PRICE * x.min(demand) + SALVAGE * (x - demand).max(0.0) - UNIT_COST * x
}

/// Expected profit of ordering `x` units.
///
/// Uses E[min(x, D)] = m(1 − e^(−x/m)) for exponential demand with mean m;
/// the salvage term is x minus the expected sales.
pub fn expected_profit(x: f64) -> f64 {
    let sold = MEAN_DEMAND * (1.0 - (-x / MEAN_DEMAND).exp());
    PRICE * sold + SALVAGE * (x - sold) - UNIT_COST * x
}

/// Order quantity maximizing [`expected_profit`]: the critical fractile
/// (price − cost)/(price − salvage) = 0.5 of the demand distribution.
pub fn optimal_quantity() -> f64 {
    MEAN_DEMAND * std::f64::consts::LN_2
}

pub struct CtsNews {
    spec: ProblemSpec,
}

impl CtsNews {
    pub fn new() -> Self {
        let x_star = optimal_quantity();
        CtsNews {
            spec: ProblemSpec {
                id: "ctsnews".to_string(),
                dim: 1,
                domain: Domain::bounded(vec![0.0], vec![10.0]).expect("static domain"),
                sense: ObjectiveSense::Maximize,
                samples_per_solution: 30,
                default_budget: 15_000,
                known_optimum: Some(KnownOptimum {
                    point: Point::new(vec![x_star]),
                    value: expected_profit(x_star),
                }),
                bad_start: None,
            },
        }
    }
}

impl Problem for CtsNews {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        let demand = rng.exponential(MEAN_DEMAND);
        Observation::new(profit(x[0], demand))
    }

    fn expected_value(&self, x: &Point) -> Option<f64> {
        Some(expected_profit(x[0]))
    }
}
