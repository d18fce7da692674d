//! Maximum-likelihood parameter estimation: recover the shape and scale of
//! a gamma distribution by maximizing average log-likelihood over fresh
//! samples drawn each replication.
//!
//! By Gibbs' inequality the expected average log-density is uniquely
//! maximized at the true parameters, so the optimum is known analytically.

use super::{KnownOptimum, ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;
use statrs::function::gamma::{digamma, ln_gamma};

const TRUE_SHAPE: u32 = 2;
const TRUE_SCALE: f64 = 5.0;
const SAMPLES_PER_REP: usize = 50;

/// Gamma log-density at `t`, evaluated in log space so extreme parameters
/// stay finite.
pub fn log_density(t: f64, shape: f64, scale: f64) -> f64 {
    (shape - 1.0) * t.ln() - t / scale - ln_gamma(shape) - shape * scale.ln()
}

/// Average log-density of a sample under candidate parameters.
pub fn avg_log_density(samples: &[f64], shape: f64, scale: f64) -> f64 {
    samples.iter().map(|&t| log_density(t, shape, scale)).sum::<f64>() / samples.len() as f64
}

/// Expected average log-density under the true gamma law.
///
/// Uses E[ln T] = digamma(k) + ln(theta) and E[T] = k theta for
/// T ~ Gamma(k, theta) with the true k = 2, theta = 5.
pub fn expected_avg_log_density(shape: f64, scale: f64) -> f64 {
    let e_ln_t = digamma(TRUE_SHAPE as f64) + TRUE_SCALE.ln();
    let e_t = TRUE_SHAPE as f64 * TRUE_SCALE;
    (shape - 1.0) * e_ln_t - e_t / scale - ln_gamma(shape) - shape * scale.ln()
}

pub struct ParameterEstimation {
    spec: ProblemSpec,
}

impl ParameterEstimation {
    pub fn new() -> Self {
        let truth = vec![TRUE_SHAPE as f64, TRUE_SCALE];
        ParameterEstimation {
            spec: ProblemSpec {
                id: "paramest".to_string(),
                dim: 2,
                domain: Domain::bounded(vec![0.1, 0.1], vec![10.0, 10.0]).expect("static domain"),
                sense: ObjectiveSense::Maximize,
                samples_per_solution: 30,
                default_budget: 15_000,
                known_optimum: Some(KnownOptimum {
                    value: expected_avg_log_density(truth[0], truth[1]),
                    point: Point::new(truth),
                }),
                bad_start: None,
            },
        }
    }
}

impl Problem for ParameterEstimation {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        let mut total = 0.0;
        for _ in 0..SAMPLES_PER_REP {
            let t = rng.erlang(TRUE_SHAPE, TRUE_SCALE);
            total += log_density(t, x[0], x[1]);
        }
        Observation::new(total / SAMPLES_PER_REP as f64)
    }

    fn expected_value(&self, x: &Point) -> Option<f64> {
        Some(expected_avg_log_density(x[0], x[1]))
    }
}
