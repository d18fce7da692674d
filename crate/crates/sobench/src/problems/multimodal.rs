//! Multimodal surface: a 5x5 grid of Gaussian bumps with linearly increasing
//! amplitudes, observed under additive normal noise.
//!
//! The 25 bumps sit at odd integer coordinates with standard deviation 0.4,
//! so neighboring bumps barely interact (the cross-bump contribution at a
//! peak is about 2.3e-5) and each bump is a strict local maximum. The
//! tallest bump, amplitude 3.4 at (9, 9), is the unique global maximum.

use super::{KnownOptimum, ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;

const BUMP_SD: f64 = 0.4;
const NOISE_SD: f64 = 0.3;
const GRID: usize = 5;

/// Amplitude of bump (i, j): 1 + 0.1 (5i + j).
fn amplitude(i: usize, j: usize) -> f64 {
    1.0 + 0.1 * (GRID * i + j) as f64
}

/// The noiseless objective surface.
pub fn field(x: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..GRID {
        for j in 0..GRID {
            let cx = 2.0 * i as f64 + 1.0;
            let cy = 2.0 * j as f64 + 1.0;
            let d2 = (x[0] - cx).powi(2) + (x[1] - cy).powi(2);
            total += amplitude(i, j) * (-d2 / (2.0 * BUMP_SD * BUMP_SD)).exp();
        }
    }
    total
}

pub struct MultiModal {
    spec: ProblemSpec,
}

impl MultiModal {
    pub fn new() -> Self {
        MultiModal {
            spec: ProblemSpec {
                id: "multimodal".to_string(),
                dim: 2,
                domain: Domain::bounded(vec![0.0, 0.0], vec![10.0, 10.0]).expect("static domain"),
                sense: ObjectiveSense::Maximize,
                samples_per_solution: 30,
                default_budget: 15_000,
                known_optimum: Some(KnownOptimum {
                    point: Point::new(vec![9.0, 9.0]),
                    value: field(&[9.0, 9.0]),
                }),
                bad_start: None,
            },
        }
    }
}

impl Problem for MultiModal {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        Observation::new(field(x.coords()) + rng.normal(0.0, NOISE_SD))
    }

    fn expected_value(&self, x: &Point) -> Option<f64> {
        Some(field(x.coords()))
    }
}
