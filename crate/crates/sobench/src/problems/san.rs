//! Stochastic activity network: choose mean activity durations to minimize
//! expected project completion time plus the cost of speeding activities up.
//!
//! The network is a fixed 9-node, 13-arc DAG. Arc j's duration is
//! exponential with mean x_j, and one replication returns the longest
//! 1-to-9 path duration plus sum(1/x_j). For fixed uniforms the longest
//! path is a maximum of sums of x_j-linear terms, so the objective is
//! convex in x.

use super::{ObjectiveSense, Problem, ProblemSpec};
use crate::rng::RngStream;
use crate::space::{Domain, Point};
use crate::stats::Observation;

pub const ARC_COUNT: usize = 13;
const NODES: usize = 9;

/// Arc list as (source, sink) node pairs, topologically ordered.
pub const ARCS: [(usize, usize); ARC_COUNT] = [
    (1, 2),
    (1, 3),
    (2, 3),
    (2, 4),
    (2, 6),
    (3, 6),
    (4, 5),
    (4, 7),
    (5, 6),
    (5, 8),
    (6, 9),
    (7, 8),
    (8, 9),
];

/// Longest 1-to-9 path length by dynamic program over the topological arc
/// order.
pub fn longest_path(durations: &[f64; ARC_COUNT]) -> f64 {
    let mut dist = [f64::NEG_INFINITY; NODES + 1];
    dist[1] = 0.0;
    for (j, &(u, v)) in ARCS.iter().enumerate() {
        let through = dist[u] + durations[j];
        if through > dist[v] {
            dist[v] = through;
        }
    }
    dist[NODES]
}

/// One replication's value at mean-duration vector `x` given the uniform
/// draws that realize the exponential durations.
pub fn observation_value(x: &[f64], uniforms: &[f64; ARC_COUNT]) -> f64 {
    let mut durations = [0.0; ARC_COUNT];
    let mut rate_cost = 0.0;
    for j in 0..ARC_COUNT {
        durations[j] = -x[j] * uniforms[j].ln();
        rate_cost += 1.0 / x[j];
    }
    longest_path(&durations) + rate_cost
}

pub struct San {
    spec: ProblemSpec,
}

impl San {
    pub fn new() -> Self {
        San {
            spec: ProblemSpec {
                id: "san".to_string(),
                dim: ARC_COUNT,
                domain: Domain::bounded(vec![0.01; ARC_COUNT], vec![25.0; ARC_COUNT])
                    .expect("static domain"),
                sense: ObjectiveSense::Minimize,
                samples_per_solution: 30,
                default_budget: 60_000,
                known_optimum: None,
                bad_start: None,
            },
        }
    }
}

impl Problem for San {
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        let mut uniforms = [0.0; ARC_COUNT];
        for u in &mut uniforms {
            *u = rng.uniform_open();
        }
        Observation::new(observation_value(x.coords(), &uniforms))
    }
}
