//! Testbed problems: noisy continuous simulation oracles.
//!
//! Each problem exposes a stochastic oracle `simulate` whose expectation is
//! the objective, a box domain with an initial-sampling rule, a sense
//! (minimize or maximize), and a default replication budget. The built-in
//! testbed is a reconstruction of classic simulation-optimization test
//! problems from their published descriptions; structural constants live in
//! the individual problem modules.
//!
//! New problems plug in through [`ProblemRegistry::register`]; anything
//! implementing [`Problem`] participates in experiments on equal footing
//! with the built-ins.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::{BudgetExhausted, BudgetLedger};
use crate::rng::RngStream;
use crate::space::{sample_initial, Domain, Point};
use crate::stats::{Observation, SampleStats};
use thiserror::Error;

pub mod eoq;
pub mod facility;
pub mod gg1;
pub mod multimodal;
pub mod newsvendor;
pub mod param_gamma;
pub mod rosenbrock;
pub mod san;

/// Direction of optimization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

impl ObjectiveSense {
    /// Maps a raw objective value into the internal maximization view in
    /// which all search algorithms operate (minimization is negated). The
    /// map is its own inverse.
    pub fn max_view(self, value: f64) -> f64 {
        match self {
            ObjectiveSense::Minimize => -value,
            ObjectiveSense::Maximize => value,
        }
    }

    /// Converts sample statistics into the maximization view.
    pub fn max_view_stats(self, stats: SampleStats) -> SampleStats {
        match self {
            ObjectiveSense::Minimize => stats.negated(),
            ObjectiveSense::Maximize => stats,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ObjectiveSense::Minimize => "minimize",
            ObjectiveSense::Maximize => "maximize",
        }
    }
}

/// The location and true objective value of a known optimum.
#[derive(Clone, Debug)]
pub struct KnownOptimum {
    pub point: Point,
    pub value: f64,
}

/// Static description of a problem: identity, geometry, sense, and budgets.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    /// Registry identifier, unique among registered problems.
    pub id: String,
    pub dim: usize,
    pub domain: Domain,
    pub sense: ObjectiveSense,
    /// Replications charged per full evaluation of one solution.
    pub samples_per_solution: u32,
    /// Total replication budget of one run unless overridden.
    pub default_budget: u64,
    /// True optimum, where one is analytically available.
    pub known_optimum: Option<KnownOptimum>,
    /// A deliberately poor initial solution, for robustness experiments.
    pub bad_start: Option<Point>,
}

impl ProblemSpec {
    /// # Panics
    /// Panics when the pieces are inconsistent: dimension mismatches, an
    /// infeasible optimum or bad start, or a default budget too small to
    /// evaluate an initial solution plus one gradient estimate.
    pub fn validate(&self) {
        assert_eq!(self.domain.dim(), self.dim, "{}: domain dimension", self.id);
        assert!(self.samples_per_solution >= 1, "{}: r must be positive", self.id);
        let floor = self.samples_per_solution as u64 * (self.dim as u64 + 2);
        assert!(
            self.default_budget >= floor,
            "{}: default budget {} under minimum {floor}",
            self.id,
            self.default_budget
        );
        if let Some(opt) = &self.known_optimum {
            assert!(
                self.domain.contains(&opt.point),
                "{}: known optimum outside domain",
                self.id
            );
            assert!(opt.value.is_finite());
        }
        if let Some(start) = &self.bad_start {
            assert!(
                self.domain.contains(start),
                "{}: bad start outside domain",
                self.id
            );
        }
    }
}

/// A noisy simulation oracle with its metadata.
pub trait Problem: Send + Sync {
    fn spec(&self) -> &ProblemSpec;

    /// Runs one replication at `x`, consuming draws from `rng`.
    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation;

    /// The noiseless expected objective at `x`, where a closed form exists.
    fn expected_value(&self, _x: &Point) -> Option<f64> {
        None
    }
}

/// Evaluates a solution with up to `r` replications, charging each to the
/// ledger.
///
/// When fewer than `r` replications remain the evaluation is truncated to
/// what the ledger allows, never exceeding the budget; the returned count
/// says how many were actually taken. An already-empty ledger yields
/// [`BudgetExhausted`].
pub fn estimate_objective(
    problem: &dyn Problem,
    x: &Point,
    r: u32,
    rng: &mut RngStream,
    ledger: &mut BudgetLedger,
) -> Result<SampleStats, BudgetExhausted> {
    debug_assert!(problem.spec().domain.contains(x), "evaluating infeasible point");
    let take = (r as u64).min(ledger.remaining());
    if take == 0 {
        return Err(BudgetExhausted);
    }
    let mut obs = Vec::with_capacity(take as usize);
    for _ in 0..take {
        obs.push(problem.simulate(x, rng));
        ledger.charge(1);
    }
    Ok(SampleStats::from_observations(&obs))
}

#[derive(Debug, Error)]
#[error("unknown problem `{id}`; registered: {known}")]
pub struct UnknownProblem {
    pub id: String,
    pub known: String,
}

/// Problem lookup by id, iterated in sorted id order.
pub struct ProblemRegistry {
    map: BTreeMap<String, Arc<dyn Problem>>,
}

impl ProblemRegistry {
    /// Registry containing the eight built-in testbed problems.
    pub fn builtin() -> Self {
        let mut registry = ProblemRegistry {
            map: BTreeMap::new(),
        };
        registry.register(Arc::new(newsvendor::CtsNews::new()));
        registry.register(Arc::new(eoq::Eoq::new()));
        registry.register(Arc::new(facility::FacilityLocation::new()));
        registry.register(Arc::new(gg1::QueueGG1::new()));
        registry.register(Arc::new(multimodal::MultiModal::new()));
        registry.register(Arc::new(param_gamma::ParameterEstimation::new()));
        registry.register(Arc::new(rosenbrock::Rosenbrock::new()));
        registry.register(Arc::new(san::San::new()));
        registry
    }

    /// Adds a problem, validating its spec.
    ///
    /// # Panics
    /// Panics on an invalid spec or a duplicate id.
    pub fn register(&mut self, problem: Arc<dyn Problem>) {
        problem.spec().validate();
        let id = problem.spec().id.clone();
        let prior = self.map.insert(id.clone(), problem);
        assert!(prior.is_none(), "duplicate problem id `{id}`");
    }

    pub fn lookup(&self, id: &str) -> Result<Arc<dyn Problem>, UnknownProblem> {
        self.map.get(id).cloned().ok_or_else(|| UnknownProblem {
            id: id.to_string(),
            known: self.ids().join(", "),
        })
    }

    pub fn ids(&self) -> Vec<String> {
        self.map.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Arc<dyn Problem>)> {
        self.map.iter().map(|(id, p)| (id.as_str(), p))
    }
}

/// A problem defined by a closure; the plug-in path for external oracles and
/// the workhorse for tests that need a controlled objective.
pub struct FnProblem<F>
where
    F: Fn(&Point, &mut RngStream) -> f64 + Send + Sync,
{
    spec: ProblemSpec,
    oracle: F,
}

impl<F> FnProblem<F>
where
    F: Fn(&Point, &mut RngStream) -> f64 + Send + Sync,
{
    pub fn new(spec: ProblemSpec, oracle: F) -> Self {
        spec.validate();
        FnProblem { spec, oracle }
    }
}

impl<F> Problem for FnProblem<F>
where
    F: Fn(&Point, &mut RngStream) -> f64 + Send + Sync,
{
    fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn simulate(&self, x: &Point, rng: &mut RngStream) -> Observation {
        Observation::new((self.oracle)(x, rng))
    }
}

/// Spec builder for ad-hoc problems over a bounded box; used by tests and
/// plug-in examples.
pub fn adhoc_spec(id: &str, lower: Vec<f64>, upper: Vec<f64>, sense: ObjectiveSense) -> ProblemSpec {
    let dim = lower.len();
    ProblemSpec {
        id: id.to_string(),
        dim,
        domain: Domain::bounded(lower, upper).expect("ad-hoc domain"),
        sense,
        samples_per_solution: 30,
        default_budget: 15_000,
        known_optimum: None,
        bad_start: None,
    }
}

/// Draws an initial solution for a problem, honoring its sampling rule.
pub fn initial_solution(problem: &dyn Problem, rng: &mut RngStream) -> Point {
    sample_initial(&problem.spec().domain, rng)
}
