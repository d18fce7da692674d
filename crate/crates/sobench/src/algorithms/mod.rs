//! Solvers and the shared run machinery they are driven through.
//!
//! Every algorithm runs against a [`RunContext`], which owns the budget
//! ledger, the per-run random streams, and the incumbent bookkeeping.
//! All solution quality is compared in a maximization view (minimization
//! problems are negated), so "better" always means a larger sample mean.

pub mod gradient_search;
pub mod nelder_mead;
pub mod random_search;
pub mod spsa;
pub mod strong;

use crate::budget::BudgetLedger;
use crate::problems::{estimate_objective, ObjectiveSense, Problem};
use crate::rng::RngStream;
use crate::space::{project_to_domain, sample_initial, Domain, Point};
use crate::stats::SampleStats;
use crate::trajectory::{Trajectory, TrajectoryRecord};
use thiserror::Error;

/// The benchmarked solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Uniform random sampling of the domain; the de-facto noise floor.
    RandomSearch,
    /// Finite-difference gradient ascent with backtracking line search
    /// and restart-on-stationarity.
    GradientSearch,
    /// Simultaneous-perturbation stochastic approximation with the
    /// standard gain calibration.
    Spsa,
    /// Trust-region response-surface solver; stage II switches to BFGS
    /// curvature once the radius is small.
    Strong,
    /// The trust-region solver locked to stage I (identity curvature).
    Strong1,
    /// Nelder-Mead simplex search adapted to noise by re-evaluating the
    /// best vertex on every shrink.
    NelderMead,
}

#[derive(Debug, Error)]
#[error("unknown algorithm `{id}`; valid ids: {valid}")]
pub struct UnknownAlgorithm {
    pub id: String,
    pub valid: String,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::RandomSearch,
        Algorithm::GradientSearch,
        Algorithm::Spsa,
        Algorithm::Strong,
        Algorithm::Strong1,
        Algorithm::NelderMead,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::RandomSearch => "rs",
            Algorithm::GradientSearch => "gs",
            Algorithm::Spsa => "spsa",
            Algorithm::Strong => "strong",
            Algorithm::Strong1 => "strong1",
            Algorithm::NelderMead => "nm",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Algorithm::RandomSearch => "uniform random search over the domain",
            Algorithm::GradientSearch => "finite-difference gradient search with restarts",
            Algorithm::Spsa => "simultaneous-perturbation stochastic approximation",
            Algorithm::Strong => "trust-region search, two-stage (identity then BFGS model)",
            Algorithm::Strong1 => "trust-region search locked to stage I",
            Algorithm::NelderMead => "noise-adapted Nelder-Mead simplex search",
        }
    }

    pub fn from_id(id: &str) -> Result<Algorithm, UnknownAlgorithm> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == id)
            .ok_or_else(|| UnknownAlgorithm {
                id: id.to_string(),
                valid: Algorithm::ALL.map(Algorithm::id).join(", "),
            })
    }

    /// Runs one macroreplication to budget exhaustion (or numerical
    /// failure) and returns its incumbent trajectory.
    ///
    /// `base` is the run's private stream; oracle, initial-sampling, and
    /// algorithm-internal randomness are forked from it, so the run is a
    /// pure function of the stream and its inputs. `initial` overrides the
    /// sampled starting point (deliberately poor starts, reproductions).
    pub fn run(
        self,
        problem: &dyn Problem,
        budget: u64,
        r: u32,
        params: &SolverParams,
        base: &RngStream,
        initial: Option<Point>,
    ) -> Trajectory {
        let mut ctx = RunContext::new(problem, budget, r, base, initial);
        match self {
            Algorithm::RandomSearch => random_search::drive(&mut ctx),
            Algorithm::GradientSearch => gradient_search::drive(&mut ctx, &params.gs),
            Algorithm::Spsa => spsa::drive(&mut ctx, &params.spsa),
            Algorithm::Strong => strong::drive(&mut ctx, &params.strong, true),
            Algorithm::Strong1 => strong::drive(&mut ctx, &params.strong, false),
            Algorithm::NelderMead => nelder_mead::drive(&mut ctx, &params.nm),
        }
        ctx.finish()
    }
}

/// Tunable constants for every solver, all defaulted to the benchmark
/// design values.
#[derive(Clone, Debug, Default)]
pub struct SolverParams {
    pub gs: gradient_search::GsParams,
    pub spsa: spsa::SpsaParams,
    pub strong: strong::StrongParams,
    pub nm: nelder_mead::NmParams,
}

/// Why an algorithm step could not complete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    /// The replication budget ran out (possibly mid-evaluation; the
    /// partial evaluation is charged but yields no candidate).
    Exhausted,
    /// An iterate went non-finite; the run ends and is flagged.
    NumericalFailure,
}

/// The best fully evaluated solution seen so far in a run.
#[derive(Clone, Debug)]
pub struct Incumbent {
    pub point: Point,
    /// Sample statistics in the problem's own units.
    pub stats: SampleStats,
    pub n_at_discovery: u64,
}

/// Per-run state shared by all solvers: budget ledger, random streams,
/// incumbent, and the trajectory under construction.
pub struct RunContext<'a> {
    problem: &'a dyn Problem,
    sense: ObjectiveSense,
    r: u32,
    ledger: BudgetLedger,
    oracle_rng: RngStream,
    sample_rng: RngStream,
    algo_rng: RngStream,
    initial_override: Option<Point>,
    incumbent: Option<Incumbent>,
    records: Vec<TrajectoryRecord>,
    failed: bool,
}

impl<'a> RunContext<'a> {
    pub fn new(
        problem: &'a dyn Problem,
        budget: u64,
        r: u32,
        base: &RngStream,
        initial: Option<Point>,
    ) -> Self {
        if let Some(p) = &initial {
            assert!(
                problem.spec().domain.contains(p),
                "initial override must be feasible"
            );
        }
        RunContext {
            problem,
            sense: problem.spec().sense,
            r,
            ledger: BudgetLedger::new(budget),
            oracle_rng: base.fork("oracle"),
            sample_rng: base.fork("sample"),
            algo_rng: base.fork("algo"),
            initial_override: initial,
            incumbent: None,
            records: Vec::new(),
            failed: false,
        }
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn budget(&self) -> u64 {
        self.ledger.limit()
    }

    pub fn consumed(&self) -> u64 {
        self.ledger.consumed()
    }

    pub fn remaining(&self) -> u64 {
        self.ledger.remaining()
    }

    pub fn domain(&self) -> &Domain {
        &self.problem.spec().domain
    }

    pub fn dim(&self) -> usize {
        self.problem.spec().dim
    }

    /// Stream for algorithm-internal randomness (perturbation signs and
    /// the like); oracle noise and start sampling use separate forks.
    pub fn algo_rng(&mut self) -> &mut RngStream {
        &mut self.algo_rng
    }

    pub fn incumbent(&self) -> Option<&Incumbent> {
        self.incumbent.as_ref()
    }

    /// Draws a starting point: the first call returns the configured
    /// override if one was given, otherwise (and on every later call,
    /// e.g. restarts) samples the domain's initial distribution.
    pub fn sample_point(&mut self) -> Point {
        if let Some(p) = self.initial_override.take() {
            return p;
        }
        sample_initial(&self.problem.spec().domain, &mut self.sample_rng)
    }

    /// Evaluates `x` with `r` replications, charging each to the ledger.
    ///
    /// A full evaluation makes `x` an incumbent candidate (strictly
    /// better sample mean under the problem's sense replaces the
    /// incumbent; ties keep the earlier discovery) and returns its
    /// statistics in the maximization view. If the budget truncates the
    /// evaluation, the partial replications are still charged but no
    /// candidate results and `Stop::Exhausted` is returned.
    pub fn evaluate(&mut self, x: &Point) -> Result<SampleStats, Stop> {
        let raw = estimate_objective(self.problem, x, self.r, &mut self.oracle_rng, &mut self.ledger)
            .map_err(|_| Stop::Exhausted)?;
        if raw.count < self.r {
            return Err(Stop::Exhausted);
        }
        let better = match &self.incumbent {
            None => true,
            Some(inc) => self.sense.max_view(raw.mean) > self.sense.max_view(inc.stats.mean),
        };
        if better {
            let n = self.ledger.consumed();
            self.incumbent = Some(Incumbent { point: x.clone(), stats: raw, n_at_discovery: n });
            self.records.push(TrajectoryRecord { n, point: x.clone(), sample_mean: raw.mean });
        }
        Ok(self.sense.max_view_stats(raw))
    }

    /// Turns raw proposed coordinates into a feasible point by projecting
    /// from `prev` (which must be feasible). Non-finite coordinates flag
    /// the run as failed.
    pub fn propose(&mut self, prev: &Point, raw: Vec<f64>) -> Result<Point, Stop> {
        match Point::try_new(raw) {
            Some(p) => Ok(project_to_domain(prev, &p, self.domain())),
            None => {
                self.failed = true;
                Err(Stop::NumericalFailure)
            }
        }
    }

    pub fn finish(self) -> Trajectory {
        let t = Trajectory {
            records: self.records,
            budget: self.ledger.limit(),
            consumed: self.ledger.consumed(),
            failed: self.failed,
        };
        t.validate();
        t
    }
}

/// Central finite-difference gradient estimate of the maximization-view
/// objective at `x` with per-coordinate half-widths `h`.
///
/// Each probe is projected into the domain from `x`, so near a boundary
/// the effective half-width shrinks to the realized offset; the divisor
/// is the realized probe separation. Every probe is a full `r`-replication
/// evaluation (and hence an incumbent candidate), charging `2 d r`
/// replications in total. Budget exhaustion mid-gradient aborts with
/// `Stop::Exhausted`: the partial estimate is unusable and callers must
/// terminate.
pub fn fd_gradient(ctx: &mut RunContext, x: &Point, h: &[f64]) -> Result<Vec<f64>, Stop> {
    let d = x.dim();
    assert_eq!(h.len(), d, "one half-width per coordinate");
    let mut g = vec![0.0; d];
    for j in 0..d {
        let mut up_raw = x.to_vec();
        up_raw[j] += h[j];
        let up = ctx.propose(x, up_raw)?;
        let y_up = ctx.evaluate(&up)?;
        let mut dn_raw = x.to_vec();
        dn_raw[j] -= h[j];
        let dn = ctx.propose(x, dn_raw)?;
        let y_dn = ctx.evaluate(&dn)?;
        let spread = up[j] - dn[j];
        g[j] = if spread > 0.0 { (y_up.mean - y_dn.mean) / spread } else { 0.0 };
    }
    Ok(g)
}

/// Euclidean norm, shared by the solvers' stopping and scaling rules.
pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
