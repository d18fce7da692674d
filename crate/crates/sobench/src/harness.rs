//! Experiment machinery: seeded macroreplications, common-random-number
//! post-processing of incumbent trajectories, checkpoint aggregation into
//! mean-and-quartile curves, and the SPSA budget sweep.
//!
//! Randomness is addressed by derivation paths, never by call order. A
//! run draws from (seed, problem, algorithm, macrorep); post-processing
//! replication `j` of macroreplication `i` draws from (seed, problem,
//! "post", i, j) regardless of algorithm or point, so every algorithm's
//! incumbents are re-evaluated under literally the same random numbers
//! and differences between algorithms are never post-processing noise.

use crate::algorithms::{Algorithm, SolverParams};
use crate::problems::Problem;
use crate::rng::RngStream;
use crate::space::Point;
use crate::trajectory::Trajectory;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

/// The z-score of a two-sided 95% normal confidence interval.
pub const CI_Z: f64 = 1.96;

/// One algorithm run on one macroreplication index.
#[derive(Clone, Debug, PartialEq)]
pub struct MacroRun {
    pub algorithm: Algorithm,
    pub macrorep: u32,
    pub trajectory: Trajectory,
}

/// Stream a run draws all of its randomness from.
pub fn run_base_stream(seed: u64, problem_id: &str, algorithm_id: &str, macrorep: u32) -> RngStream {
    RngStream::root(seed)
        .fork(problem_id)
        .fork(algorithm_id)
        .fork_index("rep", u64::from(macrorep))
}

/// Stream for post-processing replication `post_rep` of macroreplication
/// `macrorep`; deliberately algorithm-free so estimates are shared.
pub fn post_stream(seed: u64, problem_id: &str, macrorep: u32, post_rep: u32) -> RngStream {
    RngStream::root(seed)
        .fork(problem_id)
        .fork("post")
        .fork_index("rep", u64::from(macrorep))
        .fork_index("postrep", u64::from(post_rep))
}

/// Runs one macroreplication: a pure function of (seed, problem,
/// algorithm, macrorep, budget, r, params, initial).
#[allow(clippy::too_many_arguments)]
pub fn run_macroreplication(
    problem: &dyn Problem,
    algorithm: Algorithm,
    budget: u64,
    r: u32,
    params: &SolverParams,
    seed: u64,
    macrorep: u32,
    initial: Option<Point>,
) -> MacroRun {
    let base = run_base_stream(seed, &problem.spec().id, algorithm.id(), macrorep);
    let trajectory = algorithm.run(problem, budget, r, params, &base, initial);
    MacroRun { algorithm, macrorep, trajectory }
}

/// Estimates the true objective of visited points with `r_post` fresh
/// replications on the shared post-processing streams, caching by
/// (macrorep, point bits).
pub struct PostProcessor<'a> {
    problem: &'a dyn Problem,
    seed: u64,
    r_post: u32,
    cache: HashMap<(u32, Vec<u64>), f64>,
}

impl<'a> PostProcessor<'a> {
    pub fn new(problem: &'a dyn Problem, seed: u64, r_post: u32) -> Self {
        assert!(r_post >= 1, "post-processing needs at least one replication");
        PostProcessor { problem, seed, r_post, cache: HashMap::new() }
    }

    /// Mean of `r_post` fresh replications at `point`; replication `j`
    /// uses the (macrorep, j) post stream, so any point evaluated within
    /// the same macroreplication sees identical random numbers.
    pub fn true_value_estimate(&mut self, macrorep: u32, point: &Point) -> f64 {
        let key = (macrorep, point.bits());
        if let Some(&z) = self.cache.get(&key) {
            return z;
        }
        let id = &self.problem.spec().id;
        let mut sum = 0.0;
        for j in 0..self.r_post {
            let mut stream = post_stream(self.seed, id, macrorep, j);
            sum += self.problem.simulate(point, &mut stream).value();
        }
        let z = sum / f64::from(self.r_post);
        self.cache.insert(key, z);
        z
    }

    /// Converts runs (all on this processor's problem) into step
    /// functions of post-processed true-value estimates.
    pub fn postprocess(&mut self, runs: &[MacroRun]) -> Vec<PerformanceSample> {
        runs.iter()
            .map(|run| PerformanceSample {
                algorithm_id: run.algorithm.id().to_string(),
                macrorep: run.macrorep,
                steps: run
                    .trajectory
                    .records
                    .iter()
                    .map(|rec| (rec.n, self.true_value_estimate(run.macrorep, &rec.point)))
                    .collect(),
                budget: run.trajectory.budget,
                failed: run.trajectory.failed,
            })
            .collect()
    }
}

/// One macroreplication's post-processed solution quality as a step
/// function of consumed budget.
#[derive(Clone, Debug, PartialEq)]
pub struct PerformanceSample {
    pub algorithm_id: String,
    pub macrorep: u32,
    /// (replications consumed at discovery, true-value estimate) per
    /// incumbent change, strictly increasing in n.
    pub steps: Vec<(u64, f64)>,
    pub budget: u64,
    pub failed: bool,
}

impl PerformanceSample {
    /// The incumbent quality holding at checkpoint `n`. Before the first
    /// evaluation completes the curve is defined from the first value
    /// (early checkpoints report the first incumbent); after the last
    /// change the final incumbent carries forward to the terminal budget.
    pub fn value_at(&self, n: u64) -> f64 {
        assert!(!self.steps.is_empty(), "sample has no evaluated solutions");
        let mut value = self.steps[0].1;
        for &(at, z) in &self.steps {
            if at <= n {
                value = z;
            } else {
                break;
            }
        }
        value
    }
}

/// One row of an aggregated solution-quality curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub n: u64,
    pub mean: f64,
    pub ci_half_width: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub m: u32,
}

#[derive(Debug, Error, PartialEq)]
pub enum AggregationError {
    #[error("aggregation needs at least two macroreplications, got {0}")]
    TooFewSamples(usize),
    #[error("macroreplication {0} has no evaluated solutions")]
    EmptySample(u32),
}

/// Aggregates samples across macroreplications at each checkpoint: mean,
/// 95% normal half-width over the macroreplication means, and quartiles
/// by linear interpolation of order statistics.
pub fn aggregate(
    samples: &[PerformanceSample],
    checkpoints: &[u64],
) -> Result<Vec<CurvePoint>, AggregationError> {
    if samples.len() < 2 {
        return Err(AggregationError::TooFewSamples(samples.len()));
    }
    if let Some(empty) = samples.iter().find(|s| s.steps.is_empty()) {
        return Err(AggregationError::EmptySample(empty.macrorep));
    }
    let m = samples.len() as u32;
    Ok(checkpoints
        .iter()
        .map(|&n| {
            let values: Vec<f64> = samples.iter().map(|s| s.value_at(n)).collect();
            let s = summarize(values);
            CurvePoint {
                n,
                mean: s.mean,
                ci_half_width: s.ci_half_width,
                q25: s.q25,
                q50: s.q50,
                q75: s.q75,
                m,
            }
        })
        .collect())
}

/// Cross-macroreplication summary of one checkpoint's values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub ci_half_width: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

/// Mean, 95% half-width, and quartiles of at least two values.
pub fn summarize(mut values: Vec<f64>) -> Summary {
    let m = values.len();
    assert!(m >= 2, "summaries need at least two values");
    let mf = m as f64;
    let mean = values.iter().sum::<f64>() / mf;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (mf - 1.0);
    let ci_half_width = CI_Z * (variance / mf).sqrt();
    values.sort_by(f64::total_cmp);
    Summary {
        mean,
        ci_half_width,
        q25: quantile(&values, 0.25),
        q50: quantile(&values, 0.5),
        q75: quantile(&values, 0.75),
    }
}

/// Linear interpolation between order statistics (position `(m - 1) p`);
/// the even-length median is the midpoint of the two central values.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    assert!((0.0..=1.0).contains(&p));
    let position = (sorted.len() - 1) as f64 * p;
    let lo = position.floor() as usize;
    let frac = position - lo as f64;
    if frac == 0.0 || lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

/// 100 evenly spaced checkpoints from budget/100 to the terminal budget,
/// deduplicated (small budgets simply get every distinct value).
pub fn default_checkpoints(budget: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(100);
    for i in 1..=100u64 {
        let n = (i * budget).div_ceil(100);
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    out
}

/// Final incumbent of one fixed-budget SPSA run inside a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepFinal {
    pub budget: u64,
    pub macrorep: u32,
    pub point: Point,
    pub sample_mean: f64,
    pub failed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub finals: Vec<SweepFinal>,
    /// Replications consumed by the whole sweep: macroreps times the sum
    /// of swept budgets.
    pub total_cost: u64,
}

/// Runs SPSA to completion at every budget in `budgets`, recording only
/// each run's final incumbent. Because gain calibration depends on the
/// total budget, a fresh run per budget is the only honest way to chart
/// budget sensitivity; macroreplication `i` reuses the same seed path at
/// every budget, so the sweep is common-random across budgets too.
pub fn spsa_budget_sweep(
    problem: &dyn Problem,
    budgets: &[u64],
    macroreps: u32,
    r: u32,
    params: &SolverParams,
    seed: u64,
) -> SweepResult {
    let tasks: Vec<(u64, u32)> = budgets
        .iter()
        .flat_map(|&budget| (0..macroreps).map(move |macrorep| (budget, macrorep)))
        .collect();
    // Ordered collect keeps the result independent of thread count.
    let finals: Vec<Option<SweepFinal>> = tasks
        .par_iter()
        .map(|&(budget, macrorep)| {
            let run = run_macroreplication(
                problem,
                Algorithm::Spsa,
                budget,
                r,
                params,
                seed,
                macrorep,
                None,
            );
            run.trajectory.final_record().map(|rec| SweepFinal {
                budget,
                macrorep,
                point: rec.point.clone(),
                sample_mean: rec.sample_mean,
                failed: run.trajectory.failed,
            })
        })
        .collect();
    let total_cost = budgets.iter().map(|&b| b * u64::from(macroreps)).sum();
    SweepResult { finals: finals.into_iter().flatten().collect(), total_cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{adhoc_spec, FnProblem, ObjectiveSense};

    fn noisy_line() -> FnProblem<impl Fn(&Point, &mut RngStream) -> f64 + Send + Sync> {
        let spec = adhoc_spec("line", vec![0.0], vec![10.0], ObjectiveSense::Minimize);
        FnProblem::new(spec, |x, rng| x[0] + rng.normal(0.0, 1.0))
    }

    #[test]
    fn default_checkpoints_are_one_hundred_even_steps_to_the_terminal() {
        let cps = default_checkpoints(15_000);
        assert_eq!(cps.len(), 100);
        assert_eq!(cps[0], 150);
        assert_eq!(*cps.last().unwrap(), 15_000);
        for w in cps.windows(2) {
            assert_eq!(w[1] - w[0], 150);
        }
    }

    #[test]
    fn small_budgets_deduplicate_to_every_distinct_value() {
        assert_eq!(default_checkpoints(50), (1..=50).collect::<Vec<u64>>());
        assert_eq!(default_checkpoints(7), (1..=7).collect::<Vec<u64>>());
        assert_eq!(*default_checkpoints(123).last().unwrap(), 123);
    }

    #[test]
    fn step_function_carries_values_left_and_right() {
        let sample = PerformanceSample {
            algorithm_id: "rs".into(),
            macrorep: 0,
            steps: vec![(30, 5.0), (90, 3.0)],
            budget: 300,
            failed: false,
        };
        // Checkpoints before the first evaluation report the first value.
        assert_eq!(sample.value_at(1), 5.0);
        assert_eq!(sample.value_at(30), 5.0);
        assert_eq!(sample.value_at(89), 5.0);
        assert_eq!(sample.value_at(90), 3.0);
        assert_eq!(sample.value_at(300), 3.0);
    }

    #[test]
    fn two_sample_half_width_is_exactly_the_z_score() {
        // Values {3, 5}: the standard error is exactly 1, so the 95%
        // half-width is exactly 1.96.
        let s = summarize(vec![3.0, 5.0]);
        assert_eq!(s.mean, 4.0);
        assert_eq!(s.ci_half_width, 1.96);
        assert_eq!(s.q50, 4.0);
    }

    #[test]
    fn quartiles_interpolate_order_statistics_linearly() {
        let s = summarize(vec![4.0, 2.0, 1.0, 3.0]);
        assert_eq!(s.q25, 1.75);
        assert_eq!(s.q50, 2.5);
        assert_eq!(s.q75, 3.25);
        let odd = summarize(vec![5.0, 1.0, 3.0, 2.0, 4.0]);
        assert_eq!(odd.q25, 2.0);
        assert_eq!(odd.q50, 3.0);
        assert_eq!(odd.q75, 4.0);
    }

    #[test]
    fn aggregation_rejects_single_samples_and_empty_trajectories() {
        let good = PerformanceSample {
            algorithm_id: "rs".into(),
            macrorep: 0,
            steps: vec![(30, 5.0)],
            budget: 300,
            failed: false,
        };
        assert_eq!(
            aggregate(&[good.clone()], &[300]).unwrap_err(),
            AggregationError::TooFewSamples(1)
        );
        let empty = PerformanceSample {
            algorithm_id: "rs".into(),
            macrorep: 7,
            steps: vec![],
            budget: 300,
            failed: false,
        };
        assert_eq!(
            aggregate(&[good, empty], &[300]).unwrap_err(),
            AggregationError::EmptySample(7)
        );
    }

    #[test]
    fn aggregation_summarizes_each_checkpoint_across_macroreps() {
        let a = PerformanceSample {
            algorithm_id: "rs".into(),
            macrorep: 0,
            steps: vec![(30, 5.0), (90, 3.0)],
            budget: 300,
            failed: false,
        };
        let b = PerformanceSample {
            algorithm_id: "rs".into(),
            macrorep: 1,
            steps: vec![(60, 7.0)],
            budget: 300,
            failed: true,
        };
        let curve = aggregate(&[a, b], &[30, 150, 300]).unwrap();
        assert_eq!(curve.len(), 3);
        // At n = 30: {5, 7} (the second sample is defined from its first
        // value); at n >= 90: {3, 7} with the failed run carried forward.
        assert_eq!(curve[0].mean, 6.0);
        assert_eq!(curve[1].mean, 5.0);
        assert_eq!(curve[2].mean, 5.0);
        assert_eq!(curve[2].m, 2);
    }

    #[test]
    fn macroreplications_replay_exactly_and_differ_across_indices() {
        let problem = noisy_line();
        let params = SolverParams::default();
        let a = run_macroreplication(&problem, Algorithm::RandomSearch, 600, 30, &params, 11, 0, None);
        let b = run_macroreplication(&problem, Algorithm::RandomSearch, 600, 30, &params, 11, 0, None);
        assert_eq!(a, b);
        let c = run_macroreplication(&problem, Algorithm::RandomSearch, 600, 30, &params, 11, 1, None);
        assert_ne!(a.trajectory, c.trajectory);
    }

    #[test]
    fn post_processing_estimates_are_bit_identical_across_processors() {
        let problem = noisy_line();
        let run = run_macroreplication(
            &problem,
            Algorithm::RandomSearch,
            600,
            30,
            &SolverParams::default(),
            11,
            0,
            None,
        );
        let mut p1 = PostProcessor::new(&problem, 11, 50);
        let mut p2 = PostProcessor::new(&problem, 11, 50);
        let s1 = p1.postprocess(std::slice::from_ref(&run));
        let s2 = p2.postprocess(std::slice::from_ref(&run));
        assert_eq!(s1, s2);
        assert_eq!(s1[0].steps.len(), run.trajectory.records.len());
    }

    #[test]
    fn common_random_numbers_cancel_additive_noise_between_points() {
        // With objective x + noise and shared post streams, the noise
        // term is identical for two different points in the same
        // macroreplication, so their estimate difference equals the true
        // difference to rounding error. Independent streams would leave
        // a residual on the order of the standard error (~0.14 here).
        let problem = noisy_line();
        let mut post = PostProcessor::new(&problem, 42, 50);
        let z1 = post.true_value_estimate(3, &Point::new(vec![2.0]));
        let z2 = post.true_value_estimate(3, &Point::new(vec![6.5]));
        assert!(((z2 - z1) - 4.5).abs() < 1e-12);
        // Across macroreplication indices the streams differ.
        let other = post.true_value_estimate(4, &Point::new(vec![2.0]));
        assert_ne!(z1, other);
    }

    #[test]
    fn single_point_sweep_matches_the_plain_run_final_incumbent() {
        let problem = noisy_line();
        let params = SolverParams::default();
        let sweep = spsa_budget_sweep(&problem, &[300], 2, 30, &params, 5);
        assert_eq!(sweep.finals.len(), 2);
        for f in &sweep.finals {
            let run = run_macroreplication(
                &problem,
                Algorithm::Spsa,
                300,
                30,
                &params,
                5,
                f.macrorep,
                None,
            );
            let rec = run.trajectory.final_record().unwrap();
            assert_eq!(f.point, rec.point);
            assert_eq!(f.sample_mean, rec.sample_mean);
        }
    }

    #[test]
    fn post_estimate_at_a_known_optimum_lands_near_the_true_value() {
        use crate::stats::SampleStats;

        let problem = crate::problems::newsvendor::CtsNews::new();
        let spec = problem.spec().clone();
        let optimum = spec.known_optimum.as_ref().unwrap();
        let mut post = PostProcessor::new(&problem, 99, 30);
        let z = post.true_value_estimate(0, &optimum.point);
        // Estimate the post-processing standard error from an independent
        // large sample, then require the estimate within three of them.
        let mut rng = RngStream::root(1_000).fork("se-probe");
        let draws: Vec<_> = (0..2_000)
            .map(|_| problem.simulate(&optimum.point, &mut rng))
            .collect();
        let sd = SampleStats::from_observations(&draws).variance.sqrt();
        let se = sd / 30f64.sqrt();
        assert!(
            (z - optimum.value).abs() < 3.0 * se,
            "estimate {z} vs true {} (se {se})",
            optimum.value
        );
    }

    #[test]
    fn sweep_reuses_seed_paths_and_reports_total_cost() {
        let problem = noisy_line();
        let params = SolverParams::default();
        let sweep = spsa_budget_sweep(&problem, &[300, 600], 3, 30, &params, 5);
        assert_eq!(sweep.total_cost, 3 * 900);
        assert_eq!(sweep.finals.len(), 6);
        // The same macroreplication index shares its stream across
        // budgets: both runs start from the same sampled point, so the
        // first trajectory records coincide.
        let short = run_macroreplication(&problem, Algorithm::Spsa, 300, 30, &params, 5, 2, None);
        let long = run_macroreplication(&problem, Algorithm::Spsa, 600, 30, &params, 5, 2, None);
        assert_eq!(short.trajectory.records[0], long.trajectory.records[0]);
    }
}
