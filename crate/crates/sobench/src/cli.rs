//! Command implementations and experiment configuration.
//!
//! Configuration is a plain-text key=value file plus flag overrides
//! (flags win). `run` executes macroreplications of each selected
//! (problem, algorithm) pair in parallel -- outputs are byte-identical
//! regardless of `--jobs` because every run is a pure function of its
//! seed path and files are written in a fixed order. `report` turns
//! trajectory files into aggregated solution-quality curves.

use crate::algorithms::{Algorithm, SolverParams};
use crate::files::{
    self, CdfRow, CurveRow, FileError, TrajectoryFile, TrajectoryMeta, TrajectoryRow,
};
use crate::harness::{
    self, default_checkpoints, CurvePoint, PerformanceSample, PostProcessor, CI_Z,
};
use crate::problems::ProblemRegistry;
use crate::space::Point;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Pseudo-algorithm id labeling SPSA budget-sweep rows in trajectory
/// files; reports aggregate them at the swept budgets instead of on the
/// checkpoint grid.
pub const SWEEP_ALGORITHM_ID: &str = "spsa_sweep";

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or input files; exit code 1.
    #[error("{0}")]
    Config(String),
    /// Execution or I/O failure; exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<FileError> for CliError {
    fn from(err: FileError) -> Self {
        match err {
            FileError::Io { .. } => CliError::Runtime(err.to_string()),
            FileError::Parse { .. } => CliError::Config(err.to_string()),
            FileError::WrongKind { .. } => CliError::Config(format!(
                "{err}; curve files are terminal outputs and cannot be re-reported"
            )),
        }
    }
}

/// A fully resolved experiment: defaults, then config file, then flags.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub problems: Vec<String>,
    pub algorithms: Vec<Algorithm>,
    pub macroreps: u32,
    /// Budget override; each problem's default applies when absent.
    pub budget: Option<u64>,
    pub seed: u64,
    /// Replications-per-solution override.
    pub r: Option<u32>,
    /// Post-processing replications per incumbent point.
    pub r_post: u32,
    /// Start every run at the problem's deliberately poor initial point.
    pub bad_start: bool,
    pub params: SolverParams,
    pub out: PathBuf,
}

/// Command-line overrides collected by the binary's argument parser.
#[derive(Clone, Debug, Default)]
pub struct RunFlags {
    pub config: Option<PathBuf>,
    pub problems: Option<String>,
    pub algorithms: Option<String>,
    pub macroreps: Option<u32>,
    pub budget: Option<u64>,
    pub seed: Option<u64>,
    pub bad_start: bool,
    pub out: Option<PathBuf>,
}

#[derive(Default)]
struct ConfigBuilder {
    experiment_id: Option<String>,
    problems: Option<String>,
    algorithms: Option<String>,
    macroreps: Option<u32>,
    budget: Option<u64>,
    seed: Option<u64>,
    r: Option<u32>,
    r_post: Option<u32>,
    bad_start: Option<bool>,
    out: Option<PathBuf>,
    params: SolverParams,
}

fn parse_field<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("config field `{key}`: invalid value `{value}`")))
}

/// The tunable solver constant a dotted config key refers to, if any.
fn param_slot<'a>(params: &'a mut SolverParams, key: &str) -> Option<&'a mut f64> {
    Some(match key {
        "gs.tau" => &mut params.gs.tau,
        "gs.c_min" => &mut params.gs.c_min,
        "gs.h_min" => &mut params.gs.h_min,
        "spsa.alpha" => &mut params.spsa.alpha,
        "spsa.gamma" => &mut params.spsa.gamma,
        "spsa.step_fraction" => &mut params.spsa.step_fraction,
        "spsa.c_floor_fraction" => &mut params.spsa.c_floor_fraction,
        "strong.eta0" => &mut params.strong.eta0,
        "strong.eta1" => &mut params.strong.eta1,
        "strong.gamma_shrink" => &mut params.strong.gamma_shrink,
        "strong.gamma_expand" => &mut params.strong.gamma_expand,
        "strong.initial_radius_fraction" => &mut params.strong.initial_radius_fraction,
        "strong.stage_two_divisor" => &mut params.strong.stage_two_divisor,
        "strong.min_radius_fraction" => &mut params.strong.min_radius_fraction,
        "strong.test_level" => &mut params.strong.test_level,
        "strong.h_min" => &mut params.strong.h_min,
        "nm.reflect" => &mut params.nm.reflect,
        "nm.expand" => &mut params.nm.expand,
        "nm.contract" => &mut params.nm.contract,
        "nm.shrink" => &mut params.nm.shrink,
        "nm.initial_offset_fraction" => &mut params.nm.initial_offset_fraction,
        _ => return None,
    })
}

impl ConfigBuilder {
    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("config file {}: {e}", path.display()))
        })?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "config file {}:{}: expected key=value, got `{line}`",
                    path.display(),
                    idx + 1
                ))
            })?;
            self.apply_pair(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn apply_pair(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "experiment_id" => self.experiment_id = Some(value.to_string()),
            "problems" => self.problems = Some(value.to_string()),
            "algorithms" => self.algorithms = Some(value.to_string()),
            "macroreps" => self.macroreps = Some(parse_field(key, value)?),
            "budget" => self.budget = Some(parse_field(key, value)?),
            "seed" => self.seed = Some(parse_field(key, value)?),
            "r" => self.r = Some(parse_field(key, value)?),
            "r_post" => self.r_post = Some(parse_field(key, value)?),
            "bad_start" => self.bad_start = Some(parse_field(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => match param_slot(&mut self.params, key) {
                Some(slot) => {
                    let parsed: f64 = parse_field(key, value)?;
                    if !parsed.is_finite() {
                        return Err(CliError::Config(format!(
                            "config field `{key}`: value must be finite"
                        )));
                    }
                    *slot = parsed;
                }
                None => {
                    return Err(CliError::Config(format!("unknown config key `{key}`")));
                }
            },
        }
        Ok(())
    }

    fn apply_flags(&mut self, flags: &RunFlags) {
        if let Some(v) = &flags.problems {
            self.problems = Some(v.clone());
        }
        if let Some(v) = &flags.algorithms {
            self.algorithms = Some(v.clone());
        }
        if let Some(v) = flags.macroreps {
            self.macroreps = Some(v);
        }
        if let Some(v) = flags.budget {
            self.budget = Some(v);
        }
        if let Some(v) = flags.seed {
            self.seed = Some(v);
        }
        if flags.bad_start {
            self.bad_start = Some(true);
        }
        if let Some(v) = &flags.out {
            self.out = Some(v.clone());
        }
    }

    fn finish(self, registry: &ProblemRegistry) -> Result<ExperimentConfig, CliError> {
        let seed = self.seed.unwrap_or(0);
        let experiment_id = self.experiment_id.unwrap_or_else(|| format!("exp-{seed}"));
        if experiment_id.is_empty()
            || !experiment_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
        {
            return Err(CliError::Config(format!(
                "config field `experiment_id`: `{experiment_id}` may only contain letters, digits, `.`, `_`, `-`"
            )));
        }

        let problems = match self.problems.as_deref().unwrap_or("all") {
            "all" => registry.ids(),
            list => {
                let mut ids = Vec::new();
                for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    registry.lookup(id).map_err(|e| CliError::Config(e.to_string()))?;
                    if !ids.contains(&id.to_string()) {
                        ids.push(id.to_string());
                    }
                }
                ids
            }
        };
        if problems.is_empty() {
            return Err(CliError::Config("config field `problems`: empty selection".into()));
        }

        let algorithms = match self.algorithms.as_deref().unwrap_or("all") {
            "all" => Algorithm::ALL.to_vec(),
            list => {
                let mut algs = Vec::new();
                for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let alg = Algorithm::from_id(id).map_err(|e| CliError::Config(e.to_string()))?;
                    if !algs.contains(&alg) {
                        algs.push(alg);
                    }
                }
                algs
            }
        };
        if algorithms.is_empty() {
            return Err(CliError::Config("config field `algorithms`: empty selection".into()));
        }

        let macroreps = self.macroreps.unwrap_or(30);
        if macroreps < 1 {
            return Err(CliError::Config("config field `macroreps`: must be at least 1".into()));
        }
        let r_post = self.r_post.unwrap_or(30);
        if r_post < 1 {
            return Err(CliError::Config("config field `r_post`: must be at least 1".into()));
        }
        if self.r == Some(0) {
            return Err(CliError::Config("config field `r`: must be at least 1".into()));
        }

        Ok(ExperimentConfig {
            experiment_id,
            problems,
            algorithms,
            macroreps,
            budget: self.budget,
            seed,
            r: self.r,
            r_post,
            bad_start: self.bad_start.unwrap_or(false),
            params: self.params,
            out: self.out.unwrap_or_else(|| PathBuf::from("out")),
        })
    }
}

/// Resolves defaults, the optional config file, and flag overrides into
/// an executable experiment description.
pub fn resolve_config(
    registry: &ProblemRegistry,
    flags: &RunFlags,
) -> Result<ExperimentConfig, CliError> {
    let mut builder = ConfigBuilder::default();
    if let Some(path) = &flags.config {
        builder.apply_file(path)?;
    }
    builder.apply_flags(flags);
    builder.finish(registry)
}

/// Renders the problem and algorithm catalog.
pub fn cmd_list(registry: &ProblemRegistry) -> String {
    let mut out = String::from("problems:\n");
    for (id, problem) in registry.iter() {
        let spec = problem.spec();
        let optimum =
            if spec.known_optimum.is_some() { "known-optimum" } else { "unknown-optimum" };
        let bad_start = if spec.bad_start.is_some() { " bad-start" } else { "" };
        writeln!(
            out,
            "  {id} d={} {optimum} {} budget={} r={}{bad_start}",
            spec.dim,
            spec.sense.label(),
            spec.default_budget,
            spec.samples_per_solution,
        )
        .expect("write to string");
    }
    out.push_str("algorithms:\n");
    for alg in Algorithm::ALL {
        writeln!(out, "  {:<8} {}", alg.id(), alg.describe()).expect("write to string");
    }
    out
}

/// Runs the experiment and writes trajectory CSVs plus the metadata
/// sidecar under `<out>/<experiment_id>/`.
pub fn cmd_run(
    registry: &ProblemRegistry,
    config: &ExperimentConfig,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    let exp_dir = config.out.join(&config.experiment_id);
    let traj_dir = exp_dir.join("trajectories");
    let mut meta = metadata_prologue(config);

    for problem_id in &config.problems {
        let problem =
            registry.lookup(problem_id).map_err(|e| CliError::Config(e.to_string()))?;
        let spec = problem.spec();
        let budget = config.budget.unwrap_or(spec.default_budget);
        let r = config.r.unwrap_or(spec.samples_per_solution);
        let floor = u64::from(r) * (spec.dim as u64 + 2);
        if budget < floor {
            return Err(CliError::Config(format!(
                "config field `budget`: {budget} is below the minimum {floor} for problem `{problem_id}` (r = {r} replications times dimension + 2)"
            )));
        }
        let initial: Option<Point> = if config.bad_start {
            Some(spec.bad_start.clone().ok_or_else(|| {
                CliError::Config(format!(
                    "config field `bad_start`: problem `{problem_id}` defines no deliberately poor start"
                ))
            })?)
        } else {
            None
        };

        let tasks: Vec<(Algorithm, u32)> = config
            .algorithms
            .iter()
            .flat_map(|&alg| (0..config.macroreps).map(move |i| (alg, i)))
            .collect();
        let runs: Vec<harness::MacroRun> = pool.install(|| {
            tasks
                .par_iter()
                .map(|&(alg, macrorep)| {
                    harness::run_macroreplication(
                        problem.as_ref(),
                        alg,
                        budget,
                        r,
                        &config.params,
                        config.seed,
                        macrorep,
                        initial.clone(),
                    )
                })
                .collect()
        });

        let tmeta = TrajectoryMeta {
            experiment_id: config.experiment_id.clone(),
            seed: config.seed,
            budget,
            r,
            r_post: config.r_post,
        };
        for &alg in &config.algorithms {
            let rows: Vec<TrajectoryRow> = runs
                .iter()
                .filter(|run| run.algorithm == alg)
                .flat_map(|run| {
                    let failed = run.trajectory.failed;
                    let macrorep = run.macrorep;
                    run.trajectory.records.iter().map(move |rec| TrajectoryRow {
                        experiment_id: config.experiment_id.clone(),
                        problem: problem_id.clone(),
                        algorithm: alg.id().to_string(),
                        macrorep,
                        n: rec.n,
                        point: rec.point.clone(),
                        sample_mean: rec.sample_mean,
                        failed,
                    })
                })
                .collect();
            let path = traj_dir.join(format!("{problem_id}_{}.csv", alg.id()));
            files::write_trajectories(&path, &tmeta, &rows)?;
            let failed_runs =
                runs.iter().filter(|run| run.algorithm == alg && run.trajectory.failed).count();
            if failed_runs > 0 {
                eprintln!(
                    "note: {problem_id}/{}: {failed_runs} macroreplication(s) hit a numerical failure; last incumbents carry forward and rows are flagged",
                    alg.id()
                );
            }
            println!("wrote {}", path.display());
        }

        writeln!(meta, "{problem_id}.budget={budget}").expect("write to string");
        writeln!(meta, "{problem_id}.r={r}").expect("write to string");
        writeln!(meta, "{problem_id}.bad_start={}", config.bad_start).expect("write to string");

        if config.algorithms.contains(&Algorithm::Spsa) {
            let budgets = default_checkpoints(budget);
            let sweep = pool.install(|| {
                harness::spsa_budget_sweep(
                    problem.as_ref(),
                    &budgets,
                    config.macroreps,
                    r,
                    &config.params,
                    config.seed,
                )
            });
            let rows: Vec<TrajectoryRow> = sweep
                .finals
                .iter()
                .map(|f| TrajectoryRow {
                    experiment_id: config.experiment_id.clone(),
                    problem: problem_id.clone(),
                    algorithm: SWEEP_ALGORITHM_ID.to_string(),
                    macrorep: f.macrorep,
                    n: f.budget,
                    point: f.point.clone(),
                    sample_mean: f.sample_mean,
                    failed: f.failed,
                })
                .collect();
            let path = traj_dir.join(format!("{problem_id}_{SWEEP_ALGORITHM_ID}.csv"));
            files::write_trajectories(&path, &tmeta, &rows)?;
            println!("wrote {}", path.display());
            writeln!(meta, "{problem_id}.spsa_sweep_cost={}", sweep.total_cost)
                .expect("write to string");
        }
    }

    let meta_path = exp_dir.join("meta");
    fs::write(&meta_path, meta)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", meta_path.display())))?;
    println!("wrote {}", meta_path.display());
    Ok(())
}

/// Metadata sidecar: every constant a reader needs to interpret or
/// reproduce the outputs.
fn metadata_prologue(config: &ExperimentConfig) -> String {
    let mut meta = String::new();
    let p = &config.params;
    let mut line = |k: &str, v: String| {
        meta.push_str(k);
        meta.push('=');
        meta.push_str(&v);
        meta.push('\n');
    };
    line("experiment_id", config.experiment_id.clone());
    line("seed", config.seed.to_string());
    line(
        "budget_unit",
        "oracle replications (gradient probes and line-search trials included)".into(),
    );
    line("macroreps", config.macroreps.to_string());
    line("r_post", config.r_post.to_string());
    line("bad_start", config.bad_start.to_string());
    line(
        "problems",
        config.problems.join(","),
    );
    line(
        "algorithms",
        config.algorithms.iter().map(|a| a.id()).collect::<Vec<_>>().join(","),
    );
    line("ci_half_width", format!("{CI_Z} * s / sqrt(m), 95% normal"));
    line("quartiles", "linear interpolation of order statistics".into());
    line("checkpoints", "100 evenly spaced values to the terminal budget, deduplicated".into());
    line(
        "curve_convention",
        "checkpoints before the first full evaluation report the first incumbent (defined-from-first-evaluation)".into(),
    );
    line("incumbent", "best sample mean among fully evaluated points; ties keep the earlier discovery".into());
    line("gs.tau", p.gs.tau.to_string());
    line("gs.c_min", p.gs.c_min.to_string());
    line("gs.h_min", p.gs.h_min.to_string());
    line("spsa.alpha", p.spsa.alpha.to_string());
    line("spsa.gamma", p.spsa.gamma.to_string());
    line("spsa.step_fraction", p.spsa.step_fraction.to_string());
    line("spsa.c_floor_fraction", p.spsa.c_floor_fraction.to_string());
    line("strong.eta0", p.strong.eta0.to_string());
    line("strong.eta1", p.strong.eta1.to_string());
    line("strong.gamma_shrink", p.strong.gamma_shrink.to_string());
    line("strong.gamma_expand", p.strong.gamma_expand.to_string());
    line("strong.initial_radius_fraction", p.strong.initial_radius_fraction.to_string());
    line("strong.stage_two_divisor", p.strong.stage_two_divisor.to_string());
    line("strong.min_radius_fraction", p.strong.min_radius_fraction.to_string());
    line("strong.test_level", p.strong.test_level.to_string());
    line("strong.h_min", p.strong.h_min.to_string());
    line("nm.reflect", p.nm.reflect.to_string());
    line("nm.expand", p.nm.expand.to_string());
    line("nm.contract", p.nm.contract.to_string());
    line("nm.shrink", p.nm.shrink.to_string());
    line("nm.initial_offset_fraction", p.nm.initial_offset_fraction.to_string());
    meta
}

/// Aggregates trajectory files (all of one problem) into curve CSVs and
/// the terminal-budget empirical cdf, under `<exp_dir>/curves/` next to
/// the inputs unless `--out` overrides it.
pub fn cmd_report(
    registry: &ProblemRegistry,
    inputs: &[PathBuf],
    out: Option<&Path>,
) -> Result<(), CliError> {
    if inputs.is_empty() {
        return Err(CliError::Config("report needs at least one trajectory file".into()));
    }
    let mut parsed: Vec<TrajectoryFile> = Vec::new();
    for path in inputs {
        parsed.push(files::read_trajectories(path)?);
    }
    let meta = parsed[0].meta.clone();
    for (file, path) in parsed.iter().zip(inputs) {
        if file.meta != meta {
            return Err(CliError::Config(format!(
                "{}: experiment context (id/seed/budget/r/r_post) differs from {}; report one experiment at a time",
                path.display(),
                inputs[0].display()
            )));
        }
    }

    let rows: Vec<&TrajectoryRow> = parsed.iter().flat_map(|f| f.rows.iter()).collect();
    if rows.is_empty() {
        return Err(CliError::Config("inputs contain no trajectory rows".into()));
    }
    let problem_id = rows[0].problem.clone();
    if let Some(other) = rows.iter().find(|row| row.problem != problem_id) {
        return Err(CliError::Config(format!(
            "mixed-problem input: found both `{problem_id}` and `{}`; report one problem at a time",
            other.problem
        )));
    }
    let problem =
        registry.lookup(&problem_id).map_err(|e| CliError::Config(e.to_string()))?;

    let curves_dir = match out {
        Some(dir) => dir.to_path_buf(),
        None => {
            // inputs live in <exp_dir>/trajectories/; emit beside them.
            let parent = inputs[0].parent().and_then(Path::parent);
            parent.map(|p| p.join("curves")).ok_or_else(|| {
                CliError::Config(format!(
                    "cannot derive an output directory from {}; pass --out",
                    inputs[0].display()
                ))
            })?
        }
    };

    let mut post = PostProcessor::new(problem.as_ref(), meta.seed, meta.r_post);
    let mut by_algorithm: BTreeMap<String, BTreeMap<u32, Vec<&TrajectoryRow>>> = BTreeMap::new();
    for row in &rows {
        by_algorithm
            .entry(row.algorithm.clone())
            .or_default()
            .entry(row.macrorep)
            .or_default()
            .push(row);
    }

    let checkpoints = default_checkpoints(meta.budget);
    let mut cdf_rows: Vec<CdfRow> = Vec::new();
    for (algorithm, by_macrorep) in &by_algorithm {
        let curve_rows: Vec<CurveRow> = if algorithm == SWEEP_ALGORITHM_ID {
            sweep_curve(&mut post, by_macrorep)
                .into_iter()
                .map(|point| CurveRow {
                    problem: problem_id.clone(),
                    algorithm: algorithm.clone(),
                    point,
                })
                .collect()
        } else {
            let samples = collect_samples(&mut post, algorithm, meta.budget, by_macrorep);
            let flagged = samples.iter().filter(|s| s.failed).count();
            if flagged > 0 {
                eprintln!(
                    "note: {problem_id}/{algorithm}: {flagged} flagged macroreplication(s) carried forward into the curves"
                );
            }
            let curve = harness::aggregate(&samples, &checkpoints)
                .map_err(|e| CliError::Config(format!("{problem_id}/{algorithm}: {e}")))?;
            let mut terminal: Vec<f64> =
                samples.iter().map(|s| s.value_at(meta.budget)).collect();
            terminal.sort_by(f64::total_cmp);
            let m = terminal.len() as f64;
            cdf_rows.extend(terminal.into_iter().enumerate().map(|(i, z)| CdfRow {
                problem: problem_id.clone(),
                algorithm: algorithm.clone(),
                z,
                fraction: (i + 1) as f64 / m,
            }));
            curve
                .into_iter()
                .map(|point| CurveRow {
                    problem: problem_id.clone(),
                    algorithm: algorithm.clone(),
                    point,
                })
                .collect()
        };
        let path = curves_dir.join(format!("{problem_id}_{algorithm}.csv"));
        files::write_curves(&path, &meta.experiment_id, meta.seed, &curve_rows)?;
        println!("wrote {}", path.display());
    }

    if !cdf_rows.is_empty() {
        let path = curves_dir.join(format!("{problem_id}_terminal_cdf.csv"));
        files::write_terminal_cdf(&path, &meta.experiment_id, meta.seed, &cdf_rows)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Rebuilds post-processed step functions from one algorithm's rows.
fn collect_samples(
    post: &mut PostProcessor,
    algorithm: &str,
    budget: u64,
    by_macrorep: &BTreeMap<u32, Vec<&TrajectoryRow>>,
) -> Vec<PerformanceSample> {
    by_macrorep
        .iter()
        .map(|(&macrorep, rows)| {
            let mut sorted: Vec<&&TrajectoryRow> = rows.iter().collect();
            sorted.sort_by_key(|row| row.n);
            PerformanceSample {
                algorithm_id: algorithm.to_string(),
                macrorep,
                steps: sorted
                    .iter()
                    .map(|row| (row.n, post.true_value_estimate(macrorep, &row.point)))
                    .collect(),
                budget,
                failed: rows.iter().any(|row| row.failed),
            }
        })
        .collect()
}

/// Aggregates sweep finals at each swept budget (only budgets with at
/// least two macroreplications can carry a confidence interval).
fn sweep_curve(
    post: &mut PostProcessor,
    by_macrorep: &BTreeMap<u32, Vec<&TrajectoryRow>>,
) -> Vec<CurvePoint> {
    let mut by_budget: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (&macrorep, rows) in by_macrorep {
        for row in rows {
            by_budget
                .entry(row.n)
                .or_default()
                .push(post.true_value_estimate(macrorep, &row.point));
        }
    }
    by_budget
        .into_iter()
        .filter(|(_, values)| values.len() >= 2)
        .map(|(n, values)| {
            let m = values.len() as u32;
            let s = harness::summarize(values);
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
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> ProblemRegistry {
        ProblemRegistry::builtin()
    }

    #[test]
    fn defaults_select_everything_with_thirty_macroreps() {
        let config = resolve_config(&registry(), &RunFlags::default()).unwrap();
        assert_eq!(config.experiment_id, "exp-0");
        assert_eq!(config.problems.len(), 8);
        assert_eq!(config.algorithms.len(), 6);
        assert_eq!(config.macroreps, 30);
        assert_eq!(config.r_post, 30);
        assert!(!config.bad_start);
        assert_eq!(config.out, PathBuf::from("out"));
    }

    #[test]
    fn flags_override_config_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        fs::write(
            &path,
            "# comment\nproblems = eoq\nalgorithms = rs,nm\nmacroreps = 5\nseed = 9\ngs.tau = 0.01\n",
        )
        .unwrap();
        let flags = RunFlags {
            config: Some(path),
            macroreps: Some(7),
            ..RunFlags::default()
        };
        let config = resolve_config(&registry(), &flags).unwrap();
        assert_eq!(config.problems, vec!["eoq".to_string()]);
        assert_eq!(config.algorithms, vec![Algorithm::RandomSearch, Algorithm::NelderMead]);
        assert_eq!(config.macroreps, 7);
        assert_eq!(config.seed, 9);
        assert_eq!(config.params.gs.tau, 0.01);
        assert_eq!(config.experiment_id, "exp-9");
    }

    #[test]
    fn unknown_config_keys_are_rejected_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.conf");
        fs::write(&path, "warp_speed = 9\n").unwrap();
        let flags = RunFlags { config: Some(path), ..RunFlags::default() };
        let err = resolve_config(&registry(), &flags).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("warp_speed"), "{err}");
    }

    #[test]
    fn unknown_algorithm_id_error_lists_the_valid_ids() {
        let flags = RunFlags { algorithms: Some("pomdp".into()), ..RunFlags::default() };
        let err = resolve_config(&registry(), &flags).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let text = err.to_string();
        for id in ["rs", "gs", "spsa", "strong", "strong1", "nm"] {
            assert!(text.contains(id), "expected `{id}` in `{text}`");
        }
    }

    #[test]
    fn list_output_names_the_testbed_rows() {
        let text = cmd_list(&registry());
        assert!(text.contains("rosenbrock d=40 known-optimum"), "{text}");
        assert!(text.contains("san d=13 unknown-optimum"), "{text}");
        assert!(!text.contains("pomdp"));
        for alg in Algorithm::ALL {
            assert!(text.contains(alg.id()));
        }
    }

    #[test]
    fn bad_start_demands_a_problem_that_defines_one() {
        let flags = RunFlags {
            problems: Some("ctsnews".into()),
            algorithms: Some("rs".into()),
            macroreps: Some(2),
            bad_start: true,
            out: Some(std::env::temp_dir().join("sobench-badstart-test")),
            ..RunFlags::default()
        };
        let config = resolve_config(&registry(), &flags).unwrap();
        let err = cmd_run(&registry(), &config, Some(1)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("bad_start"), "{err}");
    }

    #[test]
    fn budget_floor_is_enforced_per_problem() {
        let flags = RunFlags {
            problems: Some("rosenbrock".into()),
            algorithms: Some("rs".into()),
            budget: Some(100),
            ..RunFlags::default()
        };
        let config = resolve_config(&registry(), &flags).unwrap();
        let err = cmd_run(&registry(), &config, Some(1)).unwrap_err();
        assert!(err.to_string().contains("budget"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }
}
