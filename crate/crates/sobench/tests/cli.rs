//! End-to-end tests of the `sobench` binary: exit codes, output layout,
//! reproducibility across reruns and thread counts, and the report
//! pipeline's input validation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sobench"))
}

fn run_args(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sobench")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Runs a small eoq experiment into `root` and returns the experiment dir.
fn small_run(root: &Path, extra: &[&str]) -> PathBuf {
    let out = root.to_str().unwrap();
    let mut args = vec![
        "run",
        "--problems",
        "eoq",
        "--algorithms",
        "rs,nm",
        "--macroreps",
        "2",
        "--budget",
        "1200",
        "--seed",
        "7",
        "--out",
        out,
    ];
    args.extend_from_slice(extra);
    assert_ok(&run_args(&args));
    root.join("exp-7")
}

#[test]
fn list_names_every_testbed_problem_and_algorithm() {
    let out = run_args(&["list"]);
    assert_ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rosenbrock d=40 known-optimum"), "{text}");
    assert!(text.contains("san d=13 unknown-optimum"), "{text}");
    assert!(!text.contains("pomdp"), "{text}");
    for id in ["ctsnews", "eoq", "facloc", "gg1", "multimodal", "paramest"] {
        assert!(text.contains(id), "missing problem `{id}` in `{text}`");
    }
    for id in ["rs", "gs", "spsa", "strong", "strong1", "nm"] {
        assert!(text.contains(id), "missing algorithm `{id}` in `{text}`");
    }
}

#[test]
fn rerunning_an_experiment_reproduces_every_output_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = small_run(&dir.path().join("a"), &[]);
    let second = small_run(&dir.path().join("b"), &[]);
    for name in ["trajectories/eoq_rs.csv", "trajectories/eoq_nm.csv", "meta"] {
        assert_eq!(
            read(&first.join(name)),
            read(&second.join(name)),
            "{name} differs between identical runs"
        );
    }
}

#[test]
fn thread_count_does_not_change_any_output_byte() {
    let dir = tempfile::tempdir().unwrap();
    let serial = small_run(&dir.path().join("j1"), &["--jobs", "1"]);
    let parallel = small_run(&dir.path().join("j4"), &["--jobs", "4"]);
    for name in ["trajectories/eoq_rs.csv", "trajectories/eoq_nm.csv", "meta"] {
        assert_eq!(
            read(&serial.join(name)),
            read(&parallel.join(name)),
            "{name} differs between --jobs 1 and --jobs 4"
        );
    }
}

#[test]
fn unknown_algorithm_exits_one_and_lists_the_valid_ids() {
    let out = run_args(&["run", "--algorithms", "pomdp"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stderr_of(&out);
    for id in ["rs", "gs", "spsa", "strong", "strong1", "nm"] {
        assert!(text.contains(id), "expected `{id}` in `{text}`");
    }
}

#[test]
fn unknown_problem_exits_one_and_lists_the_registered_ids() {
    let out = run_args(&["run", "--problems", "knapsack"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stderr_of(&out);
    assert!(text.contains("knapsack"), "{text}");
    assert!(text.contains("rosenbrock"), "{text}");
}

#[test]
fn bad_start_fixes_every_macroreplication_to_the_poor_point() {
    let dir = tempfile::tempdir().unwrap();
    let exp = small_run(dir.path(), &["--bad-start"]);
    let text = read(&exp.join("trajectories/eoq_rs.csv"));
    // Each macroreplication's first full evaluation is the initial point.
    let mut seen = 0;
    let mut last_rep = None;
    for line in text.lines().skip(2) {
        let fields: Vec<&str> = line.split(',').collect();
        let rep: u32 = fields[3].parse().unwrap();
        if last_rep != Some(rep) {
            assert_eq!(fields[5], "10", "first point of macrorep {rep}: {line}");
            last_rep = Some(rep);
            seen += 1;
        }
    }
    assert_eq!(seen, 2);
}

#[test]
fn bad_start_on_a_problem_without_one_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_args(&[
        "run",
        "--problems",
        "ctsnews",
        "--algorithms",
        "rs",
        "--macroreps",
        "2",
        "--bad-start",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("bad_start"), "{}", stderr_of(&out));
}

#[test]
fn unknown_config_file_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    fs::write(&conf, "problems=eoq\nwarp_speed=9\n").unwrap();
    let out = run_args(&["run", "--config", conf.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("warp_speed"), "{}", stderr_of(&out));
}

#[test]
fn flags_win_over_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    fs::write(
        &conf,
        "problems=eoq\nalgorithms=rs\nmacroreps=2\nbudget=1200\nseed=3\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = run_args(&[
        "run",
        "--config",
        conf.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = read(&out_dir.join("exp-9/trajectories/eoq_rs.csv"));
    assert!(
        text.starts_with("# sobench trajectories experiment_id=exp-9 seed=9 "),
        "{text}"
    );
}

#[test]
fn report_writes_one_curve_file_per_algorithm_on_a_shared_grid() {
    let dir = tempfile::tempdir().unwrap();
    let exp = small_run(dir.path(), &[]);
    let rs = exp.join("trajectories/eoq_rs.csv");
    let nm = exp.join("trajectories/eoq_nm.csv");
    let out = run_args(&["report", rs.to_str().unwrap(), nm.to_str().unwrap()]);
    assert_ok(&out);

    let grid = |name: &str| -> Vec<String> {
        read(&exp.join("curves").join(name))
            .lines()
            .skip(2)
            .map(|line| line.split(',').nth(2).unwrap().to_string())
            .collect()
    };
    let rs_grid = grid("eoq_rs.csv");
    let nm_grid = grid("eoq_nm.csv");
    assert_eq!(rs_grid, nm_grid, "checkpoint grids differ between algorithms");
    assert_eq!(rs_grid.len(), 100);
    assert_eq!(rs_grid.last().unwrap(), "1200");

    let cdf = read(&exp.join("curves/eoq_terminal_cdf.csv"));
    let cdf_rows: Vec<&str> = cdf.lines().skip(2).collect();
    // Two algorithms times two macroreplications, each reaching fraction 1.
    assert_eq!(cdf_rows.len(), 4);
    assert_eq!(cdf.lines().nth(1), Some("problem,algorithm,z,fraction"));
}

#[test]
fn report_curve_values_are_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let exp = small_run(dir.path(), &[]);
    let rs = exp.join("trajectories/eoq_rs.csv");
    let out_a = dir.path().join("curves-a");
    let out_b = dir.path().join("curves-b");
    for out in [&out_a, &out_b] {
        assert_ok(&run_args(&["report", rs.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    }
    assert_eq!(read(&out_a.join("eoq_rs.csv")), read(&out_b.join("eoq_rs.csv")));
}

#[test]
fn report_rejects_inputs_from_different_problems() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap().to_string();
    assert_ok(&run_args(&[
        "run",
        "--problems",
        "eoq,gg1",
        "--algorithms",
        "rs",
        "--macroreps",
        "2",
        "--budget",
        "600",
        "--seed",
        "1",
        "--out",
        &root,
    ]));
    let exp = dir.path().join("exp-1");
    let eoq = exp.join("trajectories/eoq_rs.csv");
    let gg1 = exp.join("trajectories/gg1_rs.csv");
    let out = run_args(&["report", eoq.to_str().unwrap(), gg1.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stderr_of(&out);
    assert!(text.contains("eoq") && text.contains("gg1"), "{text}");
}

#[test]
fn reporting_a_report_is_rejected_as_terminal_output() {
    let dir = tempfile::tempdir().unwrap();
    let exp = small_run(dir.path(), &[]);
    let rs = exp.join("trajectories/eoq_rs.csv");
    assert_ok(&run_args(&["report", rs.to_str().unwrap()]));
    let curve = exp.join("curves/eoq_rs.csv");
    let out = run_args(&["report", curve.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stderr_of(&out);
    assert!(text.contains("curves file"), "{text}");
}

#[test]
fn every_output_file_embeds_experiment_id_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let exp = small_run(dir.path(), &[]);
    assert_ok(&run_args(&["report", exp.join("trajectories/eoq_rs.csv").to_str().unwrap()]));
    for name in
        ["trajectories/eoq_rs.csv", "trajectories/eoq_nm.csv", "curves/eoq_rs.csv", "curves/eoq_terminal_cdf.csv"]
    {
        let text = read(&exp.join(name));
        assert!(
            text.lines().next().unwrap().contains("experiment_id=exp-7 seed=7"),
            "{name} lacks provenance: {}",
            text.lines().next().unwrap()
        );
    }
    let meta = read(&exp.join("meta"));
    assert!(meta.contains("experiment_id=exp-7\n") && meta.contains("seed=7\n"), "{meta}");
}

#[test]
fn spsa_sweep_rows_are_written_and_reported_at_swept_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_str().unwrap().to_string();
    assert_ok(&run_args(&[
        "run",
        "--problems",
        "ctsnews",
        "--algorithms",
        "spsa",
        "--macroreps",
        "2",
        "--budget",
        "600",
        "--seed",
        "5",
        "--out",
        &root,
    ]));
    let exp = dir.path().join("exp-5");
    let sweep = exp.join("trajectories/ctsnews_spsa_sweep.csv");
    let text = read(&sweep);
    assert!(text.lines().skip(2).all(|line| line.split(',').nth(2) == Some("spsa_sweep")));
    // The largest swept budget is the terminal budget itself.
    assert!(text.lines().any(|line| line.split(',').nth(4) == Some("600")), "{text}");
    let meta = read(&exp.join("meta"));
    assert!(meta.contains("ctsnews.spsa_sweep_cost="), "{meta}");

    let spsa = exp.join("trajectories/ctsnews_spsa.csv");
    let out = run_args(&["report", spsa.to_str().unwrap(), sweep.to_str().unwrap()]);
    assert_ok(&out);
    let curve = read(&exp.join("curves/ctsnews_spsa_sweep.csv"));
    for line in curve.lines().skip(2) {
        assert_eq!(line.split(',').last(), Some("2"), "sweep checkpoint missing a macrorep: {line}");
    }
    // Only genuine trajectories feed the terminal cdf, two rows here.
    let cdf = read(&exp.join("curves/ctsnews_terminal_cdf.csv"));
    assert_eq!(cdf.lines().skip(2).count(), 2);
    assert!(cdf.lines().skip(2).all(|line| line.starts_with("ctsnews,spsa,")), "{cdf}");
}

#[test]
fn help_and_version_exit_zero_while_bad_flags_exit_one() {
    let help = run_args(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("run"));
    let version = run_args(&["--version"]);
    assert_eq!(version.status.code(), Some(0));
    let bad = run_args(&["run", "--no-such-flag"]);
    assert_eq!(bad.status.code(), Some(1));
    let missing = run_args(&["frobnicate"]);
    assert_eq!(missing.status.code(), Some(1));
}
