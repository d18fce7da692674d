//! On-disk formats: trajectory and curve CSVs.
//!
//! Every file opens with a provenance line
//! `# sobench <kind> experiment_id=<id> seed=<seed>` so any output can be
//! traced to the experiment and seed that produced it, and so the report
//! command can refuse inputs of the wrong kind (reports are not
//! re-reportable). Floats are written in Rust's shortest round-trip form,
//! which makes file bytes a deterministic function of the computed values
//! and lets readers recover them bit-exactly.

use crate::harness::CurvePoint;
use crate::space::Point;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Trajectories,
    Curves,
}

impl FileKind {
    pub fn label(self) -> &'static str {
        match self {
            FileKind::Trajectories => "trajectories",
            FileKind::Curves => "curves",
        }
    }

    fn from_label(label: &str) -> Option<FileKind> {
        match label {
            "trajectories" => Some(FileKind::Trajectories),
            "curves" => Some(FileKind::Curves),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
    #[error("{path} is a {found} file, expected {expected}")]
    WrongKind { path: String, expected: &'static str, found: &'static str },
}

/// The identity stamped into every output file, plus any extra key=value
/// context the kind carries (trajectory files add budget, r, r_post so
/// reports can reconstruct the experiment).
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub kind: FileKind,
    pub experiment_id: String,
    pub seed: u64,
    pub extra: Vec<(String, String)>,
}

impl Provenance {
    fn line(&self) -> String {
        let mut line = format!(
            "# sobench {} experiment_id={} seed={}",
            self.kind.label(),
            self.experiment_id,
            self.seed
        );
        for (k, v) in &self.extra {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }

    fn parse(path: &str, line: &str) -> Result<Provenance, FileError> {
        let bail = |message: &str| FileError::Parse {
            path: path.to_string(),
            line: 1,
            message: message.to_string(),
        };
        let rest = line
            .strip_prefix("# sobench ")
            .ok_or_else(|| bail("missing provenance line (expected `# sobench ...`)"))?;
        let mut parts = rest.split_whitespace();
        let kind = parts
            .next()
            .and_then(FileKind::from_label)
            .ok_or_else(|| bail("unknown file kind in provenance line"))?;
        let mut experiment_id = None;
        let mut seed = None;
        let mut extra = Vec::new();
        for part in parts {
            match part.split_once('=') {
                Some(("experiment_id", v)) => experiment_id = Some(v.to_string()),
                Some(("seed", v)) => {
                    seed = Some(v.parse::<u64>().map_err(|_| bail("seed is not an integer"))?);
                }
                Some((k, v)) => extra.push((k.to_string(), v.to_string())),
                None => {}
            }
        }
        Ok(Provenance {
            kind,
            experiment_id: experiment_id.ok_or_else(|| bail("provenance lacks experiment_id"))?,
            seed: seed.ok_or_else(|| bail("provenance lacks seed"))?,
            extra,
        })
    }

    fn extra_u64(&self, path: &str, key: &str) -> Result<u64, FileError> {
        self.extra
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| v.parse::<u64>().ok())
            .ok_or_else(|| FileError::Parse {
                path: path.to_string(),
                line: 1,
                message: format!("provenance lacks {key}"),
            })
    }
}

/// One incumbent-change row of a trajectory file.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub experiment_id: String,
    pub problem: String,
    pub algorithm: String,
    pub macrorep: u32,
    pub n: u64,
    pub point: Point,
    pub sample_mean: f64,
    pub failed: bool,
}

const TRAJECTORY_HEADER: &str =
    "experiment_id,problem,algorithm,macrorep,n,coords,sample_mean,flag";

/// Experiment context a trajectory file carries in its provenance line.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryMeta {
    pub experiment_id: String,
    pub seed: u64,
    pub budget: u64,
    pub r: u32,
    pub r_post: u32,
}

/// A parsed trajectory file.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFile {
    pub meta: TrajectoryMeta,
    pub rows: Vec<TrajectoryRow>,
}

pub fn write_trajectories(
    path: &Path,
    meta: &TrajectoryMeta,
    rows: &[TrajectoryRow],
) -> Result<(), FileError> {
    let provenance = Provenance {
        kind: FileKind::Trajectories,
        experiment_id: meta.experiment_id.clone(),
        seed: meta.seed,
        extra: vec![
            ("budget".to_string(), meta.budget.to_string()),
            ("r".to_string(), meta.r.to_string()),
            ("r_post".to_string(), meta.r_post.to_string()),
        ],
    };
    let body = rows.iter().map(|row| {
        let coords = row
            .point
            .coords()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{},{},{},{},{}",
            row.experiment_id,
            row.problem,
            row.algorithm,
            row.macrorep,
            row.n,
            coords,
            row.sample_mean,
            if row.failed { "failed" } else { "ok" }
        )
    });
    write_lines(path, &provenance, TRAJECTORY_HEADER, body)
}

pub fn read_trajectories(path: &Path) -> Result<TrajectoryFile, FileError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: shown.clone(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| FileError::Parse {
        path: shown.clone(),
        line: 1,
        message: "empty file".to_string(),
    })?;
    let provenance = Provenance::parse(&shown, first)?;
    if provenance.kind != FileKind::Trajectories {
        return Err(FileError::WrongKind {
            path: shown,
            expected: FileKind::Trajectories.label(),
            found: provenance.kind.label(),
        });
    }
    let (_, header) = lines.next().ok_or_else(|| FileError::Parse {
        path: shown.clone(),
        line: 2,
        message: "missing header".to_string(),
    })?;
    if header != TRAJECTORY_HEADER {
        return Err(FileError::Parse {
            path: shown,
            line: 2,
            message: format!("unexpected header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        if raw.is_empty() {
            continue;
        }
        rows.push(parse_trajectory_row(&shown, idx + 1, raw)?);
    }
    let meta = TrajectoryMeta {
        budget: provenance.extra_u64(&shown, "budget")?,
        r: provenance.extra_u64(&shown, "r")? as u32,
        r_post: provenance.extra_u64(&shown, "r_post")? as u32,
        experiment_id: provenance.experiment_id,
        seed: provenance.seed,
    };
    Ok(TrajectoryFile { meta, rows })
}

fn parse_trajectory_row(path: &str, line: usize, raw: &str) -> Result<TrajectoryRow, FileError> {
    let bail = |message: String| FileError::Parse { path: path.to_string(), line, message };
    let fields: Vec<&str> = raw.split(',').collect();
    if fields.len() != 8 {
        return Err(bail(format!("expected 8 fields, got {}", fields.len())));
    }
    let coords = fields[5]
        .split(';')
        .map(|c| c.parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|_| bail(format!("bad coordinates `{}`", fields[5])))?;
    let point =
        Point::try_new(coords).ok_or_else(|| bail("non-finite coordinates".to_string()))?;
    Ok(TrajectoryRow {
        experiment_id: fields[0].to_string(),
        problem: fields[1].to_string(),
        algorithm: fields[2].to_string(),
        macrorep: fields[3].parse().map_err(|_| bail(format!("bad macrorep `{}`", fields[3])))?,
        n: fields[4].parse().map_err(|_| bail(format!("bad n `{}`", fields[4])))?,
        point,
        sample_mean: fields[6]
            .parse()
            .map_err(|_| bail(format!("bad sample_mean `{}`", fields[6])))?,
        failed: match fields[7] {
            "ok" => false,
            "failed" => true,
            other => return Err(bail(format!("bad flag `{other}`"))),
        },
    })
}

/// One aggregated checkpoint row of a curve file.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub problem: String,
    pub algorithm: String,
    pub point: CurvePoint,
}

const CURVE_HEADER: &str = "problem,algorithm,n,mean,ci_half_width,q25,q50,q75,m";

pub fn write_curves(
    path: &Path,
    experiment_id: &str,
    seed: u64,
    rows: &[CurveRow],
) -> Result<(), FileError> {
    let provenance = Provenance {
        kind: FileKind::Curves,
        experiment_id: experiment_id.to_string(),
        seed,
        extra: Vec::new(),
    };
    let body = rows.iter().map(|row| {
        let p = &row.point;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            row.problem, row.algorithm, p.n, p.mean, p.ci_half_width, p.q25, p.q50, p.q75, p.m
        )
    });
    write_lines(path, &provenance, CURVE_HEADER, body)
}

/// One point of the terminal-budget empirical distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfRow {
    pub problem: String,
    pub algorithm: String,
    /// Post-processed true-value estimate of one macroreplication's final
    /// incumbent.
    pub z: f64,
    /// Fraction of macroreplications at or below `z`.
    pub fraction: f64,
}

const CDF_HEADER: &str = "problem,algorithm,z,fraction";

pub fn write_terminal_cdf(
    path: &Path,
    experiment_id: &str,
    seed: u64,
    rows: &[CdfRow],
) -> Result<(), FileError> {
    let provenance = Provenance {
        kind: FileKind::Curves,
        experiment_id: experiment_id.to_string(),
        seed,
        extra: Vec::new(),
    };
    let body = rows
        .iter()
        .map(|row| format!("{},{},{},{}", row.problem, row.algorithm, row.z, row.fraction));
    write_lines(path, &provenance, CDF_HEADER, body)
}

fn write_lines(
    path: &Path,
    provenance: &Provenance,
    header: &str,
    body: impl Iterator<Item = String>,
) -> Result<(), FileError> {
    let shown = path.display().to_string();
    let io_err = |source| FileError::Io { path: shown.clone(), source };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let file = fs::File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<fs::File>, line: &str| -> io::Result<()> {
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")
    };
    write(&mut out, &provenance.line()).map_err(io_err)?;
    write(&mut out, header).map_err(io_err)?;
    for line in body {
        write(&mut out, &line).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}
