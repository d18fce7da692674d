//! Nelder-Mead simplex search adapted to noise: every vertex value is an
//! r-replication sample mean, comparisons use the maximization view, and
//! a shrink re-evaluates the surviving best vertex with fresh replications
//! so a lucky draw cannot anchor the simplex forever.

use super::{RunContext, Stop};
use crate::space::Point;
use crate::stats::SampleStats;

#[derive(Clone, Debug)]
pub struct NmParams {
    /// Reflection coefficient.
    pub reflect: f64,
    /// Expansion coefficient (applied to the centroid-to-worst offset).
    pub expand: f64,
    /// Contraction coefficient.
    pub contract: f64,
    /// Shrink factor toward the best vertex.
    pub shrink: f64,
    /// Initial simplex edge as a fraction of each coordinate width
    /// (unbounded coordinates use an absolute offset of one).
    pub initial_offset_fraction: f64,
}

impl Default for NmParams {
    fn default() -> Self {
        NmParams {
            reflect: 1.0,
            expand: 2.0,
            contract: 0.5,
            shrink: 0.9,
            initial_offset_fraction: 0.05,
        }
    }
}

/// A simplex vertex: its point, maximization-view sample statistics, and
/// an age used to break value ties in favor of the older vertex.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub point: Point,
    pub stats: SampleStats,
    pub age: u64,
}

/// The working simplex; always `d + 1` vertices once initialized.
#[derive(Clone, Debug, Default)]
pub struct Simplex {
    vertices: Vec<Vertex>,
    next_age: u64,
}

impl Simplex {
    pub fn new() -> Self {
        Simplex::default()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Evaluates `point` and appends it as a new (youngest) vertex.
    pub fn push_evaluated(&mut self, ctx: &mut RunContext, point: Point) -> Result<(), Stop> {
        let stats = ctx.evaluate(&point)?;
        let age = self.next_age;
        self.next_age += 1;
        self.vertices.push(Vertex { point, stats, age });
        Ok(())
    }

    fn replace(&mut self, index: usize, point: Point, stats: SampleStats) {
        let age = self.next_age;
        self.next_age += 1;
        self.vertices[index] = Vertex { point, stats, age };
    }

    /// Index of the highest maximization-view mean; ties go to the older
    /// vertex.
    pub fn best_index(&self) -> usize {
        self.extreme_index(|cand, cur| cand > cur)
    }

    /// Index of the lowest maximization-view mean; ties go to the older
    /// vertex.
    pub fn worst_index(&self) -> usize {
        self.extreme_index(|cand, cur| cand < cur)
    }

    fn extreme_index(&self, prefer: impl Fn(f64, f64) -> bool) -> usize {
        assert!(!self.vertices.is_empty(), "simplex has no vertices");
        let mut idx = 0;
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let cur = &self.vertices[idx];
            if prefer(v.stats.mean, cur.stats.mean)
                || (v.stats.mean == cur.stats.mean && v.age < cur.age)
            {
                idx = i;
            }
        }
        idx
    }

    fn centroid_excluding(&self, index: usize) -> Vec<f64> {
        let d = self.vertices[0].point.dim();
        let mut centroid = vec![0.0; d];
        let mut count = 0.0;
        for (i, v) in self.vertices.iter().enumerate() {
            if i == index {
                continue;
            }
            for j in 0..d {
                centroid[j] += v.point[j];
            }
            count += 1.0;
        }
        for c in &mut centroid {
            *c /= count;
        }
        centroid
    }
}

/// Builds the start simplex: the initial point plus one vertex per
/// coordinate offset by a fraction of that coordinate's width, projected;
/// if projection collapses the offset onto the start (a boundary start),
/// the offset flips sign.
pub fn initial_simplex(ctx: &mut RunContext, params: &NmParams) -> Result<Simplex, Stop> {
    let x1 = ctx.sample_point();
    let mut simplex = Simplex::new();
    simplex.push_evaluated(ctx, x1.clone())?;
    for j in 0..x1.dim() {
        let width = ctx.domain().width_or(j, f64::INFINITY);
        let delta = if width.is_finite() { params.initial_offset_fraction * width } else { 1.0 };
        let mut raw = x1.to_vec();
        raw[j] += delta;
        let mut vertex = ctx.propose(&x1, raw)?;
        if vertex[j] == x1[j] {
            let mut flipped = x1.to_vec();
            flipped[j] -= delta;
            vertex = ctx.propose(&x1, flipped)?;
        }
        simplex.push_evaluated(ctx, vertex)?;
    }
    Ok(simplex)
}

/// One simplex iteration: reflect the worst vertex through the remaining
/// centroid, expanding on a new best, contracting (outside or inside)
/// when the reflection trails every survivor, and shrinking toward the
/// best vertex when even the contraction trails them all.
pub fn iterate(simplex: &mut Simplex, ctx: &mut RunContext, params: &NmParams) -> Result<(), Stop> {
    let worst = simplex.worst_index();
    let worst_point = simplex.vertices[worst].point.clone();
    let worst_mean = simplex.vertices[worst].stats.mean;
    let best_mean = simplex.vertices[simplex.best_index()].stats.mean;
    let remaining_best_floor = simplex
        .vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != worst)
        .map(|(_, v)| v.stats.mean)
        .fold(f64::INFINITY, f64::min);
    let centroid = simplex.centroid_excluding(worst);
    let d = worst_point.dim();

    let reflect_raw: Vec<f64> = (0..d)
        .map(|j| centroid[j] + params.reflect * (centroid[j] - worst_point[j]))
        .collect();
    let reflected = ctx.propose(&worst_point, reflect_raw)?;
    let reflected_stats = ctx.evaluate(&reflected)?;

    if reflected_stats.mean > best_mean {
        let expand_raw: Vec<f64> = (0..d)
            .map(|j| centroid[j] + params.expand * (centroid[j] - worst_point[j]))
            .collect();
        let expanded = ctx.propose(&worst_point, expand_raw)?;
        let expanded_stats = ctx.evaluate(&expanded)?;
        if expanded_stats.mean > reflected_stats.mean {
            simplex.replace(worst, expanded, expanded_stats);
        } else {
            simplex.replace(worst, reflected, reflected_stats);
        }
        return Ok(());
    }

    if reflected_stats.mean < remaining_best_floor {
        // Outside contraction when the reflection at least beat the old
        // worst, inside (toward the old worst) otherwise.
        let toward: &Point = if reflected_stats.mean > worst_mean { &reflected } else { &worst_point };
        let contract_raw: Vec<f64> = (0..d)
            .map(|j| centroid[j] + params.contract * (toward[j] - centroid[j]))
            .collect();
        let contracted = ctx.propose(&worst_point, contract_raw)?;
        let contracted_stats = ctx.evaluate(&contracted)?;
        if contracted_stats.mean < remaining_best_floor {
            shrink(simplex, ctx, params)?;
        } else {
            simplex.replace(worst, contracted, contracted_stats);
        }
        return Ok(());
    }

    simplex.replace(worst, reflected, reflected_stats);
    Ok(())
}

/// Pulls every non-best vertex toward the best by the shrink factor and
/// re-evaluates them, then re-evaluates the unchanged best vertex with
/// fresh replications (keeping its age).
fn shrink(simplex: &mut Simplex, ctx: &mut RunContext, params: &NmParams) -> Result<(), Stop> {
    let best = simplex.best_index();
    let best_point = simplex.vertices[best].point.clone();
    let d = best_point.dim();
    for i in 0..simplex.len() {
        if i == best {
            continue;
        }
        let old = simplex.vertices[i].point.clone();
        let raw: Vec<f64> = (0..d)
            .map(|j| best_point[j] + params.shrink * (old[j] - best_point[j]))
            .collect();
        let moved = ctx.propose(&old, raw)?;
        let stats = ctx.evaluate(&moved)?;
        simplex.replace(i, moved, stats);
    }
    let fresh = ctx.evaluate(&best_point)?;
    simplex.vertices[best].stats = fresh;
    Ok(())
}

pub(crate) fn drive(ctx: &mut RunContext, params: &NmParams) {
    let mut simplex = match initial_simplex(ctx, params) {
        Ok(s) => s,
        Err(_) => return,
    };
    while iterate(&mut simplex, ctx, params).is_ok() {}
}
