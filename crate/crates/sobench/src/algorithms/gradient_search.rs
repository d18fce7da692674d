//! Finite-difference gradient search with backtracking line search and
//! restart-on-stationarity.
//!
//! Each iteration estimates the maximization-view gradient by central
//! differences (projected probes, realized-offset divisor), then walks the
//! gradient direction with step factors 2, 1, 0.5, ... down to 1e-4,
//! accepting the first strict improvement in sample mean. A failed line
//! search restarts from a fresh random point. A successful step that looks
//! stationary (small improvement, small move, small gradient, and gradient
//! norm below the noise variance) also restarts.

use super::{fd_gradient, l2_norm, RunContext, Stop};
use crate::space::{Domain, Point};
use crate::stats::SampleStats;

#[derive(Clone, Debug)]
pub struct GsParams {
    /// Stationarity scale for the restart test.
    pub tau: f64,
    /// Smallest line-search step factor tried.
    pub c_min: f64,
    /// Lower clamp for finite-difference half-widths.
    pub h_min: f64,
}

impl Default for GsParams {
    fn default() -> Self {
        GsParams { tau: 1e-4, c_min: 1e-4, h_min: 1e-8 }
    }
}

/// Common first-iteration half-width: one third of the smallest
/// coordinate distance between the start and a second sampled point.
/// Zero only when the two points tie in some coordinate (the caller then
/// clamps it up to the floor).
pub fn first_bandwidth(x1: &Point, x_prime: &Point) -> f64 {
    (0..x1.dim())
        .map(|j| (x1[j] - x_prime[j]).abs() / 3.0)
        .fold(f64::INFINITY, f64::min)
}

/// Per-coordinate half-widths for all iterations after the first:
/// `sqrt(Var(y(x1))) / (sqrt(2 r) |g1_j|)`, clamped to
/// `[h_min, width_j / 2]`. A zero gradient coordinate gets the upper
/// clamp; zero variance degenerates to the floor.
pub fn later_bandwidths(
    variance_x1: f64,
    r: u32,
    g1: &[f64],
    domain: &Domain,
    h_min: f64,
) -> Vec<f64> {
    g1.iter()
        .enumerate()
        .map(|(j, gj)| {
            let half_width = domain.width_or(j, 2.0) / 2.0;
            if *gj == 0.0 {
                half_width
            } else {
                let h = variance_x1.sqrt() / ((2.0 * f64::from(r)).sqrt() * gj.abs());
                h.clamp(h_min, half_width)
            }
        })
        .collect()
}

/// Relative-scale stationarity test in the minimization view; all four
/// conditions must hold for a restart. `variance_k` is the sample variance
/// of the replications at the pre-step point.
pub fn restart_check(
    y_k: f64,
    y_k1: f64,
    x_k: &Point,
    x_k1: &Point,
    gradient: &[f64],
    variance_k: f64,
    tau: f64,
) -> bool {
    let g_norm = l2_norm(gradient);
    let small_improvement = y_k - y_k1 < tau * (1.0 + y_k1.abs());
    let small_move = x_k.dist(x_k1) < tau.sqrt() * (1.0 + l2_norm(x_k1.coords()));
    let small_gradient = g_norm < tau.cbrt() * (1.0 + y_k1.abs());
    let gradient_below_noise = g_norm < variance_k;
    small_improvement && small_move && small_gradient && gradient_below_noise
}

pub(crate) fn drive(ctx: &mut RunContext, params: &GsParams) {
    let _ = run_to_exhaustion(ctx, params);
}

fn run_to_exhaustion(ctx: &mut RunContext, params: &GsParams) -> Result<(), Stop> {
    let x1 = ctx.sample_point();
    let x_prime = ctx.sample_point();
    let stats1 = ctx.evaluate(&x1)?;

    let d = x1.dim();
    let h_first = {
        let common = first_bandwidth(&x1, &x_prime);
        (0..d)
            .map(|j| {
                let half_width = ctx.domain().width_or(j, 2.0) / 2.0;
                common.clamp(params.h_min, half_width)
            })
            .collect::<Vec<f64>>()
    };
    let g1 = fd_gradient(ctx, &x1, &h_first)?;
    // Bandwidths are calibrated once, at the start, and kept for the whole
    // run (restarts included).
    let h = later_bandwidths(stats1.variance, ctx.r(), &g1, ctx.domain(), params.h_min);

    let mut x = x1;
    let mut stats = stats1;
    let mut gradient = g1;
    loop {
        match line_search(ctx, &x, stats.mean, &gradient, params)? {
            Some((x_next, stats_next)) => {
                // The test runs in the minimization view: negate the
                // maximization-view means.
                if restart_check(
                    -stats.mean,
                    -stats_next.mean,
                    &x,
                    &x_next,
                    &gradient,
                    stats.variance,
                    params.tau,
                ) {
                    let (xr, sr) = restart(ctx)?;
                    x = xr;
                    stats = sr;
                } else {
                    x = x_next;
                    stats = stats_next;
                }
            }
            None => {
                let (xr, sr) = restart(ctx)?;
                x = xr;
                stats = sr;
            }
        }
        gradient = fd_gradient(ctx, &x, &h)?;
    }
}

fn restart(ctx: &mut RunContext) -> Result<(Point, SampleStats), Stop> {
    let x = ctx.sample_point();
    let stats = ctx.evaluate(&x)?;
    Ok((x, stats))
}

/// Backtracking search along the gradient: factors 2, 1, 0.5, ... down to
/// `c_min`, first strict improvement wins. `None` when every trial fails.
fn line_search(
    ctx: &mut RunContext,
    x: &Point,
    mean_at_x: f64,
    gradient: &[f64],
    params: &GsParams,
) -> Result<Option<(Point, SampleStats)>, Stop> {
    let mut c = 2.0;
    while c >= params.c_min {
        let raw: Vec<f64> = x
            .coords()
            .iter()
            .zip(gradient)
            .map(|(xi, gi)| xi + c * gi)
            .collect();
        let candidate = ctx.propose(x, raw)?;
        let stats = ctx.evaluate(&candidate)?;
        if stats.mean > mean_at_x {
            return Ok(Some((candidate, stats)));
        }
        c /= 2.0;
    }
    Ok(None)
}
