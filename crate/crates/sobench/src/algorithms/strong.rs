//! Two-stage trust-region search for noisy objectives.
//!
//! Works internally in the minimization (loss) view. Each iteration fits
//! a local quadratic model (finite-difference gradient; identity
//! curvature in stage I, BFGS in stage II), minimizes it over the trust
//! ball with a dogleg step, and accepts the projected candidate only when
//! the achieved-to-predicted decrease ratio clears a threshold *and* a
//! Welch t-test rejects "no improvement". Stage II begins once the radius
//! has shrunk to a quarter of its initial value.

use super::{fd_gradient, RunContext, Stop};
use crate::space::Point;
use crate::stats::SampleStats;
use nalgebra::{Cholesky, DMatrix, DVector};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Clone, Debug)]
pub struct StrongParams {
    /// Minimum decrease ratio for acceptance.
    pub eta0: f64,
    /// Decrease ratio above which the radius doubles.
    pub eta1: f64,
    /// Radius multiplier on rejection.
    pub gamma_shrink: f64,
    /// Radius multiplier on strong acceptance.
    pub gamma_expand: f64,
    /// Initial radius as a fraction of the domain diameter.
    pub initial_radius_fraction: f64,
    /// Stage II starts once the radius falls to the initial radius
    /// divided by this.
    pub stage_two_divisor: f64,
    /// Radius floor as a fraction of the domain diameter (the ceiling is
    /// the diameter itself).
    pub min_radius_fraction: f64,
    /// One-sided significance level of the acceptance t-test.
    pub test_level: f64,
    /// Lower clamp for finite-difference half-widths.
    pub h_min: f64,
}

impl Default for StrongParams {
    fn default() -> Self {
        StrongParams {
            eta0: 0.01,
            eta1: 0.3,
            gamma_shrink: 0.5,
            gamma_expand: 2.0,
            initial_radius_fraction: 0.1,
            stage_two_divisor: 4.0,
            min_radius_fraction: 1e-6,
            test_level: 0.05,
            h_min: 1e-8,
        }
    }
}

/// Mutable solver state between iterations.
pub struct StrongState {
    pub center: Point,
    /// Replication statistics at the center, in the loss view.
    pub center_loss: SampleStats,
    pub radius: f64,
    pub stage_two: bool,
    stage_two_enabled: bool,
    hessian: DMatrix<f64>,
    prev: Option<(Point, DVector<f64>)>,
    radius_for_stage_two: f64,
    radius_min: f64,
    radius_max: f64,
}

/// What one iteration did; returned for inspection by tests and
/// diagnostics.
#[derive(Clone, Debug)]
pub struct StepReport {
    /// Achieved-to-predicted decrease ratio; `None` when the model
    /// predicted no decrease (automatic rejection).
    pub rho: Option<f64>,
    pub accepted: bool,
    pub radius: f64,
    pub stage_two: bool,
    pub candidate: Point,
}

/// Samples and evaluates the start, sizing the initial trust region from
/// the domain diameter.
pub fn init(
    ctx: &mut RunContext,
    params: &StrongParams,
    stage_two_enabled: bool,
) -> Result<StrongState, Stop> {
    let x1 = ctx.sample_point();
    let stats1 = ctx.evaluate(&x1)?;
    let d = x1.dim();
    let diameter = ctx.domain().diameter_or(1.0);
    let radius = params.initial_radius_fraction * diameter;
    Ok(StrongState {
        center: x1,
        center_loss: stats1.negated(),
        radius,
        stage_two: false,
        stage_two_enabled,
        hessian: DMatrix::identity(d, d),
        prev: None,
        radius_for_stage_two: radius / params.stage_two_divisor,
        radius_min: params.min_radius_fraction * diameter,
        radius_max: diameter,
    })
}

/// One trust-region iteration: model, dogleg candidate, ratio test plus
/// t-test, radius update, stage check.
pub fn iterate(
    state: &mut StrongState,
    ctx: &mut RunContext,
    params: &StrongParams,
) -> Result<StepReport, Stop> {
    let d = state.center.dim();
    let h: Vec<f64> = (0..d)
        .map(|j| {
            let half_width = ctx.domain().width_or(j, f64::INFINITY) / 2.0;
            (state.radius / 2.0).min(half_width).max(params.h_min)
        })
        .collect();
    let g_max = fd_gradient(ctx, &state.center, &h)?;
    let gradient = DVector::from_iterator(d, g_max.iter().map(|v| -v));

    if state.stage_two {
        if let Some((prev_center, prev_gradient)) = &state.prev {
            let s = DVector::from_iterator(d, (0..d).map(|j| state.center[j] - prev_center[j]));
            let y = &gradient - prev_gradient;
            let sy = s.dot(&y);
            // Skip the curvature update on degenerate secant pairs.
            if sy > 1e-10 {
                let hs = &state.hessian * &s;
                let shs = s.dot(&hs);
                if shs > 0.0 {
                    state.hessian -= &hs * hs.transpose() / shs;
                    state.hessian += &y * y.transpose() / sy;
                }
            }
        }
    } else {
        state.hessian = DMatrix::identity(d, d);
    }
    state.prev = Some((state.center.clone(), gradient.clone()));

    let step = dogleg(&gradient, &state.hessian, state.radius);
    let raw: Vec<f64> = (0..d).map(|j| state.center[j] + step[j]).collect();
    let candidate = ctx.propose(&state.center, raw)?;
    let candidate_loss = ctx.evaluate(&candidate)?.negated();

    // The model is judged at the realized (projected) step.
    let realized = DVector::from_iterator(d, (0..d).map(|j| candidate[j] - state.center[j]));
    let predicted_decrease =
        -(gradient.dot(&realized) + 0.5 * realized.dot(&(&state.hessian * &realized)));

    let mut rho = None;
    let mut accepted = false;
    if predicted_decrease > 0.0 {
        let ratio = (state.center_loss.mean - candidate_loss.mean) / predicted_decrease;
        rho = Some(ratio);
        accepted = ratio >= params.eta0
            && welch_rejects_no_improvement(&state.center_loss, &candidate_loss, params.test_level);
    }

    state.radius = if accepted && rho.is_some_and(|x| x >= params.eta1) {
        (state.radius * params.gamma_expand).min(state.radius_max)
    } else if accepted {
        state.radius
    } else {
        (state.radius * params.gamma_shrink).max(state.radius_min)
    };
    if accepted {
        state.center = candidate.clone();
        state.center_loss = candidate_loss;
    }
    state.stage_two = state.stage_two_enabled && state.radius <= state.radius_for_stage_two;

    Ok(StepReport { rho, accepted, radius: state.radius, stage_two: state.stage_two, candidate })
}

pub(crate) fn drive(ctx: &mut RunContext, params: &StrongParams, stage_two_enabled: bool) {
    let mut state = match init(ctx, params, stage_two_enabled) {
        Ok(s) => s,
        Err(_) => return,
    };
    while iterate(&mut state, ctx, params).is_ok() {}
}

/// One-sided Welch t-test of "the candidate is no better than the
/// current center" (loss view: improvement means a smaller mean). With
/// zero variance on both sides the comparison is deterministic.
pub fn welch_rejects_no_improvement(
    current: &SampleStats,
    candidate: &SampleStats,
    level: f64,
) -> bool {
    let n1 = f64::from(current.count);
    let n2 = f64::from(candidate.count);
    let part1 = current.variance / n1;
    let part2 = candidate.variance / n2;
    let se2 = part1 + part2;
    if se2 <= 0.0 {
        return candidate.mean < current.mean;
    }
    let t = (current.mean - candidate.mean) / se2.sqrt();
    let mut df_den = 0.0;
    if part1 > 0.0 && n1 > 1.0 {
        df_den += part1 * part1 / (n1 - 1.0);
    }
    if part2 > 0.0 && n2 > 1.0 {
        df_den += part2 * part2 / (n2 - 1.0);
    }
    if df_den <= 0.0 {
        return candidate.mean < current.mean;
    }
    let df = se2 * se2 / df_den;
    let dist = StudentsT::new(0.0, 1.0, df).expect("Welch degrees of freedom are positive");
    1.0 - dist.cdf(t) < level
}

/// Approximate minimizer of the quadratic model `g'p + p'Hp/2` over the
/// ball of the given radius: full Newton step when it fits, otherwise the
/// classic dogleg path, with a steepest-descent fallback for non-convex
/// models.
fn dogleg(g: &DVector<f64>, h: &DMatrix<f64>, radius: f64) -> DVector<f64> {
    let d = g.len();
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return DVector::zeros(d);
    }
    if let Some(chol) = Cholesky::new(h.clone()) {
        let newton = chol.solve(&(-g));
        if newton.norm() <= radius {
            return newton;
        }
        let ghg = g.dot(&(h * g));
        if ghg > 0.0 {
            let cauchy = g * (-(g.dot(g)) / ghg);
            if cauchy.norm() >= radius {
                return g * (-(radius / g_norm));
            }
            // Walk from the Cauchy point toward Newton until the boundary.
            let diff = &newton - &cauchy;
            let a = diff.dot(&diff);
            let b = 2.0 * cauchy.dot(&diff);
            let c = cauchy.dot(&cauchy) - radius * radius;
            let t = (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
            return &cauchy + diff * t;
        }
    }
    // Non-positive-definite model: steepest descent, capped at the
    // boundary and at the one-dimensional minimizer when it exists.
    let ghg = g.dot(&(h * g));
    let t = if ghg > 0.0 { (g.dot(g) / ghg).min(radius / g_norm) } else { radius / g_norm };
    g * (-t)
}
