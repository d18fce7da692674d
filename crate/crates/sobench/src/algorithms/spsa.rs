//! Simultaneous-perturbation stochastic approximation.
//!
//! One gradient estimate costs two oracle evaluations regardless of
//! dimension: both probes `x +- c_k * delta` (delta a Rademacher vector)
//! are projected into the domain and evaluated with `r` replications.
//! Gains follow the standard calibration: the iteration count comes from
//! the budget, `c` from the noise level at the start, and `a` from
//! targeting a first step of 5% of the domain diameter.

use super::{l2_norm, RunContext, Stop};
use crate::space::Point;

#[derive(Clone, Debug)]
pub struct SpsaParams {
    /// Step-size decay exponent (`a_k = a / (k + A + 1)^alpha`).
    pub alpha: f64,
    /// Probe-width decay exponent (`c_k = c / (k + 1)^gamma`).
    pub gamma: f64,
    /// First-step target as a fraction of the domain diameter.
    pub step_fraction: f64,
    /// Floor for `c` as a fraction of the domain width.
    pub c_floor_fraction: f64,
}

impl Default for SpsaParams {
    fn default() -> Self {
        SpsaParams { alpha: 0.602, gamma: 0.101, step_fraction: 0.05, c_floor_fraction: 1e-4 }
    }
}

/// Budget-driven gain constants fixed before the first iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GainPlan {
    /// Number of iterations `K`: the budget left after the calibration
    /// evaluation of the start, divided by the 2r cost of an iteration.
    pub iterations: u64,
    /// Stability offset `A = 0.1 K`.
    pub stability_offset: f64,
    /// Base probe half-width `c`.
    pub c: f64,
}

/// Plans the run: `K = floor((budget - r) / (2 r))`, `A = 0.1 K`, and
/// `c = max(noise_std / sqrt(r), c_floor_fraction * width)`. The noise
/// standard deviation is measured at the start, so a noiseless oracle
/// falls back to the width floor.
pub fn plan_gains(
    budget: u64,
    r: u32,
    noise_std: f64,
    domain_width: f64,
    c_floor_fraction: f64,
) -> GainPlan {
    let r64 = u64::from(r);
    let iterations = budget.saturating_sub(r64) / (2 * r64);
    GainPlan {
        iterations,
        stability_offset: 0.1 * iterations as f64,
        c: (noise_std / f64::from(r).sqrt()).max(c_floor_fraction * domain_width),
    }
}

/// Solves the first-step condition `a / (A + 1)^alpha * |g0| =
/// step_fraction * diameter` for `a`; with a zero first gradient the
/// norm drops out and the step target alone sets the scale.
pub fn step_scale(
    g0_norm: f64,
    stability_offset: f64,
    alpha: f64,
    diameter: f64,
    step_fraction: f64,
) -> f64 {
    let scale = step_fraction * diameter * (stability_offset + 1.0).powf(alpha);
    if g0_norm > 0.0 {
        scale / g0_norm
    } else {
        scale
    }
}

/// One simultaneous-perturbation gradient estimate at `x`: probes
/// `x +- c * delta` are projected from `x`, each evaluated with `r`
/// replications (2r charged), and
/// `g_j = (y_plus - y_minus) / (2 c delta_j)` with the nominal offset in
/// the divisor even when projection clipped a probe.
pub fn perturbation_gradient(
    ctx: &mut RunContext,
    x: &Point,
    c: f64,
    delta: &[f64],
) -> Result<Vec<f64>, Stop> {
    let plus_raw: Vec<f64> = x.coords().iter().zip(delta).map(|(xi, dj)| xi + c * dj).collect();
    let plus = ctx.propose(x, plus_raw)?;
    let y_plus = ctx.evaluate(&plus)?;
    let minus_raw: Vec<f64> = x.coords().iter().zip(delta).map(|(xi, dj)| xi - c * dj).collect();
    let minus = ctx.propose(x, minus_raw)?;
    let y_minus = ctx.evaluate(&minus)?;
    let diff = y_plus.mean - y_minus.mean;
    Ok(delta.iter().map(|dj| diff / (2.0 * c * dj)).collect())
}

pub(crate) fn drive(ctx: &mut RunContext, params: &SpsaParams) {
    let _ = run_to_exhaustion(ctx, params);
}

fn run_to_exhaustion(ctx: &mut RunContext, params: &SpsaParams) -> Result<(), Stop> {
    let x1 = ctx.sample_point();
    let stats1 = ctx.evaluate(&x1)?;
    let plan = plan_gains(
        ctx.budget(),
        ctx.r(),
        stats1.variance.sqrt(),
        ctx.domain().max_width_or(1.0),
        params.c_floor_fraction,
    );
    let diameter = ctx.domain().diameter_or(1.0);
    let d = ctx.dim();

    let mut x = x1;
    let mut a = 0.0;
    for k in 0..plan.iterations {
        let c_k = plan.c / ((k + 1) as f64).powf(params.gamma);
        let delta: Vec<f64> = (0..d).map(|_| ctx.algo_rng().rademacher()).collect();
        let gradient = perturbation_gradient(ctx, &x, c_k, &delta)?;
        if k == 0 {
            // The calibration gradient doubles as the first update's.
            a = step_scale(
                l2_norm(&gradient),
                plan.stability_offset,
                params.alpha,
                diameter,
                params.step_fraction,
            );
        }
        let a_k = a / (k as f64 + plan.stability_offset + 1.0).powf(params.alpha);
        let raw: Vec<f64> = x
            .coords()
            .iter()
            .zip(&gradient)
            .map(|(xi, gi)| xi + a_k * gi)
            .collect();
        x = ctx.propose(&x, raw)?;
    }
    Ok(())
}
