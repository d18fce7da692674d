//! Search spaces: points, box domains, initial-solution sampling, and
//! boundary projection.

use crate::rng::RngStream;
use thiserror::Error;

/// A solution vector. Coordinates are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Wraps coordinates that are known to be finite.
    ///
    /// # Panics
    /// Panics if any coordinate is NaN or infinite.
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "point coordinates must be finite: {coords:?}"
        );
        Point(coords)
    }

    /// Wraps coordinates, returning `None` if any is NaN or infinite.
    pub fn try_new(coords: Vec<f64>) -> Option<Self> {
        if coords.iter().all(|c| c.is_finite()) {
            Some(Point(coords))
        } else {
            None
        }
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.clone()
    }

    /// Euclidean distance to another point of the same dimension.
    pub fn dist(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Bit pattern of the coordinates, usable as a hash-map key.
    pub fn bits(&self) -> Vec<u64> {
        self.0.iter().map(|c| c.to_bits()).collect()
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// How initial solutions are drawn from a domain.
#[derive(Clone, Debug, PartialEq)]
pub enum SamplingRule {
    /// Uniform over a fully bounded box.
    UniformBox,
    /// Lower bound plus an exponential offset per coordinate; for domains
    /// unbounded above.
    Exponential { scales: Vec<f64> },
    /// Laplace draw centered at zero per coordinate; for domains unbounded
    /// on both sides.
    Laplace { scales: Vec<f64> },
}

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("domain bound mismatch: {lower} lower bounds vs {upper} upper bounds")]
    DimensionMismatch { lower: usize, upper: usize },
    #[error("empty interval in coordinate {index}: [{lo}, {hi}]")]
    EmptyInterval { index: usize, lo: f64, hi: f64 },
    #[error("coordinate {index} is unbounded but the sampling rule is uniform")]
    UnboundedUniform { index: usize },
    #[error("sampling rule has {scales} scales for dimension {dim}")]
    ScaleMismatch { scales: usize, dim: usize },
    #[error("non-positive sampling scale in coordinate {index}")]
    BadScale { index: usize },
}

/// A box-constrained domain with a sampling rule for initial solutions.
///
/// Bounds may be infinite; the sampling rule must then be a distributional
/// one, since a uniform draw over an unbounded box is undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
    sampling: SamplingRule,
}

impl Domain {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        sampling: SamplingRule,
    ) -> Result<Self, DomainError> {
        if lower.len() != upper.len() {
            return Err(DomainError::DimensionMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) || lo.is_nan() || hi.is_nan() {
                return Err(DomainError::EmptyInterval { index: j, lo, hi });
            }
        }
        match &sampling {
            SamplingRule::UniformBox => {
                for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
                    if !lo.is_finite() || !hi.is_finite() {
                        return Err(DomainError::UnboundedUniform { index: j });
                    }
                }
            }
            SamplingRule::Exponential { scales } | SamplingRule::Laplace { scales } => {
                if scales.len() != lower.len() {
                    return Err(DomainError::ScaleMismatch {
                        scales: scales.len(),
                        dim: lower.len(),
                    });
                }
                if let Some(j) = scales.iter().position(|&s| !(s > 0.0) || !s.is_finite()) {
                    return Err(DomainError::BadScale { index: j });
                }
            }
        }
        Ok(Domain {
            lower,
            upper,
            sampling,
        })
    }

    /// Fully bounded box with uniform initial sampling.
    pub fn bounded(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, DomainError> {
        Domain::new(lower, upper, SamplingRule::UniformBox)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn sampling(&self) -> &SamplingRule {
        &self.sampling
    }

    /// Membership in the closed box.
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&c, (&lo, &hi))| lo <= c && c <= hi)
    }

    /// Width of coordinate j, or `fallback` when that side is unbounded.
    pub fn width_or(&self, j: usize, fallback: f64) -> f64 {
        let w = self.upper[j] - self.lower[j];
        if w.is_finite() {
            w
        } else {
            fallback
        }
    }

    /// Largest finite coordinate width, or `fallback` if none is finite.
    pub fn max_width_or(&self, fallback: f64) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .filter(|w| w.is_finite())
            .fold(None, |acc: Option<f64>, w| Some(acc.map_or(w, |a| a.max(w))))
            .unwrap_or(fallback)
    }

    /// Euclidean diameter of the box, substituting `fallback` for any
    /// unbounded coordinate width.
    pub fn diameter_or(&self, fallback: f64) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| {
                let w = hi - lo;
                if w.is_finite() {
                    w * w
                } else {
                    fallback * fallback
                }
            })
            .sum::<f64>()
            .sqrt()
    }

    fn clamp_coord(&self, j: usize, c: f64) -> f64 {
        c.max(self.lower[j]).min(self.upper[j])
    }
}

/// Draws an initial solution according to the domain's sampling rule.
pub fn sample_initial(domain: &Domain, rng: &mut RngStream) -> Point {
    let coords = match domain.sampling() {
        SamplingRule::UniformBox => (0..domain.dim())
            .map(|j| rng.uniform_in(domain.lower[j], domain.upper[j]))
            .collect::<Vec<f64>>(),
        SamplingRule::Exponential { scales } => (0..domain.dim())
            .map(|j| domain.clamp_coord(j, domain.lower[j] + rng.exponential(scales[j])))
            .collect(),
        SamplingRule::Laplace { scales } => (0..domain.dim())
            .map(|j| domain.clamp_coord(j, rng.laplace(scales[j])))
            .collect(),
    };
    Point::new(coords)
}

/// Pulls an infeasible proposal back to the domain along the segment from a
/// feasible previous point.
///
/// Returns `proposed` unchanged when it is already feasible; otherwise
/// returns the last feasible point on the segment, which lies on the boundary.
/// Coordinates are clamped after the line step so the result is exactly
/// feasible despite rounding, making the operation idempotent.
///
/// # Panics
/// Panics if `prev` is not in the domain; callers must maintain feasible
/// iterates.
pub fn project_to_domain(prev: &Point, proposed: &Point, domain: &Domain) -> Point {
    assert!(
        domain.contains(prev),
        "projection anchor must be feasible: {prev:?}"
    );
    if domain.contains(proposed) {
        return proposed.clone();
    }
    let mut t_star = 1.0f64;
    for j in 0..domain.dim() {
        let (p, q) = (prev[j], proposed[j]);
        let t = if q > domain.upper[j] {
            (domain.upper[j] - p) / (q - p)
        } else if q < domain.lower[j] {
            (domain.lower[j] - p) / (q - p)
        } else {
            continue;
        };
        t_star = t_star.min(t.clamp(0.0, 1.0));
    }
    let coords = (0..domain.dim())
        .map(|j| domain.clamp_coord(j, prev[j] + t_star * (proposed[j] - prev[j])))
        .collect();
    Point::new(coords)
}
