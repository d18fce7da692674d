//! Observations and summary statistics for noisy objective estimates.

/// One simulation output at a solution. Always finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation(f64);

impl Observation {
    /// # Panics
    /// Panics if the value is NaN or infinite; oracles must produce finite
    /// observations.
    pub fn new(value: f64) -> Self {
        assert!(value.is_finite(), "observation must be finite: {value}");
        Observation(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sample mean and variance of the replications taken at one solution.
///
/// The variance is the unbiased sample variance; with a single observation it
/// is reported as 0 since no spread estimate exists.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleStats {
    pub mean: f64,
    pub variance: f64,
    pub count: u32,
}

impl SampleStats {
    /// # Panics
    /// Panics on an empty slice; statistics of zero replications are
    /// undefined.
    pub fn from_observations(obs: &[Observation]) -> Self {
        assert!(!obs.is_empty(), "no observations to summarize");
        let n = obs.len() as f64;
        let mean = obs.iter().map(|o| o.value()).sum::<f64>() / n;
        let variance = if obs.len() < 2 {
            0.0
        } else {
            obs.iter()
                .map(|o| (o.value() - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0)
        };
        SampleStats {
            mean,
            variance,
            count: obs.len() as u32,
        }
    }

    /// The same statistics with the sign of the mean flipped; variance and
    /// count are unaffected.
    pub fn negated(self) -> Self {
        SampleStats {
            mean: -self.mean,
            ..self
        }
    }
}
