//! Incumbent-change records emitted by algorithm runs.

use crate::space::Point;

/// One incumbent change: after `n` replications were consumed, `point`
/// became the best fully evaluated solution with the given sample mean
/// (in the problem's own units).
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub n: u64,
    pub point: Point,
    pub sample_mean: f64,
}

/// The full incumbent history of one macroreplication.
///
/// Records are strictly increasing in `n`; the first record is the initial
/// solution's evaluation. The incumbent holds from its record until the
/// next one, and the last record holds through the terminal budget.
/// `failed` marks runs cut short by a numerical failure (non-finite
/// iterate); their incumbent carries forward and reporting surfaces the
/// flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    pub budget: u64,
    /// Replications actually drawn, including truncated partial
    /// evaluations that never produced a record.
    pub consumed: u64,
    pub failed: bool,
}

impl Trajectory {
    /// The incumbent at exhaustion, if any full evaluation completed.
    pub fn final_record(&self) -> Option<&TrajectoryRecord> {
        self.records.last()
    }

    /// # Panics
    /// Panics if records are not strictly increasing in `n` or run past
    /// the consumed total or the budget.
    pub fn validate(&self) {
        assert!(self.consumed <= self.budget, "consumed more than the budget");
        let mut prev = 0;
        for rec in &self.records {
            assert!(rec.n > prev, "trajectory records must increase strictly in n");
            assert!(rec.n <= self.consumed, "record beyond the consumed total");
            prev = rec.n;
        }
    }
}
