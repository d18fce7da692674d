//! Replication budget accounting.
//!
//! The unit of cost is one simulation replication. Every oracle call an
//! algorithm triggers, including gradient probes and re-evaluations of
//! already-visited points, is charged against the same ledger.

use thiserror::Error;

/// Signals that the replication budget has run out; algorithms terminate
/// cleanly when they see this.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("simulation budget exhausted")]
pub struct BudgetExhausted;

/// Tracks replications consumed against a fixed limit.
#[derive(Clone, Debug)]
pub struct BudgetLedger {
    consumed: u64,
    limit: u64,
}

impl BudgetLedger {
    /// # Panics
    /// Panics if `limit` is zero; a run must be allowed at least one
    /// replication.
    pub fn new(limit: u64) -> Self {
        assert!(limit >= 1, "budget limit must be positive");
        BudgetLedger { consumed: 0, limit }
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.consumed
    }

    /// Charges `n` replications.
    ///
    /// # Panics
    /// Panics if the charge would exceed the limit; callers truncate against
    /// [`BudgetLedger::remaining`] first, so overdraft is a programming error.
    pub fn charge(&mut self, n: u64) {
        assert!(
            n <= self.remaining(),
            "budget overdraft: {} consumed of {}, charging {n}",
            self.consumed,
            self.limit
        );
        self.consumed += n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charges_accumulate_and_remaining_shrinks() {
        let mut ledger = BudgetLedger::new(100);
        ledger.charge(30);
        ledger.charge(30);
        assert_eq!(ledger.consumed(), 60);
        assert_eq!(ledger.remaining(), 40);
        ledger.charge(40);
        assert_eq!(ledger.remaining(), 0);
    }

    #[test]
    #[should_panic(expected = "budget overdraft")]
    fn overdraft_panics() {
        let mut ledger = BudgetLedger::new(10);
        ledger.charge(11);
    }

    #[test]
    #[should_panic(expected = "must be positive")]
    fn zero_limit_is_rejected() {
        BudgetLedger::new(0);
    }
}
