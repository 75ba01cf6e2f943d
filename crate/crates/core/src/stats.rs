//! Counters shared by all reducers.

use std::time::Duration;

/// Work counters for one reduction run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReductionStats {
    /// Link-condition tests performed (ℓ). For the timestamped reducer this
    /// counts every decision taken on an edge leaving the untested list,
    /// including the degree-3 shortcut.
    pub link_tests: u64,
    /// Number of distinct edges tested more than once (ε).
    pub retested_edges: u64,
    pub contractions: u64,
    /// Final value of the global time counter (timestamped reducer only).
    pub final_ts: u64,
    /// Elements visited while testing edges: link entries scanned or hash
    /// probes. Tracks the cost of the tests rather than their number.
    pub link_work: u64,
    /// Largest number of untested-list insertions while processing a single
    /// vertex (timestamped reducer only).
    pub max_lue_insertions: u64,
    pub init_time: Duration,
    pub reduce_time: Duration,
}

impl ReductionStats {
    pub fn elapsed(&self) -> Duration {
        self.init_time + self.reduce_time
    }
}

/// Tracks how often each edge identity was tested, for ε.
#[derive(Clone, Debug, Default)]
pub struct TestTally {
    counts: Vec<u32>,
    retested: u64,
}

impl TestTally {
    pub fn with_capacity(n_edges: usize) -> Self {
        TestTally { counts: vec![0; n_edges], retested: 0 }
    }

    /// Records one test of `edge` and returns how many times it has now been
    /// tested.
    pub fn record(&mut self, edge: usize) -> u32 {
        if edge >= self.counts.len() {
            self.counts.resize(edge + 1, 0);
        }
        let c = &mut self.counts[edge];
        *c += 1;
        if *c == 2 {
            self.retested += 1;
        }
        *c
    }

    pub fn times_tested(&self, edge: usize) -> u32 {
        self.counts.get(edge).copied().unwrap_or(0)
    }

    pub fn retested(&self) -> u64 {
        self.retested
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_counts_distinct_retested_edges() {
        let mut t = TestTally::with_capacity(4);
        for e in [0, 1, 1, 1, 2, 2, 7] {
            t.record(e);
        }
        assert_eq!(t.retested(), 2);
        assert_eq!(t.times_tested(1), 3);
        assert_eq!(t.times_tested(7), 1);
        assert_eq!(t.times_tested(9), 0);
    }
}
