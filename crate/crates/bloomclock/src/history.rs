//! Per-node timestamp history.
//!
//! Storing past timestamps buys two things. First, when judging a remote
//! timestamp it pays to compare against the *closest* dominating entry
//! instead of the latest one: the smaller the sum difference, the lower the
//! false-positive rate of the claimed order. Second, consecutive entries
//! carry provenance: subtracting a timestamp from its successor recovers the
//! exact increment multiset of the event that produced it, so a successor
//! that is not one tick away must have absorbed a merge with a concurrent
//! clock.

use std::collections::VecDeque;

use crate::clock::{BloomClock, CausalVerdict, FpAssessment};
use crate::error::{Error, Result};
use crate::hash::EventId;

/// One recorded timestamp: local sequence number, the clock, and the event
/// that produced it when known (merge-produced states record the delivered
/// event; states recorded without attribution carry `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub seq: u64,
    pub clock: BloomClock,
    pub event: Option<EventId>,
}

/// Ordered timestamp history of a single node. Entries are slot-wise
/// non-decreasing; an optional cap evicts oldest-first, which sacrifices the
/// entries with the largest differences first.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClockHistory {
    entries: VecDeque<HistoryEntry>,
    cap: Option<usize>,
    next_seq: u64,
}

impl ClockHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap: Some(cap.max(1)),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }

    pub fn latest(&self) -> Option<&HistoryEntry> {
        self.entries.back()
    }

    /// Appends a timestamp, enforcing that it dominates the latest entry.
    /// Returns the assigned sequence number.
    pub fn record(&mut self, clock: BloomClock, event: Option<EventId>) -> Result<u64> {
        if let Some(last) = self.entries.back() {
            match last.clock.compare(&clock)? {
                CausalVerdict::Before | CausalVerdict::Equal => {}
                _ => return Err(Error::HistoryOrder { last_seq: last.seq }),
            }
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.entries.push_back(HistoryEntry { seq, clock, event });
        if let Some(cap) = self.cap {
            while self.entries.len() > cap {
                self.entries.pop_front();
            }
        }
        Ok(seq)
    }

    /// The dominating entry closest to `remote`: among entries `h` with
    /// `remote.compare(h)` in `{Before, Equal}`, the one minimizing
    /// `delta_sum(remote, h)`, together with the false-positive rate of
    /// "`remote` precedes `h`". Ties go to the earliest sequence number.
    /// `None` when no entry dominates `remote`.
    pub fn best_predecessor(
        &self,
        remote: &BloomClock,
    ) -> Result<Option<(&HistoryEntry, FpAssessment)>> {
        let mut best: Option<(&HistoryEntry, u64)> = None;
        for entry in &self.entries {
            match remote.compare(&entry.clock)? {
                CausalVerdict::Before | CausalVerdict::Equal => {}
                _ => continue,
            }
            let delta = remote.delta_sum(&entry.clock)?;
            if best.is_none_or(|(_, d)| delta < d) {
                best = Some((entry, delta));
            }
        }
        match best {
            Some((entry, _)) => {
                let fp = remote.fp_rate(&entry.clock)?;
                Ok(Some((entry, fp)))
            }
            None => Ok(None),
        }
    }
}

/// True iff `next` is exactly `prev` ticked with `event`, i.e. the slot-wise
/// logical difference equals the event's increment multiset. Requires `next`
/// to dominate `prev` (or equal it); anything else is [`Error::NotDominated`].
pub fn provenance_check(prev: &BloomClock, next: &BloomClock, event: &EventId) -> Result<bool> {
    match prev.compare(next)? {
        CausalVerdict::Before | CausalVerdict::Equal => {}
        _ => return Err(Error::NotDominated),
    }
    Ok(prev.tick(event) == *next)
}

/// Detects that `next` absorbed a merge with a clock concurrent to `prev`:
/// true iff `next` strictly dominates `prev` and the difference is not
/// attributable to `event` (no event supplied, or the provenance check
/// fails). An unchanged clock is never merge evidence.
pub fn detect_merge(prev: &BloomClock, next: &BloomClock, event: Option<&EventId>) -> Result<bool> {
    if prev.compare(next)? != CausalVerdict::Before {
        return Ok(false);
    }
    match event {
        None => Ok(true),
        Some(event) => Ok(!provenance_check(prev, next, event)?),
    }
}
