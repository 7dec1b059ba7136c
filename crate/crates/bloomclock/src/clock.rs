//! The bloom clock timestamp and its comparison calculus.
//!
//! A clock is a length-`m` array of counters plus a global `offset`; the
//! logical value of slot `i` is `counters[i] + offset` and every operation
//! (comparison, sums, rates) is defined on logical values. Ticking an event
//! increments the `k` slots derived by [`HashFamily::indices`]; receiving
//! merges by slot-wise maximum. Structural dominance can only claim an
//! order that may be accidental, so comparable pairs carry a false-positive
//! rate computed from the two total increment counts.

use crate::error::{Error, Result};
use crate::hash::{EventId, HashFamily};

/// Outcome of comparing two timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalVerdict {
    Before,
    After,
    Equal,
    Concurrent,
}

impl CausalVerdict {
    pub const ALL: [CausalVerdict; 4] = [
        CausalVerdict::Before,
        CausalVerdict::After,
        CausalVerdict::Equal,
        CausalVerdict::Concurrent,
    ];

    /// True for any verdict that claims an order (everything but `Concurrent`).
    pub fn is_comparable(self) -> bool {
        self != CausalVerdict::Concurrent
    }

    /// The verdict with the argument order flipped.
    pub fn flipped(self) -> CausalVerdict {
        match self {
            CausalVerdict::Before => CausalVerdict::After,
            CausalVerdict::After => CausalVerdict::Before,
            other => other,
        }
    }
}

impl std::fmt::Display for CausalVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CausalVerdict::Before => "before",
            CausalVerdict::After => "after",
            CausalVerdict::Equal => "equal",
            CausalVerdict::Concurrent => "concurrent",
        };
        f.write_str(s)
    }
}

/// The false-positive rate attached to a comparable pair, together with the
/// two total increment counts it was computed from. `b_sum >= a_sum` always
/// holds: `a` is the dominated side.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FpAssessment {
    pub fp_rate: f64,
    pub a_sum: u64,
    pub b_sum: u64,
}

/// False-positive rate for a dominated pair with total increments `a_sum`
/// and `b_sum`: the probability that `b_sum` uniformly random increments
/// into `m` slots cover `a_sum` index draws, `(1 - (1 - 1/m)^b_sum)^a_sum`.
///
/// `a_sum = 0` yields exactly 1: the empty timestamp is overlapped by
/// anything. Errors with [`Error::SumOrder`] when `b_sum < a_sum`; callers
/// order the pair by sum first.
pub fn fp_rate_for_sums(m: usize, a_sum: u64, b_sum: u64) -> Result<f64> {
    if b_sum < a_sum {
        return Err(Error::SumOrder { a_sum, b_sum });
    }
    if a_sum == 0 {
        return Ok(1.0);
    }
    let miss = 1.0 - 1.0 / m as f64;
    let covered = 1.0 - miss.powf(b_sum as f64);
    Ok(covered.powf(a_sum as f64))
}

/// The classical bloom-filter false-positive rate `(1 - (1 - 1/m)^(k n))^k`
/// after inserting `n` elements into `m` slots with `k` hashes each. The
/// clock rate above is this formula with the roles of `k` and `kn` taken
/// over by the two clocks' increment totals.
pub fn bloom_filter_fpr(m: usize, k: usize, n: u64) -> f64 {
    debug_assert!(m >= 1 && k >= 1);
    if n == 0 {
        return 0.0;
    }
    let miss = 1.0 - 1.0 / m as f64;
    (1.0 - miss.powf((k as u64 * n) as f64)).powi(k as i32)
}

/// A bloom clock timestamp.
///
/// Values are immutable: every operation returns a new clock, so timestamps
/// can be shared freely between concurrent activities. Equality is logical
/// (same family and same per-slot logical values), so compaction does not
/// change what a clock is equal to.
#[derive(Debug, Clone, Eq)]
pub struct BloomClock {
    counters: Vec<u64>,
    offset: u64,
    family: HashFamily,
}

impl BloomClock {
    /// The all-zero clock every node starts from.
    pub fn zero(family: HashFamily) -> Self {
        Self {
            counters: vec![0; family.m()],
            offset: 0,
            family,
        }
    }

    /// Builds a clock from explicit counters and offset, for fixtures and
    /// decoding. Errors if the counter count does not match the family or a
    /// logical value would not fit in 64 bits.
    pub fn from_parts(family: HashFamily, counters: Vec<u64>, offset: u64) -> Result<Self> {
        if counters.len() != family.m() {
            return Err(Error::IncompatibleClocks);
        }
        if counters.iter().any(|c| c.checked_add(offset).is_none()) {
            return Err(Error::CounterOverflow);
        }
        Ok(Self {
            counters,
            offset,
            family,
        })
    }

    pub fn family(&self) -> &HashFamily {
        &self.family
    }

    /// Stored (pre-offset) counters.
    pub fn counters(&self) -> &[u64] {
        &self.counters
    }

    /// Compaction offset added to every stored counter.
    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Logical value of slot `i`.
    pub fn logical(&self, i: usize) -> u64 {
        self.counters[i] + self.offset
    }

    fn logical_values(&self) -> impl Iterator<Item = u64> + '_ {
        self.counters.iter().map(move |&c| c + self.offset)
    }

    /// Total of all logical slots; grows by exactly `k` per tick.
    pub fn logical_sum(&self) -> u64 {
        self.logical_values()
            .try_fold(0u64, u64::checked_add)
            .expect("bloom clock sum overflows u64")
    }

    /// Returns a new clock with the event's `k` derived slots incremented
    /// once each (duplicate indices increment their slot repeatedly).
    pub fn tick(&self, event: &EventId) -> Self {
        let mut next = self.clone();
        for i in next.family.indices(event) {
            let bumped = next.counters[i]
                .checked_add(1)
                .filter(|c| c.checked_add(next.offset).is_some())
                .expect("bloom clock counter overflows u64");
            next.counters[i] = bumped;
        }
        next
    }

    /// Slot-wise maximum of logical values; the result dominates both
    /// inputs. Errors if the clocks belong to different families.
    pub fn merge(&self, other: &Self) -> Result<Self> {
        self.check_family(other)?;
        // Carrying the larger offset keeps stored counters small without
        // changing any logical value.
        let offset = self.offset.max(other.offset);
        let counters = self
            .logical_values()
            .zip(other.logical_values())
            .map(|(a, b)| a.max(b) - offset)
            .collect();
        Ok(Self {
            counters,
            offset,
            family: self.family,
        })
    }

    /// Structural comparison on logical values: `Before` iff `self` is
    /// dominated slot-wise and differs somewhere, `Concurrent` iff each side
    /// exceeds the other in some slot.
    pub fn compare(&self, other: &Self) -> Result<CausalVerdict> {
        self.check_family(other)?;
        let mut self_le = true;
        let mut other_le = true;
        for (a, b) in self.logical_values().zip(other.logical_values()) {
            if a > b {
                self_le = false;
            }
            if b > a {
                other_le = false;
            }
            if !self_le && !other_le {
                return Ok(CausalVerdict::Concurrent);
            }
        }
        Ok(match (self_le, other_le) {
            (true, true) => CausalVerdict::Equal,
            (true, false) => CausalVerdict::Before,
            (false, true) => CausalVerdict::After,
            (false, false) => unreachable!("early return above"),
        })
    }

    /// Sum of absolute slot differences on logical values. Large differences
    /// make an apparent order more likely to be accidental.
    pub fn delta_sum(&self, other: &Self) -> Result<u64> {
        self.check_family(other)?;
        Ok(self
            .logical_values()
            .zip(other.logical_values())
            .map(|(a, b)| a.abs_diff(b))
            .try_fold(0u64, u64::checked_add)
            .expect("delta sum overflows u64"))
    }

    /// False-positive rate for "`self` precedes `other`", from the two
    /// logical sums per [`fp_rate_for_sums`]. Requires
    /// `other.logical_sum() >= self.logical_sum()`.
    pub fn fp_rate(&self, other: &Self) -> Result<FpAssessment> {
        self.check_family(other)?;
        let a_sum = self.logical_sum();
        let b_sum = other.logical_sum();
        let fp_rate = fp_rate_for_sums(self.family.m(), a_sum, b_sum)?;
        Ok(FpAssessment {
            fp_rate,
            a_sum,
            b_sum,
        })
    }

    /// Moves the minimum stored counter into the offset, leaving every
    /// logical value unchanged and at least one stored counter at zero.
    pub fn compact(&self) -> Self {
        let min = self.counters.iter().copied().min().unwrap_or(0);
        Self {
            counters: self.counters.iter().map(|&c| c - min).collect(),
            offset: self.offset + min,
            family: self.family,
        }
    }

    fn check_family(&self, other: &Self) -> Result<()> {
        if self.family != other.family {
            return Err(Error::IncompatibleClocks);
        }
        Ok(())
    }
}

impl PartialEq for BloomClock {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self
                .logical_values()
                .zip(other.logical_values())
                .all(|(a, b)| a == b)
    }
}

impl std::fmt::Display for BloomClock {
    /// Canonical text form `(offset)[c0,c1,...]`, offset part omitted when
    /// zero, e.g. `(3)[1,0,0,2,4,1,0,0,2]`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.offset != 0 {
            write!(f, "({})", self.offset)?;
        }
        write!(f, "[")?;
        for (i, c) in self.counters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}
