//! Vector clock over a fixed node set, used as causal ground truth when
//! validating bloom clock verdicts.
//!
//! Nodes are indices `0..n`; the node set is fixed for the lifetime of a
//! run. A node increments its own entry when it emits an event (internal
//! events count as sends — every event here is broadcast), and on receive
//! it increments its own entry and then takes the entry-wise maximum with
//! the incoming vector.

use crate::clock::CausalVerdict;
use crate::error::{Error, Result};

/// Spreadsheet-style label for a node index: `A`..`Z`, `AA`, `AB`, ...
pub fn node_label(mut node: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (node % 26) as u8);
        node /= 26;
        if node == 0 {
            break;
        }
        node -= 1;
    }
    out.reverse();
    String::from_utf8(out).expect("labels are ASCII")
}

/// Per-node counters over a node set of fixed size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorClock {
    entries: Vec<u64>,
}

impl VectorClock {
    pub fn zero(nodes: usize) -> Self {
        Self {
            entries: vec![0; nodes],
        }
    }

    pub fn from_entries(entries: Vec<u64>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn nodes(&self) -> usize {
        self.entries.len()
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.entries.len() {
            return Err(Error::UnknownNode {
                node,
                nodes: self.entries.len(),
            });
        }
        Ok(())
    }

    fn check_set(&self, other: &Self) -> Result<()> {
        if self.entries.len() != other.entries.len() {
            return Err(Error::NodeSetMismatch {
                left: self.entries.len(),
                right: other.entries.len(),
            });
        }
        Ok(())
    }

    /// Increment `node`'s own entry; the result is the timestamp attached to
    /// the outgoing message (and the timestamp of the internal event itself).
    pub fn tick(&self, node: usize) -> Result<Self> {
        self.check_node(node)?;
        let mut next = self.clone();
        next.entries[node] += 1;
        Ok(next)
    }

    /// Receive `incoming` at `node`: increment the own entry, then take the
    /// entry-wise maximum with the incoming vector.
    pub fn receive(&self, incoming: &Self, node: usize) -> Result<Self> {
        self.check_set(incoming)?;
        let mut next = self.tick(node)?;
        for (own, &theirs) in next.entries.iter_mut().zip(&incoming.entries) {
            *own = (*own).max(theirs);
        }
        Ok(next)
    }

    /// Entry-wise dominance comparison with the same trichotomy as the
    /// bloom clock's structural compare.
    pub fn compare(&self, other: &Self) -> Result<CausalVerdict> {
        self.check_set(other)?;
        let mut self_le = true;
        let mut other_le = true;
        for (&a, &b) in self.entries.iter().zip(&other.entries) {
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
}

impl std::fmt::Display for VectorClock {
    /// Text form `{A:2,B:1,...}` with spreadsheet node labels.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}:{}", node_label(i), c)?;
        }
        write!(f, "}}")
    }
}
