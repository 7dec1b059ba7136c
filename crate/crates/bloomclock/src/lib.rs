//! A counting-bloom-filter logical clock for probabilistic partial ordering
//! of events, together with the machinery needed to validate it:
//!
//! - [`BloomClock`]: the timestamp itself — a fixed-length array of counters
//!   (plus a compaction offset) that is ticked on local events and merged
//!   slot-wise on receive. Comparable pairs come with a computable
//!   false-positive rate; incomparable pairs are detected with certainty.
//! - [`VectorClock`]: the classic per-node causal timestamp, run in parallel
//!   as ground truth.
//! - [`ClockHistory`]: per-node timestamp history for tightening confidence
//!   via the closest dominating predecessor, and for recovering an event's
//!   hash increments from consecutive timestamps.
//! - [`sim`]: a deterministic discrete-event simulation of broadcasting
//!   nodes with configurable drops and delays, cross-tabulating bloom
//!   verdicts against vector-clock ground truth.
//! - [`codec`]: a compact varint wire format for timestamps.
//!
//! ```
//! use bloomclock::{BloomClock, CausalVerdict, EventId, HashFamily};
//!
//! let family = HashFamily::new(64, 2, 7).unwrap();
//! let a = BloomClock::zero(family);
//! let b = a.tick(&EventId::new("first-event").unwrap());
//! assert_eq!(a.compare(&b).unwrap(), CausalVerdict::Before);
//! ```

pub mod clock;
pub mod codec;
mod error;
pub mod hash;
pub mod history;
pub mod sim;
pub mod vclock;

pub use clock::{bloom_filter_fpr, fp_rate_for_sums, BloomClock, CausalVerdict, FpAssessment};
pub use error::{Error, Result};
pub use hash::{EventId, HashFamily};
pub use history::{detect_merge, provenance_check, ClockHistory, HistoryEntry};
pub use sim::{
    compare_with_confidence, montecarlo_overlap, pair_rows, run_script, run_simulation,
    ConfidentVerdict, DelayModel, EventRecord, OverlapEstimate, PairRow, ScriptRun, ScriptStep,
    SimConfig, SimMetrics, SimRun,
};
pub use vclock::{node_label, VectorClock};
