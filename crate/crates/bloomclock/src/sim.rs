//! Deterministic discrete-event simulation of broadcasting nodes.
//!
//! Every internal event ticks the origin's bloom clock and vector clock and
//! broadcasts both timestamps; deliveries merge the bloom clock (max only,
//! no self-increment) and apply the vector clock receive rule. Drops are
//! sampled per `(message, recipient)` and deliveries are delayed in abstract
//! ticks, so concurrency actually arises. Everything is driven by a single
//! seeded generator: identical config and seed reproduce the run bit for
//! bit.
//!
//! After the run, every pair of recorded events is classified twice — by
//! vector-clock ground truth and by the bloom clock — and cross-tabulated.
//! A pair counts as an empirical false positive when ground truth says
//! concurrent but the bloom clocks claim an order; the reverse mistake is
//! structurally impossible and the metrics track it anyway as a hard zero.
//!
//! Internal events are spaced 10 ticks apart with a little emission jitter,
//! round-robin across nodes with occasional random origins. Message loss
//! and latency are the config surface; the spacing is fixed.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::{fp_rate_for_sums, BloomClock, CausalVerdict, FpAssessment};
use crate::codec;
use crate::error::{Error, Result};
use crate::hash::{EventId, HashFamily};
use crate::history::ClockHistory;
use crate::vclock::VectorClock;

const EVENT_SPACING: u64 = 10;
const EVENT_JITTER: u64 = 4;
/// Probability that an event's origin leaves the round-robin rotation.
const OFF_ROBIN_PROBABILITY: f64 = 0.125;

pub const METRICS_SCHEMA_VERSION: u32 = 1;

/// Message latency in abstract ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DelayModel {
    Fixed(u64),
    Uniform { min: u64, max: u64 },
}

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimConfig {
    pub n_nodes: usize,
    pub m: usize,
    pub k: usize,
    pub n_events: usize,
    /// Per-(message, recipient) loss probability.
    pub drop_rate: f64,
    pub delay: DelayModel,
    pub seed: u64,
    /// Acceptance threshold for predicted false-positive rates.
    pub fp_threshold: f64,
    pub history_cap: Option<usize>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_nodes < 2 {
            return fail(format!("need at least 2 nodes, got {}", self.n_nodes));
        }
        if self.m == 0 || self.k == 0 {
            return fail(format!(
                "need m >= 1 and k >= 1, got m={} k={}",
                self.m, self.k
            ));
        }
        if !(0.0..=1.0).contains(&self.drop_rate) {
            return fail(format!("drop rate {} is not a probability", self.drop_rate));
        }
        if !(0.0..=1.0).contains(&self.fp_threshold) {
            return fail(format!(
                "fp threshold {} is not a probability",
                self.fp_threshold
            ));
        }
        if let DelayModel::Uniform { min, max } = self.delay {
            if min > max {
                return fail(format!("delay range {min}..{max} is inverted"));
            }
        }
        if self.history_cap == Some(0) {
            return fail("history cap must be positive when set".into());
        }
        Ok(())
    }

    pub fn family(&self) -> Result<HashFamily> {
        HashFamily::new(self.m, self.k, self.seed)
    }
}

/// One recorded internal event with both timestamps at emission.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub event: EventId,
    pub origin: usize,
    /// Global emission order, strictly increasing across the run.
    pub t: u64,
    pub bloom: BloomClock,
    pub vector: VectorClock,
    /// Counter indices the event incremented.
    pub indices: Vec<usize>,
}

/// Encoded-size statistics over all recorded timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct ByteStats {
    pub min: u64,
    pub max: u64,
    pub mean: f64,
}

/// Empirical false-positive accounting for one delta_sum bucket
/// (`[delta_lo, delta_hi]`, powers of two above zero).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DeltaBucket {
    pub delta_lo: u64,
    pub delta_hi: u64,
    /// Pairs the bloom clocks judged comparable.
    pub comparable_pairs: u64,
    /// ... of which ground truth says concurrent.
    pub false_positives: u64,
    pub empirical_fp_rate: f64,
    /// Mean predicted rate over the bucket's comparable pairs.
    pub mean_predicted_fp_rate: f64,
}

/// Aggregated pair statistics for a run. `crosstab` maps ground-truth
/// verdict to bloom verdict to pair count, each unordered pair counted once
/// in emission order.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SimMetrics {
    pub schema_version: u32,
    pub events: u64,
    pub pairs_total: u64,
    pub crosstab: BTreeMap<CausalVerdict, BTreeMap<CausalVerdict, u64>>,
    /// Ground-truth-ordered pairs the bloom clocks called concurrent.
    /// Structurally impossible; tracked so runs prove it.
    pub false_negative_count: u64,
    /// Ground-truth-concurrent pairs the bloom clocks called comparable.
    pub false_positive_count: u64,
    pub comparable_pairs: u64,
    /// `false_positive_count / comparable_pairs` (0 when no pair is
    /// comparable).
    pub empirical_fp_rate: f64,
    /// Comparable pairs whose predicted rate was within the threshold.
    pub accepted_pairs: u64,
    pub rejected_pairs: u64,
    pub delta_buckets: Vec<DeltaBucket>,
    pub bloom_bytes: ByteStats,
    pub vector_bytes: ByteStats,
}

/// Everything a run produces: the records and metrics, plus the raw causal
/// structure (per-event predecessor lists) and final node state for
/// validation against independent oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub records: Vec<EventRecord>,
    pub metrics: SimMetrics,
    /// For the event with order `t`, `dag_preds[t - 1]` lists the orders of
    /// its direct causal predecessors: the origin's previous event and every
    /// event delivered to the origin since then.
    pub dag_preds: Vec<Vec<u64>>,
    pub node_clocks: Vec<BloomClock>,
    pub node_vectors: Vec<VectorClock>,
    pub node_histories: Vec<ClockHistory>,
}

struct NodeState {
    bloom: BloomClock,
    vector: VectorClock,
    history: ClockHistory,
    last_own: Option<u64>,
    pending_preds: Vec<u64>,
}

#[derive(PartialEq, Eq)]
struct Task {
    time: u64,
    seq: u64,
    kind: TaskKind,
}

#[derive(PartialEq, Eq)]
enum TaskKind {
    Internal { schedule_idx: usize },
    Deliver { to: usize, msg: usize },
}

impl Ord for Task {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.seq).cmp(&(other.time, other.seq))
    }
}

impl PartialOrd for Task {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Runs one simulation to completion. Deterministic in the config.
pub fn run_simulation(config: &SimConfig) -> Result<SimRun> {
    config.validate()?;
    let family = config.family()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // Emission schedule: round-robin origins with seeded jitter. Times are
    // strictly increasing because the jitter never spans the spacing.
    let mut schedule = Vec::with_capacity(config.n_events);
    for j in 0..config.n_events {
        let time = j as u64 * EVENT_SPACING + rng.random_range(0..EVENT_JITTER);
        let origin = if rng.random::<f64>() < OFF_ROBIN_PROBABILITY {
            rng.random_range(0..config.n_nodes)
        } else {
            j % config.n_nodes
        };
        schedule.push((time, origin));
    }

    let mut nodes: Vec<NodeState> = (0..config.n_nodes)
        .map(|_| NodeState {
            bloom: BloomClock::zero(family),
            vector: VectorClock::zero(config.n_nodes),
            history: match config.history_cap {
                Some(cap) => ClockHistory::with_cap(cap),
                None => ClockHistory::new(),
            },
            last_own: None,
            pending_preds: Vec::new(),
        })
        .collect();

    let mut queue: BinaryHeap<Reverse<Task>> = BinaryHeap::new();
    let mut next_seq = 0u64;
    for (idx, &(time, _)) in schedule.iter().enumerate() {
        queue.push(Reverse(Task {
            time,
            seq: next_seq,
            kind: TaskKind::Internal { schedule_idx: idx },
        }));
        next_seq += 1;
    }

    let mut records: Vec<EventRecord> = Vec::with_capacity(config.n_events);
    let mut dag_preds: Vec<Vec<u64>> = Vec::with_capacity(config.n_events);
    let mut next_t = 0u64;

    while let Some(Reverse(task)) = queue.pop() {
        match task.kind {
            TaskKind::Internal { schedule_idx } => {
                let (_, origin) = schedule[schedule_idx];
                next_t += 1;
                let t = next_t;
                let event =
                    EventId::new(format!("ev-{t:06}")).expect("generated ids are non-empty");
                let indices = family.indices(&event);

                let node = &mut nodes[origin];
                node.bloom = node.bloom.tick(&event);
                node.vector = node.vector.tick(origin)?;
                node.history
                    .record(node.bloom.clone(), Some(event.clone()))?;

                let mut preds: Vec<u64> = node.last_own.into_iter().collect();
                preds.append(&mut node.pending_preds);
                dag_preds.push(preds);
                node.last_own = Some(t);

                records.push(EventRecord {
                    event,
                    origin,
                    t,
                    bloom: node.bloom.clone(),
                    vector: node.vector.clone(),
                    indices,
                });
                let msg = records.len() - 1;

                for to in 0..config.n_nodes {
                    if to == origin {
                        continue;
                    }
                    if rng.random::<f64>() < config.drop_rate {
                        continue;
                    }
                    let delay = match config.delay {
                        DelayModel::Fixed(d) => d,
                        DelayModel::Uniform { min, max } => rng.random_range(min..=max),
                    };
                    queue.push(Reverse(Task {
                        time: task.time + delay,
                        seq: next_seq,
                        kind: TaskKind::Deliver { to, msg },
                    }));
                    next_seq += 1;
                }
            }
            TaskKind::Deliver { to, msg } => {
                let record = &records[msg];
                let node = &mut nodes[to];
                let merged = node.bloom.merge(&record.bloom)?;
                if merged != node.bloom {
                    node.history
                        .record(merged.clone(), Some(record.event.clone()))?;
                }
                node.bloom = merged;
                node.vector = node.vector.receive(&record.vector, to)?;
                node.pending_preds.push(record.t);
            }
        }
    }

    let metrics = compute_metrics(&records, family.m(), config.fp_threshold)?;
    Ok(SimRun {
        records,
        metrics,
        dag_preds,
        node_clocks: nodes.iter().map(|n| n.bloom.clone()).collect(),
        node_vectors: nodes.iter().map(|n| n.vector.clone()).collect(),
        node_histories: nodes.into_iter().map(|n| n.history).collect(),
    })
}

fn bucket_index(delta: u64) -> usize {
    match delta {
        0 => 0,
        d => d.ilog2() as usize + 1,
    }
}

fn bucket_bounds(idx: usize) -> (u64, u64) {
    match idx {
        0 => (0, 0),
        i => (1 << (i - 1), (1u64 << i) - 1),
    }
}

fn compute_metrics(records: &[EventRecord], m: usize, fp_threshold: f64) -> Result<SimMetrics> {
    let mut crosstab: BTreeMap<CausalVerdict, BTreeMap<CausalVerdict, u64>> = CausalVerdict::ALL
        .iter()
        .map(|&gt| (gt, CausalVerdict::ALL.iter().map(|&bv| (bv, 0)).collect()))
        .collect();

    let sums: Vec<u64> = records.iter().map(|r| r.bloom.logical_sum()).collect();

    struct BucketAccum {
        pairs: u64,
        false_positives: u64,
        predicted_sum: f64,
    }
    let mut buckets: Vec<BucketAccum> = Vec::new();

    let mut false_negatives = 0u64;
    let mut false_positives = 0u64;
    let mut comparable = 0u64;
    let mut accepted = 0u64;
    let mut pairs_total = 0u64;

    for i in 0..records.len() {
        for j in (i + 1)..records.len() {
            pairs_total += 1;
            let ground_truth = records[i].vector.compare(&records[j].vector)?;
            let bloom_verdict = records[i].bloom.compare(&records[j].bloom)?;
            *crosstab
                .get_mut(&ground_truth)
                .expect("all cells present")
                .get_mut(&bloom_verdict)
                .expect("all cells present") += 1;

            if bloom_verdict.is_comparable() {
                comparable += 1;
                let (a_sum, b_sum) = if sums[i] <= sums[j] {
                    (sums[i], sums[j])
                } else {
                    (sums[j], sums[i])
                };
                let predicted = fp_rate_for_sums(m, a_sum, b_sum)?;
                if predicted <= fp_threshold {
                    accepted += 1;
                }
                let is_fp = ground_truth == CausalVerdict::Concurrent;
                if is_fp {
                    false_positives += 1;
                }
                let delta = records[i].bloom.delta_sum(&records[j].bloom)?;
                let idx = bucket_index(delta);
                if buckets.len() <= idx {
                    buckets.resize_with(idx + 1, || BucketAccum {
                        pairs: 0,
                        false_positives: 0,
                        predicted_sum: 0.0,
                    });
                }
                let bucket = &mut buckets[idx];
                bucket.pairs += 1;
                bucket.false_positives += u64::from(is_fp);
                bucket.predicted_sum += predicted;
            } else if ground_truth == CausalVerdict::Before || ground_truth == CausalVerdict::After
            {
                false_negatives += 1;
            }
        }
    }

    let delta_buckets = buckets
        .iter()
        .enumerate()
        .filter(|(_, b)| b.pairs > 0)
        .map(|(idx, b)| {
            let (delta_lo, delta_hi) = bucket_bounds(idx);
            DeltaBucket {
                delta_lo,
                delta_hi,
                comparable_pairs: b.pairs,
                false_positives: b.false_positives,
                empirical_fp_rate: b.false_positives as f64 / b.pairs as f64,
                mean_predicted_fp_rate: b.predicted_sum / b.pairs as f64,
            }
        })
        .collect();

    let byte_stats = |lens: &mut dyn Iterator<Item = u64>| -> ByteStats {
        let mut min = u64::MAX;
        let mut max = 0u64;
        let mut total = 0u64;
        let mut count = 0u64;
        for len in lens {
            min = min.min(len);
            max = max.max(len);
            total += len;
            count += 1;
        }
        if count == 0 {
            ByteStats::default()
        } else {
            ByteStats {
                min,
                max,
                mean: total as f64 / count as f64,
            }
        }
    };
    let bloom_bytes = byte_stats(
        &mut records
            .iter()
            .map(|r| codec::encode_clock(&r.bloom).len() as u64),
    );
    let vector_bytes = byte_stats(
        &mut records
            .iter()
            .map(|r| codec::encode_vector(&r.vector).len() as u64),
    );

    Ok(SimMetrics {
        schema_version: METRICS_SCHEMA_VERSION,
        events: records.len() as u64,
        pairs_total,
        crosstab,
        false_negative_count: false_negatives,
        false_positive_count: false_positives,
        comparable_pairs: comparable,
        empirical_fp_rate: if comparable == 0 {
            0.0
        } else {
            false_positives as f64 / comparable as f64
        },
        accepted_pairs: accepted,
        rejected_pairs: comparable - accepted,
        delta_buckets,
        bloom_bytes,
        vector_bytes,
    })
}

/// One row of the per-pair sample written by the CLI: the pair in emission
/// order, both verdicts, and — for comparable pairs — the predicted rate in
/// the sum-ordered direction plus its threshold decision.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRow {
    pub t_a: u64,
    pub t_b: u64,
    pub ground_truth: CausalVerdict,
    pub bloom_verdict: CausalVerdict,
    pub delta_sum: u64,
    pub fp_predicted: Option<f64>,
    pub accepted: Option<bool>,
}

/// The first `cap` pairs in emission order, classified like the metrics.
pub fn pair_rows(records: &[EventRecord], fp_threshold: f64, cap: usize) -> Result<Vec<PairRow>> {
    let mut rows = Vec::with_capacity(cap.min(1024));
    'outer: for i in 0..records.len() {
        for j in (i + 1)..records.len() {
            if rows.len() >= cap {
                break 'outer;
            }
            let ground_truth = records[i].vector.compare(&records[j].vector)?;
            let confident =
                compare_with_confidence(&records[i].bloom, &records[j].bloom, fp_threshold)?;
            rows.push(PairRow {
                t_a: records[i].t,
                t_b: records[j].t,
                ground_truth,
                bloom_verdict: confident.verdict,
                delta_sum: records[i].bloom.delta_sum(&records[j].bloom)?,
                fp_predicted: confident.fp.map(|a| a.fp_rate),
                accepted: confident.accepted,
            });
        }
    }
    Ok(rows)
}

/// A structural verdict with its confidence decision: comparable verdicts
/// carry the false-positive rate of the dominated-toward-dominating
/// direction and whether it clears the threshold; a concurrent verdict is
/// definitive and carries neither.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidentVerdict {
    pub verdict: CausalVerdict,
    pub fp: Option<FpAssessment>,
    pub accepted: Option<bool>,
}

pub fn compare_with_confidence(
    a: &BloomClock,
    b: &BloomClock,
    fp_threshold: f64,
) -> Result<ConfidentVerdict> {
    let verdict = a.compare(b)?;
    let fp = match verdict {
        CausalVerdict::Concurrent => {
            return Ok(ConfidentVerdict {
                verdict,
                fp: None,
                accepted: None,
            })
        }
        CausalVerdict::Before | CausalVerdict::Equal => a.fp_rate(b)?,
        CausalVerdict::After => b.fp_rate(a)?,
    };
    Ok(ConfidentVerdict {
        verdict,
        fp: Some(fp),
        accepted: Some(fp.fp_rate <= fp_threshold),
    })
}

/// Monte Carlo estimate of the dominance probability behind the predicted
/// rate: both clocks grow from zero by uniformly random single-slot
/// increments, `a_sum` and `b_sum` of them, and the estimate is the
/// fraction of trials where B covers A slot-wise. Deterministic per seed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OverlapEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
}

pub fn montecarlo_overlap(
    m: usize,
    a_sum: u64,
    b_sum: u64,
    trials: u64,
    seed: u64,
) -> Result<OverlapEstimate> {
    if m == 0 {
        return Err(Error::InvalidConfig("need m >= 1 slots".into()));
    }
    if b_sum < a_sum {
        return Err(Error::SumOrder { a_sum, b_sum });
    }
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0u64; m];
    let mut b = vec![0u64; m];
    let mut hits = 0u64;
    for _ in 0..trials {
        a.fill(0);
        b.fill(0);
        for _ in 0..a_sum {
            a[rng.random_range(0..m)] += 1;
        }
        for _ in 0..b_sum {
            b[rng.random_range(0..m)] += 1;
        }
        if a.iter().zip(&b).all(|(x, y)| y >= x) {
            hits += 1;
        }
    }
    let mean = hits as f64 / trials as f64;
    let std_err = (mean * (1.0 - mean) / trials as f64).sqrt();
    Ok(OverlapEstimate {
        mean,
        std_err,
        trials,
    })
}

/// One scripted step: `origin` emits `event` and the message reaches exactly
/// `deliver_to`, in order, before the next step.
#[derive(Debug, Clone)]
pub struct ScriptStep {
    pub origin: usize,
    pub event: EventId,
    pub deliver_to: Vec<usize>,
}

/// Trace of a scripted run: the per-step records plus every node's clocks
/// snapshotted after each step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptRun {
    pub records: Vec<EventRecord>,
    pub bloom_states: Vec<Vec<BloomClock>>,
    pub vector_states: Vec<Vec<VectorClock>>,
    pub node_histories: Vec<ClockHistory>,
}

/// Replays an explicit event script through the same tick/merge/receive
/// machinery as [`run_simulation`], with per-step delivery lists instead of
/// sampled drops. Used for golden scenario replays and trace construction.
pub fn run_script(family: HashFamily, n_nodes: usize, steps: &[ScriptStep]) -> Result<ScriptRun> {
    if n_nodes == 0 {
        return Err(Error::InvalidConfig("need at least one node".into()));
    }
    let mut blooms: Vec<BloomClock> = (0..n_nodes).map(|_| BloomClock::zero(family)).collect();
    let mut vectors: Vec<VectorClock> = (0..n_nodes).map(|_| VectorClock::zero(n_nodes)).collect();
    let mut histories: Vec<ClockHistory> = (0..n_nodes).map(|_| ClockHistory::new()).collect();

    let mut records = Vec::with_capacity(steps.len());
    let mut bloom_states = Vec::with_capacity(steps.len());
    let mut vector_states = Vec::with_capacity(steps.len());

    for (idx, step) in steps.iter().enumerate() {
        let check = |node: usize| -> Result<()> {
            if node >= n_nodes {
                return Err(Error::InvalidConfig(format!(
                    "step {idx} references node {node} outside 0..{n_nodes}"
                )));
            }
            Ok(())
        };
        check(step.origin)?;

        blooms[step.origin] = blooms[step.origin].tick(&step.event);
        vectors[step.origin] = vectors[step.origin].tick(step.origin)?;
        histories[step.origin].record(blooms[step.origin].clone(), Some(step.event.clone()))?;
        let record = EventRecord {
            event: step.event.clone(),
            origin: step.origin,
            t: idx as u64 + 1,
            bloom: blooms[step.origin].clone(),
            vector: vectors[step.origin].clone(),
            indices: family.indices(&step.event),
        };

        for &to in &step.deliver_to {
            check(to)?;
            if to == step.origin {
                return Err(Error::InvalidConfig(format!(
                    "step {idx} delivers to its own origin {to}"
                )));
            }
            let merged = blooms[to].merge(&record.bloom)?;
            if merged != blooms[to] {
                histories[to].record(merged.clone(), Some(step.event.clone()))?;
            }
            blooms[to] = merged;
            vectors[to] = vectors[to].receive(&record.vector, to)?;
        }

        records.push(record);
        bloom_states.push(blooms.clone());
        vector_states.push(vectors.clone());
    }

    Ok(ScriptRun {
        records,
        bloom_states,
        vector_states,
        node_histories: histories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> SimConfig {
        SimConfig {
            n_nodes: 3,
            m: 32,
            k: 2,
            n_events: 30,
            drop_rate: 0.0,
            delay: DelayModel::Uniform { min: 5, max: 40 },
            seed: 7,
            fp_threshold: 0.2,
            history_cap: None,
        }
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let mut c = base_config();
        c.n_nodes = 1;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c = base_config();
        c.drop_rate = 1.5;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c = base_config();
        c.delay = DelayModel::Uniform { min: 9, max: 3 };
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c = base_config();
        c.history_cap = Some(0);
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
        c = base_config();
        c.m = 0;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn single_event_is_adopted_verbatim() {
        let config = SimConfig {
            n_nodes: 2,
            n_events: 1,
            delay: DelayModel::Fixed(1),
            ..base_config()
        };
        let run = run_simulation(&config).unwrap();
        assert_eq!(run.records.len(), 1);
        let emitted = &run.records[0].bloom;
        let receiver = 1 - run.records[0].origin;
        assert_eq!(&run.node_clocks[receiver], emitted);
        assert_eq!(
            run.node_clocks[receiver].compare(emitted).unwrap(),
            CausalVerdict::Equal
        );
    }

    #[test]
    fn full_drop_leaves_cross_node_pairs_concurrent() {
        let config = SimConfig {
            drop_rate: 1.0,
            ..base_config()
        };
        let run = run_simulation(&config).unwrap();
        assert_eq!(run.metrics.false_negative_count, 0);
        for i in 0..run.records.len() {
            for j in (i + 1)..run.records.len() {
                let (a, b) = (&run.records[i], &run.records[j]);
                let gt = a.vector.compare(&b.vector).unwrap();
                if a.origin == b.origin {
                    assert_eq!(gt, CausalVerdict::Before);
                } else {
                    assert_eq!(gt, CausalVerdict::Concurrent);
                }
            }
        }
    }

    #[test]
    fn empty_run_yields_empty_metrics() {
        let config = SimConfig {
            n_events: 0,
            ..base_config()
        };
        let run = run_simulation(&config).unwrap();
        assert_eq!(run.metrics.pairs_total, 0);
        assert_eq!(run.metrics.events, 0);
        assert_eq!(run.metrics.bloom_bytes, ByteStats::default());
    }

    #[test]
    fn identical_seeds_reproduce_the_run() {
        let config = SimConfig {
            n_nodes: 4,
            n_events: 60,
            drop_rate: 0.3,
            ..base_config()
        };
        let a = run_simulation(&config).unwrap();
        let b = run_simulation(&config).unwrap();
        assert_eq!(a, b);
        let different = run_simulation(&SimConfig { seed: 8, ..config }).unwrap();
        assert_ne!(a.records, different.records);
    }

    #[test]
    fn emission_order_is_strictly_increasing() {
        let run = run_simulation(&base_config()).unwrap();
        for (idx, r) in run.records.iter().enumerate() {
            assert_eq!(r.t, idx as u64 + 1);
        }
    }

    #[test]
    fn ordered_pairs_never_read_concurrent() {
        for seed in 0..4 {
            let config = SimConfig {
                n_nodes: 4,
                n_events: 120,
                drop_rate: 0.4,
                seed,
                ..base_config()
            };
            let run = run_simulation(&config).unwrap();
            assert_eq!(run.metrics.false_negative_count, 0, "seed {seed}");
        }
    }

    #[test]
    fn montecarlo_trivial_cases_are_exact() {
        let zero_a = montecarlo_overlap(6, 0, 9, 500, 1).unwrap();
        assert_eq!(zero_a.mean, 1.0);
        assert_eq!(zero_a.std_err, 0.0);
        let single_slot = montecarlo_overlap(1, 4, 7, 500, 1).unwrap();
        assert_eq!(single_slot.mean, 1.0);
    }

    #[test]
    fn montecarlo_pinned_reference_point() {
        // Frozen from the first high-trial run of this generator. The true
        // dominance probability sits far below the 0.2914 the sum formula
        // predicts for these parameters; the gap is expected and reported
        // per parameter point by the validation suites.
        let est = montecarlo_overlap(6, 7, 10, 1_000_000, 20260810).unwrap();
        assert_eq!(est.mean, 0.059025);
        assert!((est.std_err - 2.3567148613058814e-4).abs() < 1e-18);
    }

    #[test]
    fn montecarlo_rejects_bad_arguments() {
        assert_eq!(
            montecarlo_overlap(6, 8, 7, 10, 1).unwrap_err(),
            Error::SumOrder { a_sum: 8, b_sum: 7 }
        );
        assert_eq!(
            montecarlo_overlap(6, 1, 2, 0, 1).unwrap_err(),
            Error::NoTrials
        );
    }

    #[test]
    fn confidence_threshold_decides_acceptance() {
        let family = HashFamily::new(6, 2, 3).unwrap();
        let a = BloomClock::from_parts(family, vec![0, 2, 1, 2, 0, 2], 0).unwrap();
        let b = BloomClock::from_parts(family, vec![2, 2, 1, 2, 1, 2], 0).unwrap();

        let lenient = compare_with_confidence(&a, &b, 0.3).unwrap();
        assert_eq!(lenient.verdict, CausalVerdict::Before);
        assert_eq!(lenient.accepted, Some(true));
        assert!((lenient.fp.unwrap().fp_rate - 0.29140783693666355).abs() < 1e-12);

        let strict = compare_with_confidence(&a, &b, 0.1).unwrap();
        assert_eq!(strict.accepted, Some(false));

        let concurrent_left = BloomClock::from_parts(family, vec![9, 0, 0, 0, 0, 0], 0).unwrap();
        let concurrent_right = BloomClock::from_parts(family, vec![0, 9, 0, 0, 0, 0], 0).unwrap();
        let verdict = compare_with_confidence(&concurrent_left, &concurrent_right, 0.9).unwrap();
        assert_eq!(verdict.verdict, CausalVerdict::Concurrent);
        assert_eq!(verdict.fp, None);
        assert_eq!(verdict.accepted, None);
    }

    #[test]
    fn after_direction_uses_the_dominated_side() {
        let family = HashFamily::new(6, 2, 3).unwrap();
        let a = BloomClock::from_parts(family, vec![2, 2, 1, 2, 1, 2], 0).unwrap();
        let b = BloomClock::from_parts(family, vec![0, 2, 1, 2, 0, 2], 0).unwrap();
        let got = compare_with_confidence(&a, &b, 0.5).unwrap();
        assert_eq!(got.verdict, CausalVerdict::After);
        let fp = got.fp.unwrap();
        assert_eq!((fp.a_sum, fp.b_sum), (7, 10));
    }

    #[test]
    fn pair_rows_cap_and_columns() {
        let config = SimConfig {
            n_events: 12,
            ..base_config()
        };
        let run = run_simulation(&config).unwrap();
        let rows = pair_rows(&run.records, config.fp_threshold, 20).unwrap();
        assert_eq!(rows.len(), 20);
        for row in &rows {
            assert!(row.t_a < row.t_b);
            assert_eq!(
                row.fp_predicted.is_some(),
                row.bloom_verdict.is_comparable()
            );
        }
        let all = pair_rows(&run.records, config.fp_threshold, usize::MAX).unwrap();
        assert_eq!(all.len(), 12 * 11 / 2);
    }

    #[test]
    fn script_rejects_bad_nodes() {
        let family = HashFamily::new(8, 2, 1).unwrap();
        let step = ScriptStep {
            origin: 0,
            event: EventId::new("x").unwrap(),
            deliver_to: vec![0],
        };
        assert!(matches!(
            run_script(family, 2, &[step]),
            Err(Error::InvalidConfig(_))
        ));
    }
}
