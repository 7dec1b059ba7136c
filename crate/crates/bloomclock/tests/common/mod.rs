//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use proptest::prelude::*;

use bloomclock::{run_script, BloomClock, EventId, HashFamily, ScriptRun, ScriptStep};

/// Seed under which the scripted replay events hash to the slots the golden
/// scenario asserts: "t1-event" → {1,4}, "t2-event" → {1,6},
/// "t3-event" → {0,1} at m=8, k=2.
pub const GOLDEN_SEED: u64 = 1412;

pub const NODE_A: usize = 0;
pub const NODE_B: usize = 1;
pub const NODE_C: usize = 2;
pub const NODE_D: usize = 3;
pub const NODE_E: usize = 4;

pub fn golden_family() -> HashFamily {
    HashFamily::new(8, 2, GOLDEN_SEED).unwrap()
}

/// The five-node broadcast scenario: A emits t1 (C misses it), B emits t2
/// (C and D miss it), D emits t3 (delivered to E and C only), then C emits
/// t4 to everyone.
pub fn golden_script() -> Vec<ScriptStep> {
    let step = |origin: usize, event: &str, deliver_to: Vec<usize>| ScriptStep {
        origin,
        event: EventId::new(event).unwrap(),
        deliver_to,
    };
    vec![
        step(NODE_A, "t1-event", vec![NODE_B, NODE_D, NODE_E]),
        step(NODE_B, "t2-event", vec![NODE_A, NODE_E]),
        step(NODE_D, "t3-event", vec![NODE_E, NODE_C]),
        step(NODE_C, "t4-event", vec![NODE_A, NODE_B, NODE_D, NODE_E]),
    ]
}

pub fn golden_run() -> ScriptRun {
    run_script(golden_family(), 5, &golden_script()).unwrap()
}

/// Clock literal against the golden family.
pub fn golden_clock(counters: &[u64]) -> BloomClock {
    BloomClock::from_parts(golden_family(), counters.to_vec(), 0).unwrap()
}

/// Exact dominance probability by exhaustive enumeration of every increment
/// sequence: A grows by `a_sum` uniform slot choices, B independently by
/// `b_sum`, and the result is the exact fraction of sequence pairs where B
/// covers A slot-wise. Exponential in the sums; intended for tiny scales.
pub fn exact_overlap_probability(m: usize, a_sum: u32, b_sum: u32) -> f64 {
    fn counts(mut code: u64, m: usize, len: u32) -> Vec<u32> {
        let mut slots = vec![0u32; m];
        for _ in 0..len {
            slots[(code % m as u64) as usize] += 1;
            code /= m as u64;
        }
        slots
    }
    let a_total = (m as u64).pow(a_sum);
    let b_total = (m as u64).pow(b_sum);
    let mut dominated = 0u64;
    for a_code in 0..a_total {
        let a = counts(a_code, m, a_sum);
        for b_code in 0..b_total {
            let b = counts(b_code, m, b_sum);
            if a.iter().zip(&b).all(|(x, y)| y >= x) {
                dominated += 1;
            }
        }
    }
    dominated as f64 / (a_total as f64 * b_total as f64)
}

/// Transitive closure over per-event predecessor lists: `out[j][i]` is true
/// iff the event with order `i + 1` causally reaches the event with order
/// `j + 1`. Predecessors always precede, so a single forward pass closes
/// the relation.
pub fn reachability(dag_preds: &[Vec<u64>]) -> Vec<Vec<bool>> {
    let n = dag_preds.len();
    let mut reach = vec![vec![false; n]; n];
    for j in 0..n {
        for &p in &dag_preds[j] {
            let p = (p - 1) as usize;
            reach[j][p] = true;
            let (head, tail) = reach.split_at_mut(j);
            for i in 0..n {
                if head[p][i] {
                    tail[0][i] = true;
                }
            }
        }
    }
    reach
}

// --- proptest strategies shared by the property and acceptance suites ---

pub fn family_strategy() -> impl Strategy<Value = HashFamily> {
    (1usize..=16, 1usize..=5, 0u64..1024)
        .prop_map(|(m, k, seed)| HashFamily::new(m, k, seed).unwrap())
}

pub fn clock_strategy(family: HashFamily) -> impl Strategy<Value = BloomClock> {
    (proptest::collection::vec(0u64..32, family.m()), 0u64..4).prop_map(
        move |(counters, offset)| BloomClock::from_parts(family, counters, offset).unwrap(),
    )
}

pub fn event_strategy() -> impl Strategy<Value = EventId> {
    proptest::collection::vec(any::<u8>(), 1..12).prop_map(|bytes| EventId::new(bytes).unwrap())
}

pub fn single_clock_strategy() -> impl Strategy<Value = BloomClock> {
    family_strategy().prop_flat_map(clock_strategy)
}

/// Clocks with large counters and offsets, for exercising multi-byte
/// varints.
pub fn wide_clock_strategy() -> impl Strategy<Value = BloomClock> {
    family_strategy().prop_flat_map(|f| {
        (
            proptest::collection::vec(0u64..1 << 50, f.m()),
            0u64..1 << 40,
        )
            .prop_map(move |(counters, offset)| {
                BloomClock::from_parts(f, counters, offset).unwrap()
            })
    })
}

/// Uncompacted clocks: every counter at least 1, offset 0.
pub fn positive_clock_strategy() -> impl Strategy<Value = BloomClock> {
    family_strategy().prop_flat_map(|f| {
        proptest::collection::vec(1u64..100_000, f.m())
            .prop_map(move |counters| BloomClock::from_parts(f, counters, 0).unwrap())
    })
}

pub fn clock_pair_strategy() -> impl Strategy<Value = (BloomClock, BloomClock)> {
    family_strategy().prop_flat_map(|f| (clock_strategy(f), clock_strategy(f)))
}

pub fn clock_triple_strategy() -> impl Strategy<Value = (BloomClock, BloomClock, BloomClock)> {
    family_strategy().prop_flat_map(|f| (clock_strategy(f), clock_strategy(f), clock_strategy(f)))
}

/// A clock plus a derivation of it: the result of applying a random
/// sequence of ticks and merges-with-random-clocks, which must always
/// dominate the start.
pub fn derivation_strategy() -> impl Strategy<Value = (BloomClock, BloomClock)> {
    #[derive(Debug, Clone)]
    enum Op {
        Tick(EventId),
        Merge(Vec<u64>),
    }
    family_strategy().prop_flat_map(|family| {
        let op = prop_oneof![
            event_strategy().prop_map(Op::Tick),
            proptest::collection::vec(0u64..32, family.m()).prop_map(Op::Merge),
        ];
        (clock_strategy(family), proptest::collection::vec(op, 0..12)).prop_map(
            move |(start, ops)| {
                let mut current = start.clone();
                for op in ops {
                    current = match op {
                        Op::Tick(event) => current.tick(&event),
                        Op::Merge(counters) => {
                            let other = BloomClock::from_parts(family, counters, 0).unwrap();
                            current.merge(&other).unwrap()
                        }
                    };
                }
                (start, current)
            },
        )
    })
}

// --- law checks shared by the property and acceptance suites ---

pub fn check_semilattice_laws(
    a: &BloomClock,
    b: &BloomClock,
    c: &BloomClock,
) -> Result<(), TestCaseError> {
    let zero = BloomClock::zero(*a.family());
    prop_assert_eq!(a.merge(b).unwrap(), b.merge(a).unwrap());
    prop_assert_eq!(
        a.merge(b).unwrap().merge(c).unwrap(),
        a.merge(&b.merge(c).unwrap()).unwrap()
    );
    prop_assert_eq!(a.merge(a).unwrap(), a.clone());
    prop_assert_eq!(a.merge(&zero).unwrap(), a.clone());
    Ok(())
}

pub fn check_monotonicity_laws(
    a: &BloomClock,
    b: &BloomClock,
    event: &EventId,
) -> Result<(), TestCaseError> {
    use bloomclock::CausalVerdict::*;
    let ticked = a.tick(event);
    prop_assert_eq!(a.compare(&ticked).unwrap(), Before);
    prop_assert_eq!(
        ticked.logical_sum() - a.logical_sum(),
        a.family().k() as u64
    );
    let merged = a.merge(b).unwrap();
    prop_assert!(matches!(a.compare(&merged).unwrap(), Before | Equal));

    // Trichotomy: exactly one verdict, and flipping the arguments flips it.
    let forward = a.compare(b).unwrap();
    prop_assert_eq!(b.compare(a).unwrap(), forward.flipped());
    Ok(())
}

pub fn check_compaction_transparency(
    a: &BloomClock,
    b: &BloomClock,
    event: &EventId,
) -> Result<(), TestCaseError> {
    let ca = a.compact();
    prop_assert_eq!(&ca, a);
    prop_assert_eq!(ca.counters().iter().min(), Some(&0));
    prop_assert_eq!(ca.compare(b).unwrap(), a.compare(b).unwrap());
    prop_assert_eq!(ca.delta_sum(b).unwrap(), a.delta_sum(b).unwrap());
    let (lo, hi) = if a.logical_sum() <= b.logical_sum() {
        (a, b)
    } else {
        (b, a)
    };
    prop_assert_eq!(
        lo.compact().fp_rate(&hi.compact()).unwrap(),
        lo.fp_rate(hi).unwrap()
    );
    prop_assert_eq!(ca.merge(&b.compact()).unwrap(), a.merge(b).unwrap());
    prop_assert_eq!(ca.tick(event), a.tick(event));
    Ok(())
}
