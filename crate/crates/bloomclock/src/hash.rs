//! Index derivation for clock ticks.
//!
//! Every event is mapped to `k` counter indices in `[0, m)` by double
//! hashing: two base digests `h1`, `h2` of the event bytes are combined as
//! `(h1 + i * h2) mod m` for `i = 0..k-1`. The base digest is seeded
//! FNV-1a 64 finished with a splitmix64 mixer; it is part of the wire-level
//! contract of this crate and must not change, since recorded runs and the
//! golden fixtures replay exact index placements.

use crate::error::{Error, Result};

const FNV_OFFSET_BASIS: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

// Distinguishes the second digest stream from the first.
const SECOND_DIGEST_SALT: u64 = 0x9e3779b97f4a7c15;

fn fnv1a(bytes: &[u8], basis: u64) -> u64 {
    let mut h = basis;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58476d1ce4e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    x
}

/// The `(m, k, seed)` parameters shared by every clock in a deployment.
///
/// `m` is the number of counters, `k` the number of hash functions applied
/// per event. Two clocks can only be merged or compared when their families
/// are identical, seed included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct HashFamily {
    m: usize,
    k: usize,
    seed: u64,
}

impl HashFamily {
    pub fn new(m: usize, k: usize, seed: u64) -> Result<Self> {
        if m == 0 || k == 0 {
            return Err(Error::InvalidFamily { m, k });
        }
        Ok(Self { m, k, seed })
    }

    /// Counter count `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Hash functions per event, `k`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `k` counter indices incremented by `event`, in derivation order.
    ///
    /// Duplicates are possible and each occurrence increments its slot, so a
    /// tick always adds exactly `k` to a clock's total. Deterministic in
    /// `(m, k, seed, event)`.
    pub fn indices(&self, event: &EventId) -> Vec<usize> {
        let h1 = mix(fnv1a(event.as_bytes(), FNV_OFFSET_BASIS ^ self.seed));
        let h2 = mix(fnv1a(
            event.as_bytes(),
            FNV_OFFSET_BASIS ^ self.seed ^ SECOND_DIGEST_SALT,
        ));
        (0..self.k as u64)
            .map(|i| (h1.wrapping_add(i.wrapping_mul(h2)) % self.m as u64) as usize)
            .collect()
    }
}

/// An event identity: any non-empty byte string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventId(Vec<u8>);

impl EventId {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::EmptyEventId);
        }
        Ok(Self(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Display for EventId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", String::from_utf8_lossy(&self.0))
    }
}
