//! Compact wire encoding for timestamps.
//!
//! Bloom clock layout: magic `0xBC`, format version `0x01`, then unsigned
//! LEB128 varints for `m`, the offset, and the `m` counters in order. The
//! layout mentions no node count, so the encoded size depends only on the
//! counter values — freshly compacted clocks encode small. `k` and the hash
//! seed are deployment configuration shared out of band, so decoding takes
//! the [`HashFamily`] and rejects an `m` mismatch.
//!
//! Vector clocks get the analogous layout (magic `0xCB`, version, entry
//! count, entries) so the two timestamp sizes can be compared fairly.

use crate::clock::BloomClock;
use crate::error::{Error, Result};
use crate::hash::HashFamily;
use crate::vclock::VectorClock;

pub const BLOOM_MAGIC: u8 = 0xBC;
pub const VECTOR_MAGIC: u8 = 0xCB;
pub const FORMAT_VERSION: u8 = 0x01;

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

/// Encoded length of a varint without materializing it.
pub fn varint_len(v: u64) -> usize {
    (64 - v.leading_zeros()).div_ceil(7).max(1) as usize
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(Error::Decode {
            offset: self.pos,
            reason: reason.into(),
        })
    }

    fn byte(&mut self, what: &str) -> Result<u8> {
        match self.bytes.get(self.pos) {
            Some(&b) => {
                self.pos += 1;
                Ok(b)
            }
            None => self.fail(format!("truncated input, expected {what}")),
        }
    }

    fn varint(&mut self, what: &str) -> Result<u64> {
        let start = self.pos;
        let mut value = 0u64;
        let mut shift = 0u32;
        loop {
            let byte = self.byte(what)?;
            if shift >= 63 && byte > 1 {
                self.pos = start;
                return self.fail(format!("varint overflows u64 in {what}"));
            }
            value |= ((byte & 0x7f) as u64) << shift;
            if byte & 0x80 == 0 {
                return Ok(value);
            }
            shift += 7;
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.bytes.len() {
            return self.fail("trailing bytes after a complete timestamp");
        }
        Ok(())
    }
}

pub fn encode_clock(clock: &BloomClock) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + clock.counters().len());
    out.push(BLOOM_MAGIC);
    out.push(FORMAT_VERSION);
    put_varint(&mut out, clock.family().m() as u64);
    put_varint(&mut out, clock.offset());
    for &c in clock.counters() {
        put_varint(&mut out, c);
    }
    out
}

pub fn decode_clock(family: &HashFamily, bytes: &[u8]) -> Result<BloomClock> {
    let mut r = Reader::new(bytes);
    let magic = r.byte("magic byte")?;
    if magic != BLOOM_MAGIC {
        r.pos = 0;
        return r.fail(format!("bad magic 0x{magic:02X}, want 0x{BLOOM_MAGIC:02X}"));
    }
    let version = r.byte("version byte")?;
    if version != FORMAT_VERSION {
        r.pos = 1;
        return r.fail(format!("unsupported format version {version}"));
    }
    let m = r.varint("counter count")?;
    if m != family.m() as u64 {
        return r.fail(format!(
            "encoded m={m} does not match the family m={}",
            family.m()
        ));
    }
    let offset = r.varint("offset")?;
    let mut counters = Vec::with_capacity(family.m());
    for i in 0..family.m() {
        counters.push(r.varint(&format!("counter {i}"))?);
    }
    r.finish()?;
    BloomClock::from_parts(*family, counters, offset)
}

pub fn encode_vector(vc: &VectorClock) -> Vec<u8> {
    let mut out = Vec::with_capacity(3 + vc.nodes());
    out.push(VECTOR_MAGIC);
    out.push(FORMAT_VERSION);
    put_varint(&mut out, vc.nodes() as u64);
    for &e in vc.entries() {
        put_varint(&mut out, e);
    }
    out
}

pub fn decode_vector(bytes: &[u8]) -> Result<VectorClock> {
    let mut r = Reader::new(bytes);
    let magic = r.byte("magic byte")?;
    if magic != VECTOR_MAGIC {
        r.pos = 0;
        return r.fail(format!(
            "bad magic 0x{magic:02X}, want 0x{VECTOR_MAGIC:02X}"
        ));
    }
    let version = r.byte("version byte")?;
    if version != FORMAT_VERSION {
        r.pos = 1;
        return r.fail(format!("unsupported format version {version}"));
    }
    let nodes = r.varint("node count")?;
    let mut entries = Vec::with_capacity(nodes as usize);
    for i in 0..nodes {
        entries.push(r.varint(&format!("entry {i}"))?);
    }
    r.finish()?;
    Ok(VectorClock::from_entries(entries))
}
