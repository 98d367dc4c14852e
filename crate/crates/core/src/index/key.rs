use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Direction, Kind, Location};
use crate::graph::LayoutGraph;

/// Largest neighbor count a key can represent; larger counts saturate.
pub const COUNT_CLAMP: u8 = 7;

/// Number of distinct encoded keys: 2 × 5 × 8⁴ × 2⁴.
pub const KEY_SPACE: u32 = 2 * 5 * 8 * 8 * 8 * 8 * 16;

/// Fixed-length block descriptor: kind, page location, clamped neighbor
/// counts per direction (top, bottom, left, right) and overlap flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextKey {
    pub kind: Kind,
    pub location: Location,
    pub counts: [u8; 4],
    pub overlaps: [bool; 4],
}

impl ContextKey {
    /// Mixed-radix integer code in `[0, KEY_SPACE)`.
    pub fn encode(&self) -> u32 {
        let mut k = self.kind.code() * 5 + self.location.code();
        for c in self.counts {
            k = k * 8 + u32::from(c.min(COUNT_CLAMP));
        }
        let bits = self
            .overlaps
            .iter()
            .fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
        k * 16 + bits
    }

    pub fn decode(k: u32) -> Option<Self> {
        if k >= KEY_SPACE {
            return None;
        }
        let mut rest = k;
        let bits = rest % 16;
        rest /= 16;
        let mut counts = [0u8; 4];
        for slot in counts.iter_mut().rev() {
            *slot = (rest % 8) as u8;
            rest /= 8;
        }
        let location = Location::from_code(rest % 5)?;
        let kind = Kind::from_code(rest / 5)?;
        let mut overlaps = [false; 4];
        for (i, o) in overlaps.iter_mut().enumerate() {
            *o = bits & (1 << (3 - i)) != 0;
        }
        Some(Self {
            kind,
            location,
            counts,
            overlaps,
        })
    }

    /// (kind, location) bucket of the coarse table, in `0..10`.
    pub fn coarse(&self) -> usize {
        coarse_slot(self.kind, self.location)
    }
}

pub(crate) fn coarse_slot(kind: Kind, location: Location) -> usize {
    (kind.code() * 5 + location.code()) as usize
}

/// Bucket index `k mod n`.
#[inline]
pub fn hash_key(k: u32, n: usize) -> usize {
    assert!(n >= 1, "hash table needs at least one bin");
    k as usize % n
}

/// Descriptor of the block at index `idx` of `graph`.
pub fn context_key(graph: &LayoutGraph, idx: usize) -> ContextKey {
    let b = graph.block(idx);
    let mut counts = [0u8; 4];
    for d in Direction::ALL {
        counts[d.index()] = graph.neighbors(idx, d).len().min(COUNT_CLAMP as usize) as u8;
    }
    ContextKey {
        kind: b.kind,
        location: b.location,
        counts,
        overlaps: graph.overlap_flags(idx),
    }
}

/// Descriptor of the block with id `block_id`.
pub fn context_key_for(graph: &LayoutGraph, block_id: u32) -> Result<ContextKey> {
    graph
        .index_of(block_id)
        .map(|i| context_key(graph, i))
        .ok_or(Error::UnknownBlock(block_id))
}
