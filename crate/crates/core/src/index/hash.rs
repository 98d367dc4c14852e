use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::key::{coarse_slot, context_key, hash_key, ContextKey, COUNT_CLAMP};
use crate::geometry::{Kind, Location};
use crate::graph::{HypothesisId, LayoutGraph};

/// Default number of fine bins (prime).
pub const DEFAULT_BINS: usize = 4093;

/// Above this many consistent keys a partial descriptor falls back to the
/// coarse table.
const MAX_ENUMERATED_KEYS: usize = 1024;

/// One indexed block: store slot of its document, hypothesis, block index
/// within that hypothesis graph, and its encoded key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Posting {
    pub doc: u32,
    pub hypothesis: HypothesisId,
    pub block: u32,
    pub key: u32,
}

/// Constraint on one neighbor count of a candidate block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountConstraint {
    Any,
    Exact(usize),
    AtLeast(usize),
}

impl CountConstraint {
    /// Whether a clamped stored count is consistent with the constraint.
    pub fn admits(self, clamped: u8) -> bool {
        let clamp = |n: usize| n.min(COUNT_CLAMP as usize) as u8;
        match self {
            CountConstraint::Any => true,
            CountConstraint::Exact(n) => clamped == clamp(n),
            CountConstraint::AtLeast(n) => clamped >= clamp(n),
        }
    }

    fn values(self) -> impl Iterator<Item = u8> {
        (0..=COUNT_CLAMP).filter(move |&c| self.admits(c))
    }
}

/// Possibly partial description of the block a match must start from.
/// `None` fields are unconstrained.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    pub kind: Option<Kind>,
    pub location: Option<Location>,
    pub counts: [CountConstraint; 4],
    pub overlaps: Option<[bool; 4]>,
}

impl Descriptor {
    pub fn exact(key: ContextKey) -> Self {
        Self {
            kind: Some(key.kind),
            location: Some(key.location),
            counts: key.counts.map(|c| CountConstraint::Exact(c as usize)),
            overlaps: Some(key.overlaps),
        }
    }

    pub fn admits(&self, key: &ContextKey) -> bool {
        self.kind.is_none_or(|k| k == key.kind)
            && self.location.is_none_or(|l| l == key.location)
            && self.overlaps.is_none_or(|o| o == key.overlaps)
            && self.counts.iter().zip(key.counts).all(|(c, v)| c.admits(v.min(COUNT_CLAMP)))
    }

    fn kinds(&self) -> Vec<Kind> {
        self.kind.map_or(vec![Kind::Text, Kind::NonText], |k| vec![k])
    }

    fn locations(&self) -> Vec<Location> {
        self.location.map_or(Location::ALL.to_vec(), |l| vec![l])
    }

    /// Number of encoded keys the descriptor admits.
    fn key_count(&self) -> usize {
        let counts: usize = self.counts.iter().map(|c| c.values().count()).product();
        let bits = if self.overlaps.is_some() { 1 } else { 16 };
        self.kinds().len() * self.locations().len() * counts * bits
    }

    /// Every admitted key, ascending by encoding.
    fn keys(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let bit_sets: Vec<[bool; 4]> = match self.overlaps {
            Some(o) => vec![o],
            None => (0..16u8)
                .map(|b| [b & 8 != 0, b & 4 != 0, b & 2 != 0, b & 1 != 0])
                .collect(),
        };
        let per_dir: Vec<Vec<u8>> = self.counts.iter().map(|c| c.values().collect()).collect();
        for kind in self.kinds() {
            for location in self.locations() {
                for &t in &per_dir[0] {
                    for &b in &per_dir[1] {
                        for &l in &per_dir[2] {
                            for &r in &per_dir[3] {
                                for &overlaps in &bit_sets {
                                    let key = ContextKey {
                                        kind,
                                        location,
                                        counts: [t, b, l, r],
                                        overlaps,
                                    };
                                    out.insert(key.encode());
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Chained hash table over block keys, plus a coarse table keyed by
/// (kind, location) for descriptors too loose to enumerate.
#[derive(Debug, Clone, PartialEq)]
pub struct HashIndex {
    bins: Vec<Vec<Posting>>,
    coarse: Vec<Vec<Posting>>,
    entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexStats {
    pub bins: usize,
    pub entries: usize,
    pub occupied_bins: usize,
    pub load_factor: f64,
    pub longest_chain: usize,
    /// Chain length → number of bins with that length.
    pub chain_histogram: BTreeMap<usize, usize>,
}

impl HashIndex {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "hash table needs at least one bin");
        Self {
            bins: vec![Vec::new(); n],
            coarse: vec![Vec::new(); 10],
            entries: 0,
        }
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    pub fn len(&self) -> usize {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries == 0
    }

    pub fn bin(&self, h: usize) -> &[Posting] {
        &self.bins[h]
    }

    pub fn coarse_bin(&self, slot: usize) -> &[Posting] {
        &self.coarse[slot]
    }

    /// Adds every block of `graph` under document slot `doc`.
    pub fn insert_graph(&mut self, doc: u32, graph: &LayoutGraph) {
        for idx in 0..graph.len() {
            let key = context_key(graph, idx);
            let p = Posting {
                doc,
                hypothesis: graph.hypothesis,
                block: idx as u32,
                key: key.encode(),
            };
            let h = hash_key(p.key, self.bins.len());
            self.bins[h].push(p);
            self.coarse[key.coarse()].push(p);
            self.entries += 1;
        }
    }

    /// Drops every posting of `graph` under document slot `doc`.
    pub fn remove_graph(&mut self, doc: u32, graph: &LayoutGraph) {
        let n = self.bins.len();
        let mut touched = BTreeSet::new();
        for idx in 0..graph.len() {
            let key = context_key(graph, idx);
            touched.insert((hash_key(key.encode(), n), key.coarse()));
        }
        let hyp = graph.hypothesis;
        for (h, c) in touched {
            let before = self.bins[h].len();
            self.bins[h].retain(|p| !(p.doc == doc && p.hypothesis == hyp));
            self.entries -= before - self.bins[h].len();
            self.coarse[c].retain(|p| !(p.doc == doc && p.hypothesis == hyp));
        }
    }

    /// Postings whose key satisfies `desc`. Fully determined descriptors scan
    /// one bin; loose ones scan the bins of every admitted key when there are
    /// few enough, otherwise the coarse (kind, location) buckets.
    pub fn lookup(&self, desc: &Descriptor) -> Vec<Posting> {
        let n = self.bins.len();
        let mut out = Vec::new();
        if desc.key_count() <= MAX_ENUMERATED_KEYS {
            let keys = desc.keys();
            let bins: BTreeSet<usize> = keys.iter().map(|&k| hash_key(k, n)).collect();
            for h in bins {
                out.extend(self.bins[h].iter().filter(|p| keys.contains(&p.key)));
            }
        } else {
            for kind in desc.kinds() {
                for loc in desc.locations() {
                    out.extend(self.coarse[coarse_slot(kind, loc)].iter().filter(|p| {
                        desc.admits(&ContextKey::decode(p.key).expect("stored keys are valid"))
                    }));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Postings of the coarse buckets the descriptor touches, unfiltered.
    pub fn coarse_lookup(&self, desc: &Descriptor) -> Vec<Posting> {
        let mut out = Vec::new();
        for kind in desc.kinds() {
            for loc in desc.locations() {
                out.extend_from_slice(&self.coarse[coarse_slot(kind, loc)]);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn stats(&self) -> IndexStats {
        let mut chain_histogram = BTreeMap::new();
        for b in &self.bins {
            *chain_histogram.entry(b.len()).or_insert(0) += 1;
        }
        IndexStats {
            bins: self.bins.len(),
            entries: self.entries,
            occupied_bins: self.bins.iter().filter(|b| !b.is_empty()).count(),
            load_factor: self.entries as f64 / self.bins.len() as f64,
            longest_chain: self.bins.iter().map(Vec::len).max().unwrap_or(0),
            chain_histogram,
        }
    }
}
