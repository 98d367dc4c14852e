//! Block adjacency graphs and segmentation hypotheses.

mod adjacency;
mod hypotheses;
mod schema;
mod symmetry;

pub use adjacency::{compute_adjacency, NeighborTable};
pub use hypotheses::{
    build_all_hypotheses, hypothesis_merge_nontext, hypothesis_remove_captions,
    hypothesis_remove_small, GraphParams,
};
pub use schema::{BlockRecord, DocumentRecord, HypothesisRecord, NeighborRecord, SourceMeta};
pub use symmetry::symmetry_maximize;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{spatial_location, Direction, Kind, Location, PageDims, Rect};
use crate::raster::RawBlock;

/// Segmentation hypothesis identifier. H1 is the symmetry-maximized graph;
/// H2 drops small sandwiched blocks, H3 merges close non-text blocks and H4
/// drops caption lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HypothesisId {
    H1,
    H2,
    H3,
    H4,
}

impl HypothesisId {
    pub const ALL: [HypothesisId; 4] = [
        HypothesisId::H1,
        HypothesisId::H2,
        HypothesisId::H3,
        HypothesisId::H4,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for HypothesisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.index() + 1)
    }
}

impl FromStr for HypothesisId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H1" => Ok(HypothesisId::H1),
            "H2" => Ok(HypothesisId::H2),
            "H3" => Ok(HypothesisId::H3),
            "H4" => Ok(HypothesisId::H4),
            _ => Err(Error::InvalidGraph(format!("unknown hypothesis `{s}`"))),
        }
    }
}

/// A horizontal ruling kept from the raster stage; blocks separated by one
/// are never merged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalLine {
    pub y: f64,
    pub x0: f64,
    pub x1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: u32,
    pub bbox: Rect,
    pub kind: Kind,
    pub ach_block: f64,
    pub location: Location,
}

impl Block {
    pub fn width(&self) -> f64 {
        self.bbox.w
    }

    pub fn height(&self) -> f64 {
        self.bbox.h
    }
}

/// Blocks of one document under one hypothesis, with visibility adjacency.
///
/// Neighbor lists hold block indices (positions in `blocks`), ordered by the
/// perpendicular coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutGraph {
    pub doc_id: String,
    pub hypothesis: HypothesisId,
    pub page: PageDims,
    pub ach_doc: f64,
    blocks: Vec<Block>,
    neighbors: NeighborTable,
    overlaps: Vec<[bool; 4]>,
}

impl LayoutGraph {
    /// Builds adjacency over `blocks`. Block locations are recomputed from
    /// the geometry.
    pub fn build(
        doc_id: impl Into<String>,
        hypothesis: HypothesisId,
        mut blocks: Vec<Block>,
        page: PageDims,
        ach_doc: f64,
    ) -> Result<Self> {
        let mut seen = HashSet::with_capacity(blocks.len());
        for b in &blocks {
            if !seen.insert(b.id) {
                return Err(Error::DuplicateBlockId(b.id));
            }
        }
        for b in blocks.iter_mut() {
            b.location = spatial_location(&b.bbox, page);
        }
        let rects: Vec<Rect> = blocks.iter().map(|b| b.bbox).collect();
        let (neighbors, overlaps) = compute_adjacency(&rects);
        Ok(Self {
            doc_id: doc_id.into(),
            hypothesis,
            page,
            ach_doc,
            blocks,
            neighbors,
            overlaps,
        })
    }

    /// Builds a graph from raw blocks, numbering them in (top, left) order.
    pub fn from_raw(
        doc_id: impl Into<String>,
        hypothesis: HypothesisId,
        raw: &[RawBlock],
        page: PageDims,
        ach_doc: f64,
    ) -> Self {
        let mut sorted: Vec<&RawBlock> = raw.iter().collect();
        sorted.sort_by(|a, b| {
            a.bbox
                .top()
                .total_cmp(&b.bbox.top())
                .then(a.bbox.left().total_cmp(&b.bbox.left()))
                .then(a.bbox.w.total_cmp(&b.bbox.w))
                .then(a.bbox.h.total_cmp(&b.bbox.h))
        });
        let blocks = sorted
            .into_iter()
            .enumerate()
            .map(|(i, r)| Block {
                id: i as u32,
                bbox: r.bbox,
                kind: r.kind,
                ach_block: r.ach_block,
                location: Location::Center,
            })
            .collect();
        Self::build(doc_id, hypothesis, blocks, page, ach_doc).expect("sequential ids are unique")
    }

    /// Assembles a graph from stored parts after checking structural
    /// invariants (ids unique, neighbor indices valid, adjacency symmetric).
    pub fn from_parts(
        doc_id: impl Into<String>,
        hypothesis: HypothesisId,
        blocks: Vec<Block>,
        neighbors: NeighborTable,
        overlaps: Vec<[bool; 4]>,
        page: PageDims,
        ach_doc: f64,
    ) -> Result<Self> {
        let g = Self {
            doc_id: doc_id.into(),
            hypothesis,
            page,
            ach_doc,
            blocks,
            neighbors,
            overlaps,
        };
        g.check_invariants()?;
        Ok(g)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, idx: usize) -> &Block {
        &self.blocks[idx]
    }

    /// Index of the block with the given id.
    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.id == id)
    }

    #[inline]
    pub fn neighbors(&self, idx: usize, dir: Direction) -> &[usize] {
        &self.neighbors[idx][dir.index()]
    }

    pub fn overlap_flags(&self, idx: usize) -> [bool; 4] {
        self.overlaps[idx]
    }

    pub fn neighbor_table(&self) -> &NeighborTable {
        &self.neighbors
    }

    /// Raw view of the blocks, for feeding into further transforms.
    pub fn raw_blocks(&self) -> Vec<RawBlock> {
        self.blocks
            .iter()
            .map(|b| RawBlock {
                bbox: b.bbox,
                kind: b.kind,
                ach_block: b.ach_block,
            })
            .collect()
    }

    /// Same blocks and adjacency, ignoring ids and hypothesis label.
    pub fn same_layout(&self, other: &LayoutGraph) -> bool {
        self.blocks.len() == other.blocks.len()
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.bbox == b.bbox && a.kind == b.kind && a.ach_block == b.ach_block)
            && self.neighbors == other.neighbors
    }

    pub fn check_invariants(&self) -> Result<()> {
        let n = self.blocks.len();
        let mut seen = HashSet::with_capacity(n);
        for b in &self.blocks {
            if !seen.insert(b.id) {
                return Err(Error::DuplicateBlockId(b.id));
            }
            if !(b.bbox.w > 0.0 && b.bbox.h > 0.0) {
                return Err(Error::InvalidGraph(format!("block {} has no area", b.id)));
            }
        }
        if self.neighbors.len() != n || self.overlaps.len() != n {
            return Err(Error::InvalidGraph("neighbor table size mismatch".into()));
        }
        for a in 0..n {
            for d in Direction::ALL {
                for &b in &self.neighbors[a][d.index()] {
                    if b >= n || b == a {
                        return Err(Error::InvalidGraph(format!(
                            "block {} has an invalid {:?} neighbor",
                            self.blocks[a].id, d
                        )));
                    }
                    if !self.neighbors[b][d.opposite().index()].contains(&a) {
                        return Err(Error::InvalidGraph(format!(
                            "adjacency between blocks {} and {} is not symmetric",
                            self.blocks[a].id, self.blocks[b].id
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
