//! JSON form of a document's hypothesis graphs. Field order is fixed by the
//! struct declarations and map keys are sorted, so output is byte-stable.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Block, HypothesisId, LayoutGraph, NeighborTable};
use crate::error::{Error, Result};
use crate::geometry::{spatial_location, Direction, Kind, PageDims, Rect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub kind: Kind,
    pub ach_block: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NeighborRecord {
    pub top: Vec<u32>,
    pub bottom: Vec<u32>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

impl NeighborRecord {
    fn slot(&self, d: Direction) -> &[u32] {
        match d {
            Direction::Top => &self.top,
            Direction::Bottom => &self.bottom,
            Direction::Left => &self.left,
            Direction::Right => &self.right,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub id: HypothesisId,
    pub blocks: Vec<BlockRecord>,
    pub neighbors: BTreeMap<u32, NeighborRecord>,
    pub overlaps: BTreeMap<u32, [bool; 4]>,
}

/// Where a document's blocks came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMeta {
    /// `"image"` or `"annotation"`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub page: PageDims,
    pub ach_doc: f64,
    pub hypotheses: Vec<HypothesisRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceMeta>,
}

impl HypothesisRecord {
    pub fn from_graph(g: &LayoutGraph) -> Self {
        let ids: Vec<u32> = g.blocks().iter().map(|b| b.id).collect();
        let blocks = g
            .blocks()
            .iter()
            .map(|b| BlockRecord {
                id: b.id,
                x: b.bbox.x,
                y: b.bbox.y,
                w: b.bbox.w,
                h: b.bbox.h,
                kind: b.kind,
                ach_block: b.ach_block,
            })
            .collect();
        let mut neighbors = BTreeMap::new();
        let mut overlaps = BTreeMap::new();
        for (i, &id) in ids.iter().enumerate() {
            let list = |d| g.neighbors(i, d).iter().map(|&n| ids[n]).collect();
            neighbors.insert(
                id,
                NeighborRecord {
                    top: list(Direction::Top),
                    bottom: list(Direction::Bottom),
                    left: list(Direction::Left),
                    right: list(Direction::Right),
                },
            );
            overlaps.insert(id, g.overlap_flags(i));
        }
        Self {
            id: g.hypothesis,
            blocks,
            neighbors,
            overlaps,
        }
    }

    /// Rebuilds the graph, validating ids and adjacency.
    pub fn to_graph(&self, doc_id: &str, page: PageDims, ach_doc: f64) -> Result<LayoutGraph> {
        let mut index = HashMap::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            if index.insert(b.id, i).is_some() {
                return Err(Error::DuplicateBlockId(b.id));
            }
        }
        let blocks: Vec<Block> = self
            .blocks
            .iter()
            .map(|b| {
                let bbox = Rect::new(b.x, b.y, b.w, b.h);
                Block {
                    id: b.id,
                    bbox,
                    kind: b.kind,
                    ach_block: b.ach_block,
                    location: spatial_location(&bbox, page),
                }
            })
            .collect();
        let mut table: NeighborTable = vec![Default::default(); blocks.len()];
        let mut overlaps = vec![[false; 4]; blocks.len()];
        for (id, rec) in &self.neighbors {
            let &i = index.get(id).ok_or(Error::UnknownBlock(*id))?;
            for d in Direction::ALL {
                for n in rec.slot(d) {
                    table[i][d.index()].push(*index.get(n).ok_or(Error::UnknownBlock(*n))?);
                }
            }
        }
        for (id, flags) in &self.overlaps {
            let &i = index.get(id).ok_or(Error::UnknownBlock(*id))?;
            overlaps[i] = *flags;
        }
        LayoutGraph::from_parts(doc_id, self.id, blocks, table, overlaps, page, ach_doc)
    }
}

impl DocumentRecord {
    pub fn from_graphs(graphs: &[LayoutGraph], source: Option<SourceMeta>) -> Self {
        let first = &graphs[0];
        Self {
            doc_id: first.doc_id.clone(),
            page: first.page,
            ach_doc: first.ach_doc,
            hypotheses: graphs.iter().map(HypothesisRecord::from_graph).collect(),
            source,
        }
    }

    /// All four hypothesis graphs, in H1..H4 order.
    pub fn to_graphs(&self) -> Result<Vec<LayoutGraph>> {
        let ids: Vec<HypothesisId> = self.hypotheses.iter().map(|h| h.id).collect();
        if ids != HypothesisId::ALL {
            return Err(Error::InvalidGraph(format!(
                "document `{}` must carry hypotheses H1..H4 in order",
                self.doc_id
            )));
        }
        if !(self.page.w > 0.0 && self.page.h > 0.0) {
            return Err(Error::InvalidGraph(format!("document `{}` has an empty page", self.doc_id)));
        }
        self.hypotheses
            .iter()
            .map(|h| h.to_graph(&self.doc_id, self.page, self.ach_doc))
            .collect()
    }

    pub fn hypothesis(&self, id: HypothesisId) -> Option<&HypothesisRecord> {
        self.hypotheses.iter().find(|h| h.id == id)
    }
}
