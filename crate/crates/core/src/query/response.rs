use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::layout::QueryLayout;
use super::parse::ParsedQuery;
use super::retrieve::{evaluate_boolean, DocumentHit, MatchResult};
use crate::geometry::{Kind, Rect};
use crate::index::CorpusStore;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxJson {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl From<Rect> for BoxJson {
    fn from(r: Rect) -> Self {
        Self { x: r.x, y: r.y, w: r.w, h: r.h }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocBlockJson {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub kind: Kind,
}

/// Document blocks corresponding to one query node: `b{i}` for the i-th
/// sketched block, `d{j}` for the j-th vacancy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingJson {
    pub query_block: String,
    pub doc_blocks: Vec<DocBlockJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchJson {
    pub layout: String,
    pub hypothesis: String,
    pub score: f64,
    pub bbox: BoxJson,
    pub mapping: Vec<MappingJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentJson {
    pub doc_id: String,
    pub score: Option<f64>,
    pub matches: Vec<MatchJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    /// Query type (1–6) of each named layout.
    pub query_types: BTreeMap<String, u8>,
    pub results: Vec<DocumentJson>,
}

pub fn match_json(store: &CorpusStore, layout: &str, m: &MatchResult) -> MatchJson {
    let g = store.document(m.doc_slot).graph(m.hypothesis);
    let block = |i: usize| {
        let b = g.block(i);
        DocBlockJson {
            x: b.bbox.x,
            y: b.bbox.y,
            w: b.bbox.w,
            h: b.bbox.h,
            kind: b.kind,
        }
    };
    let mut mapping: Vec<MappingJson> = m
        .mapping
        .iter()
        .enumerate()
        .map(|(i, &b)| MappingJson {
            query_block: format!("b{i}"),
            doc_blocks: vec![block(b)],
        })
        .collect();
    mapping.extend(m.absorbed.iter().enumerate().map(|(j, a)| MappingJson {
        query_block: format!("d{j}"),
        doc_blocks: a.iter().map(|&b| block(b)).collect(),
    }));
    MatchJson {
        layout: layout.to_string(),
        hypothesis: m.hypothesis.to_string(),
        score: m.score,
        bbox: m.bbox.into(),
        mapping,
    }
}

fn document_json(store: &CorpusStore, hit: &DocumentHit) -> DocumentJson {
    DocumentJson {
        doc_id: hit.doc_id.clone(),
        score: hit.score,
        matches: hit.matches.iter().map(|(l, m)| match_json(store, l, m)).collect(),
    }
}

/// Evaluates a parsed query and shapes the ranked documents for output,
/// keeping at most `top_k` of them when given.
pub fn run_query(store: &CorpusStore, query: &ParsedQuery, use_hash: bool, top_k: Option<usize>) -> QueryResponse {
    let mut hits = evaluate_boolean(store, query, use_hash);
    if let Some(k) = top_k {
        hits.truncate(k);
    }
    QueryResponse {
        query_types: query.types(),
        results: hits.iter().map(|h| document_json(store, h)).collect(),
    }
}

/// Renders a single-layout retrieval (one entry per match, not per
/// document) for diagnostics.
pub fn matches_json(store: &CorpusStore, layout: &QueryLayout, matches: &[MatchResult]) -> Vec<MatchJson> {
    matches.iter().map(|m| match_json(store, &layout.name, m)).collect()
}
