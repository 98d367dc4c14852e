use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::layout::QueryLayout;
use super::matching::{match_sublayout, rank_score};
use super::parse::ParsedQuery;
use crate::geometry::{spatial_location, Direction, Location, PageDims, Rect};
use crate::graph::HypothesisId;
use crate::index::{CorpusStore, CountConstraint, Descriptor, Posting};

/// One match of a query layout in a stored document.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub doc_id: String,
    pub doc_slot: u32,
    pub hypothesis: HypothesisId,
    /// Document block index for each query block.
    pub mapping: Vec<usize>,
    /// Document block indices absorbed by each dummy.
    pub absorbed: Vec<Vec<usize>>,
    pub bbox: Rect,
    pub score: f64,
}

impl MatchResult {
    /// Page rectangles of the mapped blocks, in query block order.
    pub fn mapped_rects(&self, store: &CorpusStore) -> Vec<Rect> {
        let g = store.document(self.doc_slot).graph(self.hypothesis);
        self.mapping.iter().map(|&b| g.block(b).bbox).collect()
    }
}

/// Necessary conditions on the document block paired with the reference
/// block: its kind, and per direction an exact count (sketch neighbors
/// only), a lower bound (some are dummies) or nothing (no neighbors drawn).
pub fn reference_descriptor(layout: &QueryLayout) -> Descriptor {
    let r = layout.reference;
    let mut counts = [CountConstraint::Any; 4];
    for d in Direction::ALL {
        let list = layout.neighbors(r, d);
        counts[d.index()] = if list.is_empty() {
            CountConstraint::Any
        } else if list.iter().any(|&n| layout.is_dummy(n)) {
            CountConstraint::AtLeast(list.len())
        } else {
            CountConstraint::Exact(list.len())
        };
    }
    Descriptor {
        kind: layout.blocks[r].kind.specified(),
        location: None,
        counts,
        overlaps: None,
    }
}

/// Start blocks to try: the hash lookup, or every block when `use_hash` is
/// off.
pub fn candidate_starts(store: &CorpusStore, layout: &QueryLayout, use_hash: bool) -> Vec<Posting> {
    if use_hash {
        store.candidate_lookup(&reference_descriptor(layout))
    } else {
        store.all_starts()
    }
}

fn page_position(m: &MatchResult) -> (f64, f64) {
    (m.bbox.y, m.bbox.x)
}

/// Orders matches by score, then doc id, page position and hypothesis.
pub fn sort_matches(matches: &mut [MatchResult]) {
    matches.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
            .then_with(|| {
                let (pa, pb) = (page_position(a), page_position(b));
                pa.0.total_cmp(&pb.0).then(pa.1.total_cmp(&pb.1))
            })
            .then(a.hypothesis.cmp(&b.hypothesis))
            .then_with(|| a.mapping.cmp(&b.mapping))
    });
}

/// Runs the matcher from each candidate start, drops matches that map the
/// same page rectangles as a better one in the same document, and ranks the
/// rest.
pub fn retrieve(store: &CorpusStore, layout: &QueryLayout, use_hash: bool) -> Vec<MatchResult> {
    retrieve_from(store, layout, &candidate_starts(store, layout, use_hash))
}

pub fn retrieve_from(store: &CorpusStore, layout: &QueryLayout, starts: &[Posting]) -> Vec<MatchResult> {
    let found: Vec<MatchResult> = starts
        .par_iter()
        .filter_map(|p| {
            let doc = store.document(p.doc);
            let g = doc.graph(p.hypothesis);
            let m = match_sublayout(layout, g, p.block as usize)?;
            let score = rank_score(layout, &m, g);
            Some(MatchResult {
                doc_id: doc.doc_id().to_string(),
                doc_slot: p.doc,
                hypothesis: p.hypothesis,
                mapping: m.mapping,
                absorbed: m.absorbed,
                bbox: m.bbox,
                score,
            })
        })
        .collect();
    let mut found = found;
    sort_matches(&mut found);
    let mut seen: HashMap<(u32, Vec<[u64; 4]>), ()> = HashMap::new();
    found.retain(|m| {
        let rects = m
            .mapped_rects(store)
            .iter()
            .map(|r| [r.x.to_bits(), r.y.to_bits(), r.w.to_bits(), r.h.to_bits()])
            .collect();
        seen.insert((m.doc_slot, rects), ()).is_none()
    });
    found
}

/// Whether a match lies in the requested page region (always true when no
/// region is given).
pub fn region_predicate(bbox: &Rect, page: PageDims, region: Option<Location>) -> bool {
    region.is_none_or(|r| spatial_location(bbox, page) == r)
}

/// A document satisfying a Boolean query, with the positive-atom matches
/// that support it.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentHit {
    pub doc_id: String,
    /// Best (lowest) score among supporting matches; `None` when the
    /// document qualifies without any positive match (e.g. `A OR NOT B`).
    pub score: Option<f64>,
    /// (layout name, match) pairs, best first.
    pub matches: Vec<(String, MatchResult)>,
}

type SlotMatches = HashMap<u32, Vec<usize>>;

/// Evaluates the query over every stored document. A layout atom holds in a
/// document when some match of that layout (on any hypothesis) lies in the
/// atom's region.
pub fn evaluate_boolean(store: &CorpusStore, query: &ParsedQuery, use_hash: bool) -> Vec<DocumentHit> {
    let atoms = query.expr.atoms();
    let mut by_layout: BTreeMap<&str, Vec<MatchResult>> = BTreeMap::new();
    for (name, _, _) in &atoms {
        by_layout
            .entry(name)
            .or_insert_with(|| retrieve(store, &query.layouts[*name], use_hash));
    }
    // per (layout, region): slot → indices of qualifying matches
    let mut holds: HashMap<(&str, Option<Location>), SlotMatches> = HashMap::new();
    for (name, region, _) in &atoms {
        holds.entry((name, *region)).or_insert_with(|| {
            let mut per_doc = SlotMatches::new();
            for (i, m) in by_layout[name].iter().enumerate() {
                let page = store.document(m.doc_slot).graph(m.hypothesis).page;
                if region_predicate(&m.bbox, page, *region) {
                    per_doc.entry(m.doc_slot).or_default().push(i);
                }
            }
            per_doc
        });
    }

    let mut hits = Vec::new();
    for slot in 0..store.len() as u32 {
        let truth = query
            .expr
            .eval(&mut |name, region| holds[&(name, region)].contains_key(&slot));
        if !truth {
            continue;
        }
        let mut matches: Vec<(String, MatchResult)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (name, region, positive) in &atoms {
            if !positive || !seen.insert((*name, *region)) {
                continue;
            }
            if let Some(idx) = holds[&(*name, *region)].get(&slot) {
                for &i in idx {
                    let m = &by_layout[name][i];
                    if !matches.iter().any(|(n, x)| n == name && x == m) {
                        matches.push((name.to_string(), m.clone()));
                    }
                }
            }
        }
        matches.sort_by(|a, b| {
            a.1.score
                .total_cmp(&b.1.score)
                .then_with(|| a.0.cmp(&b.0))
                .then_with(|| page_position(&a.1).0.total_cmp(&page_position(&b.1).0))
                .then_with(|| page_position(&a.1).1.total_cmp(&page_position(&b.1).1))
                .then(a.1.hypothesis.cmp(&b.1.hypothesis))
        });
        hits.push(DocumentHit {
            doc_id: store.document(slot).doc_id().to_string(),
            score: matches.first().map(|(_, m)| m.score),
            matches,
        });
    }
    hits.sort_by(|a, b| match (a.score, b.score) {
        (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.doc_id.cmp(&b.doc_id)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.doc_id.cmp(&b.doc_id),
    });
    hits
}
