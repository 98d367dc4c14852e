use std::collections::VecDeque;

use super::layout::QueryLayout;
use crate::geometry::{Direction, Rect};
use crate::graph::LayoutGraph;

/// Correspondence between a query layout and part of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Match {
    /// Document block index for each query block.
    pub mapping: Vec<usize>,
    /// Document block indices absorbed by each dummy, ascending.
    pub absorbed: Vec<Vec<usize>>,
    /// Union of every mapped and absorbed block.
    pub bbox: Rect,
}

struct State {
    /// Query node → document block.
    fwd: Vec<Option<usize>>,
    /// Document block → query node.
    back: Vec<Option<usize>>,
    absorbed: Vec<Vec<usize>>,
}

/// One step of a slot alignment.
enum Step {
    Pair(usize, usize),
    Absorb(usize, std::ops::Range<usize>),
}

/// Aligns an ordered query-neighbor list against an ordered document list.
/// Sketch blocks pair one-to-one, in order, with compatible document blocks;
/// dummies swallow one or more consecutive entries; every document entry must
/// be consumed. Among valid alignments the one where earlier dummies absorb
/// the fewest entries is chosen.
fn align_slot(layout: &QueryLayout, graph: &LayoutGraph, state: &State, q: &[usize], d: &[usize]) -> Option<Vec<Step>> {
    let (m, n) = (q.len(), d.len());
    let compatible = |qi: usize, dj: usize| -> bool {
        let node = q[qi];
        let doc = d[dj];
        layout.blocks[node].kind.accepts(graph.block(doc).kind)
            && state.fwd[node].is_none_or(|b| b == doc)
            && state.back[doc].is_none_or(|n| n == node)
    };
    // ok[i][j]: query items i.. can consume document entries j..
    let mut ok = vec![vec![false; n + 1]; m + 1];
    ok[m][n] = true;
    for i in (0..m).rev() {
        for j in (0..=n).rev() {
            ok[i][j] = if layout.is_dummy(q[i]) {
                (j + 1..=n).any(|k| ok[i + 1][k])
            } else {
                j < n && compatible(i, j) && ok[i + 1][j + 1]
            };
        }
    }
    if !ok[0][0] {
        return None;
    }
    let mut steps = Vec::with_capacity(m);
    let mut j = 0;
    for i in 0..m {
        if layout.is_dummy(q[i]) {
            let k = (j + 1..=n).find(|&k| ok[i + 1][k]).expect("feasible");
            steps.push(Step::Absorb(q[i] - layout.blocks.len(), j..k));
            j = k;
        } else {
            steps.push(Step::Pair(q[i], d[j]));
            j += 1;
        }
    }
    Some(steps)
}

/// Coupled breadth-first traversal of the query and document graphs from
/// the query's reference block paired with document block `start`.
///
/// For each matched pair and each direction, the query node's neighbor list
/// is aligned against the document block's list. An empty query list leaves
/// that side unconstrained. The match succeeds once every sketch block is
/// mapped injectively and no absorbed block is also mapped.
pub fn match_sublayout(layout: &QueryLayout, graph: &LayoutGraph, start: usize) -> Option<Match> {
    let nq = layout.blocks.len();
    let r = layout.reference;
    if !layout.blocks[r].kind.accepts(graph.block(start).kind) {
        return None;
    }
    let mut state = State {
        fwd: vec![None; nq],
        back: vec![None; graph.len()],
        absorbed: vec![Vec::new(); layout.dummies.len()],
    };
    state.fwd[r] = Some(start);
    state.back[start] = Some(r);
    let mut queue = VecDeque::from([(r, start)]);
    while let Some((qn, bn)) = queue.pop_front() {
        for dir in Direction::ALL {
            let qs = layout.neighbors(qn, dir);
            if qs.is_empty() {
                continue;
            }
            let steps = align_slot(layout, graph, &state, qs, graph.neighbors(bn, dir))?;
            for step in steps {
                match step {
                    Step::Pair(q, b) => {
                        if state.fwd[q].is_none() {
                            state.fwd[q] = Some(b);
                            state.back[b] = Some(q);
                            queue.push_back((q, b));
                        }
                    }
                    Step::Absorb(dummy, range) => {
                        state.absorbed[dummy].extend(graph.neighbors(bn, dir)[range].iter().copied());
                    }
                }
            }
        }
    }
    let mapping: Vec<usize> = state.fwd.iter().copied().collect::<Option<_>>()?;
    let mut bbox = graph.block(start).bbox;
    for a in state.absorbed.iter_mut() {
        a.sort_unstable();
        a.dedup();
        for &b in a.iter() {
            if state.back[b].is_some() {
                return None;
            }
            bbox = bbox.union(&graph.block(b).bbox);
        }
    }
    for &b in &mapping {
        bbox = bbox.union(&graph.block(b).bbox);
    }
    Some(Match {
        mapping,
        absorbed: state.absorbed,
        bbox,
    })
}

/// Mean over sketch blocks of `0.5 * aspect + 0.5 * position`, where aspect
/// is the relative aspect-ratio difference and position the distance between
/// the block centroid normalized to the canvas and the matched block centroid
/// normalized to the match's bounding box. Lower is better.
pub fn rank_score(layout: &QueryLayout, m: &Match, graph: &LayoutGraph) -> f64 {
    let c = layout.canvas;
    let mb = m.bbox;
    let total: f64 = layout
        .blocks
        .iter()
        .zip(&m.mapping)
        .map(|(q, &b)| {
            let qb = q.bbox();
            let db = graph.block(b).bbox;
            let (aq, ad) = (qb.aspect(), db.aspect());
            let aspect = (aq - ad).abs() / aq.max(ad);
            let (qu, qv) = (qb.cx() / c.w, qb.cy() / c.h);
            let (du, dv) = ((db.cx() - mb.x) / mb.w, (db.cy() - mb.y) / mb.h);
            let position = ((qu - du).powi(2) + (qv - dv).powi(2)).sqrt();
            0.5 * aspect + 0.5 * position
        })
        .sum();
    total / layout.blocks.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Kind, PageDims};
    use crate::graph::HypothesisId;
    use crate::query::layout::{QueryBlock, QueryKind};
    use crate::raster::RawBlock;

    fn graph(blocks: &[(f64, f64, f64, f64, Kind)]) -> LayoutGraph {
        let raw: Vec<RawBlock> = blocks
            .iter()
            .map(|&(x, y, w, h, kind)| RawBlock {
                bbox: Rect::new(x, y, w, h),
                kind,
                ach_block: 10.0,
            })
            .collect();
        LayoutGraph::from_raw("d", HypothesisId::H1, &raw, PageDims::new(1000.0, 1000.0), 10.0)
    }

    fn layout(blocks: &[(f64, f64, f64, f64, QueryKind)]) -> QueryLayout {
        QueryLayout::new(
            "q",
            PageDims::new(400.0, 400.0),
            blocks
                .iter()
                .map(|&(x, y, w, h, k)| QueryBlock::new(Rect::new(x, y, w, h), k))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_block() {
        let q = layout(&[(0.0, 0.0, 400.0, 400.0, QueryKind::Text)]);
        let g = graph(&[(10.0, 10.0, 100.0, 100.0, Kind::Text), (200.0, 10.0, 100.0, 100.0, Kind::NonText)]);
        let m = match_sublayout(&q, &g, 0).unwrap();
        assert_eq!(m.mapping, vec![0]);
        assert!(match_sublayout(&q, &g, 1).is_none());
    }

    #[test]
    fn header_over_two_columns_at_any_scale() {
        let q = layout(&[
            (0.0, 0.0, 400.0, 100.0, QueryKind::Text),
            (0.0, 120.0, 190.0, 280.0, QueryKind::NonText),
            (210.0, 120.0, 190.0, 280.0, QueryKind::Text),
        ]);
        for (sx, sy, dx, dy) in [(1.0, 1.0, 0.0, 0.0), (2.0, 0.5, 100.0, 300.0), (0.7, 1.9, 20.0, 5.0)] {
            let s = |r: Rect| r.scaled(sx, sy, dx, dy);
            let blocks: Vec<_> = [
                (Rect::new(0.0, 0.0, 400.0, 100.0), Kind::Text),
                (Rect::new(0.0, 120.0, 190.0, 280.0), Kind::NonText),
                (Rect::new(210.0, 120.0, 190.0, 280.0), Kind::Text),
            ]
            .iter()
            .map(|&(r, k)| {
                let r = s(r);
                (r.x, r.y, r.w, r.h, k)
            })
            .collect();
            let g = graph(&blocks);
            let m = match_sublayout(&q, &g, 0).unwrap();
            assert_eq!(m.mapping, vec![0, 1, 2]);
            if sx == sy {
                assert!(rank_score(&q, &m, &g) < 1e-12);
            }
        }
    }

    #[test]
    fn kind_conflict_fails() {
        let q = layout(&[
            (0.0, 0.0, 400.0, 100.0, QueryKind::Text),
            (0.0, 120.0, 400.0, 280.0, QueryKind::Text),
        ]);
        let g = graph(&[(0.0, 0.0, 400.0, 100.0, Kind::Text), (0.0, 120.0, 400.0, 280.0, Kind::NonText)]);
        assert!(match_sublayout(&q, &g, 0).is_none());
        let any = layout(&[
            (0.0, 0.0, 400.0, 100.0, QueryKind::Text),
            (0.0, 120.0, 400.0, 280.0, QueryKind::Any),
        ]);
        assert!(match_sublayout(&any, &g, 0).is_some());
    }

    #[test]
    fn dummy_absorbs_several_blocks() {
        // header, then a vacancy below it
        let q = layout(&[(0.0, 0.0, 400.0, 100.0, QueryKind::Text)]);
        assert_eq!(q.dummies.len(), 1);
        assert_eq!(q.query_type(), 4);
        let g = graph(&[
            (0.0, 0.0, 800.0, 100.0, Kind::Text),
            (0.0, 120.0, 190.0, 200.0, Kind::Text),
            (200.0, 120.0, 190.0, 200.0, Kind::NonText),
            (400.0, 120.0, 190.0, 200.0, Kind::Text),
            (600.0, 120.0, 200.0, 200.0, Kind::Text),
        ]);
        let m = match_sublayout(&q, &g, 0).unwrap();
        assert_eq!(m.absorbed, vec![vec![1, 2, 3, 4]]);
        assert_eq!(m.bbox, Rect::new(0.0, 0.0, 800.0, 320.0));
        // nothing below: the dummy has nothing to absorb
        let lone = graph(&[(0.0, 0.0, 800.0, 100.0, Kind::Text)]);
        assert!(match_sublayout(&q, &lone, 0).is_none());
    }

    #[test]
    fn exact_slot_rejects_extra_neighbors() {
        let q = layout(&[
            (0.0, 0.0, 400.0, 100.0, QueryKind::Text),
            (0.0, 120.0, 400.0, 280.0, QueryKind::Text),
        ]);
        let g = graph(&[
            (0.0, 0.0, 400.0, 100.0, Kind::Text),
            (0.0, 120.0, 190.0, 280.0, Kind::Text),
            (210.0, 120.0, 190.0, 280.0, Kind::Text),
        ]);
        assert!(match_sublayout(&q, &g, 0).is_none());
    }

    #[test]
    fn score_formula() {
        let q = layout(&[(0.0, 0.0, 400.0, 400.0, QueryKind::Text)]);
        let g = graph(&[(0.0, 0.0, 200.0, 100.0, Kind::Text)]);
        let m = match_sublayout(&q, &g, 0).unwrap();
        assert!((rank_score(&q, &m, &g) - 0.25).abs() < 1e-12);
    }
}
