use super::symmetry::{aligned, merge_raw};
use super::{symmetry_maximize, HorizontalLine, HypothesisId, LayoutGraph};
use crate::geometry::{Direction, Kind, PageDims};
use crate::raster::RawBlock;

/// Tolerances for graph transforms, in units of the document's average
/// character height unless noted.
#[derive(Debug, Clone)]
pub struct GraphParams {
    /// Floor of the edge alignment tolerance, in pixels.
    pub align_min_px: f64,
    pub align_frac: f64,
    /// Relative difference allowed between two block character heights.
    pub height_tolerance: f64,
    /// Gap below which text blocks merge.
    pub merge_gap: f64,
    /// Maximum height of a block removed by the small-block hypothesis.
    pub small_height: f64,
    /// Gap below which non-text blocks merge.
    pub nontext_gap: f64,
    /// Maximum height of a caption line.
    pub caption_height: f64,
    /// Maximum gap between a caption and its picture.
    pub caption_gap: f64,
}

impl Default for GraphParams {
    fn default() -> Self {
        Self {
            align_min_px: 3.0,
            align_frac: 0.25,
            height_tolerance: 0.2,
            merge_gap: 1.0,
            small_height: 1.0,
            nontext_gap: 2.0,
            caption_height: 1.5,
            caption_gap: 1.0,
        }
    }
}

impl GraphParams {
    pub fn align_tolerance(&self, ach_doc: f64) -> f64 {
        self.align_min_px.max(self.align_frac * ach_doc)
    }
}

fn rebuild(g: &LayoutGraph, raw: &[RawBlock], hyp: HypothesisId) -> LayoutGraph {
    LayoutGraph::from_raw(g.doc_id.clone(), hyp, raw, g.page, g.ach_doc)
}

fn without(g: &LayoutGraph, drop: &[bool], hyp: HypothesisId) -> LayoutGraph {
    let raw: Vec<RawBlock> = g
        .raw_blocks()
        .into_iter()
        .zip(drop)
        .filter(|(_, &d)| !d)
        .map(|(b, _)| b)
        .collect();
    rebuild(g, &raw, hyp)
}

fn has_text(g: &LayoutGraph, idx: usize, dir: Direction) -> bool {
    g.neighbors(idx, dir).iter().any(|&n| g.block(n).kind == Kind::Text)
}

/// Removes blocks no taller than one character height that have a text
/// block directly above and a text block directly below.
pub fn hypothesis_remove_small(graph: &LayoutGraph, params: &GraphParams) -> LayoutGraph {
    let limit = params.small_height * graph.ach_doc;
    let drop: Vec<bool> = (0..graph.len())
        .map(|i| {
            graph.block(i).height() <= limit
                && has_text(graph, i, Direction::Top)
                && has_text(graph, i, Direction::Bottom)
        })
        .collect();
    without(graph, &drop, HypothesisId::H2)
}

/// Merges adjacent, aligned non-text blocks closer than the gap limit, one
/// pair at a time, until none remain.
pub fn hypothesis_merge_nontext(graph: &LayoutGraph, ach_doc: f64, params: &GraphParams) -> LayoutGraph {
    let tol = params.align_tolerance(ach_doc);
    let limit = params.nontext_gap * ach_doc;
    let mut g = rebuild(graph, &graph.raw_blocks(), HypothesisId::H3);
    loop {
        let mut pair = None;
        'search: for a in 0..g.len() {
            let ba = g.block(a);
            if ba.kind != Kind::NonText {
                continue;
            }
            for dir in [Direction::Bottom, Direction::Right] {
                let stacked = dir == Direction::Bottom;
                for &b in g.neighbors(a, dir) {
                    let bb = g.block(b);
                    if bb.kind != Kind::NonText {
                        continue;
                    }
                    let gap = if stacked {
                        bb.bbox.top() - ba.bbox.bottom()
                    } else {
                        bb.bbox.left() - ba.bbox.right()
                    };
                    if gap < limit && aligned(&ba.bbox, &bb.bbox, tol, stacked) {
                        pair = Some((a, b));
                        break 'search;
                    }
                }
            }
        }
        let Some((a, b)) = pair else { break };
        let mut raw = g.raw_blocks();
        raw[a] = merge_raw(&raw[a], &raw[b]);
        raw.swap_remove(b);
        g = rebuild(&g, &raw, HypothesisId::H3);
    }
    g
}

/// Removes single-line text blocks sitting within one character height of a
/// non-text block directly above or below them.
pub fn hypothesis_remove_captions(graph: &LayoutGraph, ach_doc: f64, params: &GraphParams) -> LayoutGraph {
    let max_h = params.caption_height * ach_doc;
    let max_gap = params.caption_gap * ach_doc;
    let drop: Vec<bool> = (0..graph.len())
        .map(|i| {
            let b = graph.block(i);
            if b.kind != Kind::Text || b.height() > max_h {
                return false;
            }
            let above = graph
                .neighbors(i, Direction::Top)
                .iter()
                .map(|&n| (b.bbox.top() - graph.block(n).bbox.bottom(), n))
                .min_by(|x, y| x.0.total_cmp(&y.0));
            let below = graph
                .neighbors(i, Direction::Bottom)
                .iter()
                .map(|&n| (graph.block(n).bbox.top() - b.bbox.bottom(), n))
                .min_by(|x, y| x.0.total_cmp(&y.0));
            [above, below]
                .into_iter()
                .flatten()
                .any(|(gap, n)| gap <= max_gap && graph.block(n).kind == Kind::NonText)
        })
        .collect();
    without(graph, &drop, HypothesisId::H4)
}

/// Builds the four hypothesis graphs of one page: the symmetry-maximized
/// graph and three independent variants of it.
pub fn build_all_hypotheses(
    doc_id: &str,
    raw: &[RawBlock],
    lines: &[HorizontalLine],
    page: PageDims,
    ach_doc: f64,
    params: &GraphParams,
) -> Vec<LayoutGraph> {
    let base = LayoutGraph::from_raw(doc_id, HypothesisId::H1, raw, page, ach_doc);
    let h1 = symmetry_maximize(&base, lines, ach_doc, params);
    let h2 = hypothesis_remove_small(&h1, params);
    let h3 = hypothesis_merge_nontext(&h1, ach_doc, params);
    let h4 = hypothesis_remove_captions(&h1, ach_doc, params);
    vec![h1, h2, h3, h4]
}
