use super::{GraphParams, HorizontalLine, HypothesisId, LayoutGraph};
use crate::geometry::{interval_overlap, Direction, Kind, Rect};
use crate::raster::RawBlock;

/// Left, right or center edges agree within `tol`, along the axis
/// perpendicular to a vertical (`stacked`) or horizontal neighbor pair.
pub(crate) fn aligned(a: &Rect, b: &Rect, tol: f64, stacked: bool) -> bool {
    let (a0, a1, b0, b1) = if stacked {
        (a.left(), a.right(), b.left(), b.right())
    } else {
        (a.top(), a.bottom(), b.top(), b.bottom())
    };
    (a0 - b0).abs() <= tol || (a1 - b1).abs() <= tol || ((a0 + a1) - (b0 + b1)).abs() <= 2.0 * tol
}

/// True when a horizontal line lies in the vertical gap between `upper` and
/// `lower` and crosses their shared horizontal extent.
fn line_between(upper: &Rect, lower: &Rect, lines: &[HorizontalLine]) -> bool {
    let shared = (upper.left().max(lower.left()), upper.right().min(lower.right()));
    lines.iter().any(|l| {
        l.y >= upper.bottom() && l.y <= lower.top() && interval_overlap((l.x0, l.x1), shared) > 0.0
    })
}

fn same_char_height(h1: f64, h2: f64, tol: f64) -> bool {
    (h1 - h2).abs() <= tol * h1.max(h2)
}

pub(crate) fn merge_raw(a: &RawBlock, b: &RawBlock) -> RawBlock {
    let (wa, wb) = (a.bbox.area(), b.bbox.area());
    RawBlock {
        bbox: a.bbox.union(&b.bbox),
        kind: a.kind,
        ach_block: (a.ach_block * wa + b.ach_block * wb) / (wa + wb),
    }
}

/// All block-index pairs `(upper, lower)` that may be merged in `g`.
pub(crate) fn mergeable_pairs(
    g: &LayoutGraph,
    lines: &[HorizontalLine],
    ach_doc: f64,
    params: &GraphParams,
) -> Vec<(usize, usize)> {
    let tol = params.align_tolerance(ach_doc);
    let mut out = Vec::new();
    for a in 0..g.len() {
        let ba = g.block(a);
        if ba.kind != Kind::Text {
            continue;
        }
        for &b in g.neighbors(a, Direction::Bottom) {
            let bb = g.block(b);
            if bb.kind != Kind::Text {
                continue;
            }
            let gap = bb.bbox.top() - ba.bbox.bottom();
            if gap < params.merge_gap * ach_doc
                && aligned(&ba.bbox, &bb.bbox, tol, true)
                && same_char_height(ba.ach_block, bb.ach_block, params.height_tolerance)
                && !line_between(&ba.bbox, &bb.bbox, lines)
            {
                out.push((a, b));
            }
        }
    }
    out
}

/// Merges vertically adjacent text blocks that are aligned, have similar
/// character heights, sit closer than one character height and are not
/// separated by a horizontal line. Merges are applied one pair at a time in
/// (top, left) order, rebuilding adjacency after each, until none apply.
pub fn symmetry_maximize(
    graph: &LayoutGraph,
    lines: &[HorizontalLine],
    ach_doc: f64,
    params: &GraphParams,
) -> LayoutGraph {
    let mut g = graph.clone();
    while let Some(&(a, b)) = mergeable_pairs(&g, lines, ach_doc, params).first() {
        let mut raw = g.raw_blocks();
        let merged = merge_raw(&raw[a], &raw[b]);
        raw[a] = merged;
        raw.swap_remove(b);
        g = LayoutGraph::from_raw(g.doc_id.clone(), HypothesisId::H1, &raw, g.page, g.ach_doc);
    }
    g.hypothesis = HypothesisId::H1;
    g
}
