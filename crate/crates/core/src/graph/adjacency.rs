//! Four-directional visibility adjacency over rectangles.
//!
//! `b` is a right neighbor of `a` when their vertical projections overlap by
//! a positive amount, `b` starts at or after the horizontal center of `a`,
//! and the corridor between `a`'s right edge and `b`'s left edge, restricted
//! to the shared vertical interval, contains no part of any third rectangle.
//! Bottom neighbors are the transposed rule; left and top lists are the
//! inverse relations, so adjacency is symmetric by construction.

use crate::geometry::{interval_overlap, Direction, Rect};

/// Neighbor indices per rectangle, one list per [`Direction`] slot.
pub type NeighborTable = Vec<[Vec<usize>; 4]>;

/// Rectangle seen along one axis: `along` runs in the forward direction,
/// `across` is perpendicular.
#[derive(Clone, Copy)]
struct Axial {
    along: (f64, f64),
    across: (f64, f64),
}

fn axial(r: &Rect, horizontal: bool) -> Axial {
    if horizontal {
        Axial {
            along: (r.left(), r.right()),
            across: (r.top(), r.bottom()),
        }
    } else {
        Axial {
            along: (r.top(), r.bottom()),
            across: (r.left(), r.right()),
        }
    }
}

/// Forward neighbors (right when `horizontal`, else bottom) of every rect.
fn forward_neighbors(rects: &[Rect], horizontal: bool) -> Vec<Vec<usize>> {
    let ax: Vec<Axial> = rects.iter().map(|r| axial(r, horizontal)).collect();
    let mut out = vec![Vec::new(); rects.len()];
    let mut ahead: Vec<usize> = Vec::new();
    for (a, aa) in ax.iter().enumerate() {
        let center = (aa.along.0 + aa.along.1) / 2.0;
        // possible neighbors and occluders all share some of a's
        // perpendicular span and extend forward of it
        ahead.clear();
        ahead.extend((0..ax.len()).filter(|&c| {
            c != a
                && (ax[c].along.1 > aa.along.1 || ax[c].along.0 >= center)
                && interval_overlap(ax[c].across, aa.across) > 0.0
        }));
        ahead.sort_by(|&i, &j| ax[i].along.0.total_cmp(&ax[j].along.0).then(i.cmp(&j)));

        for (pos, &b) in ahead.iter().enumerate() {
            let bb = &ax[b];
            if bb.along.0 < center {
                continue;
            }
            let shared = (aa.across.0.max(bb.across.0), aa.across.1.min(bb.across.1));
            let corridor_open = bb.along.0 > aa.along.1;
            let occluded = corridor_open
                && ahead[..pos].iter().any(|&c| {
                    c != b
                        && ax[c].along.0 < bb.along.0
                        && ax[c].along.1 > aa.along.1
                        && interval_overlap(ax[c].across, shared) > 0.0
                });
            if !occluded {
                out[a].push(b);
            }
        }
    }
    out
}

/// Sort key for a neighbor list: position along the perpendicular axis.
fn sort_list(list: &mut [usize], rects: &[Rect], dir: Direction) {
    list.sort_by(|&i, &j| {
        let (ri, rj) = (&rects[i], &rects[j]);
        let (ki, kj) = if dir.is_horizontal() {
            ((ri.top(), ri.left()), (rj.top(), rj.left()))
        } else {
            ((ri.left(), ri.top()), (rj.left(), rj.top()))
        };
        ki.0.total_cmp(&kj.0)
            .then(ki.1.total_cmp(&kj.1))
            .then(i.cmp(&j))
    });
}

/// Full neighbor table and per-direction overlap flags.
pub fn compute_adjacency(rects: &[Rect]) -> (NeighborTable, Vec<[bool; 4]>) {
    let n = rects.len();
    let mut table: NeighborTable = vec![Default::default(); n];
    for (horizontal, fwd, back) in [
        (true, Direction::Right, Direction::Left),
        (false, Direction::Bottom, Direction::Top),
    ] {
        for (a, list) in forward_neighbors(rects, horizontal).into_iter().enumerate() {
            for b in list {
                table[a][fwd.index()].push(b);
                table[b][back.index()].push(a);
            }
        }
    }
    let mut overlaps = vec![[false; 4]; n];
    for a in 0..n {
        for d in Direction::ALL {
            sort_list(&mut table[a][d.index()], rects, d);
            overlaps[a][d.index()] = table[a][d.index()]
                .iter()
                .any(|&b| rects[a].overlaps(&rects[b]));
        }
    }
    (table, overlaps)
}
