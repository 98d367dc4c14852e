use std::collections::HashMap;

use super::components::{ComponentLabel, ConnectedComponent};
use super::{median, RawBlock};
use crate::geometry::{interval_overlap, Kind};

/// Adaptive smoothing constraints: two text components link when the gap
/// between them is at most `a * min(h1, h2)` and their height ratio is at
/// most `r`.
#[derive(Debug, Clone)]
pub struct ArlsaParams {
    pub a: f64,
    pub r: f64,
}

impl Default for ArlsaParams {
    fn default() -> Self {
        Self { a: 3.0, r: 3.5 }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn linked(c1: &ConnectedComponent, c2: &ConnectedComponent, p: &ArlsaParams) -> bool {
    if c1.bbox.overlaps(&c2.bbox) {
        return true;
    }
    if c1.label != ComponentLabel::Text || c2.label != ComponentLabel::Text {
        return false;
    }
    let (h1, h2) = (c1.bbox.h, c2.bbox.h);
    let (lo, hi) = (h1.min(h2), h1.max(h2));
    if hi > p.r * lo {
        return false;
    }
    let (a, b) = (&c1.bbox, &c2.bbox);
    let reach = p.a * lo;
    let x_ov = interval_overlap((a.left(), a.right()), (b.left(), b.right()));
    let y_ov = interval_overlap((a.top(), a.bottom()), (b.top(), b.bottom()));
    // horizontal smear within a line, vertical smear between lines
    (y_ov > 0.0 && -x_ov <= reach) || (x_ov > 0.0 && -y_ov <= reach)
}

/// Groups components into blocks.
///
/// Text components are linked by the adaptive gap/height-ratio rule;
/// components with intersecting boxes are always grouped. Each group yields
/// its minimum bounding rectangle; the kind is the label holding the larger
/// pixel mass (ties go to non-text).
pub fn arlsa_blocks(components: &[ConnectedComponent], params: &ArlsaParams) -> Vec<RawBlock> {
    if components.is_empty() {
        return Vec::new();
    }
    let mut hs: Vec<f64> = components.iter().map(|c| c.bbox.h).collect();
    let cell = (median(&mut hs).unwrap_or(1.0) * 4.0).max(8.0);
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);

    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, c) in components.iter().enumerate() {
        let (x0, y0) = key(c.bbox.left(), c.bbox.top());
        let (x1, y1) = key(c.bbox.right(), c.bbox.bottom());
        for gy in y0..=y1 {
            for gx in x0..=x1 {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }

    let mut uf = UnionFind::new(components.len());
    let mut seen = Vec::new();
    for (i, c) in components.iter().enumerate() {
        let reach = if c.label == ComponentLabel::Text {
            params.a * c.bbox.h
        } else {
            0.0
        };
        let (x0, y0) = key(c.bbox.left() - reach, c.bbox.top() - reach);
        let (x1, y1) = key(c.bbox.right() + reach, c.bbox.bottom() + reach);
        seen.clear();
        for gy in y0..=y1 {
            for gx in x0..=x1 {
                if let Some(cands) = grid.get(&(gx, gy)) {
                    seen.extend(cands.iter().copied().filter(|&j| j > i));
                }
            }
        }
        seen.sort_unstable();
        seen.dedup();
        for &j in &seen {
            if linked(c, &components[j], params) {
                uf.union(i, j);
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..components.len() {
        let root = uf.find(i);
        let g = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }

    let mut blocks: Vec<RawBlock> = groups
        .into_iter()
        .map(|members| {
            let bbox = members
                .iter()
                .map(|&i| components[i].bbox)
                .reduce(|a, b| a.union(&b))
                .expect("non-empty group");
            let (mut text_mass, mut other_mass) = (0u64, 0u64);
            let mut text_heights = Vec::new();
            for &i in &members {
                let c = &components[i];
                if c.label == ComponentLabel::Text {
                    text_mass += c.pixel_count;
                    text_heights.push(c.bbox.h);
                } else {
                    other_mass += c.pixel_count;
                }
            }
            let kind = if text_mass > other_mass {
                Kind::Text
            } else {
                Kind::NonText
            };
            RawBlock {
                bbox,
                kind,
                ach_block: median(&mut text_heights).unwrap_or(0.0),
            }
        })
        .collect();
    blocks.sort_by(|a, b| {
        (a.bbox.top(), a.bbox.left())
            .partial_cmp(&(b.bbox.top(), b.bbox.left()))
            .expect("finite coordinates")
    });
    blocks
}
