use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::QueryError;
use crate::geometry::{interval_overlap, Direction, Kind, PageDims, Rect};
use crate::graph::{compute_adjacency, NeighborTable};

/// Block kind in a sketch; `Any` matches both kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Text,
    #[serde(rename = "nontext")]
    NonText,
    Any,
}

impl QueryKind {
    pub fn accepts(self, kind: Kind) -> bool {
        match self {
            QueryKind::Any => true,
            QueryKind::Text => kind == Kind::Text,
            QueryKind::NonText => kind == Kind::NonText,
        }
    }

    pub fn specified(self) -> Option<Kind> {
        match self {
            QueryKind::Text => Some(Kind::Text),
            QueryKind::NonText => Some(Kind::NonText),
            QueryKind::Any => None,
        }
    }
}

impl From<Kind> for QueryKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Text => QueryKind::Text,
            Kind::NonText => QueryKind::NonText,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryBlock {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
    pub kind: QueryKind,
}

impl QueryBlock {
    pub fn new(bbox: Rect, kind: QueryKind) -> Self {
        Self {
            x: bbox.x,
            y: bbox.y,
            w: bbox.w,
            h: bbox.h,
            kind,
        }
    }

    pub fn bbox(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }
}

/// Placeholder for vacant sketch space; matches one or more document blocks
/// of any kind.
#[derive(Debug, Clone, PartialEq)]
pub struct DummyBlock {
    pub bbox: Rect,
    /// (query block index, side) pairs whose vacancy this dummy covers.
    pub anchors: Vec<(usize, Direction)>,
}

/// Query categories by kind specification and presence of vacant space.
pub fn query_type(blocks: &[QueryBlock], has_vacancy: bool) -> u8 {
    let any = blocks.iter().filter(|b| b.kind == QueryKind::Any).count();
    let base = if any == 0 {
        1
    } else if any == blocks.len() {
        2
    } else {
        3
    };
    if has_vacancy {
        base + 3
    } else {
        base
    }
}

/// Fraction of a block's dimension a vacancy must exceed.
const VACANCY_FRACTION: f64 = 0.25;

/// Relative overlap area tolerated between two sketch blocks.
const OVERLAP_TOLERANCE: f64 = 0.05;

/// Subtracts `cover` intervals from `base`, returning the pieces of positive
/// length in ascending order.
fn uncovered(base: (f64, f64), cover: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut cover: Vec<(f64, f64)> = cover
        .iter()
        .map(|&(a, b)| (a.max(base.0), b.min(base.1)))
        .filter(|(a, b)| b > a)
        .collect();
    cover.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut at = base.0;
    for (a, b) in cover {
        if a > at {
            out.push((at, a));
        }
        at = at.max(b);
    }
    if base.1 > at {
        out.push((at, base.1));
    }
    out
}

/// Rectangle spanning `across` perpendicular to `dir`, from `from` to `to`
/// along it.
fn strip(dir: Direction, across: (f64, f64), from: f64, to: f64) -> Rect {
    let (lo, hi) = (from.min(to), from.max(to));
    if dir.is_horizontal() {
        Rect::from_edges(lo, across.0, hi, across.1)
    } else {
        Rect::from_edges(across.0, lo, across.1, hi)
    }
}

/// Finds the vacant regions next to each block side.
///
/// A side's vacant intervals are the parts not faced by any of the block's
/// neighbors in that direction; each extends until the first block lying in
/// that direction or the canvas edge. An interval becomes a dummy when it is
/// deeper than a quarter of the block's dimension along the direction and
/// wider than a quarter of the side, or when both its dimensions exceed the
/// smallest width and height among the block's neighbors. Overlapping
/// vacancies from different sides are merged into one dummy, represented by
/// the largest of them.
pub fn detect_vacancies(canvas: PageDims, blocks: &[Rect]) -> Vec<DummyBlock> {
    let (adj, _) = compute_adjacency(blocks);
    let mut found: Vec<(Rect, usize, Direction)> = Vec::new();
    for (i, a) in blocks.iter().enumerate() {
        let neighbors: Vec<usize> = Direction::ALL
            .iter()
            .flat_map(|&d| adj[i][d.index()].iter().copied())
            .collect();
        let min_w = neighbors.iter().map(|&n| blocks[n].w).reduce(f64::min);
        let min_h = neighbors.iter().map(|&n| blocks[n].h).reduce(f64::min);
        for d in Direction::ALL {
            let side = a.span_across(d);
            let faced: Vec<(f64, f64)> = adj[i][d.index()]
                .iter()
                .map(|&n| blocks[n].span_across(d))
                .collect();
            let forward = matches!(d, Direction::Right | Direction::Bottom);
            let (a0, a1) = a.span_along(d);
            let start = if forward { a1 } else { a0 };
            for piece in uncovered(side, &faced) {
                let mut end = match d {
                    Direction::Right => canvas.w,
                    Direction::Bottom => canvas.h,
                    Direction::Left | Direction::Top => 0.0,
                };
                for (j, c) in blocks.iter().enumerate() {
                    if j == i || interval_overlap(c.span_across(d), piece) <= 0.0 {
                        continue;
                    }
                    let (c0, c1) = c.span_along(d);
                    if forward && c1 > a1 {
                        end = end.min(c0);
                    } else if !forward && c0 < a0 {
                        end = end.max(c1);
                    }
                }
                let depth = if forward { end - start } else { start - end };
                if depth <= 0.0 {
                    continue;
                }
                let region = strip(d, piece, start, end);
                let (along_dim, across_dim) = if d.is_horizontal() { (a.w, a.h) } else { (a.h, a.w) };
                let by_fraction = depth > VACANCY_FRACTION * along_dim
                    && piece.1 - piece.0 > VACANCY_FRACTION * across_dim;
                let by_neighbors = matches!((min_w, min_h), (Some(w), Some(h)) if region.w > w && region.h > h);
                if by_fraction || by_neighbors {
                    found.push((region, i, d));
                }
            }
        }
    }

    // coalesce overlapping vacancies
    let mut group: Vec<usize> = (0..found.len()).collect();
    fn root(g: &mut [usize], mut i: usize) -> usize {
        while g[i] != i {
            g[i] = g[g[i]];
            i = g[i];
        }
        i
    }
    for i in 0..found.len() {
        for j in i + 1..found.len() {
            if found[i].0.overlaps(&found[j].0) {
                let (ri, rj) = (root(&mut group, i), root(&mut group, j));
                group[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut dummies: Vec<DummyBlock> = Vec::new();
    let mut slot_of: Vec<Option<usize>> = vec![None; found.len()];
    for (i, &(region, anchor, dir)) in found.iter().enumerate() {
        let r = root(&mut group, i);
        match slot_of[r] {
            Some(s) => {
                let dummy = &mut dummies[s];
                dummy.anchors.push((anchor, dir));
                if region.area() > dummy.bbox.area() {
                    dummy.bbox = region;
                }
            }
            None => {
                slot_of[r] = Some(dummies.len());
                dummies.push(DummyBlock {
                    bbox: region,
                    anchors: vec![(anchor, dir)],
                });
            }
        }
    }
    dummies
}

/// A validated sketch with its derived dummies and combined adjacency.
///
/// Nodes `0..blocks.len()` are the sketch blocks, the rest are dummies.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryLayout {
    pub name: String,
    pub canvas: PageDims,
    pub blocks: Vec<QueryBlock>,
    pub dummies: Vec<DummyBlock>,
    /// Index of the top-left block.
    pub reference: usize,
    adjacency: NeighborTable,
}

impl QueryLayout {
    pub fn new(name: impl Into<String>, canvas: PageDims, blocks: Vec<QueryBlock>) -> Result<Self, QueryError> {
        let name = name.into();
        if !(canvas.w > 0.0 && canvas.h > 0.0 && canvas.w.is_finite() && canvas.h.is_finite()) {
            return Err(QueryError::Malformed("canvas must have positive finite size".into()));
        }
        if blocks.is_empty() {
            return Err(QueryError::EmptyLayout(name));
        }
        let rects: Vec<Rect> = blocks.iter().map(QueryBlock::bbox).collect();
        for (i, r) in rects.iter().enumerate() {
            let finite = [r.x, r.y, r.w, r.h].iter().all(|v| v.is_finite());
            if !finite || r.w <= 0.0 || r.h <= 0.0 || r.x < 0.0 || r.y < 0.0 || r.right() > canvas.w || r.bottom() > canvas.h {
                return Err(QueryError::BadBlock { layout: name, block: i });
            }
        }
        for i in 0..rects.len() {
            for j in i + 1..rects.len() {
                if let Some(x) = rects[i].intersection(&rects[j]) {
                    if x.area() > OVERLAP_TOLERANCE * rects[i].area().min(rects[j].area()) {
                        return Err(QueryError::Overlap { layout: name, a: i, b: j });
                    }
                }
            }
        }
        let dummies = detect_vacancies(canvas, &rects);
        let mut nodes = rects.clone();
        nodes.extend(dummies.iter().map(|d| d.bbox));
        let (adjacency, _) = compute_adjacency(&nodes);

        // sketch blocks must be connected without passing through dummies
        let n = rects.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for d in Direction::ALL {
                for &j in &adjacency[i][d.index()] {
                    if j < n && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(QueryError::Disconnected(name));
        }

        let reference = (0..n)
            .min_by(|&i, &j| {
                rects[i]
                    .y
                    .total_cmp(&rects[j].y)
                    .then(rects[i].x.total_cmp(&rects[j].x))
                    .then(i.cmp(&j))
            })
            .expect("non-empty");
        Ok(Self {
            name,
            canvas,
            blocks,
            dummies,
            reference,
            adjacency,
        })
    }

    pub fn query_type(&self) -> u8 {
        query_type(&self.blocks, !self.dummies.is_empty())
    }

    pub fn is_dummy(&self, node: usize) -> bool {
        node >= self.blocks.len()
    }

    pub fn node_count(&self) -> usize {
        self.blocks.len() + self.dummies.len()
    }

    pub fn node_bbox(&self, node: usize) -> Rect {
        if self.is_dummy(node) {
            self.dummies[node - self.blocks.len()].bbox
        } else {
            self.blocks[node].bbox()
        }
    }

    /// Ordered neighbors of a node in the combined block/dummy graph.
    pub fn neighbors(&self, node: usize, dir: Direction) -> &[usize] {
        &self.adjacency[node][dir.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canvas() -> PageDims {
        PageDims::new(400.0, 400.0)
    }

    #[test]
    fn tiled_canvas_has_no_vacancy() {
        let rects = [
            Rect::new(0.0, 0.0, 400.0, 100.0),
            Rect::new(0.0, 110.0, 195.0, 290.0),
            Rect::new(205.0, 110.0, 195.0, 290.0),
        ];
        assert!(detect_vacancies(canvas(), &rects).is_empty());
    }

    #[test]
    fn strip_deeper_than_quarter_is_vacant() {
        // height-100 block with a 30-high empty strip below
        let d = detect_vacancies(PageDims::new(200.0, 130.0), &[Rect::new(0.0, 0.0, 200.0, 100.0)]);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].bbox, Rect::new(0.0, 100.0, 200.0, 30.0));
        assert_eq!(d[0].anchors, vec![(0, Direction::Bottom)]);
    }

    #[test]
    fn shallow_strip_is_not_vacant() {
        // height-100 block, 20-high strip below, smallest neighbor 50x40
        let rects = [Rect::new(0.0, 0.0, 200.0, 100.0), Rect::new(200.0, 0.0, 50.0, 40.0), Rect::new(200.0, 40.0, 100.0, 80.0)];
        let d = detect_vacancies(PageDims::new(300.0, 120.0), &rects);
        assert!(d.iter().all(|v| !v.anchors.contains(&(0, Direction::Bottom))), "{d:?}");
    }

    #[test]
    fn neighbor_rule_admits_small_but_wide_gap() {
        // 10% deep, but larger than the smallest neighbor
        let rects = [
            Rect::new(0.0, 0.0, 300.0, 300.0),
            Rect::new(300.0, 0.0, 20.0, 20.0),
            Rect::new(300.0, 20.0, 100.0, 340.0),
        ];
        let d = detect_vacancies(PageDims::new(400.0, 360.0), &rects);
        let below: Vec<_> = d.iter().filter(|v| v.anchors.contains(&(0, Direction::Bottom))).collect();
        assert_eq!(below.len(), 1);
        assert_eq!(below[0].bbox, Rect::new(0.0, 300.0, 300.0, 60.0));
    }

    #[test]
    fn enclosed_hole_becomes_one_dummy() {
        let rects = [
            Rect::new(0.0, 0.0, 400.0, 100.0),
            Rect::new(0.0, 100.0, 100.0, 200.0),
            Rect::new(300.0, 100.0, 100.0, 200.0),
            Rect::new(0.0, 300.0, 400.0, 100.0),
        ];
        let d = detect_vacancies(canvas(), &rects);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].bbox, Rect::new(100.0, 100.0, 200.0, 200.0));
        // the side columns see each other across the hole, so only the
        // top and bottom blocks report it
        assert_eq!(d[0].anchors, vec![(0, Direction::Bottom), (3, Direction::Top)]);
    }

    #[test]
    fn reference_is_top_left() {
        let l = QueryLayout::new(
            "A",
            canvas(),
            vec![
                QueryBlock::new(Rect::new(200.0, 0.0, 200.0, 400.0), QueryKind::Text),
                QueryBlock::new(Rect::new(0.0, 0.0, 200.0, 400.0), QueryKind::Any),
            ],
        )
        .unwrap();
        assert_eq!(l.reference, 1);
        assert_eq!(l.query_type(), 3);
        assert!(l.dummies.is_empty());
    }

    #[test]
    fn validation_errors() {
        let c = canvas();
        assert!(matches!(QueryLayout::new("A", c, vec![]), Err(QueryError::EmptyLayout(_))));
        let out = QueryBlock::new(Rect::new(300.0, 0.0, 200.0, 10.0), QueryKind::Text);
        assert!(matches!(QueryLayout::new("A", c, vec![out]), Err(QueryError::BadBlock { .. })));
        let a = QueryBlock::new(Rect::new(0.0, 0.0, 200.0, 200.0), QueryKind::Text);
        let b = QueryBlock::new(Rect::new(100.0, 100.0, 200.0, 200.0), QueryKind::Text);
        assert!(matches!(QueryLayout::new("A", c, vec![a, b]), Err(QueryError::Overlap { .. })));
        let far = QueryBlock::new(Rect::new(300.0, 300.0, 100.0, 100.0), QueryKind::Text);
        let near = QueryBlock::new(Rect::new(0.0, 0.0, 100.0, 100.0), QueryKind::Text);
        assert!(matches!(QueryLayout::new("A", c, vec![near, far]), Err(QueryError::Disconnected(_))));
    }

    #[test]
    fn types_by_kind_and_vacancy() {
        let k = |kinds: &[QueryKind]| -> Vec<QueryBlock> {
            kinds
                .iter()
                .map(|&kind| QueryBlock::new(Rect::new(0.0, 0.0, 1.0, 1.0), kind))
                .collect()
        };
        use QueryKind::*;
        assert_eq!(query_type(&k(&[Text, NonText]), false), 1);
        assert_eq!(query_type(&k(&[Any, Any]), false), 2);
        assert_eq!(query_type(&k(&[Any, Text]), false), 3);
        assert_eq!(query_type(&k(&[Text]), true), 4);
        assert_eq!(query_type(&k(&[Any]), true), 5);
        assert_eq!(query_type(&k(&[NonText, Any]), true), 6);
    }
}
