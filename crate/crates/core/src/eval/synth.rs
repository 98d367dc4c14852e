use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{Kind, PageDims, Rect};
use crate::ingest::{AnnotatedBlock, BlockAnnotation};
use crate::query::QueryLayout;
use crate::raster::GrayImage;

/// Gap left between sketch blocks by the battery generator, in canvas units.
pub const QUERY_GUTTER: f64 = 32.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub seed: u64,
    pub docs: usize,
    pub page: PageDims,
    pub margin: f64,
    /// Space between neighboring page blocks.
    pub gutter: f64,
    /// Smallest block side the partition may produce.
    pub min_block: f64,
    pub min_depth: u32,
    pub max_depth: u32,
    /// Probability that a block is text.
    pub text_prob: f64,
    /// Probability that a document receives a planted layout (when layouts
    /// are supplied).
    pub plant_prob: f64,
    /// Per-axis range of planting scale factors.
    pub plant_scale: (f64, f64),
    /// Chance of a small text line between two stacked text blocks.
    pub small_rate: f64,
    /// Chance of a caption under a non-text block.
    pub caption_rate: f64,
    /// Chance of a non-text block split in two.
    pub split_rate: f64,
    pub char_height: f64,
    pub raster: bool,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 0,
            docs: 100,
            page: PageDims::new(1600.0, 2400.0),
            margin: 40.0,
            gutter: 24.0,
            min_block: 64.0,
            min_depth: 2,
            max_depth: 6,
            text_prob: 0.6,
            plant_prob: 0.5,
            plant_scale: (0.5, 2.0),
            small_rate: 0.0,
            caption_rate: 0.0,
            split_rate: 0.0,
            char_height: 8.0,
            raster: false,
        }
    }
}

impl SynthParams {
    /// Settings whose pages survive rendering and re-segmentation: taller
    /// glyphs and gutters wider than the smoothing reach.
    pub fn for_raster(self) -> Self {
        Self {
            raster: true,
            char_height: 12.0,
            gutter: 48.0,
            min_block: 96.0,
            plant_scale: (1.5, 2.0),
            ..self
        }
    }

    pub fn with_decoys(self, rate: f64) -> Self {
        Self {
            small_rate: rate,
            caption_rate: rate,
            split_rate: rate,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let probs = [
            ("text_prob", self.text_prob),
            ("plant_prob", self.plant_prob),
            ("small_rate", self.small_rate),
            ("caption_rate", self.caption_rate),
            ("split_rate", self.split_rate),
        ];
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.min_depth < 1 || self.min_depth > self.max_depth {
            return Err("depth range must satisfy 1 <= min <= max".into());
        }
        if !(self.page.w > 2.0 * self.margin && self.page.h > 2.0 * self.margin) {
            return Err("page smaller than its margins".into());
        }
        let (lo, hi) = self.plant_scale;
        if !(lo > 0.0 && lo <= hi) {
            return Err("plant_scale must satisfy 0 < lo <= hi".into());
        }
        if self.char_height <= 0.0 || self.gutter < 0.0 || self.min_block <= 0.0 {
            return Err("char_height, gutter and min_block must be positive".into());
        }
        Ok(())
    }
}

/// One planted copy of a query layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedInstance {
    pub doc_id: String,
    pub layout: String,
    /// Page rectangle of each sketch block, in sketch order.
    pub blocks: Vec<Rect>,
    pub scale: (f64, f64),
    pub translation: (f64, f64),
    /// Decoys applied to this instance ("small", "caption", "split").
    pub decoys: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub planted: Vec<PlantedInstance>,
}

impl GroundTruth {
    pub fn docs_for<'a>(&'a self, layout: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.planted
            .iter()
            .filter(move |p| p.layout == layout)
            .map(|p| p.doc_id.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct SynthDoc {
    pub annotation: BlockAnnotation,
    pub image: Option<GrayImage>,
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub docs: Vec<SynthDoc>,
    pub truth: GroundTruth,
}

pub fn doc_name(seed: u64, i: usize) -> String {
    format!("s{seed}-d{i:05}")
}

fn doc_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    rng
}

#[derive(Debug, Clone, Copy)]
struct Leaf {
    rect: Rect,
    kind: Kind,
    ach: f64,
}

/// Chance that an inner partition node stops splitting early, so pages of
/// one depth still vary in block count.
const EARLY_LEAF: f64 = 0.1;

/// Recursive axis-aligned partition of `r`. `depth` 1 leaves `r` whole.
fn guillotine(rng: &mut impl Rng, r: Rect, depth: u32, gutter: f64, min: f64, out: &mut Vec<Rect>) {
    split_node(rng, r, depth, gutter, min, 0.0, out)
}

fn split_node(rng: &mut impl Rng, r: Rect, depth: u32, gutter: f64, min: f64, stop: f64, out: &mut Vec<Rect>) {
    if depth <= 1 || (stop > 0.0 && rng.random_bool(stop)) {
        out.push(r);
        return;
    }
    let cut_y = if r.h > 1.5 * r.w {
        true
    } else if r.w > 1.5 * r.h {
        false
    } else {
        rng.random_bool(0.5)
    };
    let len = if cut_y { r.h } else { r.w };
    let avail = len - gutter;
    let lo = min.max(0.3 * avail).ceil();
    let hi = (avail - min).min(0.7 * avail).floor();
    if lo > hi {
        out.push(r);
        return;
    }
    let a = rng.random_range(lo..=hi).round();
    let (first, second) = if cut_y {
        (
            Rect::new(r.x, r.y, r.w, a),
            Rect::from_edges(r.x, r.y + a + gutter, r.right(), r.bottom()),
        )
    } else {
        (
            Rect::new(r.x, r.y, a, r.h),
            Rect::from_edges(r.x + a + gutter, r.y, r.right(), r.bottom()),
        )
    };
    split_node(rng, first, depth - 1, gutter, min, EARLY_LEAF, out);
    split_node(rng, second, depth - 1, gutter, min, EARLY_LEAF, out);
}

/// Partition of a sketch canvas on a grid of 8 units, for query batteries.
pub(crate) fn canvas_tiling(rng: &mut impl Rng, canvas: PageDims, depth: u32) -> Vec<Rect> {
    let mut out = Vec::new();
    guillotine(rng, Rect::new(0.0, 0.0, canvas.w, canvas.h), depth, QUERY_GUTTER, 64.0, &mut out);
    // snap every edge to the grid; gutters stay exact multiples of 8
    out.iter()
        .map(|r| {
            let s = |v: f64| (v / 8.0).round() * 8.0;
            Rect::from_edges(s(r.left()), s(r.top()), s(r.right()), s(r.bottom()))
        })
        .collect()
}

fn random_kind(rng: &mut impl Rng, text_prob: f64) -> Kind {
    if rng.random_bool(text_prob) {
        Kind::Text
    } else {
        Kind::NonText
    }
}

fn scale_steps(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    // dyadic factors keep every scaled coordinate exact in binary floating point
    let (a, b) = ((lo * 64.0).ceil() as i64, (hi * 64.0).floor() as i64);
    rng.random_range(a..=b.max(a)) as f64 / 64.0
}

/// Where a planted layout lands on the page.
#[derive(Debug, Clone, Copy)]
pub struct Placement {
    pub sx: f64,
    pub sy: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Placement {
    fn map(&self, r: &Rect) -> Rect {
        r.scaled(self.sx, self.sy, self.tx, self.ty)
    }
}

fn random_placement(rng: &mut impl Rng, canvas: PageDims, p: &SynthParams) -> Option<Placement> {
    let sx = scale_steps(rng, p.plant_scale);
    let sy = scale_steps(rng, p.plant_scale);
    let (rw, rh) = (canvas.w * sx, canvas.h * sy);
    let free_w = p.page.w - 2.0 * p.margin - rw;
    let free_h = p.page.h - 2.0 * p.margin - rh;
    if free_w < 0.0 || free_h < 0.0 {
        return None;
    }
    let tx = p.margin + rng.random_range(0..=free_w.floor() as i64) as f64;
    let ty = p.margin + rng.random_range(0..=free_h.floor() as i64) as f64;
    Some(Placement { sx, sy, tx, ty })
}

/// Blocks filling the vacant parts of a planted layout: each dummy region,
/// pulled back from neighboring sketch blocks by the scaled gutter, is
/// partitioned into one to four blocks.
fn vacancy_fillers(rng: &mut impl Rng, layout: &QueryLayout, at: &Placement, text_prob: f64, ach: f64) -> Vec<Leaf> {
    let c = layout.canvas;
    let (gx, gy) = (QUERY_GUTTER * at.sx, QUERY_GUTTER * at.sy);
    let mut out = Vec::new();
    for d in &layout.dummies {
        let b = d.bbox;
        let inset = |v: f64, edge: f64, g: f64, sign: f64| if v == edge { v } else { v + sign * g };
        let q = Rect::from_edges(
            inset(b.left(), 0.0, QUERY_GUTTER, 1.0),
            inset(b.top(), 0.0, QUERY_GUTTER, 1.0),
            inset(b.right(), c.w, QUERY_GUTTER, -1.0),
            inset(b.bottom(), c.h, QUERY_GUTTER, -1.0),
        );
        if q.w <= 0.0 || q.h <= 0.0 {
            continue;
        }
        let region = at.map(&q);
        let mut rects = Vec::new();
        let depth = rng.random_range(1..=3);
        guillotine(rng, region, depth, gx.min(gy).max(16.0), 32.0, &mut rects);
        for rect in rects {
            let kind = random_kind(rng, text_prob);
            out.push(Leaf {
                rect,
                kind,
                ach: if kind == Kind::Text { ach } else { 0.0 },
            });
        }
    }
    out
}

/// Lays out the page around a reserved region: full-width bands above and
/// below it, and bands to its left and right, each partitioned on its own.
fn surround(rng: &mut impl Rng, hole: Rect, depth: u32, p: &SynthParams) -> Vec<Rect> {
    let content = Rect::from_edges(p.margin, p.margin, p.page.w - p.margin, p.page.h - p.margin);
    let g = p.gutter;
    let min = p.min_block;
    let depth = depth.saturating_sub(1).max(1);
    let mut out = Vec::new();
    // Blocks bordering the region span it completely: a neighbour whose edge
    // fell inside one of the region's own gutters would see through it.
    let sides = [
        Rect::from_edges(content.left(), hole.top().ceil(), (hole.left() - g).floor(), hole.bottom().floor()),
        Rect::from_edges((hole.right() + g).ceil(), hole.top().ceil(), content.right(), hole.bottom().floor()),
    ];
    out.extend(sides.into_iter().filter(|s| s.w >= min && s.h >= min));
    let above = (hole.top() - g).floor();
    if above - content.top() >= min {
        let h = rng.random_range(min..=(above - content.top()).min(3.0 * min)).round();
        out.push(Rect::from_edges(content.left(), above - h, content.right(), above));
        let rest = Rect::from_edges(content.left(), content.top(), content.right(), above - h - g);
        if rest.w >= min && rest.h >= min {
            guillotine(rng, rest, depth, g, min, &mut out);
        }
    }
    let below = (hole.bottom() + g).ceil();
    if content.bottom() - below >= min {
        let h = rng.random_range(min..=(content.bottom() - below).min(3.0 * min)).round();
        out.push(Rect::from_edges(content.left(), below, content.right(), below + h));
        let rest = Rect::from_edges(content.left(), below + h + g, content.right(), content.bottom());
        if rest.w >= min && rest.h >= min {
            guillotine(rng, rest, depth, g, min, &mut out);
        }
    }
    out
}

struct Decoyed {
    leaves: Vec<Leaf>,
    /// Final page rectangle of each planted sketch block.
    planted: Vec<Rect>,
    applied: Vec<String>,
}

/// Applies at most one decoy per planted block. Each decoy breaks the
/// instance in the base graph and is undone by exactly one other
/// hypothesis: small lines by small-block removal, captions by caption
/// removal, split pictures by non-text merging.
fn apply_decoys(rng: &mut impl Rng, mut planted: Vec<Leaf>, obstacles: &[Rect], p: &SynthParams) -> Decoyed {
    let ach = p.char_height;
    let mut extra = Vec::new();
    let mut applied = Vec::new();
    let mut touched = vec![false; planted.len()];
    let mut rects: Vec<Rect> = planted.iter().map(|l| l.rect).collect();

    if p.small_rate > 0.0 && rng.random_bool(p.small_rate) {
        let h = ach / 2.0;
        let clear = |r: &Rect| {
            planted.iter().map(|l| &l.rect).chain(obstacles).all(|o| o.intersection(r).is_none_or(|x| x.area() == 0.0))
        };
        let mut pairs = Vec::new();
        for (i, a) in planted.iter().enumerate() {
            for (j, b) in planted.iter().enumerate() {
                let gap = b.rect.top() - a.rect.bottom();
                let lo = a.rect.left().max(b.rect.left());
                let hi = a.rect.right().min(b.rect.right());
                if a.kind == Kind::Text && b.kind == Kind::Text && gap >= 2.0 * ach && hi - lo >= 2.0 * ach {
                    let line = Rect::new(lo, a.rect.bottom() + (gap - h) / 2.0, hi - lo, h);
                    let between = Rect::new(lo, a.rect.bottom(), hi - lo, gap);
                    if clear(&between) {
                        pairs.push((i, j, line));
                    }
                }
            }
        }
        if !pairs.is_empty() {
            let (i, j, line) = pairs[rng.random_range(0..pairs.len())];
            extra.push(Leaf {
                rect: line,
                kind: Kind::Text,
                ach: h,
            });
            touched[i] = true;
            touched[j] = true;
            applied.push("small".to_string());
        }
    }
    if p.caption_rate > 0.0 && rng.random_bool(p.caption_rate) {
        let cap_h = 1.25 * ach;
        let gap = ach / 2.0;
        let cands: Vec<usize> = (0..planted.len())
            .filter(|&i| !touched[i] && planted[i].kind == Kind::NonText && planted[i].rect.h >= 6.0 * ach)
            .collect();
        if !cands.is_empty() {
            let i = cands[rng.random_range(0..cands.len())];
            let r = planted[i].rect;
            let shrunk = Rect::new(r.x, r.y, r.w, r.h - cap_h - gap);
            planted[i].rect = shrunk;
            rects[i] = shrunk;
            extra.push(Leaf {
                rect: Rect::new(r.x, shrunk.bottom() + gap, r.w, cap_h),
                kind: Kind::Text,
                ach,
            });
            touched[i] = true;
            applied.push("caption".to_string());
        }
    }
    let mut split = None;
    if p.split_rate > 0.0 && rng.random_bool(p.split_rate) {
        let cands: Vec<usize> = (0..planted.len())
            .filter(|&i| !touched[i] && planted[i].kind == Kind::NonText && planted[i].rect.h >= 8.0 * ach)
            .collect();
        if !cands.is_empty() {
            split = Some(cands[rng.random_range(0..cands.len())]);
            applied.push("split".to_string());
        }
    }
    let mut leaves = Vec::new();
    for (i, l) in planted.into_iter().enumerate() {
        if split == Some(i) {
            let r = l.rect;
            let half = ((r.h - ach) / 2.0).floor();
            leaves.push(Leaf {
                rect: Rect::new(r.x, r.y, r.w, half),
                ..l
            });
            leaves.push(Leaf {
                rect: Rect::from_edges(r.x, r.y + half + ach, r.right(), r.bottom()),
                ..l
            });
        } else {
            leaves.push(l);
        }
    }
    leaves.extend(extra);
    Decoyed {
        leaves,
        planted: rects,
        applied,
    }
}

/// Small-line and caption decoys on ordinary page blocks, as background
/// noise for the hypothesis ablation.
fn page_noise(rng: &mut impl Rng, leaves: &mut Vec<Leaf>, p: &SynthParams) {
    let ach = p.char_height;
    let n = leaves.len();
    for i in 0..n {
        let l = leaves[i];
        if l.kind == Kind::NonText && l.rect.h >= 6.0 * ach && p.caption_rate > 0.0 && rng.random_bool(p.caption_rate / 2.0) {
            let cap_h = 1.25 * ach;
            let gap = ach / 2.0;
            let r = l.rect;
            leaves[i].rect = Rect::new(r.x, r.y, r.w, r.h - cap_h - gap);
            leaves.push(Leaf {
                rect: Rect::new(r.x, r.bottom() - cap_h, r.w, cap_h),
                kind: Kind::Text,
                ach,
            });
        }
    }
}

/// Generates document `i` of a corpus. `plant` forces a planting of the given
/// layout (with an optional fixed placement); otherwise one of `plants` is
/// planted with probability `plant_prob`.
pub fn synth_document(
    p: &SynthParams,
    i: usize,
    plants: &[QueryLayout],
    force: Option<(&QueryLayout, Option<Placement>)>,
) -> (SynthDoc, Option<PlantedInstance>) {
    let mut rng = doc_rng(p.seed, i);
    let doc_id = doc_name(p.seed, i);
    let depth = rng.random_range(p.min_depth..=p.max_depth);
    let content = Rect::from_edges(p.margin, p.margin, p.page.w - p.margin, p.page.h - p.margin);
    let ach = p.char_height;
    let leaf = |rng: &mut ChaCha8Rng, rect: Rect| {
        let kind = random_kind(rng, p.text_prob);
        Leaf {
            rect,
            kind,
            ach: if kind == Kind::Text { ach } else { 0.0 },
        }
    };

    let chosen = match force {
        Some((l, at)) => Some((l, at)),
        None if !plants.is_empty() && rng.random_bool(p.plant_prob) => {
            Some((&plants[rng.random_range(0..plants.len())], None))
        }
        None => None,
    };
    let placement = chosen.and_then(|(l, at)| at.or_else(|| random_placement(&mut rng, l.canvas, p)).map(|a| (l, a)));

    let mut leaves = Vec::new();
    let mut instance = None;
    match placement {
        Some((layout, at)) => {
            let planted: Vec<Leaf> = layout
                .blocks
                .iter()
                .map(|b| {
                    let kind = b.kind.specified().unwrap_or_else(|| random_kind(&mut rng, p.text_prob));
                    Leaf {
                        rect: at.map(&b.bbox()),
                        kind,
                        ach: if kind == Kind::Text { ach } else { 0.0 },
                    }
                })
                .collect();
            let fillers = vacancy_fillers(&mut rng, layout, &at, p.text_prob, ach);
            let hole = at.map(&Rect::new(0.0, 0.0, layout.canvas.w, layout.canvas.h));
            let around = surround(&mut rng, hole, depth, p);
            let filler_rects: Vec<Rect> = fillers.iter().map(|f| f.rect).collect();
            let decoyed = apply_decoys(&mut rng, planted, &filler_rects, p);
            leaves.extend(decoyed.leaves);
            leaves.extend(fillers);
            let mut page: Vec<Leaf> = around.into_iter().map(|r| leaf(&mut rng, r)).collect();
            page_noise(&mut rng, &mut page, p);
            leaves.extend(page);
            instance = Some(PlantedInstance {
                doc_id: doc_id.clone(),
                layout: layout.name.clone(),
                blocks: decoyed.planted,
                scale: (at.sx, at.sy),
                translation: (at.tx, at.ty),
                decoys: decoyed.applied,
            });
        }
        None => {
            let mut rects = Vec::new();
            guillotine(&mut rng, content, depth, p.gutter, p.min_block, &mut rects);
            let mut page: Vec<Leaf> = rects.into_iter().map(|r| leaf(&mut rng, r)).collect();
            page_noise(&mut rng, &mut page, p);
            leaves.extend(page);
        }
    }

    let annotation = BlockAnnotation {
        doc_id,
        page: p.page,
        ach_doc: Some(ach),
        blocks: leaves
            .iter()
            .map(|l| AnnotatedBlock {
                x: l.rect.x,
                y: l.rect.y,
                w: l.rect.w,
                h: l.rect.h,
                kind: l.kind,
                ach_block: l.ach,
            })
            .collect(),
        lines: Vec::new(),
    };
    let image = p.raster.then(|| render_page(&annotation, ach, &mut rng));
    (SynthDoc { annotation, image }, instance)
}

/// Generates a corpus; documents are built in parallel from per-document
/// random streams, so the output depends only on the parameters.
pub fn synth_corpus(p: &SynthParams, plants: &[QueryLayout]) -> SynthCorpus {
    let made: Vec<(SynthDoc, Option<PlantedInstance>)> = (0..p.docs)
        .into_par_iter()
        .map(|i| synth_document(p, i, plants, None))
        .collect();
    let mut docs = Vec::with_capacity(made.len());
    let mut truth = GroundTruth::default();
    for (d, inst) in made {
        docs.push(d);
        truth.planted.extend(inst);
    }
    SynthCorpus { docs, truth }
}

/// Renders an annotation: non-text blocks as solid regions, text blocks as
/// rows of word-sized bars `char_height` tall, the first row flush with the
/// block top and the last flush with its bottom, so that segmentation can
/// recover the block rectangles.
pub fn render_page(ann: &BlockAnnotation, char_height: f64, rng: &mut impl Rng) -> GrayImage {
    let (w, h) = (ann.page.w.ceil() as u32, ann.page.h.ceil() as u32);
    let mut img = GrayImage::filled(w, h, 250).expect("positive page");
    let ch = char_height.round().max(1.0) as i64;
    let pitch = (char_height * 5.0 / 3.0).round() as i64;
    for b in &ann.blocks {
        let (x0, y0) = (b.x.round() as i64, b.y.round() as i64);
        let (x1, y1) = ((b.x + b.w).round() as i64, (b.y + b.h).round() as i64);
        match b.kind {
            Kind::NonText => img.fill_rect(x0, y0, x1 - x0, y1 - y0, 20),
            Kind::Text => {
                let mut rows = Vec::new();
                let mut y = y0;
                while y + ch <= y1 - pitch {
                    rows.push(y);
                    y += pitch;
                }
                rows.push((y1 - ch).max(y0));
                for y in rows {
                    let mut x = x0;
                    while x < x1 {
                        let mut word = rng.random_range(2 * ch..=5 * ch);
                        if x1 - (x + word) < ch + ch / 2 {
                            word = x1 - x;
                        }
                        img.fill_rect(x, y, word, ch.min(y1 - y), 15);
                        x += word + ch / 2;
                    }
                }
            }
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one_is_a_single_block() {
        let p = SynthParams {
            min_depth: 1,
            max_depth: 1,
            docs: 5,
            ..Default::default()
        };
        let c = synth_corpus(&p, &[]);
        for d in &c.docs {
            assert_eq!(d.annotation.blocks.len(), 1);
            assert_eq!(d.annotation.blocks[0].w, 1520.0);
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let p = SynthParams {
            docs: 20,
            seed: 9,
            ..Default::default()
        };
        let a = synth_corpus(&p, &[]);
        let b = synth_corpus(&p, &[]);
        let ja: Vec<String> = a.docs.iter().map(|d| serde_json::to_string(&d.annotation).unwrap()).collect();
        let jb: Vec<String> = b.docs.iter().map(|d| serde_json::to_string(&d.annotation).unwrap()).collect();
        assert_eq!(ja, jb);
        let c = synth_corpus(&SynthParams { seed: 10, ..p }, &[]);
        assert_ne!(serde_json::to_string(&c.docs[0].annotation).unwrap(), ja[0]);
    }

    #[test]
    fn guillotine_blocks_tile_without_overlap() {
        let p = SynthParams {
            docs: 30,
            ..Default::default()
        };
        let c = synth_corpus(&p, &[]);
        let content = Rect::from_edges(40.0, 40.0, 1560.0, 2360.0);
        for d in &c.docs {
            let rects: Vec<Rect> = d.annotation.blocks.iter().map(|b| Rect::new(b.x, b.y, b.w, b.h)).collect();
            let mut area = 0.0;
            for (i, a) in rects.iter().enumerate() {
                assert!(content.contains(a));
                assert!(a.w >= 64.0 && a.h >= 64.0);
                area += a.area();
                for b in &rects[i + 1..] {
                    assert!(a.intersection(b).is_none_or(|x| x.area() == 0.0));
                }
            }
            // gutters take a bounded share of the page
            assert!(area > 0.75 * content.area());
        }
    }

    #[test]
    fn canvas_tiling_is_on_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t = canvas_tiling(&mut rng, PageDims::new(400.0, 400.0), 3);
            for r in &t {
                for v in [r.x, r.y, r.w, r.h] {
                    assert_eq!(v % 8.0, 0.0);
                }
                assert!(r.x >= 0.0 && r.right() <= 400.0 && r.w >= 56.0);
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SynthParams::default().validate().is_ok());
        assert!(SynthParams { text_prob: 1.5, ..Default::default() }.validate().is_err());
        assert!(SynthParams { min_depth: 0, ..Default::default() }.validate().is_err());
    }
}
