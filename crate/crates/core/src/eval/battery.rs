use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::synth::{canvas_tiling, synth_document, Placement, SynthParams};
use crate::geometry::{PageDims, Rect};
use crate::graph::GraphParams;
use crate::index::CorpusStore;
use crate::ingest::{annotation_meta, ingest_annotation};
use crate::query::{retrieve, LayoutSpec, QueryBlock, QueryKind, QueryLayout, QuerySpec};

pub const QUERY_CANVAS: PageDims = PageDims::new(400.0, 400.0);

/// Plants `layout` into a fresh page with the given placement and reports
/// whether retrieval finds the planted blocks.
pub fn self_match(layout: &QueryLayout, seed: u64, at: Placement) -> bool {
    let p = SynthParams {
        seed,
        ..Default::default()
    };
    let (doc, inst) = synth_document(&p, 0, &[], Some((layout, Some(at))));
    let Some(inst) = inst else { return false };
    let Ok(graphs) = ingest_annotation(&doc.annotation, &GraphParams::default()) else {
        return false;
    };
    let mut store = CorpusStore::default();
    if store.insert(graphs, Some(annotation_meta()), false).is_err() {
        return false;
    }
    planted_found(&store, layout, &inst.blocks)
}

/// Whether some retrieved match maps the sketch blocks exactly onto `rects`.
pub fn planted_found(store: &CorpusStore, layout: &QueryLayout, rects: &[Rect]) -> bool {
    retrieve(store, layout, true)
        .iter()
        .any(|m| m.mapped_rects(store) == rects)
}

fn kinds_for(rng: &mut impl Rng, base: u8, n: usize) -> Vec<QueryKind> {
    let specified = |rng: &mut dyn rand::RngCore| {
        if rng.random_bool(0.6) {
            QueryKind::Text
        } else {
            QueryKind::NonText
        }
    };
    match base {
        1 => (0..n).map(|_| specified(rng)).collect(),
        2 => vec![QueryKind::Any; n],
        _ => {
            // at least one of each
            let mut ks: Vec<QueryKind> = (0..n)
                .map(|_| if rng.random_bool(0.5) { QueryKind::Any } else { specified(rng) })
                .collect();
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n);
            if a == b {
                b = (a + 1) % n;
            }
            ks[a] = QueryKind::Any;
            ks[b] = specified(rng);
            ks
        }
    }
}

fn extreme_placements(rng: &mut impl Rng) -> Vec<Placement> {
    let at = |sx: f64, sy: f64, tx: f64, ty: f64| Placement { sx, sy, tx, ty };
    vec![
        at(0.5, 0.5, 40.0, 40.0),
        at(2.0, 2.0, 760.0, 1560.0),
        at(0.5, 2.0, 1000.0, 300.0),
        at(2.0, 0.5, 100.0, 2000.0),
        at(1.0, 1.0, 600.0, 900.0),
        at(
            rng.random_range(32..=128) as f64 / 64.0,
            rng.random_range(32..=128) as f64 / 64.0,
            rng.random_range(200..=600) as f64,
            rng.random_range(200..=1400) as f64,
        ),
    ]
}

/// Random sketch of the given type (1–6) on the standard canvas, or `None`
/// when the draw does not produce that type.
fn draw_layout(rng: &mut impl Rng, name: &str, qtype: u8) -> Option<QueryLayout> {
    let depth = rng.random_range(2..=3);
    let mut cells = canvas_tiling(rng, QUERY_CANVAS, depth);
    if cells.len() < 2 {
        return None;
    }
    if qtype >= 4 {
        let drop = rng.random_range(0..cells.len());
        cells.remove(drop);
    }
    let base = (qtype - 1) % 3 + 1;
    if base == 3 && cells.len() < 2 {
        return None;
    }
    let kinds = kinds_for(rng, base, cells.len());
    let blocks = cells.iter().zip(kinds).map(|(r, k)| QueryBlock::new(*r, k)).collect();
    let layout = QueryLayout::new(name, QUERY_CANVAS, blocks).ok()?;
    (layout.query_type() == qtype).then_some(layout)
}

/// Deterministic battery of `per_type` sketches for each query type. Every
/// sketch is kept only if it is found again after planting it at extreme and
/// random scales on generated pages (an unfindable sketch would measure the
/// generator, not the engine).
pub fn generate_battery(seed: u64, per_type: usize) -> Vec<QueryLayout> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for qtype in 1..=6u8 {
        let mut kept: Vec<QueryLayout> = Vec::new();
        let mut attempts = 0;
        while kept.len() < per_type && attempts < 200 * per_type.max(1) {
            attempts += 1;
            let name = format!("t{qtype}-{:02}", kept.len());
            let Some(layout) = draw_layout(&mut rng, &name, qtype) else {
                continue;
            };
            if kept.iter().any(|k| k.blocks == layout.blocks) {
                continue;
            }
            let check_seed: u64 = rng.random();
            if extreme_placements(&mut rng)
                .into_iter()
                .all(|at| self_match(&layout, check_seed, at))
            {
                kept.push(layout);
            }
        }
        out.extend(kept);
    }
    out
}

/// Single-layout query document for a sketch.
pub fn layout_spec(layout: &QueryLayout) -> QuerySpec {
    QuerySpec {
        canvas: layout.canvas,
        layouts: BTreeMap::from([(
            layout.name.clone(),
            LayoutSpec {
                blocks: layout.blocks.clone(),
            },
        )]),
        expr: None,
    }
}
