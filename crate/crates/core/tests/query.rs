use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use layoutsearch_core::eval::{generate_battery, synth_corpus, synth_document, Placement, SynthParams, QUERY_CANVAS};
use layoutsearch_core::geometry::{Kind, PageDims, Rect};
use layoutsearch_core::graph::{GraphParams, HypothesisId, LayoutGraph};
use layoutsearch_core::index::CorpusStore;
use layoutsearch_core::ingest::ingest_annotation;
use layoutsearch_core::query::{
    detect_vacancies, evaluate_boolean, match_sublayout, parse_query, rank_score, retrieve, Match, MatchResult,
    QueryBlock, QueryKind, QueryLayout,
};
use layoutsearch_core::raster::RawBlock;
use layoutsearch_core::QueryError;

/// Random guillotine tiling of `r` with gutter `gap`; leaves touch the
/// outer edges of `r`.
fn tile(rng: &mut impl Rng, r: Rect, depth: u32, gap: f64, out: &mut Vec<Rect>) {
    const MIN: f64 = 48.0;
    let vertical = rng.random_bool(0.5);
    let span = if vertical { r.w } else { r.h };
    if depth == 0 || span < 2.0 * MIN + gap {
        out.push(r);
        return;
    }
    let at = rng.random_range(MIN..=span - MIN - gap).round();
    let (a, b) = if vertical {
        (Rect::new(r.x, r.y, at, r.h), Rect::from_edges(r.x + at + gap, r.y, r.right(), r.bottom()))
    } else {
        (Rect::new(r.x, r.y, r.w, at), Rect::from_edges(r.x, r.y + at + gap, r.right(), r.bottom()))
    };
    tile(rng, a, depth - 1, gap, out);
    tile(rng, b, depth - 1, gap, out);
}

fn random_kind(rng: &mut impl Rng) -> Kind {
    if rng.random_bool(0.5) {
        Kind::Text
    } else {
        Kind::NonText
    }
}

fn graph_of(rects: &[(Rect, Kind)], page: PageDims) -> LayoutGraph {
    let raw: Vec<RawBlock> = rects
        .iter()
        .map(|&(bbox, kind)| RawBlock {
            bbox,
            kind,
            ach_block: 8.0,
        })
        .collect();
    LayoutGraph::from_raw("d", HypothesisId::H1, &raw, page, 8.0)
}

/// A tiled sketch, its doc-side kinds, and the same blocks on a page at a
/// uniform dyadic scale and integer offset.
fn tiled_instance(seed: u64) -> (QueryLayout, LayoutGraph, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cells = Vec::new();
    tile(&mut rng, Rect::new(0.0, 0.0, QUERY_CANVAS.w, QUERY_CANVAS.h), 3, 4.0, &mut cells);
    let kinds: Vec<Kind> = cells.iter().map(|_| random_kind(&mut rng)).collect();
    let blocks = cells
        .iter()
        .zip(&kinds)
        .map(|(&r, &k)| QueryBlock::new(r, if rng.random_bool(0.3) { QueryKind::Any } else { k.into() }))
        .collect();
    let layout = QueryLayout::new("q", QUERY_CANVAS, blocks).unwrap();
    let s = rng.random_range(32..=192) as f64 / 64.0;
    let (tx, ty) = (rng.random_range(0..400) as f64, rng.random_range(0..400) as f64);
    let placed: Vec<(Rect, Kind)> = cells.iter().zip(&kinds).map(|(r, &k)| (r.scaled(s, s, tx, ty), k)).collect();
    let g = graph_of(&placed, PageDims::new(1600.0, 1600.0));
    // graph order differs from sketch order; recover it by position
    let order = placed
        .iter()
        .map(|(r, _)| g.blocks().iter().position(|b| b.bbox == *r).unwrap())
        .collect();
    (layout, g, order)
}

/// Straightforward restatement of the ranking formula.
fn score_oracle(layout: &QueryLayout, doc: &[Rect], bbox: Rect) -> f64 {
    let mut sum = 0.0;
    for (q, d) in layout.blocks.iter().zip(doc) {
        let q = q.bbox();
        let ar_q = q.w / q.h;
        let ar_d = d.w / d.h;
        let aspect = (ar_q - ar_d).abs() / if ar_q > ar_d { ar_q } else { ar_d };
        let qx = (q.x + q.w / 2.0) / layout.canvas.w;
        let qy = (q.y + q.h / 2.0) / layout.canvas.h;
        let dx = (d.x + d.w / 2.0 - bbox.x) / bbox.w;
        let dy = (d.y + d.h / 2.0 - bbox.y) / bbox.h;
        sum += 0.5 * aspect + 0.5 * ((qx - dx) * (qx - dx) + (qy - dy) * (qy - dy)).sqrt();
    }
    sum / layout.blocks.len() as f64
}

fn corpus(seed: u64, docs: usize, plants: &[QueryLayout], decoys: f64) -> CorpusStore {
    let p = SynthParams {
        seed,
        docs,
        plant_prob: 0.6,
        ..SynthParams::default().with_decoys(decoys)
    };
    let mut store = CorpusStore::default();
    for d in synth_corpus(&p, plants).docs {
        store
            .insert(ingest_annotation(&d.annotation, &GraphParams::default()).unwrap(), None, false)
            .unwrap();
    }
    store
}

fn result_set(v: &[MatchResult]) -> BTreeSet<(String, HypothesisId, Vec<usize>)> {
    v.iter().map(|m| (m.doc_id.clone(), m.hypothesis, m.mapping.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Independent axis scalings and a translation of every document block
    /// leave the matcher's decision and mapping unchanged from every start.
    #[test]
    fn match_decision_ignores_scale_and_translation(
        seed in any::<u64>(),
        pick in any::<prop::sample::Index>(),
        sx in 16u32..256, sy in 16u32..256, dx in 0u32..2000, dy in 0u32..2000,
    ) {
        let battery = generate_battery(seed % 4, 1);
        let layout = &battery[pick.index(battery.len())];
        let p = SynthParams { seed, docs: 1, ..SynthParams::default().with_decoys(0.3) };
        let (doc, _) = synth_document(&p, 0, std::slice::from_ref(layout), Some((layout, None)));
        let rects: Vec<(Rect, Kind)> = doc.annotation.blocks.iter().map(|b| (Rect::new(b.x, b.y, b.w, b.h), b.kind)).collect();
        let (sx, sy) = (sx as f64 / 64.0, sy as f64 / 64.0);
        let moved: Vec<(Rect, Kind)> = rects.iter().map(|&(r, k)| (r.scaled(sx, sy, dx as f64, dy as f64), k)).collect();
        let page = doc.annotation.page;
        let a = graph_of(&rects, page);
        let b = graph_of(&moved, PageDims::new(page.w * sx + dx as f64, page.h * sy + dy as f64));
        for start in 0..a.len() {
            let ma = match_sublayout(layout, &a, start).map(|m| (m.mapping, m.absorbed));
            let mb = match_sublayout(layout, &b, start).map(|m| (m.mapping, m.absorbed));
            prop_assert_eq!(ma, mb);
        }
    }

    /// A uniformly scaled copy of a sketch that fills its canvas scores zero;
    /// changing the aspect ratio of any one block makes it positive.
    #[test]
    fn exact_copies_score_zero(seed in any::<u64>(), victim in any::<prop::sample::Index>(), grow in 1u32..40) {
        let (layout, g, order) = tiled_instance(seed);
        let start = order[layout.reference];
        prop_assert!(layout.dummies.is_empty());
        let m = match_sublayout(&layout, &g, start).expect("exact copy matches");
        prop_assert_eq!(&m.mapping, &order);
        prop_assert_eq!(rank_score(&layout, &m, &g), 0.0);

        let v = victim.index(layout.blocks.len());
        let mut rects: Vec<(Rect, Kind)> = g.blocks().iter().map(|b| (b.bbox, b.kind)).collect();
        rects[order[v]].0.w += grow as f64;
        let bent = graph_of(&rects, g.page);
        let bbox = m.mapping.iter().map(|&b| bent.block(b).bbox).reduce(|a, b| a.union(&b)).unwrap();
        let forced = Match { mapping: m.mapping.clone(), absorbed: m.absorbed.clone(), bbox };
        prop_assert!(rank_score(&layout, &forced, &bent) > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// Hashed candidates never change the answer.
    #[test]
    fn hashed_retrieval_equals_brute_force(seed in any::<u64>()) {
        let battery = generate_battery(seed % 8, 1);
        let store = corpus(seed, 12, &battery, 0.3);
        for layout in &battery {
            let hashed = retrieve(&store, layout, true);
            let brute = retrieve(&store, layout, false);
            prop_assert_eq!(result_set(&hashed), result_set(&brute), "{}", layout.name);
            prop_assert_eq!(hashed, brute);
        }
    }

    /// Every returned match is injective, keeps dummies off mapped blocks,
    /// scores per the ranking formula and is sorted.
    #[test]
    fn returned_matches_are_well_formed(seed in any::<u64>()) {
        let battery = generate_battery(seed % 8, 1);
        let store = corpus(seed, 12, &battery, 0.5);
        for layout in &battery {
            let found = retrieve(&store, layout, true);
            for m in &found {
                let mapped: BTreeSet<usize> = m.mapping.iter().copied().collect();
                prop_assert_eq!(mapped.len(), m.mapping.len());
                for a in &m.absorbed {
                    prop_assert!(!a.is_empty());
                    prop_assert!(a.iter().all(|b| !mapped.contains(b)));
                }
                let want = score_oracle(layout, &m.mapped_rects(&store), m.bbox);
                prop_assert!((m.score - want).abs() < 1e-12, "{} vs {}", m.score, want);
            }
            prop_assert!(found.windows(2).all(|w| w[0].score <= w[1].score));
        }
    }

    /// Dummies stay inside the canvas and off every sketch block.
    #[test]
    fn dummies_fill_only_vacant_space(seed in any::<u64>(), drop in prop::collection::vec(any::<bool>(), 16)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cells = Vec::new();
        tile(&mut rng, Rect::new(0.0, 0.0, 400.0, 400.0), 4, 16.0, &mut cells);
        let kept: Vec<Rect> = cells.iter().zip(drop.iter().cycle()).filter(|(_, d)| !**d).map(|(r, _)| *r).collect();
        prop_assume!(!kept.is_empty());
        let canvas = PageDims::new(400.0, 400.0);
        let dummies = detect_vacancies(canvas, &kept);
        if kept.len() == cells.len() {
            prop_assert!(dummies.is_empty());
        }
        for d in &dummies {
            prop_assert!(d.bbox.w > 0.0 && d.bbox.h > 0.0);
            prop_assert!(d.bbox.left() >= 0.0 && d.bbox.top() >= 0.0);
            prop_assert!(d.bbox.right() <= 400.0 && d.bbox.bottom() <= 400.0);
            for r in &kept {
                prop_assert!(d.bbox.intersection(r).is_none_or(|x| x.area() == 0.0));
            }
            prop_assert!(!d.anchors.is_empty());
        }
    }
}

/// Dropping a sketch block and leaving its space vacant keeps every document
/// the full sketch matched, whenever a dummy takes the block's place.
#[test]
fn vacating_a_block_keeps_matches() {
    let battery: Vec<QueryLayout> = generate_battery(17, 3).into_iter().filter(|l| l.dummies.is_empty()).collect();
    let store = corpus(17, 80, &battery, 0.0);
    let (mut checked, mut skipped) = (0, 0);
    for layout in &battery {
        let full: BTreeSet<String> = retrieve(&store, layout, true).into_iter().map(|m| m.doc_id).collect();
        for drop in 0..layout.blocks.len() {
            let mut blocks = layout.blocks.clone();
            let gone = blocks.remove(drop).bbox();
            let Ok(reduced) = QueryLayout::new("r", layout.canvas, blocks) else {
                skipped += 1;
                continue;
            };
            if !reduced.dummies.iter().any(|d| d.bbox.intersection(&gone).is_some_and(|x| x.area() > 0.0)) {
                skipped += 1;
                continue;
            }
            let partial: BTreeSet<String> = retrieve(&store, &reduced, true).into_iter().map(|m| m.doc_id).collect();
            assert!(full.is_subset(&partial), "{} without block {drop}: lost {:?}", layout.name, full.difference(&partial).collect::<Vec<_>>());
            checked += 1;
        }
    }
    assert!(checked > skipped, "checked {checked}, skipped {skipped}");
}

#[test]
fn empty_store_returns_nothing() {
    let battery = generate_battery(1, 1);
    assert!(retrieve(&CorpusStore::default(), &battery[0], true).is_empty());
}

#[test]
fn planted_document_ranks_first() {
    let battery = generate_battery(4, 1);
    for (i, layout) in battery.iter().enumerate() {
        let p = SynthParams {
            seed: 90 + i as u64,
            docs: 20,
            plant_prob: 0.0,
            ..Default::default()
        };
        let mut store = CorpusStore::default();
        for d in synth_corpus(&p, &[]).docs {
            store.insert(ingest_annotation(&d.annotation, &GraphParams::default()).unwrap(), None, false).unwrap();
        }
        // an undistorted copy; natural occurrences elsewhere may be stretched
        let at = Placement { sx: 1.5, sy: 1.5, tx: 300.0, ty: 700.0 };
        let (doc, planted) = synth_document(&p, 20, &[], Some((layout, Some(at))));
        let planted = planted.unwrap();
        store.insert(ingest_annotation(&doc.annotation, &GraphParams::default()).unwrap(), None, false).unwrap();
        let found = retrieve(&store, layout, true);
        assert!(!found.is_empty());
        assert!(found.iter().any(|m| m.doc_id == planted.doc_id && m.mapped_rects(&store) == planted.blocks));
        assert_eq!(found[0].doc_id, planted.doc_id, "{}", layout.name);
    }
}

type Sketch<'a> = &'a [(f64, f64, f64, f64, &'a str)];

fn query_json(layouts: &[(&str, Sketch)], expr: &str) -> String {
    let layouts: serde_json::Map<String, serde_json::Value> = layouts
        .iter()
        .map(|(name, blocks)| {
            let blocks: Vec<_> = blocks
                .iter()
                .map(|&(x, y, w, h, kind)| serde_json::json!({"x": x, "y": y, "w": w, "h": h, "kind": kind}))
                .collect();
            (name.to_string(), serde_json::json!({ "blocks": blocks }))
        })
        .collect();
    serde_json::json!({"canvas": {"w": 100, "h": 100}, "layouts": layouts, "expr": expr}).to_string()
}

const TWO_COLUMNS: &[(f64, f64, f64, f64, &str)] = &[(0.0, 0.0, 45.0, 100.0, "text"), (55.0, 0.0, 45.0, 100.0, "nontext")];
const STACK: &[(f64, f64, f64, f64, &str)] = &[(0.0, 0.0, 100.0, 45.0, "nontext"), (0.0, 55.0, 100.0, 45.0, "nontext")];

fn page_store() -> CorpusStore {
    let docs = [
        // columns only
        ("cols", serde_json::json!([
            {"x": 50, "y": 50, "w": 400, "h": 900, "kind": "text"},
            {"x": 550, "y": 50, "w": 400, "h": 900, "kind": "nontext"}
        ])),
        // stacked figures only
        ("stack", serde_json::json!([
            {"x": 50, "y": 50, "w": 900, "h": 400, "kind": "nontext"},
            {"x": 50, "y": 550, "w": 900, "h": 400, "kind": "nontext"}
        ])),
    ];
    let mut store = CorpusStore::default();
    for (id, blocks) in docs {
        let ann = serde_json::from_value(serde_json::json!({"doc_id": id, "page": {"w": 1000, "h": 1000}, "blocks": blocks})).unwrap();
        store.insert(ingest_annotation(&ann, &GraphParams::default()).unwrap(), None, false).unwrap();
    }
    store
}

fn hits(store: &CorpusStore, text: &str) -> Vec<String> {
    let q = parse_query(text).unwrap();
    let a = evaluate_boolean(store, &q, true);
    let b = evaluate_boolean(store, &q, false);
    assert_eq!(a, b);
    let mut ids: Vec<String> = a.into_iter().map(|h| h.doc_id).collect();
    ids.sort();
    ids
}

#[test]
fn boolean_semantics() {
    let store = page_store();
    let both = [("A", TWO_COLUMNS), ("B", STACK)];
    assert_eq!(hits(&store, &query_json(&both, "A")), ["cols"]);
    assert_eq!(hits(&store, &query_json(&both, "A OR B")), ["cols", "stack"]);
    assert_eq!(hits(&store, &query_json(&both, "B OR A AND NOT A")), ["stack"]);
    assert!(hits(&store, &query_json(&both, "A AND NOT A")).is_empty());
    assert!(hits(&store, &query_json(&both, "A AND B")).is_empty());
    assert_eq!(hits(&store, &query_json(&both, "B AND NOT A")), ["stack"]);
    assert_eq!(hits(&store, &query_json(&both, "(A, center) OR (B, top)")), ["cols"]);
    assert!(hits(&store, &query_json(&both, "(A, bottom)")).is_empty());
}

#[test]
fn parse_reports_types_and_errors() {
    let q = parse_query(&query_json(&[("A", TWO_COLUMNS)], "A")).unwrap();
    assert_eq!(q.types()["A"], 1);
    let any = [(0.0, 0.0, 45.0, 100.0, "any"), (55.0, 0.0, 45.0, 100.0, "any")];
    assert_eq!(parse_query(&query_json(&[("A", &any)], "A")).unwrap().types()["A"], 2);
    // a column with a vacant strip under it
    let gap = [(0.0, 0.0, 45.0, 100.0, "text"), (55.0, 0.0, 45.0, 50.0, "text")];
    assert_eq!(parse_query(&query_json(&[("A", &gap)], "A")).unwrap().types()["A"], 4);
    let mixed_gap = [(0.0, 0.0, 45.0, 100.0, "any"), (55.0, 0.0, 45.0, 50.0, "text")];
    assert_eq!(parse_query(&query_json(&[("A", &mixed_gap)], "A")).unwrap().types()["A"], 6);

    assert!(matches!(parse_query(&query_json(&[("A", TWO_COLUMNS)], "NOT A")), Err(QueryError::NotOnly)));
    assert!(matches!(parse_query(&query_json(&[("A", &[])], "A")), Err(QueryError::EmptyLayout(_))));
    let overlap = [(0.0, 0.0, 60.0, 100.0, "text"), (40.0, 0.0, 60.0, 100.0, "text")];
    assert!(matches!(parse_query(&query_json(&[("A", &overlap)], "A")), Err(QueryError::Overlap { .. })));
    assert!(matches!(parse_query(&query_json(&[("A", TWO_COLUMNS)], "C")), Err(QueryError::UnknownLayout(_))));
    assert!(matches!(parse_query("{"), Err(QueryError::Malformed(_))));
    let q = parse_query(&query_json(&[("A", TWO_COLUMNS), ("B", STACK)], "(A, bottom) and b or not A")).err();
    // layout names are case sensitive; keywords are not
    assert!(matches!(q, Some(QueryError::UnknownLayout(n)) if n == "b"));
}
