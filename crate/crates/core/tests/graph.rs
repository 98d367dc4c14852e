mod common;

use proptest::prelude::*;

use layoutsearch_core::eval::{synth_corpus, SynthParams};
use layoutsearch_core::geometry::{spatial_location, Direction, PageDims, Rect};
use layoutsearch_core::graph::{compute_adjacency, DocumentRecord, GraphParams, LayoutGraph};
use layoutsearch_core::ingest::{annotation_meta, ingest_annotation};

fn rects(max: usize) -> impl Strategy<Value = Vec<Rect>> {
    prop::collection::vec((0u32..200, 0u32..200, 1u32..60, 1u32..60), 1..max).prop_map(|v| {
        v.into_iter()
            .map(|(x, y, w, h)| Rect::new(x as f64, y as f64, w as f64, h as f64))
            .collect()
    })
}

fn page_rects(seed: u64, max_depth: u32) -> Vec<Rect> {
    let p = SynthParams {
        seed,
        docs: 1,
        max_depth,
        ..Default::default()
    };
    synth_corpus(&p, &[]).docs[0]
        .annotation
        .blocks
        .iter()
        .map(|b| Rect::new(b.x, b.y, b.w, b.h))
        .collect()
}

fn sorted_table(rs: &[Rect]) -> Vec<[Vec<usize>; 4]> {
    let (mut t, _) = compute_adjacency(rs);
    for slots in t.iter_mut() {
        for s in slots.iter_mut() {
            s.sort_unstable();
        }
    }
    t
}

/// Neighbor lists run along the perpendicular axis.
fn lists_are_ordered(rs: &[Rect]) -> bool {
    let (t, _) = compute_adjacency(rs);
    t.iter().all(|slots| {
        Direction::ALL.iter().all(|&d| {
            slots[d.index()].windows(2).all(|w| {
                let (a, b) = (rs[w[0]], rs[w[1]]);
                if d.is_horizontal() {
                    (a.top(), a.left()) <= (b.top(), b.left())
                } else {
                    (a.left(), a.top()) <= (b.left(), b.top())
                }
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn adjacency_matches_brute_force(rs in rects(24)) {
        prop_assert_eq!(sorted_table(&rs), common::oracle_table(&rs));
        prop_assert!(lists_are_ordered(&rs));
    }

    #[test]
    fn adjacency_is_symmetric(rs in rects(30)) {
        let (t, _) = compute_adjacency(&rs);
        for (a, slots) in t.iter().enumerate() {
            for d in Direction::ALL {
                for &b in &slots[d.index()] {
                    prop_assert!(t[b][d.opposite().index()].contains(&a));
                }
            }
        }
    }

    #[test]
    fn overlap_flags_follow_intersections(rs in rects(16)) {
        let (t, flags) = compute_adjacency(&rs);
        for (a, slots) in t.iter().enumerate() {
            for d in Direction::ALL {
                let any = slots[d.index()].iter().any(|&b| rs[a].intersection(&rs[b]).is_some_and(|x| x.area() > 0.0));
                prop_assert_eq!(flags[a][d.index()], any);
            }
        }
    }

    /// Independent positive axis scalings plus a translation keep every
    /// neighbor list. Factors are multiples of 1/64 so the arithmetic is exact.
    #[test]
    fn adjacency_survives_affine_maps(rs in rects(20), sx in 16u32..256, sy in 16u32..256, dx in -500i32..500, dy in -500i32..500) {
        let (sx, sy) = (sx as f64 / 64.0, sy as f64 / 64.0);
        let moved: Vec<Rect> = rs.iter().map(|r| r.scaled(sx, sy, dx as f64, dy as f64)).collect();
        prop_assert_eq!(compute_adjacency(&rs), compute_adjacency(&moved));
    }

    #[test]
    fn location_ignores_uniform_scale(x in 0u32..1000, y in 0u32..1000, w in 1u32..200, h in 1u32..200, s in 1u32..512) {
        let page = PageDims::new(1200.0, 1200.0);
        let r = Rect::new(x as f64, y as f64, w as f64, h as f64);
        let k = s as f64 / 64.0;
        let scaled = PageDims::new(page.w * k, page.h * k);
        prop_assert_eq!(spatial_location(&r, page), spatial_location(&r.scaled(k, k, 0.0, 0.0), scaled));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn guillotine_pages_match_brute_force(seed in any::<u64>(), depth in 2u32..7) {
        let rs = page_rects(seed, depth);
        prop_assert_eq!(sorted_table(&rs), common::oracle_table(&rs));
    }

    /// Every hypothesis graph stays symmetric and survives the JSON form.
    #[test]
    fn hypotheses_keep_invariants(seed in any::<u64>()) {
        let p = SynthParams { seed, docs: 1, ..SynthParams::default().with_decoys(0.8) };
        let ann = &synth_corpus(&p, &[]).docs[0].annotation;
        let graphs = ingest_annotation(ann, &GraphParams::default()).unwrap();
        for g in &graphs {
            prop_assert!(g.check_invariants().is_ok());
        }
        let rec = DocumentRecord::from_graphs(&graphs, Some(annotation_meta()));
        let text = serde_json::to_string(&rec).unwrap();
        let back: DocumentRecord = serde_json::from_str(&text).unwrap();
        let restored: Vec<LayoutGraph> = back.to_graphs().unwrap();
        prop_assert_eq!(restored, graphs);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

#[test]
fn stack_sees_only_direct_neighbors() {
    let rs = [
        Rect::new(0.0, 0.0, 100.0, 50.0),
        Rect::new(0.0, 60.0, 100.0, 50.0),
        Rect::new(0.0, 120.0, 100.0, 50.0),
    ];
    let (t, _) = compute_adjacency(&rs);
    assert_eq!(t[2][Direction::Top.index()], vec![1]);
    assert_eq!(t[0][Direction::Bottom.index()], vec![1]);
    assert!(t.iter().all(|s| s[Direction::Left.index()].is_empty() && s[Direction::Right.index()].is_empty()));
}

#[test]
fn partial_occluder_hides_the_block_behind() {
    // c covers only the upper part of the shared rows between a and b
    let rs = [
        Rect::new(0.0, 0.0, 50.0, 100.0),
        Rect::new(200.0, 0.0, 50.0, 100.0),
        Rect::new(80.0, 0.0, 50.0, 30.0),
    ];
    let (t, _) = compute_adjacency(&rs);
    assert_eq!(t[0][Direction::Right.index()], vec![2]);
}
