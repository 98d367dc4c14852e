use proptest::prelude::*;

use layoutsearch_core::eval::{
    build_store, default_pipeline, evaluate, generate_battery, median, synth_corpus, SynthParams,
};
use layoutsearch_core::geometry::Rect;
use layoutsearch_core::query::QueryKind;

fn rects_of(c: &layoutsearch_core::eval::SynthCorpus, i: usize) -> Vec<Rect> {
    c.docs[i].annotation.blocks.iter().map(|b| Rect::new(b.x, b.y, b.w, b.h)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generator_is_deterministic(seed in any::<u64>(), decoys in 0.0f64..1.0, plant_prob in 0.0f64..1.0) {
        let battery = generate_battery(seed % 3, 1);
        let p = SynthParams { seed, docs: 6, plant_prob, ..SynthParams::default().with_decoys(decoys) };
        let a = synth_corpus(&p, &battery);
        let b = synth_corpus(&p, &battery);
        for (x, y) in a.docs.iter().zip(&b.docs) {
            prop_assert_eq!(&x.annotation, &y.annotation);
        }
        prop_assert_eq!(a.truth, b.truth);
    }

    /// Planted blocks appear verbatim on the page, keep the sketch's kinds
    /// where they are specified, and stay inside the page margins.
    #[test]
    fn plantings_are_on_the_page(seed in any::<u64>()) {
        let battery = generate_battery(seed % 3, 1);
        let p = SynthParams { seed, docs: 8, plant_prob: 1.0, ..Default::default() };
        let c = synth_corpus(&p, &battery);
        let content = Rect::from_edges(p.margin, p.margin, p.page.w - p.margin, p.page.h - p.margin);
        for inst in &c.truth.planted {
            let i = c.docs.iter().position(|d| d.annotation.doc_id == inst.doc_id).unwrap();
            let layout = battery.iter().find(|l| l.name == inst.layout).unwrap();
            let blocks = &c.docs[i].annotation.blocks;
            prop_assert!(inst.decoys.is_empty());
            for (q, r) in layout.blocks.iter().zip(&inst.blocks) {
                let b = blocks.iter().find(|b| Rect::new(b.x, b.y, b.w, b.h) == *r);
                prop_assert!(b.is_some(), "{:?} missing from {}", r, inst.doc_id);
                prop_assert!(q.kind == QueryKind::Any || q.kind.accepts(b.unwrap().kind));
                prop_assert!(content.contains(r));
                let want = q.bbox().scaled(inst.scale.0, inst.scale.1, inst.translation.0, inst.translation.1);
                prop_assert_eq!(*r, want);
            }
            for (k, a) in rects_of(&c, i).iter().enumerate() {
                for b in &rects_of(&c, i)[k + 1..] {
                    prop_assert!(a.intersection(b).is_none_or(|x| x.area() == 0.0));
                }
            }
        }
    }
}

#[test]
fn depth_one_pages_are_one_block() {
    let p = SynthParams {
        seed: 3,
        docs: 10,
        min_depth: 1,
        max_depth: 1,
        plant_prob: 0.0,
        ..Default::default()
    };
    let c = synth_corpus(&p, &[]);
    assert!(c.docs.iter().all(|d| d.annotation.blocks.len() == 1));
    assert!(c.truth.planted.is_empty());
}

#[test]
fn battery_is_deterministic_and_typed() {
    let a = generate_battery(77, 3);
    assert_eq!(a, generate_battery(77, 3));
    assert_eq!(a.len(), 18);
    for t in 1..=6u8 {
        assert_eq!(a.iter().filter(|l| l.query_type() == t).count(), 3);
    }
    let names: std::collections::BTreeSet<_> = a.iter().map(|l| &l.name).collect();
    assert_eq!(names.len(), a.len());
}

#[test]
fn decoy_free_corpus_is_fully_recalled() {
    let battery = generate_battery(8, 2);
    let p = SynthParams {
        seed: 8,
        docs: 150,
        ..Default::default()
    };
    let c = synth_corpus(&p, &battery);
    assert!(!c.truth.planted.is_empty());
    let store = build_store(&c.docs, 4093, &default_pipeline(), false).unwrap();
    let report = evaluate(&store, &store, &c.truth, &battery, 1);
    assert_eq!(report.queries.len(), battery.len());
    assert_eq!(report.rows.len(), 6);
    for q in &report.queries {
        assert_eq!(q.recall, 100.0, "{}", q.name);
        // relevance includes everything the exhaustive matcher finds
        assert_eq!(q.precision, 100.0, "{}", q.name);
        assert!(q.relevant >= c.truth.docs_for(&q.name).count());
    }
    assert_eq!(report.overall_recall(), 100.0);
}

#[test]
fn median_of_even_and_odd() {
    assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    assert_eq!(median(vec![]), 0.0);
}
