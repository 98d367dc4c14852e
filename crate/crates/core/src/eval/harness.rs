use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::synth::{GroundTruth, SynthDoc};
use crate::error::Result;
use crate::graph::{GraphParams, HypothesisId};
use crate::index::CorpusStore;
use crate::ingest::{annotation_meta, ingest_annotation, ingest_image, PipelineParams};
use crate::query::{candidate_starts, retrieve, MatchResult, QueryLayout};

/// Indexes generated documents: from their annotations, or by running the
/// raster pipeline on their images when `from_images` is set.
pub fn build_store(docs: &[SynthDoc], bins: usize, params: &PipelineParams, from_images: bool) -> Result<CorpusStore> {
    use rayon::prelude::*;
    let built: Vec<Result<_>> = docs
        .par_iter()
        .map(|d| match (&d.image, from_images) {
            (Some(img), true) => ingest_image(&d.annotation.doc_id, img, params).map(|(g, m)| (g, Some(m))),
            _ => ingest_annotation(&d.annotation, &params.graph).map(|g| (g, Some(annotation_meta()))),
        })
        .collect();
    let mut store = CorpusStore::new(bins);
    for b in built {
        let (graphs, meta) = b?;
        store.insert(graphs, meta, false)?;
    }
    Ok(store)
}

/// Index-free reference: tries every block of every distinct hypothesis
/// graph as the starting pair.
pub fn brute_force_retrieve(store: &CorpusStore, layout: &QueryLayout) -> Vec<MatchResult> {
    retrieve(store, layout, false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRow {
    pub name: String,
    pub query_type: u8,
    pub retrieved: usize,
    pub relevant: usize,
    pub hits: usize,
    pub recall: f64,
    pub precision: f64,
    /// Median wall-clock seconds over the timing runs.
    pub time_s: f64,
    /// Start blocks tried by the hashed engine.
    pub candidates: usize,
}

/// One line per query type: documents retrieved, recall and precision (%),
/// mean of per-query median times (s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeRow {
    pub query_type: u8,
    pub queries: usize,
    pub documents: usize,
    pub recall: f64,
    pub precision: f64,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<TypeRow>,
    pub queries: Vec<QueryRow>,
}

impl EvalReport {
    pub fn overall_recall(&self) -> f64 {
        ratio(self.queries.iter().map(|q| q.hits).sum(), self.queries.iter().map(|q| q.relevant).sum())
    }

    pub fn overall_precision(&self) -> f64 {
        ratio(self.queries.iter().map(|q| q.hits).sum(), self.queries.iter().map(|q| q.retrieved).sum())
    }
}

/// Percentage; an empty denominator counts as perfect.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        100.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => 0.0,
        n if n % 2 == 1 => v[n / 2],
        n => (v[n / 2 - 1] + v[n / 2]) / 2.0,
    }
}

fn doc_set(ms: &[MatchResult]) -> BTreeSet<String> {
    ms.iter().map(|m| m.doc_id.clone()).collect()
}

/// Runs every sketch against `store` with the hashed engine. A document is
/// relevant when it holds a planting of the sketch or when the brute-force
/// matcher finds the sketch in it on `oracle` (normally the full store).
/// Queries run one after another so timings do not interfere.
pub fn evaluate(
    store: &CorpusStore,
    oracle: &CorpusStore,
    truth: &GroundTruth,
    battery: &[QueryLayout],
    timing_runs: usize,
) -> EvalReport {
    let mut queries = Vec::new();
    for layout in battery {
        let mut times = Vec::new();
        let mut results = Vec::new();
        for _ in 0..timing_runs.max(1) {
            let t = Instant::now();
            results = retrieve(store, layout, true);
            times.push(t.elapsed().as_secs_f64());
        }
        let retrieved = doc_set(&results);
        let mut relevant = doc_set(&brute_force_retrieve(oracle, layout));
        relevant.extend(truth.docs_for(&layout.name).map(str::to_string));
        let hits = retrieved.intersection(&relevant).count();
        queries.push(QueryRow {
            name: layout.name.clone(),
            query_type: layout.query_type(),
            retrieved: retrieved.len(),
            relevant: relevant.len(),
            hits,
            recall: ratio(hits, relevant.len()),
            precision: ratio(hits, retrieved.len()),
            time_s: median(times),
            candidates: candidate_starts(store, layout, true).len(),
        });
    }
    let mut by_type: BTreeMap<u8, Vec<&QueryRow>> = BTreeMap::new();
    for q in &queries {
        by_type.entry(q.query_type).or_default().push(q);
    }
    let rows = by_type
        .into_iter()
        .map(|(t, qs)| {
            let sum = |f: fn(&QueryRow) -> usize| qs.iter().map(|q| f(q)).sum::<usize>();
            TypeRow {
                query_type: t,
                queries: qs.len(),
                documents: sum(|q| q.retrieved),
                recall: ratio(sum(|q| q.hits), sum(|q| q.relevant)),
                precision: ratio(sum(|q| q.hits), sum(|q| q.retrieved)),
                time_s: qs.iter().map(|q| q.time_s).sum::<f64>() / qs.len() as f64,
            }
        })
        .collect();
    EvalReport { rows, queries }
}

/// Evaluates with only the base hypothesis indexed, then with all four.
/// Relevance always comes from the full store.
pub fn ablate_hypotheses(
    store: &CorpusStore,
    truth: &GroundTruth,
    battery: &[QueryLayout],
    timing_runs: usize,
) -> (EvalReport, EvalReport) {
    let base_only = store.restricted_to(&[HypothesisId::H1]);
    (
        evaluate(&base_only, store, truth, battery, timing_runs),
        evaluate(store, store, truth, battery, timing_runs),
    )
}

/// Graph parameters used for generated corpora.
pub fn default_pipeline() -> PipelineParams {
    PipelineParams {
        graph: GraphParams::default(),
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{generate_battery, synth_corpus, SynthParams};
    use crate::index::DEFAULT_BINS;

    #[test]
    fn ratios() {
        assert_eq!(ratio(0, 0), 100.0);
        assert_eq!(ratio(1, 2), 50.0);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn decoy_free_ablation_is_neutral() {
        let battery = generate_battery(11, 1);
        let p = SynthParams {
            seed: 4,
            docs: 40,
            ..Default::default()
        };
        let c = synth_corpus(&p, &battery);
        let store = build_store(&c.docs, DEFAULT_BINS, &default_pipeline(), false).unwrap();
        let (h1, all) = ablate_hypotheses(&store, &c.truth, &battery, 1);
        let strip = |r: &EvalReport| {
            r.queries
                .iter()
                .map(|q| (q.name.clone(), q.retrieved, q.relevant, q.hits))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&h1), strip(&all));
        assert_eq!(all.overall_recall(), 100.0);
        assert_eq!(all.overall_precision(), 100.0);
    }

    #[test]
    fn empty_corpus() {
        let store = CorpusStore::default();
        let battery = generate_battery(2, 1);
        assert!(brute_force_retrieve(&store, &battery[0]).is_empty());
        let r = evaluate(&store, &store, &GroundTruth::default(), &battery, 1);
        assert!(r.queries.iter().all(|q| q.recall == 100.0 && q.retrieved == 0));
    }
}
