//! Synthetic corpora with planted ground truth, sketch batteries, and the
//! recall/precision/timing harness.

mod battery;
mod harness;
mod synth;

pub use battery::{generate_battery, layout_spec, planted_found, self_match, QUERY_CANVAS};
pub use harness::{
    ablate_hypotheses, brute_force_retrieve, build_store, default_pipeline, evaluate, median, EvalReport, QueryRow,
    TypeRow,
};
pub use synth::{
    doc_name, render_page, synth_corpus, synth_document, GroundTruth, Placement, PlantedInstance, SynthCorpus,
    SynthDoc, SynthParams, QUERY_GUTTER,
};
