use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use layoutsearch_core::eval::{
    evaluate, generate_battery, layout_spec, synth_corpus, EvalReport, GroundTruth, PlantedInstance, SynthParams,
};
use layoutsearch_core::index::CorpusStore;
use layoutsearch_core::ingest::{
    annotation_meta, ingest_annotation, ingest_image, sniff_input, BlockAnnotation, PageInput, PipelineParams,
};
use layoutsearch_core::query::{parse_query, run_query, QueryLayout, QueryResponse};
use layoutsearch_core::raster::{segment_page, GrayImage};

use crate::config::{ServiceConfig, CORPUS_ENV};

#[derive(Debug, Parser)]
#[command(name = "layoutsearch", version, about = "Sketch-based sub-layout retrieval over document pages")]
pub struct Cli {
    /// JSON file with service settings (listen, corpus, bins, top_k, static_dir).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment a page image into typed blocks and write block-annotation JSON.
    Ingest(IngestArgs),
    /// Build or inspect a corpus file.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Run a sketch query against a corpus.
    Query(QueryArgs),
    /// Generate a synthetic corpus with planted layouts.
    Synth(SynthArgs),
    /// Measure recall, precision and query time over a battery of sketches.
    Eval(EvalArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// PGM or PNG page image.
    #[arg(required_unless_present = "blocks")]
    pub image: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Smoothing gap factor.
    #[arg(long, default_value_t = 3.0)]
    pub a: f64,
    /// Smoothing height-ratio limit.
    #[arg(long, default_value_t = 3.5)]
    pub r: f64,
    /// Pre-segmented block annotation; skips raster processing.
    #[arg(long, conflicts_with = "image")]
    pub blocks: Option<PathBuf>,
    /// Document id (defaults to the input file stem).
    #[arg(long)]
    pub doc_id: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum IndexCommand {
    /// Ingest every `.json`, `.pgm` and `.png` file of a directory.
    Build {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        bins: Option<usize>,
    },
    /// Print document and hash-bucket statistics as JSON.
    Stats {
        corpus: Option<PathBuf>,
        #[arg(long)]
        bins: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    /// Corpus file; defaults to the config or LAYOUTSEARCH_CORPUS.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub top: Option<usize>,
    /// Try every block as a starting point instead of hashed candidates.
    #[arg(long)]
    pub no_hash: bool,
    /// Print the response JSON (same body as `POST /query`).
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub docs: usize,
    /// Query file whose layouts are planted; repeatable.
    #[arg(long)]
    pub plant: Vec<PathBuf>,
    /// Also generate this many sketches per query type and plant them.
    #[arg(long)]
    pub battery: Option<usize>,
    /// Where generated sketches go (default `<out>/battery`).
    #[arg(long)]
    pub battery_out: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Write rendered page images instead of block annotations.
    #[arg(long)]
    pub raster: bool,
    #[arg(long)]
    pub plant_prob: Option<f64>,
    /// Rate of each decoy kind on planted instances.
    #[arg(long)]
    pub decoys: Option<f64>,
    /// JSON file of generator settings; flags above override it.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Directory of query files; every layout in them is evaluated.
    #[arg(long)]
    pub battery: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Planted-instance file written by `synth`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Timed repetitions per query.
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub listen: Option<std::net::SocketAddr>,
    /// Corpus file to load at start and rewrite after each upload.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
}

/// Name of the ground-truth file `synth` writes next to the documents.
pub const TRUTH_FILE: &str = "truth.jsonl";

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let mut cfg = ServiceConfig::resolve(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(a) => ingest(&a),
        Command::Index(IndexCommand::Build { corpus, out, bins }) => {
            let store = build_index(&corpus, bins.unwrap_or(cfg.bins))?;
            store.save(&out).with_context(|| format!("writing {}", out.display()))?;
            let s = store.stats();
            println!("indexed {} documents, {} blocks -> {}", s.documents, s.blocks, out.display());
            Ok(())
        }
        Command::Index(IndexCommand::Stats { corpus, bins }) => {
            override_corpus(&mut cfg, corpus);
            let store = load_store(cfg.corpus_path()?, bins.unwrap_or(cfg.bins))?;
            println!("{}", serde_json::to_string_pretty(&store.stats())?);
            Ok(())
        }
        Command::Query(a) => {
            override_corpus(&mut cfg, a.corpus.clone());
            query(&cfg, &a)
        }
        Command::Synth(a) => synth(&a),
        Command::Eval(a) => {
            override_corpus(&mut cfg, a.corpus.clone());
            eval(&cfg, &a)
        }
        Command::Serve(a) => {
            override_corpus(&mut cfg, a.corpus);
            if let Some(l) = a.listen {
                cfg.listen = l;
            }
            cfg.bins = a.bins.unwrap_or(cfg.bins);
            cfg.top_k = a.top_k.unwrap_or(cfg.top_k);
            if a.static_dir.is_some() {
                cfg.static_dir = a.static_dir;
            }
            cfg.validate()?;
            serve(cfg)
        }
    }
}

fn override_corpus(cfg: &mut ServiceConfig, corpus: Option<PathBuf>) {
    if corpus.is_some() {
        cfg.corpus = corpus;
    }
}

fn read(path: &Path) -> anyhow::Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn stem(path: &Path) -> anyhow::Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .with_context(|| format!("cannot derive a document id from {}", path.display()))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ingest(a: &IngestArgs) -> anyhow::Result<()> {
    let ann = match (&a.blocks, &a.image) {
        (Some(blocks), _) => {
            let mut ann: BlockAnnotation =
                serde_json::from_slice(&read(blocks)?).with_context(|| format!("parsing {}", blocks.display()))?;
            if let Some(id) = &a.doc_id {
                ann.doc_id = id.clone();
            }
            // validates geometry the same way indexing will
            ingest_annotation(&ann, &Default::default())?;
            ann
        }
        (None, Some(image)) => {
            let img = GrayImage::decode(&read(image)?).with_context(|| format!("decoding {}", image.display()))?;
            let mut params = PipelineParams::default();
            params.raster.arlsa.a = a.a;
            params.raster.arlsa.r = a.r;
            let id = match &a.doc_id {
                Some(id) => id.clone(),
                None => stem(image)?,
            };
            BlockAnnotation::from_segmentation(&id, &segment_page(&img, &params.raster))
        }
        (None, None) => bail!("give an image or --blocks"),
    };
    write_json(&a.out, &ann)?;
    println!("{}: {} blocks -> {}", ann.doc_id, ann.blocks.len(), a.out.display());
    Ok(())
}

fn corpus_inputs(dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| {
        p.is_file()
            && p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "json" | "pgm" | "png"))
    });
    files.sort();
    Ok(files)
}

/// Indexes a directory of annotations and page images. Images take their
/// document id from the file name; annotations carry their own.
pub fn build_index(dir: &Path, bins: usize) -> anyhow::Result<CorpusStore> {
    let files = corpus_inputs(dir)?;
    let params = PipelineParams::default();
    let built: Vec<anyhow::Result<_>> = files
        .par_iter()
        .map(|path| {
            let bytes = read(path)?;
            let out = match sniff_input(&bytes)? {
                PageInput::Annotation(ann) => (ingest_annotation(&ann, &params.graph)?, annotation_meta()),
                PageInput::Image(img) => ingest_image(&stem(path)?, &img, &params)?,
            };
            Ok(out)
        })
        .collect();
    let mut store = CorpusStore::new(bins);
    for (path, b) in files.iter().zip(built) {
        let (graphs, meta) = b.with_context(|| format!("ingesting {}", path.display()))?;
        store
            .insert(graphs, Some(meta), false)
            .with_context(|| format!("indexing {}", path.display()))?;
    }
    Ok(store)
}

pub fn load_store(path: &Path, bins: usize) -> anyhow::Result<CorpusStore> {
    CorpusStore::load(path, bins).with_context(|| format!("loading corpus {}", path.display()))
}

fn query(cfg: &ServiceConfig, a: &QueryArgs) -> anyhow::Result<()> {
    let store = load_store(cfg.corpus_path()?, a.bins.unwrap_or(cfg.bins))?;
    let text = fs::read_to_string(&a.query).with_context(|| format!("reading {}", a.query.display()))?;
    let parsed = parse_query(&text).with_context(|| format!("invalid query {}", a.query.display()))?;
    let top = a.top.unwrap_or(cfg.top_k);
    if top == 0 {
        bail!("--top must be at least 1");
    }
    let response = run_query(&store, &parsed, !a.no_hash, Some(top));
    let mut out = std::io::stdout().lock();
    if a.json {
        serde_json::to_writer(&mut out, &response)?;
        writeln!(out)?;
    } else {
        print_response(&mut out, &response)?;
    }
    Ok(())
}

fn print_response(out: &mut impl Write, r: &QueryResponse) -> std::io::Result<()> {
    for (name, t) in &r.query_types {
        writeln!(out, "layout {name}: type {t}")?;
    }
    if r.results.is_empty() {
        writeln!(out, "no matching documents")?;
    }
    for (rank, d) in r.results.iter().enumerate() {
        let score = d.score.map_or("-".to_string(), |s| format!("{s:.4}"));
        writeln!(out, "{:>3}. {}  score {score}  ({} matches)", rank + 1, d.doc_id, d.matches.len())?;
        for m in &d.matches {
            let b = m.bbox;
            writeln!(
                out,
                "     {} {} score {:.4} at ({}, {}) {}x{}",
                m.layout, m.hypothesis, m.score, b.x, b.y, b.w, b.h
            )?;
        }
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> anyhow::Result<()> {
    let mut p: SynthParams = match &a.params {
        Some(path) => serde_json::from_slice(&read(path)?).with_context(|| format!("parsing {}", path.display()))?,
        None => SynthParams::default(),
    };
    p.seed = a.seed;
    p.docs = a.docs;
    if a.raster {
        p = p.for_raster();
    }
    if let Some(pp) = a.plant_prob {
        p.plant_prob = pp;
    }
    if let Some(rate) = a.decoys {
        p = p.with_decoys(rate);
    }
    p.validate().map_err(anyhow::Error::msg)?;

    let mut layouts: Vec<QueryLayout> = Vec::new();
    for path in &a.plant {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let q = parse_query(&text).with_context(|| format!("invalid query {}", path.display()))?;
        layouts.extend(q.layouts.into_values());
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    if let Some(per_type) = a.battery {
        let dir = a.battery_out.clone().unwrap_or_else(|| a.out.join("battery"));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for l in generate_battery(a.seed, per_type) {
            write_json(&dir.join(format!("{}.json", l.name)), &layout_spec(&l))?;
            layouts.push(l);
        }
    }

    let corpus = synth_corpus(&p, &layouts);
    for d in &corpus.docs {
        let id = &d.annotation.doc_id;
        match &d.image {
            Some(img) => fs::write(a.out.join(format!("{id}.pgm")), img.to_pgm())?,
            None => fs::write(a.out.join(format!("{id}.json")), serde_json::to_vec(&d.annotation)?)?,
        }
    }
    let mut truth = Vec::new();
    for inst in &corpus.truth.planted {
        serde_json::to_writer(&mut truth, inst)?;
        truth.push(b'\n');
    }
    fs::write(a.out.join(TRUTH_FILE), truth)?;
    println!(
        "wrote {} documents ({} planted instances) to {}",
        corpus.docs.len(),
        corpus.truth.planted.len(),
        a.out.display()
    );
    Ok(())
}

fn read_truth(path: &Path) -> anyhow::Result<GroundTruth> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let planted = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<PlantedInstance>(l).with_context(|| format!("{} line {}", path.display(), i + 1))
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(GroundTruth { planted })
}

/// Every layout of every `.json` query file in `dir`, in file-name order.
pub fn read_battery(dir: &Path) -> anyhow::Result<Vec<QueryLayout>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    let mut out = Vec::new();
    for path in files {
        let text = fs::read_to_string(&path)?;
        let q = parse_query(&text).with_context(|| format!("invalid query {}", path.display()))?;
        out.extend(q.layouts.into_values());
    }
    if out.is_empty() {
        bail!("no query layouts in {}", dir.display());
    }
    Ok(out)
}

fn eval(cfg: &ServiceConfig, a: &EvalArgs) -> anyhow::Result<()> {
    let store = load_store(cfg.corpus_path()?, a.bins.unwrap_or(cfg.bins))?;
    let battery = read_battery(&a.battery)?;
    let truth = match &a.truth {
        Some(p) => read_truth(p)?,
        None => GroundTruth::default(),
    };
    let report = evaluate(&store, &store, &truth, &battery, a.runs);
    write_json(&a.report, &report)?;
    print_report(&mut std::io::stdout().lock(), &report)?;
    Ok(())
}

fn print_report(out: &mut impl Write, r: &EvalReport) -> std::io::Result<()> {
    writeln!(out, "type  queries  documents  recall%  precision%  time(s)")?;
    for row in &r.rows {
        writeln!(
            out,
            "{:>4}  {:>7}  {:>9}  {:>7.2}  {:>10.2}  {:>7.4}",
            row.query_type, row.queries, row.documents, row.recall, row.precision, row.time_s
        )?;
    }
    writeln!(
        out,
        " all  {:>7}  {:>9}  {:>7.2}  {:>10.2}",
        r.queries.len(),
        r.rows.iter().map(|t| t.documents).sum::<usize>(),
        r.overall_recall(),
        r.overall_precision()
    )
}

fn serve(cfg: ServiceConfig) -> anyhow::Result<()> {
    let store = match &cfg.corpus {
        Some(p) if p.exists() => load_store(p, cfg.bins)?,
        _ => CorpusStore::new(cfg.bins),
    };
    if cfg.corpus.is_none() {
        eprintln!("no corpus file configured ({CORPUS_ENV} or --corpus); uploads stay in memory");
    }
    let state = crate::service::AppState::new(store, &cfg, cfg.corpus.clone());
    let app = crate::service::router(state, cfg.static_dir.clone());
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(cfg.listen)
            .await
            .with_context(|| format!("binding {}", cfg.listen))?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, app).await?;
        Ok(())
    })
}
