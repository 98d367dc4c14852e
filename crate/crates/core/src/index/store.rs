use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use super::hash::{Descriptor, HashIndex, IndexStats, Posting, DEFAULT_BINS};
use crate::error::{Error, Result};
use crate::graph::{DocumentRecord, HypothesisId, LayoutGraph, SourceMeta};

/// The four hypothesis graphs of one document.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredDocument {
    graphs: Vec<LayoutGraph>,
    pub source: Option<SourceMeta>,
    /// For each hypothesis, the earlier hypothesis with an identical graph.
    duplicate_of: [Option<HypothesisId>; 4],
}

impl StoredDocument {
    fn new(graphs: Vec<LayoutGraph>, source: Option<SourceMeta>) -> Result<Self> {
        let ids: Vec<HypothesisId> = graphs.iter().map(|g| g.hypothesis).collect();
        if ids != HypothesisId::ALL {
            return Err(Error::InvalidGraph(
                "a document needs exactly the hypotheses H1..H4 in order".into(),
            ));
        }
        if graphs.iter().any(|g| g.doc_id != graphs[0].doc_id) {
            return Err(Error::InvalidGraph("hypotheses disagree on doc_id".into()));
        }
        let mut duplicate_of = [None; 4];
        for i in 1..4 {
            duplicate_of[i] = (0..i)
                .find(|&j| duplicate_of[j].is_none() && graphs[i].same_layout(&graphs[j]))
                .map(|j| HypothesisId::ALL[j]);
        }
        Ok(Self {
            graphs,
            source,
            duplicate_of,
        })
    }

    pub fn doc_id(&self) -> &str {
        &self.graphs[0].doc_id
    }

    pub fn graphs(&self) -> &[LayoutGraph] {
        &self.graphs
    }

    pub fn graph(&self, h: HypothesisId) -> &LayoutGraph {
        &self.graphs[h.index()]
    }

    /// Earlier hypothesis whose graph is identical to `h`, if any.
    pub fn duplicate_of(&self, h: HypothesisId) -> Option<HypothesisId> {
        self.duplicate_of[h.index()]
    }

    /// Hypotheses with distinct graphs, in H1..H4 order.
    pub fn distinct_hypotheses(&self) -> impl Iterator<Item = HypothesisId> + '_ {
        HypothesisId::ALL
            .into_iter()
            .filter(|&h| self.duplicate_of[h.index()].is_none())
    }

    pub fn record(&self) -> DocumentRecord {
        DocumentRecord::from_graphs(&self.graphs, self.source.clone())
    }
}

/// All documents plus the block index over every hypothesis graph.
///
/// Documents keep the slot they were first inserted at; replacing a
/// document reuses its slot, so iteration order is insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStore {
    docs: Vec<StoredDocument>,
    by_id: HashMap<String, u32>,
    index: HashIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoreStats {
    pub documents: usize,
    pub graphs: usize,
    pub distinct_graphs: usize,
    pub blocks: usize,
    pub index: IndexStats,
}

impl Default for CorpusStore {
    fn default() -> Self {
        Self::new(DEFAULT_BINS)
    }
}

impl CorpusStore {
    pub fn new(bins: usize) -> Self {
        Self {
            docs: Vec::new(),
            by_id: HashMap::new(),
            index: HashIndex::new(bins),
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn index(&self) -> &HashIndex {
        &self.index
    }

    pub fn documents(&self) -> &[StoredDocument] {
        &self.docs
    }

    pub fn document(&self, slot: u32) -> &StoredDocument {
        &self.docs[slot as usize]
    }

    pub fn get(&self, doc_id: &str) -> Option<&StoredDocument> {
        self.by_id.get(doc_id).map(|&s| &self.docs[s as usize])
    }

    pub fn contains(&self, doc_id: &str) -> bool {
        self.by_id.contains_key(doc_id)
    }

    /// Stores and indexes one document's four hypothesis graphs. An existing
    /// document with the same id is replaced only when `replace` is set.
    pub fn insert(&mut self, graphs: Vec<LayoutGraph>, source: Option<SourceMeta>, replace: bool) -> Result<()> {
        let doc = StoredDocument::new(graphs, source)?;
        let id = doc.doc_id().to_string();
        match self.by_id.get(&id) {
            Some(_) if !replace => Err(Error::DuplicateDocument(id)),
            Some(&slot) => {
                for g in self.docs[slot as usize].graphs() {
                    self.index.remove_graph(slot, g);
                }
                for g in doc.graphs() {
                    self.index.insert_graph(slot, g);
                }
                self.docs[slot as usize] = doc;
                Ok(())
            }
            None => {
                let slot = self.docs.len() as u32;
                for g in doc.graphs() {
                    self.index.insert_graph(slot, g);
                }
                self.by_id.insert(id, slot);
                self.docs.push(doc);
                Ok(())
            }
        }
    }

    pub fn insert_record(&mut self, record: &DocumentRecord, replace: bool) -> Result<()> {
        self.insert(record.to_graphs()?, record.source.clone(), replace)
    }

    /// Candidate match starts: postings whose key satisfies `desc`, on
    /// hypotheses that are not duplicates of an earlier one.
    pub fn candidate_lookup(&self, desc: &Descriptor) -> Vec<Posting> {
        let mut out = self.index.lookup(desc);
        out.retain(|p| self.docs[p.doc as usize].duplicate_of(p.hypothesis).is_none());
        out
    }

    /// Every block of every distinct hypothesis graph, as postings.
    pub fn all_starts(&self) -> Vec<Posting> {
        let mut out = Vec::new();
        for (slot, d) in self.docs.iter().enumerate() {
            for h in d.distinct_hypotheses() {
                for block in 0..d.graph(h).len() {
                    out.push(Posting {
                        doc: slot as u32,
                        hypothesis: h,
                        block: block as u32,
                        key: super::context_key(d.graph(h), block).encode(),
                    });
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Copy in which only the `keep` hypotheses are searchable: the others
    /// are replaced by H1 and so skipped as duplicates. Used for ablation.
    pub fn restricted_to(&self, keep: &[HypothesisId]) -> CorpusStore {
        let mut out = CorpusStore::new(self.index.bin_count());
        for d in &self.docs {
            let mut graphs = d.graphs.clone();
            for g in graphs.iter_mut() {
                if !keep.contains(&g.hypothesis) {
                    // stand-in identical to H1 so it is skipped as a duplicate
                    let h = g.hypothesis;
                    *g = d.graphs[0].clone();
                    g.hypothesis = h;
                }
            }
            out.insert(graphs, d.source.clone(), false).expect("ids are unique");
        }
        out
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            documents: self.docs.len(),
            graphs: self.docs.len() * 4,
            distinct_graphs: self.docs.iter().map(|d| d.distinct_hypotheses().count()).sum(),
            blocks: self.index.len(),
            index: self.index.stats(),
        }
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for d in &self.docs {
            serde_json::to_writer(&mut w, &d.record())?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads JSON-lines; blank lines are skipped. Errors carry the 1-based
    /// line number.
    pub fn read_jsonl<R: Read>(r: R, bins: usize) -> Result<Self> {
        let mut store = CorpusStore::new(bins);
        for (i, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let at = |e: &dyn std::fmt::Display| Error::CorpusLine {
                line: i + 1,
                message: e.to_string(),
            };
            let rec: DocumentRecord = serde_json::from_str(&line).map_err(|e| at(&e))?;
            store.insert_record(&rec, false).map_err(|e| at(&e))?;
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("jsonl.tmp");
        self.write_jsonl(BufWriter::new(File::create(&tmp)?))?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path, bins: usize) -> Result<Self> {
        Self::read_jsonl(File::open(path)?, bins)
    }
}
