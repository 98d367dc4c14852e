use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use layoutsearch_core::index::DEFAULT_BINS;

pub const CORPUS_ENV: &str = "LAYOUTSEARCH_CORPUS";

/// Settings shared by the service and the corpus-reading commands.
///
/// Resolution order, later wins: built-in defaults, `LAYOUTSEARCH_CORPUS`,
/// the `--config` file, explicit command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub corpus: Option<PathBuf>,
    pub bins: usize,
    pub top_k: usize,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            corpus: None,
            bins: DEFAULT_BINS,
            top_k: 20,
            static_dir: None,
        }
    }
}

impl ServiceConfig {
    /// Defaults, then the environment, then the optional config file.
    pub fn resolve(file: Option<&Path>) -> anyhow::Result<Self> {
        let mut cfg = Self::default();
        if let Some(c) = std::env::var_os(CORPUS_ENV).filter(|v| !v.is_empty()) {
            cfg.corpus = Some(PathBuf::from(c));
        }
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            let overrides: serde_json::Map<String, serde_json::Value> =
                serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
            // only keys present in the file override what came before
            let mut merged = serde_json::to_value(&cfg)?;
            for (k, v) in overrides {
                merged[k] = v;
            }
            cfg = serde_json::from_value(merged).with_context(|| format!("invalid config {}", path.display()))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.bins < 1 {
            bail!("bins must be at least 1");
        }
        if self.top_k < 1 {
            bail!("top_k must be at least 1");
        }
        Ok(())
    }

    pub fn corpus_path(&self) -> anyhow::Result<&Path> {
        self.corpus
            .as_deref()
            .with_context(|| format!("no corpus given: pass --corpus, set {CORPUS_ENV}, or use --config"))
    }
}
