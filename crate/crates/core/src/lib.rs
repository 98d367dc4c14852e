//! Sub-layout retrieval over document page images.
//!
//! Pages are segmented into blocks ([`raster`]), turned into four-way block
//! adjacency graphs under several segmentation hypotheses ([`graph`]),
//! indexed by block context ([`index`]) and searched with sketched query
//! layouts ([`query`]). [`eval`] holds the synthetic corpus generator and
//! the measurement harness.

pub mod error;
pub mod eval;
pub mod geometry;
pub mod graph;
pub mod index;
pub mod ingest;
pub mod query;
pub mod raster;

pub use error::{Error, QueryError, Result};
