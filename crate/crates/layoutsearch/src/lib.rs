//! Command-line tools and HTTP service for sketch-based layout retrieval.

pub mod cli;
pub mod config;
pub mod service;
