//! File formats, ingest and command pipeline for the `coordnet` tool.

pub mod adhoc;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod manifest;
pub mod pipeline;

pub use config::Config;
pub use error::{Error, Result};
