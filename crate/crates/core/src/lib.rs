//! Coordinated-account detection and characterization kernels.
//!
//! This crate is `no_std` (with `alloc`). It holds the tweet corpus model,
//! the three coordination detectors (hashtag sequences, retweet TF-IDF
//! similarity, tweet-time TF-IDF similarity), coordination-graph clustering,
//! socio-linguistic confidence tables, and the rank-statistics kernel used to
//! compare coordinated accounts against the rest of the corpus.
//!
//! File formats, ingest and the command-line front end live in the `coordnet`
//! crate. Enabling the `parallel` feature turns on rayon-backed pair scoring
//! and bootstrap resampling; every output is identical with or without it.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod corpus;
pub mod detectors;
pub mod error;
pub mod graph;
pub mod rng;
pub mod socio;
pub mod stats;
pub mod text;

pub use corpus::{Corpus, DailyVolume, TweetKind, TweetRecord};
pub use detectors::{CoordinationEdge, Detector, DetectorConfig, SparseVector};
pub use error::Error;
pub use graph::{Cluster, CoordinationGraph};
pub use socio::{Characteristic, CharacteristicTable, Lexicon};
pub use stats::StatResult;
pub use text::{normalize_text, NormalizeOptions};

/// Seconds in a UTC day.
pub const SECONDS_PER_DAY: i64 = 86_400;
