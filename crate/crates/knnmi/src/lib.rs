//! Non-parametric Markov network structure learning for continuous data.
//!
//! The pipeline combines three pieces:
//!
//! - kNN-based estimators for entropy, mutual information and conditional
//!   mutual information under the maximum norm ([`estimators`]),
//! - a permutation test for conditional independence, with a Fisher-z
//!   partial-correlation baseline and a hybrid shortcut ([`citest`]),
//! - IAMB Markov-blanket discovery assembled into an undirected graph with
//!   the conservative AND rule ([`structure`]).
//!
//! Synthetic-data generators and a Hamming-distance benchmark harness
//! ([`synthdata`], [`eval`]) reproduce the usual evaluation settings.

pub mod citest;
pub mod config;
pub mod dataset;
pub mod error;
pub mod estimators;
pub mod eval;
pub mod graph;
pub mod knn;
pub mod seed;
pub mod structure;
pub mod synthdata;

pub use config::{CITestResult, EstimatorConfig};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use graph::{graph_from_blankets_and_rule, MarkovBlanket, UndirectedGraph};
pub use knn::SpatialIndex;
pub use seed::{derive_seed, rng_from_seed};
