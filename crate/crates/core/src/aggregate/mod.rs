//! Synthetic data with labelled noise and corruption, and a hierarchical
//! local-fit / merge pipeline over a partition of the domain.
//!
//! Local polynomials are fitted per cell and merged pairwise up a binary
//! tree: each internal node draws Halton points in both children's cells,
//! evaluates the children there and refits on the union.

pub mod dataset;
pub mod generate;
pub mod halton;
pub mod merge;
pub mod partition;

pub use dataset::{manifest_path, write_atomic, AnyDataSet, DataSet, Label, Manifest};
pub use generate::{Corruption, Generator, Noise, Truth};
pub use halton::halton;
pub use merge::{
    fit_local, merge_hierarchical, CellFit, FitterConfig, LocalModel, LpFitter, MergeOutcome, MergePlan, NodeDrift,
    WbFitter,
};
pub use partition::{Cell, Partition};

use thiserror::Error;

use crate::algebra::AlgebraError;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Failures of the local-fit / merge pipeline.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("every cell failed to fit; first error: {0}")]
    AllCellsFailed(String),
    #[error("node {node}: {message}")]
    Node { node: usize, message: String },
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
}
