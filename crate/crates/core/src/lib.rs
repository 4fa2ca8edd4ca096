//! Analytic Network Process engine.
//!
//! Pairwise judgments on the 1–9 scale become priority vectors, priority
//! vectors are assembled into a supermatrix, the supermatrix is weighted by
//! cluster and raised to its limit, and the limit column of the goal ranks
//! the alternatives.
//!
//! ```
//! let doc = anp_core::fixtures::kwic();
//! let opts = doc.solve_options(None, None).unwrap();
//! let solution = anp_core::solve(&doc.to_network(), &opts).unwrap();
//! assert_eq!(solution.ranking.order()[0], "PF");
//! ```

pub mod fixtures;
pub mod judgment;
pub mod matrix;
pub mod model;
pub mod network;
pub mod pipeline;
pub mod priority;
pub mod report;
pub mod supermatrix;

pub use judgment::{Judgment, JudgmentError, ScaleMode};
pub use matrix::{ComparisonMatrix, MatrixError};
pub use model::{load, save, ModelDocument, ModelError, ResultDocument};
pub use network::{Cluster, ClusterKind, DecisionNetwork, PairKey, SlotKey, ValidationReport};
pub use pipeline::{
    solve, solve_hierarchy, whatif, Override, Solution, SolveError, SolveOptions, WhatIf,
};
pub use priority::{
    principal_eigenvector, ConsistencyOptions, ConsistencyPolicy, ConsistencyVerdict,
    PriorityError, PriorityVector, RciTable,
};
pub use report::{export_report, ReportFormat};
pub use supermatrix::{ConvergenceOptions, RankingReport, Supermatrix, SupermatrixError};
