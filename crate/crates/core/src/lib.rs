//! Completion of sparse partial Latin squares via intercalate trades.
//!
//! The centerpiece is a completion engine that turns a structured Latin
//! square into a completion of a given sparse partial square by composing
//! small reversible trades, with explicit disturbance accounting and exact
//! feasibility gating. Around it sit a randomized preprocessing pass that
//! harvests non-overlapping 2x2 trades, generators for NP-hardness
//! reduction instances built on the Latin-framework correspondence, and a
//! triangulation pipeline for dense balanced tripartite graphs.

pub mod square;
pub mod structured;
pub mod trades;
pub mod walk;
pub mod solver;
pub mod feasibility;
pub mod completion;
pub mod prob;
pub mod reductions;
pub mod tri;
pub mod io;
pub mod batch;

pub use square::{
    DensityProfile, ImproperSquare, LatinSquare, PartialLatinSquare, SquareError, Symbol,
};
pub use structured::{Quadrant, StructuredSquare, Transversal};
pub use trades::{Trade, TradeKind, TradeRecord, TradeStep};
pub use completion::{complete, CompleteMode, Completion, CompletionError, DisturbanceLedger};
pub use reductions::TripartiteGraph;
