//! Process number, node search number, edge search number and pathwidth of
//! trees, computed by a leaf-to-root convergecast of hierarchical
//! decompositions.
//!
//! The crate is organised around a small registry of interchangeable
//! strategies: merge rules per parameter ([`hd::rules`]), wire codings per
//! framing scheme ([`codec`]) and scheduling policies ([`protocol`]). Each is a
//! trait object looked up by name at runtime, which is how the CLI selects
//! them.

pub mod cli;
pub mod codec;
pub mod dynamic;
pub mod error;
pub mod forest;
pub mod hd;
pub mod oracle;
pub mod protocol;
pub mod registry;
pub mod strategy;

pub use error::{Error, Result};
pub use forest::{Forest, Graph, VertexId};
pub use hd::{evaluate, merge, simplify, EvalResult, HDescriptor, HdTable, ParamVariant, Vect};

