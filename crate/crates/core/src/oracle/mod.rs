//! Exhaustive ground-truth solvers for small graphs.
//!
//! Every solver searches the game's state space with an outer loop over the
//! agent budget `p`, so the returned value is the least budget that reaches a
//! winning state. Nothing here shares code with the hierarchical
//! decomposition path it is used to check.

mod gap;
mod pathwidth;
mod process;
mod search;

pub use gap::gap_characterization_check;
pub use pathwidth::{pathwidth_exact, PW_MAX_N};
pub use process::{pn_exact, pn_plus_exact, stable_exact, SweepState, PN_MAX_N, PN_PLUS_MAX_N};
pub use search::{es_exact, ns_exact, ES_MAX_N, NS_MAX_N};

use std::fmt;

use crate::error::{Error, Result};
use crate::forest::Graph;

/// An exhaustive solver for one graph parameter.
pub trait ExactOracle: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// Largest vertex count the solver accepts.
    fn max_n(&self) -> usize;

    fn value(&self, g: &Graph) -> Result<usize>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ProcessNumberOracle;

#[derive(Clone, Copy, Debug, Default)]
pub struct NodeSearchOracle;

#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeSearchOracle;

#[derive(Clone, Copy, Debug, Default)]
pub struct PathwidthOracle;

impl ExactOracle for ProcessNumberOracle {
    fn name(&self) -> &'static str {
        "pn"
    }
    fn max_n(&self) -> usize {
        PN_MAX_N
    }
    fn value(&self, g: &Graph) -> Result<usize> {
        pn_exact(g)
    }
}

impl ExactOracle for NodeSearchOracle {
    fn name(&self) -> &'static str {
        "ns"
    }
    fn max_n(&self) -> usize {
        NS_MAX_N
    }
    fn value(&self, g: &Graph) -> Result<usize> {
        ns_exact(g)
    }
}

impl ExactOracle for EdgeSearchOracle {
    fn name(&self) -> &'static str {
        "es"
    }
    fn max_n(&self) -> usize {
        ES_MAX_N
    }
    fn value(&self, g: &Graph) -> Result<usize> {
        es_exact(g)
    }
}

impl ExactOracle for PathwidthOracle {
    fn name(&self) -> &'static str {
        "pw"
    }
    fn max_n(&self) -> usize {
        PW_MAX_N
    }
    fn value(&self, g: &Graph) -> Result<usize> {
        pathwidth_exact(g)
    }
}

pub(crate) fn check_size(g: &Graph, max: usize, what: &str) -> Result<()> {
    if g.len() > max {
        Err(Error::Capacity(format!("{what} oracle supports at most {max} vertices, got {}", g.len())))
    } else {
        Ok(())
    }
}

pub(crate) fn neighbour_masks(g: &Graph) -> Vec<u32> {
    g.vertices()
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect()
}
