//! Per-parameter vector rules for the merge step.
//!
//! The three parameters share the general case and the table arithmetic;
//! they differ in how a received vector is read and in the vector assigned
//! while every received tree is still small.

use std::fmt;

use super::{merge_summed, EvalResult, HDescriptor, ParamVariant, Vect};
use crate::error::Result;

pub trait MergeRules: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn variant(&self) -> ParamVariant;

    /// How the merging node reads a child's vector.
    fn interpret(&self, v: Vect) -> Vect {
        v
    }

    /// Vector of the merged subtree when every received tree is still small,
    /// or `None` to fall through to the general case.
    fn initial_case(&self, received: &[Vect]) -> Option<Vect>;

    /// Highest table index a tree of `n` vertices can use.
    fn table_capacity(&self, n: usize) -> usize {
        ceil_log3(n)
    }

    /// What a node keeps for a neighbour's descriptor, read through the
    /// edge between them.
    fn across_edge(&self, hd: HDescriptor) -> Result<HDescriptor> {
        Ok(hd)
    }

    /// Parameter value of a whole tree from its root evaluation.
    fn root_value(&self, e: EvalResult) -> EvalResult {
        e
    }
}

/// `⌈log₃ n⌉`, with 0 for `n <= 1`.
pub fn ceil_log3(n: usize) -> usize {
    let mut k = 0;
    let mut p = 1usize;
    while p < n {
        p = p.saturating_mul(3);
        k += 1;
    }
    k
}

fn max_pn(received: &[Vect]) -> i32 {
    received.iter().map(|v| v.pn).max().unwrap_or(-1)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ProcessNumberRules;

impl MergeRules for ProcessNumberRules {
    fn name(&self) -> &'static str {
        "pn"
    }

    fn variant(&self) -> ParamVariant {
        ParamVariant::ProcessNumber
    }

    fn initial_case(&self, received: &[Vect]) -> Option<Vect> {
        let p = max_pn(received);
        if p >= 2 {
            return None;
        }
        // A star hanging off its center extends to a larger star only when
        // nothing else in the associated tree touches the merging node.
        // (-1,-1) neighbours sit in other associated trees.
        let mut live = received.iter().filter(|v| !v.is_none());
        let lone_star = live.next() == Some(&Vect::stable(1)) && live.next().is_none();
        Some(match p {
            -1 => Vect::stable(0),
            0 => Vect::stable(1),
            _ if lone_star => Vect::new(1, 2),
            _ => Vect::stable(2),
        })
    }
}

/// Node search. A leaf already needs one agent, so it sends `((1,1),[0])`.
#[derive(Clone, Copy, Debug, Default)]
pub struct NodeSearchRules;

impl MergeRules for NodeSearchRules {
    fn name(&self) -> &'static str {
        "ns"
    }

    fn variant(&self) -> ParamVariant {
        ParamVariant::NodeSearch
    }

    fn initial_case(&self, received: &[Vect]) -> Option<Vect> {
        match max_pn(received) {
            -1 => Some(Vect::stable(1)),
            p if p < 2 => Some(Vect::stable(2)),
            _ => None,
        }
    }

    /// Node search can reach `⌈log₃ n⌉ + 1` (two vertices already need two).
    fn table_capacity(&self, n: usize) -> usize {
        ceil_log3(n) + 1
    }
}

/// Edge search, as vertex separation of the 2-expansion: every edge is
/// read as a path through two extra vertices, merged with node search
/// rules on the spot. No extra messages are needed.
#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeSearchRules;

impl MergeRules for EdgeSearchRules {
    fn name(&self) -> &'static str {
        "es"
    }

    fn variant(&self) -> ParamVariant {
        ParamVariant::EdgeSearch
    }

    fn initial_case(&self, received: &[Vect]) -> Option<Vect> {
        NodeSearchRules.initial_case(received)
    }

    /// The expanded tree has `3n - 2` vertices.
    fn table_capacity(&self, n: usize) -> usize {
        NodeSearchRules.table_capacity((3 * n).saturating_sub(2))
    }

    fn across_edge(&self, hd: HDescriptor) -> Result<HDescriptor> {
        let (once, _) = merge_summed(&[hd.vect], hd.table, self)?;
        let (twice, _) = merge_summed(&[once.vect], once.table, self)?;
        Ok(twice)
    }

    fn root_value(&self, e: EvalResult) -> EvalResult {
        EvalResult { value: e.value.saturating_sub(1), ..e }
    }
}

/// Merge rules registered under `name` (`pn`, `ns`, `es`).
pub fn rules_by_name(name: &str) -> Option<&'static dyn MergeRules> {
    ParamVariant::ALL.into_iter().map(ParamVariant::rules).find(|r| r.name() == name)
}
