//! Node search and edge search with recontamination.
//!
//! A cleared edge becomes contaminated again whenever it shares an unguarded
//! vertex with a contaminated edge; the closure is recomputed after every
//! move. Strategies need not be monotone, so the state space is explored as
//! a general graph.

use std::collections::HashSet;

use super::check_size;
use crate::error::{Error, Result};
use crate::forest::Graph;

pub const NS_MAX_N: usize = 11;
pub const ES_MAX_N: usize = 10;

struct EdgeIndex {
    ends: Vec<(usize, usize)>,
    incident: Vec<u32>,
    all: u32,
}

impl EdgeIndex {
    fn new(g: &Graph) -> Result<Self> {
        let ends = g.edges();
        if ends.len() > 24 {
            return Err(Error::Capacity(format!("search oracles support at most 24 edges, got {}", ends.len())));
        }
        let mut incident = vec![0u32; g.len()];
        for (i, &(u, v)) in ends.iter().enumerate() {
            incident[u] |= 1 << i;
            incident[v] |= 1 << i;
        }
        let all = ((1u64 << ends.len()) - 1) as u32;
        Ok(EdgeIndex { ends, incident, all })
    }

    /// Spread contamination through unguarded vertices until stable.
    fn recontaminate(&self, cleared: u32, guarded: u32) -> u32 {
        let mut dirty = self.all & !cleared;
        loop {
            let mut next = dirty;
            for (v, &inc) in self.incident.iter().enumerate() {
                if guarded >> v & 1 == 0 && inc & dirty != 0 {
                    next |= inc;
                }
            }
            if next == dirty {
                return self.all & !dirty;
            }
            dirty = next;
        }
    }
}

/// Node search number: an edge is cleared while both its ends carry an
/// agent. Every vertex must be visited, so a non-empty graph needs at least
/// one agent even without edges.
pub fn ns_exact(g: &Graph) -> Result<usize> {
    check_size(g, NS_MAX_N, "node search")?;
    if g.is_empty() {
        return Ok(0);
    }
    let idx = EdgeIndex::new(g)?;
    if idx.ends.is_empty() {
        return Ok(1);
    }
    let n = g.len();
    let m = idx.ends.len();
    let clear_between = |occ: u32| -> u32 {
        idx.ends
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| occ >> u & 1 == 1 && occ >> v & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    };
    let winnable = |budget: u32| -> bool {
        let key = |cleared: u32, occ: u32| (cleared as u64) | (occ as u64) << m;
        let mut seen = HashSet::new();
        let mut stack = vec![(0u32, 0u32)];
        seen.insert(key(0, 0));
        while let Some((cleared, occ)) = stack.pop() {
            if cleared == idx.all {
                return true;
            }
            for v in 0..n {
                let bit = 1u32 << v;
                let next = if occ & bit != 0 {
                    let occ2 = occ & !bit;
                    (idx.recontaminate(cleared, occ2), occ2)
                } else if occ.count_ones() < budget {
                    let occ2 = occ | bit;
                    (cleared | clear_between(occ2), occ2)
                } else {
                    continue;
                };
                if seen.insert(key(next.0, next.1)) {
                    stack.push(next);
                }
            }
        }
        false
    };
    Ok((1..=n as u32).find(|&p| winnable(p)).expect("n agents always suffice") as usize)
}

/// Edge search number: searchers are placed, removed, or slid along an edge,
/// which clears it.
pub fn es_exact(g: &Graph) -> Result<usize> {
    check_size(g, ES_MAX_N, "edge search")?;
    let idx = EdgeIndex::new(g)?;
    if idx.ends.is_empty() {
        return Ok(0);
    }
    let n = g.len();
    // Agent positions are kept sorted so that agents are interchangeable.
    type State = (u32, Vec<u8>);
    let guarded = |pos: &[u8]| pos.iter().fold(0u32, |m, &p| m | 1 << p);
    let edge_id = |u: usize, v: usize| idx.ends.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
    let winnable = |budget: usize| -> bool {
        let mut seen: HashSet<State> = HashSet::new();
        let start: State = (0, Vec::new());
        seen.insert(start.clone());
        let mut stack = vec![start];
        while let Some((cleared, pos)) = stack.pop() {
            if cleared == idx.all {
                return true;
            }
            let mut succ: Vec<State> = Vec::new();
            if pos.len() < budget {
                for v in 0..n as u8 {
                    let mut p = pos.clone();
                    p.push(v);
                    p.sort_unstable();
                    succ.push((cleared, p));
                }
            }
            for i in 0..pos.len() {
                if i > 0 && pos[i] == pos[i - 1] {
                    continue;
                }
                let mut p = pos.clone();
                p.remove(i);
                let c = idx.recontaminate(cleared, guarded(&p));
                succ.push((c, p));
                let u = pos[i] as usize;
                for &w in g.neighbours(u) {
                    let mut p = pos.clone();
                    p[i] = w as u8;
                    p.sort_unstable();
                    let c = idx.recontaminate(cleared | 1 << edge_id(u, w), guarded(&p));
                    succ.push((c, p));
                }
            }
            for s in succ {
                if !seen.contains(&s) {
                    seen.insert(s.clone());
                    stack.push(s);
                }
            }
        }
        false
    };
    Ok((1..=n).find(|&p| winnable(p)).expect("n searchers always suffice"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{gen_tree, TreeKind};

    fn tree(kind: TreeKind) -> Graph {
        gen_tree(kind).unwrap().into_graph()
    }

    #[test]
    fn node_search_small() {
        assert_eq!(ns_exact(&Graph::new(1)).unwrap(), 1);
        assert_eq!(ns_exact(&tree(TreeKind::Path(2))).unwrap(), 2);
        assert_eq!(ns_exact(&tree(TreeKind::Path(6))).unwrap(), 2);
        assert_eq!(ns_exact(&tree(TreeKind::Star(4))).unwrap(), 2);
        assert_eq!(ns_exact(&tree(TreeKind::Spider(2, 2, 2))).unwrap(), 3);
        assert_eq!(ns_exact(&Graph::cycle(5)).unwrap(), 3);
    }

    #[test]
    fn edge_search_small() {
        assert_eq!(es_exact(&Graph::new(1)).unwrap(), 0);
        assert_eq!(es_exact(&tree(TreeKind::Path(2))).unwrap(), 1);
        assert_eq!(es_exact(&tree(TreeKind::Path(4))).unwrap(), 1);
        assert_eq!(es_exact(&tree(TreeKind::Star(3))).unwrap(), 2);
        assert_eq!(es_exact(&Graph::cycle(4)).unwrap(), 2);
    }

    #[test]
    fn sliding_without_guard_recontaminates() {
        // Claw: sliding a lone searcher off the center re-dirties the edge.
        let g = tree(TreeKind::Star(3));
        let idx = EdgeIndex::new(&g).unwrap();
        assert_eq!(idx.recontaminate(0b001, 1 << 1), 0);
        assert_eq!(idx.recontaminate(0b001, 1 << 0), 0b001);
    }
}
