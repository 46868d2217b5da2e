//! Process game: place an agent; remove an agent once every neighbour is
//! processed or occupied (the vertex becomes processed); process an
//! unoccupied vertex whose neighbours are all occupied.
//!
//! Removing a removable agent and processing a surrounded vertex never hurt
//! later moves, so both are applied greedily after every placement. The only
//! real choice left is where to place the next agent.

use super::{check_size, neighbour_masks};
use crate::error::Result;
use crate::forest::{Graph, VertexId};

pub const PN_MAX_N: usize = 13;
pub const PN_PLUS_MAX_N: usize = 12;

/// Per-vertex status of a process strategy in progress.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SweepState {
    pub occupied: u32,
    pub processed: u32,
}

impl SweepState {
    pub fn agents(&self) -> u32 {
        self.occupied.count_ones()
    }
}

struct ProcessGame {
    n: usize,
    nbr: Vec<u32>,
    all: u32,
    /// Vertex that must keep its agent until the end (pn⁺ search).
    pinned: Option<VertexId>,
    pow3: Vec<u32>,
}

impl ProcessGame {
    fn new(g: &Graph, pinned: Option<VertexId>) -> Self {
        let n = g.len();
        let mut pow3 = vec![1u32; n + 1];
        for i in 1..=n {
            pow3[i] = pow3[i - 1] * 3;
        }
        ProcessGame { n, nbr: neighbour_masks(g), all: ((1u64 << n) - 1) as u32, pinned, pow3 }
    }

    fn index(&self, s: SweepState) -> usize {
        let mut idx = 0u32;
        for v in 0..self.n {
            let digit = if s.occupied >> v & 1 == 1 {
                1
            } else if s.processed >> v & 1 == 1 {
                2
            } else {
                0
            };
            idx += digit * self.pow3[v];
        }
        idx as usize
    }

    fn closure(&self, mut s: SweepState) -> SweepState {
        let pinned = self.pinned.map_or(0, |r| 1u32 << r);
        loop {
            let mut changed = false;
            for v in 0..self.n {
                let bit = 1u32 << v;
                if bit & pinned != 0 {
                    continue;
                }
                let nb = self.nbr[v];
                if s.occupied & bit != 0 {
                    if nb & !(s.occupied | s.processed) == 0 {
                        s.occupied &= !bit;
                        s.processed |= bit;
                        changed = true;
                    }
                } else if s.processed & bit == 0 && nb & !s.occupied == 0 {
                    s.processed |= bit;
                    changed = true;
                }
            }
            if !changed {
                return s;
            }
        }
    }

    fn is_goal(&self, s: SweepState) -> bool {
        match self.pinned {
            None => s.processed == self.all,
            Some(r) => s.occupied == 1 << r && s.processed == self.all & !(1 << r),
        }
    }

    /// Can the game be won with at most `budget` simultaneous agents?
    fn winnable(&self, budget: u32) -> bool {
        let start = self.closure(SweepState { occupied: 0, processed: 0 });
        let mut seen = vec![0u64; (self.pow3[self.n] as usize).div_ceil(64)];
        let mut stack = vec![start];
        let mark = |seen: &mut Vec<u64>, i: usize| {
            let fresh = seen[i / 64] >> (i % 64) & 1 == 0;
            seen[i / 64] |= 1 << (i % 64);
            fresh
        };
        mark(&mut seen, self.index(start));
        while let Some(s) = stack.pop() {
            if self.is_goal(s) {
                return true;
            }
            if s.agents() + 1 > budget {
                continue;
            }
            let untouched = self.all & !(s.occupied | s.processed);
            for v in 0..self.n {
                if untouched >> v & 1 == 0 {
                    continue;
                }
                let next = self.closure(SweepState { occupied: s.occupied | 1 << v, processed: s.processed });
                if mark(&mut seen, self.index(next)) {
                    stack.push(next);
                }
            }
        }
        false
    }

    fn least_budget(&self) -> usize {
        (0..=self.n as u32).find(|&p| self.winnable(p)).expect("n agents always suffice") as usize
    }
}

/// Process number of `g`.
pub fn pn_exact(g: &Graph) -> Result<usize> {
    check_size(g, PN_MAX_N, "process number")?;
    if g.is_empty() {
        return Ok(0);
    }
    Ok(ProcessGame::new(g, None).least_budget())
}

/// Least budget of a process strategy whose last agent sits on `root`.
pub fn pn_plus_exact(g: &Graph, root: VertexId) -> Result<usize> {
    check_size(g, PN_PLUS_MAX_N, "pn+")?;
    g.check_vertex(root)?;
    Ok(ProcessGame::new(g, Some(root)).least_budget())
}

/// Stability of `g` rooted at `root`: an optimal strategy can finish on the
/// root, or a strategy with at most two agents can.
pub fn stable_exact(g: &Graph, root: VertexId) -> Result<bool> {
    let plus = pn_plus_exact(g, root)?;
    Ok(plus <= 2 || plus == pn_exact(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{gen_tree, TreeKind};

    fn tree(kind: TreeKind) -> Graph {
        gen_tree(kind).unwrap().into_graph()
    }

    #[test]
    fn textbook_values() {
        assert_eq!(pn_exact(&Graph::new(1)).unwrap(), 0);
        assert_eq!(pn_exact(&tree(TreeKind::Star(5))).unwrap(), 1);
        assert_eq!(pn_exact(&tree(TreeKind::Path(3))).unwrap(), 1);
        assert_eq!(pn_exact(&tree(TreeKind::Path(4))).unwrap(), 2);
        assert_eq!(pn_exact(&tree(TreeKind::Path(9))).unwrap(), 2);
        assert_eq!(pn_exact(&Graph::cycle(5)).unwrap(), 3);
        assert_eq!(pn_exact(&Graph::cycle(7)).unwrap(), 3);
        assert_eq!(pn_exact(&Graph::grid(3, 3)).unwrap(), 4);
        assert_eq!(pn_exact(&Graph::grid(2, 2)).unwrap(), 2);
    }

    #[test]
    fn theorem1_levels() {
        assert_eq!(pn_exact(&tree(TreeKind::Theorem1(1))).unwrap(), 1);
        assert_eq!(pn_exact(&tree(TreeKind::Theorem1(2))).unwrap(), 2);
    }

    #[test]
    fn pn_plus_small_cases() {
        // A lone vertex must still be occupied once to finish on it.
        assert_eq!(pn_plus_exact(&Graph::new(1), 0).unwrap(), 1);
        let p2 = tree(TreeKind::Path(2));
        assert_eq!(pn_plus_exact(&p2, 0).unwrap(), 1);
        // P3 from an end: pn = 1 but finishing on the end needs two agents.
        let p3 = tree(TreeKind::Path(3));
        assert_eq!(pn_exact(&p3).unwrap(), 1);
        assert_eq!(pn_plus_exact(&p3, 0).unwrap(), 2);
        assert_eq!(pn_plus_exact(&p3, 1).unwrap(), 1);
    }

    #[test]
    fn stability_examples() {
        let star = tree(TreeKind::Star(3));
        assert!(stable_exact(&star, 0).unwrap());
        let t1 = tree(TreeKind::Theorem1(1));
        assert!(stable_exact(&t1, 0).unwrap());
        // P5 from its middle: b, a, then d, e, all while keeping c for last.
        let p5 = tree(TreeKind::Path(5));
        assert_eq!(pn_plus_exact(&p5, 2).unwrap(), 2);
        assert!(stable_exact(&p5, 2).unwrap());
    }

    #[test]
    fn pn_plus_bounds_on_small_trees() {
        for n in 1..=8 {
            for t in crate::forest::enumerate_trees(n).unwrap() {
                let g = t.graph();
                let pn = pn_exact(g).unwrap();
                for r in 0..n {
                    let plus = pn_plus_exact(g, r).unwrap();
                    assert!(pn <= plus && plus <= pn + 1, "{g:?} r={r} pn={pn} plus={plus}");
                }
            }
        }
    }

    #[test]
    fn monotone_in_budget() {
        let g = Graph::cycle(6);
        let game = ProcessGame::new(&g, None);
        let p = game.least_budget();
        assert!(!game.winnable(p as u32 - 1));
        for b in p..=g.len() {
            assert!(game.winnable(b as u32));
        }
    }

    #[test]
    fn size_limit() {
        assert!(matches!(pn_exact(&Graph::new(14)), Err(crate::Error::Capacity(_))));
        assert!(matches!(pn_plus_exact(&Graph::new(13), 0), Err(crate::Error::Capacity(_))));
    }
}
