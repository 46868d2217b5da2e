//! Branch-recursive values for trees too large for the exhaustive oracles.
//!
//! A parameter grows to `k + 1` exactly when some vertex has three branches
//! of value at least `k` (above a parameter-specific base). Branches are
//! recomputed on vertex subsets, memoised by bitset.

#![allow(dead_code)]

use std::collections::HashMap;

use hdsearch::Forest;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Param {
    Pn,
    Vs,
    Es,
}

pub struct BranchOracle<'a> {
    t: &'a Forest,
    param: Param,
    memo: HashMap<(u128, Param), usize>,
}

impl<'a> BranchOracle<'a> {
    pub fn new(t: &'a Forest, param: Param) -> Self {
        assert!(t.len() <= 128);
        BranchOracle { t, param, memo: HashMap::new() }
    }

    pub fn value(&mut self) -> usize {
        let all = if self.t.len() == 128 { u128::MAX } else { (1u128 << self.t.len()) - 1 };
        self.of(all)
    }

    fn members(set: u128) -> impl Iterator<Item = usize> {
        (0..128).filter(move |&v| set >> v & 1 == 1)
    }

    fn reach(&self, set: u128, start: usize) -> u128 {
        let mut seen = 1u128 << start;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in self.t.neighbours(v) {
                if set >> w & 1 == 1 && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        seen
    }

    fn degree_in(&self, set: u128, v: usize) -> usize {
        self.t.neighbours(v).iter().filter(|&&w| set >> w & 1 == 1).count()
    }

    fn base(&self, set: u128) -> usize {
        let n = set.count_ones() as usize;
        let max_deg = Self::members(set).map(|v| self.degree_in(set, v)).max().unwrap_or(0);
        match self.param {
            Param::Pn if n == 1 => 0,
            Param::Pn if max_deg == n - 1 => 1,
            Param::Pn => 2,
            Param::Vs if n == 1 => 0,
            Param::Vs => 1,
            Param::Es if n == 1 => 0,
            Param::Es if max_deg <= 2 => 1,
            Param::Es => 2,
        }
    }

    /// Smallest branch value that lets three branches force one more.
    fn threshold(&self) -> usize {
        match self.param {
            Param::Pn | Param::Es => 2,
            Param::Vs => 1,
        }
    }

    fn of(&mut self, set: u128) -> usize {
        if let Some(&v) = self.memo.get(&(set, self.param)) {
            return v;
        }
        let mut best = self.base(set);
        for v in Self::members(set).collect::<Vec<_>>() {
            if self.degree_in(set, v) < 3 {
                continue;
            }
            let rest = set & !(1u128 << v);
            let mut vals = Vec::new();
            let mut left = rest;
            while left != 0 {
                let start = left.trailing_zeros() as usize;
                let comp = self.reach(rest, start);
                left &= !comp;
                // Edge search counts the edge to v as part of the branch.
                let branch = if self.param == Param::Es { comp | 1 << v } else { comp };
                vals.push(self.of(branch));
            }
            vals.sort_unstable_by(|a, b| b.cmp(a));
            if vals.len() >= 3 && vals[2] >= self.threshold() {
                best = best.max(vals[2] + 1);
            }
        }
        self.memo.insert((set, self.param), best);
        best
    }
}

pub fn branch_value(t: &Forest, param: Param) -> usize {
    BranchOracle::new(t, param).value()
}
