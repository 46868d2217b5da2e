//! Hierarchical-decomposition descriptors and the merge step each node runs
//! on the descriptors received from its children.
//!
//! A descriptor is a pair `(vect, table)`. `vect` is the `(pn, pn⁺)` vector of
//! the stable associated-tree containing the node, or `(-1, -1)` when that
//! tree is unstable. `table[i]` (1-based) counts the unstable
//! associated-trees of process number `i`.

pub mod rules;

use std::fmt;

use crate::error::{Error, Result};
use crate::forest::{Forest, VertexId};

pub use rules::{EdgeSearchRules, MergeRules, NodeSearchRules, ProcessNumberRules};

/// `(pn, pn⁺)` of an associated-tree; `(-1, -1)` when there is none.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vect {
    pub pn: i32,
    pub pn_plus: i32,
}

impl Vect {
    pub const NONE: Vect = Vect { pn: -1, pn_plus: -1 };

    pub const fn new(pn: i32, pn_plus: i32) -> Self {
        Vect { pn, pn_plus }
    }

    pub const fn stable(pn: i32) -> Self {
        Vect { pn, pn_plus: pn }
    }

    pub fn is_none(&self) -> bool {
        *self == Vect::NONE
    }

    pub fn is_valid(&self) -> bool {
        self.is_none() || (self.pn >= 0 && self.pn <= self.pn_plus && self.pn_plus <= self.pn + 1)
    }
}

impl fmt::Display for Vect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pn, self.pn_plus)
    }
}

/// Counts of unstable associated-trees indexed by process number, 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HdTable {
    cells: Vec<u32>,
}

impl HdTable {
    pub fn new() -> Self {
        HdTable { cells: Vec::new() }
    }

    pub fn zeros(len: usize) -> Self {
        HdTable { cells: vec![0; len] }
    }

    pub fn from_cells(cells: Vec<u32>) -> Self {
        HdTable { cells }
    }

    /// `L(t)`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell `i` (1-based); cells past the end read as 0.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            0
        } else {
            self.cells.get(i - 1).copied().unwrap_or(0)
        }
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut Vec<u32> {
        &mut self.cells
    }

    pub fn add_assign(&mut self, other: &HdTable) {
        if other.len() > self.len() {
            self.cells.resize(other.len(), 0);
        }
        for (a, &b) in self.cells.iter_mut().zip(&other.cells) {
            *a += b;
        }
    }

    /// Cell-wise subtraction; fails if `other` is not contained in `self`.
    pub fn sub_assign(&mut self, other: &HdTable) -> Result<()> {
        for (i, &b) in other.cells.iter().enumerate().filter(|(_, &b)| b > 0) {
            let a = self.cells.get_mut(i).filter(|a| **a >= b).ok_or_else(|| {
                Error::Contract(format!("table underflow at cell {}", i + 1))
            })?;
            *a -= b;
        }
        while self.cells.last() == Some(&0) {
            self.cells.pop();
        }
        Ok(())
    }

    /// Equal up to trailing zero cells.
    pub fn same_counts(&self, other: &HdTable) -> bool {
        let n = self.len().max(other.len());
        (1..=n).all(|i| self.get(i) == other.get(i))
    }

    fn last_nonzero(&self) -> usize {
        self.cells.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1)
    }
}

impl fmt::Display for HdTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Which search parameter a run computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamVariant {
    ProcessNumber,
    NodeSearch,
    EdgeSearch,
}

impl ParamVariant {
    pub const ALL: [ParamVariant; 3] = [ParamVariant::ProcessNumber, ParamVariant::NodeSearch, ParamVariant::EdgeSearch];

    pub fn rules(self) -> &'static dyn MergeRules {
        match self {
            ParamVariant::ProcessNumber => &ProcessNumberRules,
            ParamVariant::NodeSearch => &NodeSearchRules,
            ParamVariant::EdgeSearch => &EdgeSearchRules,
        }
    }

    pub fn short_name(self) -> &'static str {
        self.rules().name()
    }
}

impl fmt::Display for ParamVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Value of a rooted tree read off its descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EvalResult {
    pub value: usize,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HDescriptor {
    pub vect: Vect,
    pub table: HdTable,
}

impl HDescriptor {
    pub fn new(vect: Vect, table: HdTable) -> Self {
        HDescriptor { vect, table }
    }

    pub fn from_parts(pn: i32, pn_plus: i32, cells: &[u32]) -> Self {
        HDescriptor { vect: Vect::new(pn, pn_plus), table: HdTable::from_cells(cells.to_vec()) }
    }

    /// `((0,0),[ ])`, the descriptor every leaf sends for the process number.
    pub fn leaf() -> Self {
        HDescriptor { vect: Vect::stable(0), table: HdTable::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.vect.is_valid() {
            return Err(Error::Contract(format!("invalid vector {}", self.vect)));
        }
        if self.table.get(1) != 0 {
            return Err(Error::Contract(format!("first cell must be 0 in {self}")));
        }
        if self.vect.pn >= 1 {
            let pn = self.vect.pn as usize;
            if let Some(i) = (1..=pn).find(|&i| self.table.get(i) != 0) {
                return Err(Error::Contract(format!("cell {i} must be 0 below pn={pn} in {self}")));
            }
        }
        Ok(())
    }

    /// Cells beyond index 1 are all 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.table.cells().iter().all(|&c| c <= 1)
    }

    /// Drop trailing zero cells above `max(pn, 0)`.
    pub fn normalized(mut self) -> Self {
        let keep = self.table.last_nonzero().max(self.vect.pn.max(0) as usize);
        self.table.cells_mut().truncate(keep);
        self.table.cells_mut().resize(keep, 0);
        self
    }
}

impl fmt::Display for HDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.vect, self.table)
    }
}

/// Scan cells `1..=upto` in increasing order, folding each unstable tree
/// into the running value. A tree of value above the running value becomes
/// the new (unstable) top; a tree equal to it forces one more agent and the
/// result is stable; smaller trees are absorbed.
fn scan(vect: Vect, table: &HdTable, upto: usize) -> EvalResult {
    let mut value = vect.pn.max(0) as usize;
    let mut stable = true;
    for i in 1..=upto {
        for _ in 0..table.get(i) {
            if i > value {
                value = i;
                stable = false;
            } else if i == value {
                value = i + 1;
                stable = true;
            }
        }
    }
    EvalResult { value, stable }
}

/// Value and stability of the tree described by `hd`.
///
/// On a minimal descriptor the value is `L(t)` and the tree is unstable
/// exactly when the last cell holds an unstable tree; an all-zero table is
/// the stable `(L, L)` case. On non-minimal tables (counts above 1) the
/// same scan yields `L(t) + 1` once two trees of equal value collide.
pub fn evaluate(hd: &HDescriptor) -> Result<EvalResult> {
    hd.validate()?;
    Ok(scan(hd.vect, &hd.table, hd.table.len()))
}

/// Largest `i` whose `i`-restricted decomposition has value `i + 1`.
fn collapsible_prefix(hd: &HDescriptor) -> Option<usize> {
    (1..=hd.table.len()).rev().find(|&i| scan(hd.vect, &hd.table, i) == EvalResult { value: i + 1, stable: true })
}

fn collapse_at(hd: &mut HDescriptor, level: usize) {
    let cells = hd.table.cells_mut();
    if cells.len() < level {
        cells.resize(level, 0);
    }
    for c in cells.iter_mut().take(level) {
        *c = 0;
    }
    hd.vect = Vect::stable(level as i32);
}

/// Replace the longest prefix that collapses into a stable tree by that
/// tree. The result is minimal; applying it again changes nothing.
pub fn simplify(hd: &HDescriptor) -> Result<HDescriptor> {
    hd.validate()?;
    Ok(collapse_prefix(hd))
}

/// Also accepts the intermediate tables of a merge, where a stable vector
/// may still sit above nonzero cells.
fn collapse_prefix(hd: &HDescriptor) -> HDescriptor {
    let mut out = hd.clone();
    if let Some(i) = collapsible_prefix(hd) {
        collapse_at(&mut out, i + 1);
    }
    out.normalized()
}

/// Diagnostics from one merge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MergeTrace {
    /// The `k, k1, k2` simplification fired.
    pub table_rule_fired: bool,
    /// The `k, k1, k2` rule produced a collapse that the restricted value
    /// does not support, and was skipped.
    pub table_rule_rejected: bool,
    /// The prefix simplification changed the result after the table rule.
    pub prefix_rule_changed: bool,
    /// Table cells read or written.
    pub cell_touches: usize,
}

pub fn merge(children: &[HDescriptor], rules: &dyn MergeRules) -> Result<HDescriptor> {
    merge_traced(children, rules).map(|(hd, _)| hd)
}

/// Minimal descriptor of the subtree rooted at the merging node, given the
/// minimal descriptors of its children.
pub fn merge_traced(children: &[HDescriptor], rules: &dyn MergeRules) -> Result<(HDescriptor, MergeTrace)> {
    for c in children {
        c.validate()?;
    }
    let seen = children.iter().map(|c| rules.across_edge(c.clone())).collect::<Result<Vec<_>>>()?;
    let mut table = HdTable::new();
    for c in &seen {
        table.add_assign(&c.table);
    }
    let vects: Vec<Vect> = seen.iter().map(|c| c.vect).collect();
    let (hd, mut trace) = merge_summed(&vects, table, rules)?;
    trace.cell_touches += children.iter().map(|c| c.table.len()).sum::<usize>();
    Ok((hd, trace))
}

/// Merge given the children's vectors and the cell-wise sum of their
/// tables, as kept incrementally by a node.
pub fn merge_summed(vects: &[Vect], mut table: HdTable, rules: &dyn MergeRules) -> Result<(HDescriptor, MergeTrace)> {
    let mut trace = MergeTrace::default();
    let received: Vec<Vect> = vects.iter().map(|&v| rules.interpret(v)).collect();

    let vect = rules.initial_case(&received).unwrap_or_else(|| general_case(&received));
    let anchor = vect.pn;
    if (anchor.max(0) as usize) > table.len() {
        table.cells_mut().resize(anchor as usize, 0);
    }
    let mut hd = HDescriptor { vect, table };

    if vect.pn < vect.pn_plus && vect.pn > 1 {
        let p = vect.pn as usize;
        let cells = hd.table.cells_mut();
        cells[p - 1] += 1;
        for c in cells.iter_mut().take(p - 1).skip(1) {
            *c = 0;
        }
        hd.vect = Vect::NONE;
        trace.cell_touches += p;
    }

    if let Some(level) = table_rule(&hd.table, anchor) {
        let supported = level >= 1 && scan(hd.vect, &hd.table, level - 1) == EvalResult { value: level, stable: true };
        if supported {
            collapse_at(&mut hd, level);
            trace.table_rule_fired = true;
        } else {
            trace.table_rule_rejected = true;
        }
    }
    trace.cell_touches += hd.table.len();

    let before = hd.clone().normalized();
    let out = collapse_prefix(&hd);
    out.validate()?;
    trace.prefix_rule_changed = out != before;

    if !out.is_binary() {
        return Err(Error::Contract(format!("merge produced non-minimal table {out}")));
    }
    Ok((out, trace))
}

/// `(p, p+1)` for two maximal children, `(p+1, p+1)` for three or more,
/// `(p, p)` for one, where `p` is the largest received `pn`.
fn general_case(received: &[Vect]) -> Vect {
    let p = received.iter().map(|v| v.pn).max().expect("general case has children");
    let count = received.iter().filter(|v| v.pn == p).count();
    match count {
        1 => Vect::stable(p),
        2 => Vect::new(p, p + 1),
        _ => Vect::stable(p + 1),
    }
}

/// The `k / k1 / k2` table simplification. Returns the collapse level
/// `max(k1, k2)` when all three indices exist.
///
/// `k` is the last cell holding more than one tree; `k1` the first empty
/// cell after the run of ones that follows `k`; `k2` is `anchor` if that cell
/// is empty, else the first empty cell after the positive run starting at
/// `anchor` (a virtual empty cell sits at `L + 1`). `anchor` is the vector's
/// `pn` before any fold.
fn table_rule(table: &HdTable, anchor: i32) -> Option<usize> {
    let len = table.len();
    let k = (1..=len).rev().find(|&i| table.get(i) > 1)?;
    let k1 = (k + 1..=len).find(|&i| table.get(i) == 0)?;
    let k2 = if anchor <= 0 {
        0
    } else {
        let a = anchor as usize;
        if table.get(a) == 0 {
            a
        } else {
            (a + 1..=len + 1).find(|&i| table.get(i) == 0).expect("virtual cell past the end")
        }
    };
    Some(k1.max(k2))
}

/// Descriptor of the component of `root`, rooted there, computed by merging
/// bottom-up in a single pass.
pub fn rooted_descriptor(f: &Forest, root: VertexId, rules: &dyn MergeRules) -> Result<HDescriptor> {
    f.graph().check_vertex(root)?;
    let mut order = vec![root];
    let mut parent = vec![usize::MAX; f.len()];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &w in f.neighbours(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                order.push(w);
            }
        }
        i += 1;
    }
    let capacity = rules.table_capacity(order.len());
    let mut done: Vec<Option<HDescriptor>> = vec![None; f.len()];
    for &v in order.iter().rev() {
        let children: Vec<HDescriptor> = f
            .neighbours(v)
            .iter()
            .filter(|&&w| parent[w] == v && w != root)
            .map(|&w| done[w].take().expect("children merge first"))
            .collect();
        let hd = merge(&children, rules)?;
        check_capacity(&hd, capacity)?;
        done[v] = Some(hd);
    }
    Ok(done[root].take().expect("root merged"))
}

/// Reject a descriptor whose table outgrows the bound for its tree size.
pub fn check_capacity(hd: &HDescriptor, capacity: usize) -> Result<()> {
    if hd.table.len() > capacity {
        return Err(Error::Capacity(format!("table length {} exceeds bound {capacity} in {hd}", hd.table.len())));
    }
    Ok(())
}

/// Value of the tree containing `root`, read off its rooted descriptor.
pub fn tree_value(f: &Forest, root: VertexId, variant: ParamVariant) -> Result<EvalResult> {
    let rules = variant.rules();
    Ok(rules.root_value(evaluate(&rooted_descriptor(f, root, rules)?)?))
}
