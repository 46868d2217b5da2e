//! Explicit process strategies: a rule checker and an extractor.
//!
//! Extraction sweeps a spine. For a tree of process number `p >= 1` there
//! is a path whose removal leaves only components of process number below
//! `p`: follow branches of value `p` until an edge is heavy in both
//! directions, then extend through the (at most one) further heavy branch
//! at each end. The sweep keeps one agent on the current spine vertex while
//! each hanging component is processed recursively, then steps along.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forest::{Forest, Graph, VertexId};
use crate::hd::{evaluate, merge, merge_summed, HDescriptor, HdTable, MergeRules, ParamVariant};
use crate::protocol::StaticRun;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ActionKind {
    Place,
    Remove,
    ProcessSurrounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Action {
    pub kind: ActionKind,
    pub vertex: VertexId,
}

impl Action {
    pub fn place(vertex: VertexId) -> Self {
        Action { kind: ActionKind::Place, vertex }
    }

    pub fn remove(vertex: VertexId) -> Self {
        Action { kind: ActionKind::Remove, vertex }
    }

    pub fn surrounded(vertex: VertexId) -> Self {
        Action { kind: ActionKind::ProcessSurrounded, vertex }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            ActionKind::Place => "P",
            ActionKind::Remove => "R",
            ActionKind::ProcessSurrounded => "S",
        };
        write!(f, "{k} {}", self.vertex)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    pub actions: Vec<Action>,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.actions {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut actions = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Parse { line: i + 1, msg: format!("expected \"P|R|S <vertex>\", got {line:?}") };
            let (k, v) = line.split_once(' ').ok_or_else(bad)?;
            let vertex = v.trim().parse().map_err(|_| bad())?;
            let kind = match k {
                "P" => ActionKind::Place,
                "R" => ActionKind::Remove,
                "S" => ActionKind::ProcessSurrounded,
                _ => return Err(bad()),
            };
            actions.push(Action { kind, vertex });
        }
        Ok(Strategy { actions })
    }
}

/// Play `s` on `g` under the three rules; return the largest number of
/// agents present at once.
pub fn validate(g: &Graph, s: &Strategy) -> Result<usize> {
    let n = g.len();
    let mut occupied = vec![false; n];
    let mut processed = vec![false; n];
    let mut agents = 0usize;
    let mut peak = 0usize;
    for (step, a) in s.actions.iter().enumerate() {
        let illegal = |msg: String| Error::IllegalAction { step, msg };
        let v = a.vertex;
        if v >= n {
            return Err(illegal(format!("{a}: no such vertex")));
        }
        match a.kind {
            ActionKind::Place => {
                if occupied[v] || processed[v] {
                    return Err(illegal(format!("{a}: vertex already occupied or processed")));
                }
                occupied[v] = true;
                agents += 1;
                peak = peak.max(agents);
            }
            ActionKind::Remove => {
                if !occupied[v] {
                    return Err(illegal(format!("{a}: no agent there")));
                }
                if let Some(&w) = g.neighbours(v).iter().find(|&&w| !occupied[w] && !processed[w]) {
                    return Err(illegal(format!("{a}: neighbour {w} is neither occupied nor processed")));
                }
                occupied[v] = false;
                processed[v] = true;
                agents -= 1;
            }
            ActionKind::ProcessSurrounded => {
                if occupied[v] || processed[v] {
                    return Err(illegal(format!("{a}: vertex occupied or already processed")));
                }
                if let Some(&w) = g.neighbours(v).iter().find(|&&w| !occupied[w]) {
                    return Err(illegal(format!("{a}: neighbour {w} is not occupied")));
                }
                processed[v] = true;
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| !processed[v]) {
        return Err(Error::IllegalAction { step: s.actions.len(), msg: format!("vertex {v} is not processed at the end") });
    }
    Ok(peak)
}

/// Build a strategy using exactly the process number computed by `run`.
pub fn extract(tree: &Forest, run: &StaticRun) -> Result<Strategy> {
    if run.variant != ParamVariant::ProcessNumber {
        return Err(Error::Argument(format!("strategies are extracted from process-number runs, not {}", run.variant)));
    }
    if run.states.len() != tree.len() {
        return Err(Error::Contract(format!("{} node states for {} vertices", run.states.len(), tree.len())));
    }
    let mut ex = Extractor { f: tree, rules: run.variant.rules(), alive: vec![true; tree.len()], out: Vec::new() };
    let view = ex.directed(run.root)?;
    for (v, s) in run.states.iter().enumerate() {
        for (w, stored) in &s.received {
            if s.father == Some(*w) || view.down.get(w) != Some(stored) {
                return Err(Error::Contract(format!("stored entry of {w} at {v} does not match the tree")));
            }
        }
    }
    if view.value(run.root) != run.value.value {
        return Err(Error::Contract("root value does not match the tree".into()));
    }
    ex.sweep(run.root, view)?;
    Ok(Strategy { actions: ex.out })
}

/// Descriptors of every directed branch within one component.
struct View {
    root: VertexId,
    parent: HashMap<VertexId, VertexId>,
    /// Subtree hanging below each vertex.
    down: HashMap<VertexId, HDescriptor>,
    /// Rest of the component seen from each vertex's parent.
    up: HashMap<VertexId, HDescriptor>,
}

impl View {
    fn value(&self, v: VertexId) -> usize {
        evaluate(&self.down[&v]).expect("merge output is valid").value
    }

    /// Process number of the component of `T - from` that contains `to`.
    fn branch(&self, from: VertexId, to: VertexId) -> usize {
        let hd = if self.parent.get(&to) == Some(&from) { &self.down[&to] } else { &self.up[&from] };
        evaluate(hd).expect("merge output is valid").value
    }
}

struct Extractor<'a> {
    f: &'a Forest,
    rules: &'static dyn MergeRules,
    alive: Vec<bool>,
    out: Vec<Action>,
}

impl Extractor<'_> {
    fn live_neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.f.neighbours(v).iter().copied().filter(|&w| self.alive[w])
    }

    fn directed(&self, root: VertexId) -> Result<View> {
        let mut order = vec![root];
        let mut parent = HashMap::new();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for w in self.live_neighbours(v).collect::<Vec<_>>() {
                if Some(&w) != parent.get(&v) {
                    parent.insert(w, v);
                    order.push(w);
                }
            }
            i += 1;
        }
        let par = &parent;
        let children = |v: VertexId| self.live_neighbours(v).filter(move |w| par.get(w) == Some(&v) && *w != root);
        let mut down: HashMap<VertexId, HDescriptor> = HashMap::new();
        for &v in order.iter().rev() {
            let kids: Vec<HDescriptor> = children(v).map(|w| down[&w].clone()).collect();
            down.insert(v, merge(&kids, self.rules)?);
        }
        let mut up: HashMap<VertexId, HDescriptor> = HashMap::new();
        for &p in &order {
            let mut entries: Vec<(VertexId, &HDescriptor)> = children(p).map(|w| (w, &down[&w])).collect();
            let above = up.get(&p).cloned();
            if let Some(h) = &above {
                entries.push((usize::MAX, h));
            }
            let mut total = HdTable::new();
            for (_, h) in &entries {
                total.add_assign(&h.table);
            }
            let mut fresh = Vec::new();
            for &(w, h) in entries.iter().filter(|(w, _)| *w != usize::MAX) {
                let vects: Vec<_> = entries.iter().filter(|(x, _)| *x != w).map(|(_, e)| e.vect).collect();
                let mut table = total.clone();
                table.sub_assign(&h.table)?;
                fresh.push((w, merge_summed(&vects, table, self.rules)?.0));
            }
            up.extend(fresh);
        }
        Ok(View { root, parent, down, up })
    }

    /// Spine of the component of `view`, as a path of vertices.
    fn spine(&self, view: &View) -> Vec<VertexId> {
        let p = view.value(view.root);
        let heavy = |v: VertexId| -> Vec<VertexId> { self.live_neighbours(v).filter(|&w| view.branch(v, w) >= p).collect() };
        let mut a = view.root;
        let mut prev = None;
        let b = loop {
            let h = heavy(a);
            match h.iter().copied().find(|&w| Some(w) != prev) {
                None if h.is_empty() => return vec![a],
                None => break prev.expect("arrived along a heavy branch"),
                Some(next) if heavy(next).contains(&a) => break next,
                Some(next) => {
                    prev = Some(a);
                    a = next;
                }
            }
        };
        let extend = |from: VertexId, back: VertexId| -> Vec<VertexId> {
            let mut path = Vec::new();
            let (mut cur, mut behind) = (from, back);
            while let Some(next) = heavy(cur).into_iter().find(|&w| w != behind) {
                path.push(next);
                behind = cur;
                cur = next;
            }
            path
        };
        let mut path: Vec<VertexId> = extend(a, b).into_iter().rev().collect();
        path.push(a);
        path.push(b);
        path.extend(extend(b, a));
        path
    }

    fn sweep(&mut self, start: VertexId, view: View) -> Result<()> {
        if self.live_neighbours(start).next().is_none() {
            self.alive[start] = false;
            self.out.push(Action::surrounded(start));
            return Ok(());
        }
        let spine = self.spine(&view);
        drop(view);
        for &x in &spine {
            self.alive[x] = false;
        }
        let mut prev = None;
        for &x in &spine {
            self.out.push(Action::place(x));
            if let Some(p) = prev {
                self.out.push(Action::remove(p));
            }
            for c in self.f.neighbours(x).to_vec() {
                if self.alive[c] {
                    let sub = self.directed(c)?;
                    self.sweep(c, sub)?;
                }
            }
            prev = Some(x);
        }
        self.out.push(Action::remove(prev.expect("spine is not empty")));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{gen_tree, TreeKind};
    use crate::protocol::{run_static, CodingScheme, Schedule};

    fn extracted(kind: TreeKind) -> (Forest, Strategy, usize) {
        let t = gen_tree(kind).unwrap();
        let run = run_static(&t, ParamVariant::ProcessNumber, CodingScheme::KnownN, Schedule::fifo()).unwrap();
        let s = extract(&t, &run).unwrap();
        (t, s, run.value.value)
    }

    #[test]
    fn star_by_hand() {
        let g = gen_tree(TreeKind::Star(3)).unwrap().into_graph();
        let s: Strategy = "P 0\nS 1\nS 2\nS 3\nR 0\n".parse().unwrap();
        assert_eq!(validate(&g, &s).unwrap(), 1);
    }

    #[test]
    fn illegal_actions_name_the_step() {
        let g = gen_tree(TreeKind::Path(3)).unwrap().into_graph();
        let s: Strategy = "P 0\nR 0\n".parse().unwrap();
        assert!(matches!(validate(&g, &s), Err(Error::IllegalAction { step: 1, .. })));
        let s: Strategy = "S 1\n".parse().unwrap();
        assert!(matches!(validate(&g, &s), Err(Error::IllegalAction { step: 0, .. })));
        let s: Strategy = "P 1\nP 1\n".parse().unwrap();
        assert!(matches!(validate(&g, &s), Err(Error::IllegalAction { step: 1, .. })));
        assert!(matches!(validate(&Graph::new(1), &Strategy::default()), Err(Error::IllegalAction { step: 0, .. })));
        assert_eq!(validate(&Graph::new(1), &"P 0\nR 0".parse().unwrap()).unwrap(), 1);
    }

    #[test]
    fn extracted_strategies_are_optimal() {
        for kind in [TreeKind::Path(1), TreeKind::Path(2), TreeKind::Path(4), TreeKind::Star(5), TreeKind::Theorem1(2), TreeKind::Theorem1(4)] {
            let (t, s, pn) = extracted(kind);
            assert_eq!(validate(t.graph(), &s).unwrap(), pn, "{kind:?}\n{s}");
            assert!(s.actions.len() <= 3 * t.len());
        }
        let (_, s, _) = extracted(TreeKind::Path(4));
        assert_eq!(validate(gen_tree(TreeKind::Path(4)).unwrap().graph(), &s).unwrap(), 2);
    }

    #[test]
    fn text_roundtrip() {
        let (_, s, _) = extracted(TreeKind::Theorem1(2));
        assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        assert!("X 1".parse::<Strategy>().is_err());
    }

    #[test]
    fn rejects_other_variants() {
        let t = gen_tree(TreeKind::Path(3)).unwrap();
        let run = run_static(&t, ParamVariant::NodeSearch, CodingScheme::KnownN, Schedule::fifo()).unwrap();
        assert!(matches!(extract(&t, &run), Err(Error::Argument(_))));
    }
}
