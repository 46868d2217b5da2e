//! Forests under edge insertions and deletions.
//!
//! Every component keeps a root. A node stores the descriptor last received
//! from each neighbour other than its father, and its own merge of those.
//! Re-rooting walks the father chain up to the old root with notifications
//! and comes back down re-merging; each path node drops the entry of its new
//! father. Messages carry the dynamic-mode flag bit.

use std::collections::BTreeMap;
use std::fmt;

use crate::codec::{change_root_payload, DynFlag};
use crate::error::{Error, Result};
use crate::forest::{Forest, VertexId};
use crate::hd::{evaluate, EvalResult, ParamVariant};
use crate::protocol::{elect_root, CodingScheme, CostCounters, Network, NodeState};

#[derive(Debug)]
pub struct DynamicForest {
    forest: Forest,
    net: Network,
    values: BTreeMap<VertexId, EvalResult>,
    early_stop: bool,
}

impl DynamicForest {
    /// `n` isolated vertices, each its own root.
    pub fn new(n: usize, variant: ParamVariant, scheme: CodingScheme) -> Result<Self> {
        let forest = Forest::new(n);
        let mut df = DynamicForest { net: Network::new(&forest, variant, scheme, true), forest, values: BTreeMap::new(), early_stop: false };
        for v in 0..n {
            df.net.merge_at(v, None)?;
            df.net.states[v].visited = true;
            df.publish(v)?;
        }
        Ok(df)
    }

    /// On insertion, re-root only the first endpoint's tree and propagate
    /// toward the other root, stopping where a descriptor does not change.
    pub fn with_early_stop(mut self, on: bool) -> Self {
        self.early_stop = on;
        self
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn states(&self) -> &[NodeState] {
        &self.net.states
    }

    pub fn counters(&self) -> CostCounters {
        self.net.counters
    }

    pub fn transcript(&self) -> &[String] {
        &self.net.transcript
    }

    /// Value of every component, keyed by its root.
    pub fn values(&self) -> &BTreeMap<VertexId, EvalResult> {
        &self.values
    }

    pub fn root_of(&self, v: VertexId) -> Result<VertexId> {
        self.forest.graph().check_vertex(v)?;
        let mut u = v;
        while let Some(f) = self.net.states[u].father {
            u = f;
        }
        Ok(u)
    }

    pub fn value_of(&self, v: VertexId) -> Result<EvalResult> {
        let r = self.root_of(v)?;
        Ok(self.values[&r])
    }

    fn publish(&mut self, root: VertexId) -> Result<()> {
        let hd = self.net.states[root].merged.as_ref().expect("root has merged");
        self.values.insert(root, self.net.rules().root_value(evaluate(hd)?));
        Ok(())
    }

    /// Make `r2` the root of its component.
    pub fn change_root(&mut self, r2: VertexId) -> Result<()> {
        let r1 = self.root_of(r2)?;
        if r1 == r2 {
            return Ok(());
        }
        let mut path = vec![r2];
        while let Some(f) = self.net.states[*path.last().unwrap()].father {
            path.push(f);
        }
        for w in path.windows(2) {
            self.net.visit(w[0]);
            let (flag, _) = self.net.send(w[0], w[1], &change_root_payload(), DynFlag::ChangeRoot)?;
            debug_assert_eq!(flag, DynFlag::ChangeRoot);
        }
        self.values.remove(&r1);
        for i in (1..path.len()).rev() {
            let (u, next) = (path[i], path[i - 1]);
            self.net.visit(u);
            self.net.states[u].forget(next)?;
            let hd = self.net.merge_at(u, None)?;
            self.net.states[u].father = Some(next);
            self.net.deliver(u, next, &hd)?;
        }
        self.net.visit(r2);
        self.net.states[r2].father = None;
        self.net.merge_at(r2, None)?;
        self.publish(r2)
    }

    /// Join two components by the edge `w1 w2`.
    pub fn add_edge(&mut self, w1: VertexId, w2: VertexId) -> Result<()> {
        self.forest.add_edge(w1, w2)?;
        for (a, b) in [(w1, w2), (w2, w1)] {
            let nb = &mut self.net.states[a].neighbours;
            let at = nb.partition_point(|&x| x < b);
            nb.insert(at, b);
        }
        if self.early_stop {
            return self.attach_toward_root(w1, w2);
        }
        self.change_root(w1)?;
        self.change_root(w2)?;
        let root = elect_root(w1, w2);
        let loser = if root == w1 { w2 } else { w1 };
        self.values.remove(&loser);
        self.values.remove(&root);
        self.net.visit(loser);
        let hd = self.net.states[loser].merged.clone().expect("root has merged");
        self.net.states[loser].father = Some(root);
        self.net.deliver(loser, root, &hd)?;
        self.net.visit(root);
        self.net.merge_at(root, None)?;
        self.publish(root)
    }

    fn attach_toward_root(&mut self, w1: VertexId, w2: VertexId) -> Result<()> {
        self.change_root(w1)?;
        self.values.remove(&w1);
        self.net.visit(w1);
        let hd = self.net.states[w1].merged.clone().expect("root has merged");
        self.net.states[w1].father = Some(w2);
        self.net.deliver(w1, w2, &hd)?;
        let mut u = w2;
        loop {
            self.net.visit(u);
            let old = self.net.states[u].merged.clone();
            let hd = self.net.merge_at(u, None)?;
            match self.net.states[u].father {
                None => return self.publish(u),
                Some(_) if old.as_ref() == Some(&hd) => return Ok(()),
                Some(f) => {
                    self.net.deliver(u, f, &hd)?;
                    u = f;
                }
            }
        }
    }

    /// Remove the edge `w1 w2`; both sides end up rooted at its endpoints.
    pub fn delete_edge(&mut self, w1: VertexId, w2: VertexId) -> Result<()> {
        if !self.forest.has_edge(w1, w2) {
            return Err(Error::Argument(format!("no edge {w1}-{w2}")));
        }
        let (child, parent) = if self.net.states[w1].father == Some(w2) { (w1, w2) } else { (w2, w1) };
        debug_assert_eq!(self.net.states[child].father, Some(parent));
        self.forest.remove_edge(w1, w2)?;
        self.net.states[child].neighbours.retain(|&x| x != parent);
        self.net.states[parent].neighbours.retain(|&x| x != child);

        self.net.states[child].father = None;
        self.publish(child)?;

        self.net.states[parent].forget(child)?;
        let old_root = self.root_of(parent)?;
        if old_root == parent {
            self.net.visit(parent);
            self.net.merge_at(parent, None)?;
            self.publish(parent)
        } else {
            self.change_root(parent)
        }
    }

    /// Structural invariants: one root per component, each node stores
    /// exactly its non-father neighbours, sums are exact, and every stored
    /// merge is current.
    pub fn check_invariants(&self) -> Result<()> {
        let rules = self.net.rules();
        for (v, s) in self.net.states.iter().enumerate() {
            let expect: Vec<VertexId> = s.neighbours.iter().copied().filter(|&w| Some(w) != s.father).collect();
            let have: Vec<VertexId> = s.received.keys().copied().collect();
            if expect != have {
                return Err(Error::Contract(format!("node {v} stores {have:?}, expected {expect:?}")));
            }
            if !s.sum_is_consistent() {
                return Err(Error::Contract(format!("node {v} sum table is stale")));
            }
            let (fresh, _) = s.merge_excluding(None, rules)?;
            if s.merged.as_ref() != Some(&fresh) {
                return Err(Error::Contract(format!("node {v} merged descriptor is stale")));
            }
        }
        let roots: Vec<VertexId> = (0..self.forest.len()).filter(|&v| self.net.states[v].father.is_none()).collect();
        if roots.len() != self.forest.components().len() || roots.iter().ne(self.values.keys()) {
            return Err(Error::Contract("roots do not match components".into()));
        }
        Ok(())
    }
}

/// Insert `edges` one at a time into `n` isolated vertices.
pub fn inc_build(n: usize, edges: &[(VertexId, VertexId)], variant: ParamVariant, scheme: CodingScheme, early_stop: bool) -> Result<DynamicForest> {
    let mut df = DynamicForest::new(n, variant, scheme)?.with_early_stop(early_stop);
    for &(u, v) in edges {
        df.add_edge(u, v)?;
    }
    Ok(df)
}

/// Edges of `t` ordered for the cheap end of IncHD: reverse BFS from
/// `root`, with ids relabelled so every vertex outranks its descendants and
/// stays its component's root. Returns the relabelled edges in order.
pub fn best_case_order(t: &Forest, root: VertexId) -> Vec<(VertexId, VertexId)> {
    let n = t.len();
    let mut order = vec![root];
    let mut parent = vec![usize::MAX; n];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &w in t.neighbours(v) {
            if parent[w] == usize::MAX {
                parent[w] = v;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut label = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        label[v] = n - 1 - i;
    }
    order.iter().skip(1).rev().map(|&v| (label[parent[v]], label[v])).collect()
}

/// The expensive end: two complete ternary trees of about `n/3` vertices
/// joined by a path, path inserted first, then the two trees grown one edge
/// at a time on alternating sides. Each insertion drags the root across
/// the path. Returns `(vertex count, edges in order)`.
pub fn worst_case_order(n: usize) -> (usize, Vec<(VertexId, VertexId)>) {
    let m = (n / 3).max(1);
    let ternary = |offset: usize| -> Vec<(VertexId, VertexId)> { (1..m).map(|c| (offset + (c - 1) / 3, offset + c)).collect() };
    let (a, b) = (ternary(0), ternary(m));
    let inner = n.saturating_sub(2 * m);
    let mut hops = vec![0];
    hops.extend(2 * m..2 * m + inner);
    hops.push(m);
    let mut edges: Vec<_> = hops.windows(2).map(|w| (w[0], w[1])).collect();
    for i in 0..a.len().max(b.len()) {
        edges.extend(a.get(i).copied());
        edges.extend(b.get(i).copied());
    }
    (2 * m + inner, edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Command {
    Add(VertexId, VertexId),
    Del(VertexId, VertexId),
    Query(VertexId),
    Reroot(VertexId),
}

type Script = (Option<usize>, Vec<(usize, Command)>);

fn parse_script(text: &str) -> Result<Script> {
    let mut header = None;
    let mut cmds = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let words: Vec<&str> = body.split_whitespace().collect();
        let id = |s: &str| s.parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("bad vertex id {s:?}") });
        let cmd = match words.as_slice() {
            ["n", k] if first => {
                header = Some(k.parse().map_err(|_| Error::Parse { line, msg: format!("bad vertex count {k:?}") })?);
                first = false;
                continue;
            }
            ["add", u, v] => Command::Add(id(u)?, id(v)?),
            ["del", u, v] => Command::Del(id(u)?, id(v)?),
            ["query", u] => Command::Query(id(u)?),
            ["reroot", u] => Command::Reroot(id(u)?),
            _ => return Err(Error::Parse { line, msg: format!("unrecognised command {body:?}") }),
        };
        first = false;
        cmds.push((line, cmd));
    }
    Ok((header, cmds))
}

/// Answer to one `query` line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryReport {
    pub vertex: VertexId,
    pub root: VertexId,
    pub result: EvalResult,
}

impl fmt::Display for QueryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "query={} root={} value={} stable={}", self.vertex, self.root, self.result.value, self.result.stable)
    }
}

/// Run a script of `add u v`, `del u v`, `query u` and `reroot u` lines,
/// with an optional leading `n <count>`. Each query yields one output line.
pub fn run_script(text: &str, variant: ParamVariant, scheme: CodingScheme, early_stop: bool) -> Result<(Vec<QueryReport>, DynamicForest)> {
    let (header, cmds) = parse_script(text)?;
    let max_id = cmds
        .iter()
        .map(|(_, c)| match *c {
            Command::Add(u, v) | Command::Del(u, v) => u.max(v),
            Command::Query(u) | Command::Reroot(u) => u,
        })
        .max();
    let n = header.unwrap_or(0).max(max_id.map_or(0, |m| m + 1));
    let mut df = DynamicForest::new(n, variant, scheme)?.with_early_stop(early_stop);
    let mut out = Vec::new();
    for (line, cmd) in cmds {
        let at = |e: Error| Error::AtLine { line, source: Box::new(e) };
        match cmd {
            Command::Add(u, v) => df.add_edge(u, v).map_err(at)?,
            Command::Del(u, v) => df.delete_edge(u, v).map_err(at)?,
            Command::Reroot(u) => df.change_root(u).map_err(at)?,
            Command::Query(u) => {
                let root = df.root_of(u).map_err(at)?;
                out.push(QueryReport { vertex: u, root, result: df.values[&root] });
            }
        }
    }
    Ok((out, df))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{gen_tree, TreeKind};
    use crate::protocol::{run_static, Schedule};

    fn pn() -> ParamVariant {
        ParamVariant::ProcessNumber
    }

    #[test]
    fn isolated_vertices() {
        let df = DynamicForest::new(3, pn(), CodingScheme::KnownN).unwrap();
        assert_eq!(df.values().len(), 3);
        assert_eq!(df.value_of(1).unwrap().value, 0);
        assert_eq!(df.counters().messages, 0);
        df.check_invariants().unwrap();
    }

    #[test]
    fn two_p2_make_p4() {
        let mut df = DynamicForest::new(4, pn(), CodingScheme::KnownN).unwrap();
        df.add_edge(0, 1).unwrap();
        df.add_edge(2, 3).unwrap();
        assert_eq!(df.value_of(0).unwrap().value, 1);
        df.add_edge(1, 2).unwrap();
        assert_eq!(df.value_of(3).unwrap().value, 2);
        df.check_invariants().unwrap();
    }

    #[test]
    fn reroot_identity_and_bound() {
        let t = gen_tree(TreeKind::Path(5)).unwrap();
        let mut df = inc_build(5, &t.edges(), pn(), CodingScheme::KnownN, false).unwrap();
        let r = df.root_of(0).unwrap();
        let before = df.counters();
        df.change_root(r).unwrap();
        assert_eq!(df.counters(), before);
        let far = if r == 0 { 4 } else { 0 };
        df.change_root(far).unwrap();
        assert!((df.counters() - before).messages <= 8);
        assert_eq!(df.root_of(2).unwrap(), far);
        assert_eq!(df.value_of(far).unwrap().value, 2);
        df.check_invariants().unwrap();
    }

    #[test]
    fn cycle_rejected_state_unchanged() {
        let mut df = inc_build(3, &[(0, 1), (1, 2)], pn(), CodingScheme::KnownN, false).unwrap();
        let before = df.counters();
        assert!(matches!(df.add_edge(0, 2), Err(Error::Cycle(0, 2))));
        assert_eq!(df.counters(), before);
        df.check_invariants().unwrap();
    }

    #[test]
    fn delete_leaf_edge() {
        let t = gen_tree(TreeKind::Star(3)).unwrap();
        let mut df = inc_build(4, &t.edges(), pn(), CodingScheme::KnownN, false).unwrap();
        df.delete_edge(0, 3).unwrap();
        assert_eq!(df.value_of(3).unwrap().value, 0);
        assert_eq!(df.value_of(0).unwrap().value, 1);
        assert!(df.delete_edge(0, 3).is_err());
        df.check_invariants().unwrap();
    }

    #[test]
    fn best_case_costs_one_message_per_edge() {
        let t = gen_tree(TreeKind::Random { n: 40, seed: 3 }).unwrap();
        let order = best_case_order(&t, 0);
        let df = inc_build(40, &order, pn(), CodingScheme::KnownN, false).unwrap();
        assert_eq!(df.counters().messages, 39);
        let want = run_static(&t, pn(), CodingScheme::KnownN, Schedule::fifo()).unwrap().value.value;
        assert_eq!(df.value_of(0).unwrap().value, want);
    }

    #[test]
    fn worst_case_shape() {
        let (n, edges) = worst_case_order(30);
        assert_eq!(n, 30);
        assert_eq!(edges.len(), 29);
        let f = Forest::from_edges(n, &edges).unwrap();
        assert!(f.is_connected());
        // path 0 - 20..29 - 10 goes in first
        assert_eq!(edges[..2], [(0, 20), (20, 21)]);
        assert_eq!(edges[10], (29, 10));
        assert_eq!(edges[11..13], [(0, 1), (10, 11)]);
    }

    #[test]
    fn script() {
        let text = "n 4\n# a path\nadd 0 1\nadd 1 2\nquery 0\nadd 2 3\nquery 3\nreroot 0\nquery 2\ndel 1 2\nquery 0\n";
        let (out, df) = run_script(text, pn(), CodingScheme::UnknownN, false).unwrap();
        let out: Vec<String> = out.iter().map(|q| q.to_string()).collect();
        assert_eq!(
            out,
            vec![
                "query=0 root=2 value=1 stable=true",
                "query=3 root=3 value=2 stable=true",
                "query=2 root=0 value=2 stable=true",
                "query=0 root=1 value=1 stable=true",
            ]
        );
        df.check_invariants().unwrap();
        assert!(matches!(run_script("add 0\n", pn(), CodingScheme::KnownN, false), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(run_script("add 0 1\nadd 1 0\n", pn(), CodingScheme::KnownN, false), Err(Error::AtLine { line: 2, .. })));
    }

    #[test]
    fn early_stop_matches_full_updates() {
        let t = gen_tree(TreeKind::Random { n: 40, seed: 3 }).unwrap();
        let full = inc_build(40, &t.edges(), pn(), CodingScheme::KnownN, false).unwrap();
        let fast = inc_build(40, &t.edges(), pn(), CodingScheme::KnownN, true).unwrap();
        assert_eq!(full.value_of(0).unwrap(), fast.value_of(0).unwrap());
        assert!(fast.counters().messages <= full.counters().messages);
        fast.check_invariants().unwrap();
    }
}
