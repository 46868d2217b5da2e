//! Graph and forest data model shared by every other module.
//!
//! Vertices are dense `0..n` indices. A [`Graph`] may contain cycles (used to
//! feed the brute-force oracles); a [`Forest`] rejects any edge that would
//! close a cycle.

mod enumerate;
mod gen;
mod text;

use std::collections::VecDeque;

pub use enumerate::{canonical_form, enumerate_trees, MAX_ENUMERATION_N};
pub use gen::{gen_tree, TreeKind};
pub use text::{parse_edge_list, to_edge_list};

use crate::error::{Error, Result};

pub type VertexId = usize;

/// Simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.adj.len()
    }

    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.len() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, ns) in self.adj.iter().enumerate() {
            out.extend(ns.iter().filter(|&&v| u < v).map(|&v| (u, v)));
        }
        out
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::Structural(format!("self-loop on {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(Error::Structural(format!("duplicate edge {u}-{v}"))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                Ok(())
            }
        }
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        if !self.has_edge(u, v) {
            return Err(Error::Argument(format!("no edge {u}-{v}")));
        }
        let pos = self.adj[u].binary_search(&v).unwrap();
        self.adj[u].remove(pos);
        let pos = self.adj[v].binary_search(&u).unwrap();
        self.adj[v].remove(pos);
        Ok(())
    }

    pub(crate) fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::Argument(format!("vertex {v} out of range 0..{}", self.len())))
        }
    }

    /// Vertices reachable from `start`, in BFS order.
    pub fn component(&self, start: VertexId) -> Vec<VertexId> {
        let mut seen = vec![false; self.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            let mut comp = self.component(s);
            for &v in &comp {
                seen[v] = true;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.component(0).len() == self.len()
    }

    /// Subgraph induced by `keep`, relabelled to `0..keep.len()` in the order
    /// given. Returns the subgraph and the old id of each new vertex.
    pub fn induced(&self, keep: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let mut index = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).expect("induced subgraph of a simple graph");
                }
            }
        }
        (g, keep.to_vec())
    }

    /// Relabel vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[VertexId]) -> Graph {
        let mut g = Graph::new(self.len());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]).expect("permutation preserves simplicity");
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n).expect("cycle of length >= 3");
        }
        g
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        let mut g = Graph::new(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    g.add_edge(v, v + 1).unwrap();
                }
                if r + 1 < rows {
                    g.add_edge(v, v + cols).unwrap();
                }
            }
        }
        g
    }
}

/// An acyclic [`Graph`]. Every component is a tree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Forest {
    graph: Graph,
}

impl Forest {
    pub fn new(n: usize) -> Self {
        Forest { graph: Graph::new(n) }
    }

    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut f = Forest::new(n);
        for &(u, v) in edges {
            f.add_edge(u, v)?;
        }
        Ok(f)
    }

    /// Wrap a graph, failing if it contains a cycle.
    pub fn from_graph(graph: Graph) -> Result<Self> {
        let mut f = Forest::new(graph.len());
        for (u, v) in graph.edges() {
            f.add_edge(u, v)?;
        }
        Ok(f)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn neighbours(&self, v: VertexId) -> &[VertexId] {
        self.graph.neighbours(v)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.graph.degree(v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.graph.has_edge(u, v)
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.graph.edges()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected()
    }

    pub fn component(&self, v: VertexId) -> Vec<VertexId> {
        self.graph.component(v)
    }

    pub fn components(&self) -> Vec<Vec<VertexId>> {
        self.graph.components()
    }

    pub fn same_component(&self, u: VertexId, v: VertexId) -> bool {
        u == v || self.graph.component(u).contains(&v)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.graph.add_vertex()
    }

    /// Insert an edge, rejecting duplicates and cycle-closing edges.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        self.graph.check_vertex(u)?;
        self.graph.check_vertex(v)?;
        if self.graph.has_edge(u, v) {
            return Err(Error::Structural(format!("duplicate edge {u}-{v}")));
        }
        if u != v && self.same_component(u, v) {
            return Err(Error::Cycle(u, v));
        }
        self.graph.add_edge(u, v)
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        self.graph.remove_edge(u, v)
    }

    /// Sub-forest induced by `keep`, relabelled in the given order.
    pub fn induced(&self, keep: &[VertexId]) -> (Forest, Vec<VertexId>) {
        let (g, ids) = self.graph.induced(keep);
        (Forest { graph: g }, ids)
    }

    pub fn permuted(&self, perm: &[VertexId]) -> Forest {
        Forest { graph: self.graph.permuted(perm) }
    }

    pub fn leaves(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.graph.vertices().filter(|&v| self.degree(v) == 1)
    }

    /// Unique path from `from` to `to`, both ends included.
    pub fn path(&self, from: VertexId, to: VertexId) -> Option<Vec<VertexId>> {
        let n = self.len();
        let mut prev = vec![usize::MAX; n];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for &w in self.neighbours(u) {
                if prev[w] == usize::MAX {
                    prev[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if prev[to] == usize::MAX {
            return None;
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

impl From<Forest> for Graph {
    fn from(f: Forest) -> Graph {
        f.graph
    }
}

impl AsRef<Graph> for Forest {
    fn as_ref(&self) -> &Graph {
        &self.graph
    }
}
