use std::collections::BTreeMap;

use super::{Forest, VertexId};
use crate::error::{Error, Result};

pub const MAX_ENUMERATION_N: usize = 13;

/// One representative per isomorphism class of free trees on `n` vertices,
/// ordered by canonical form.
///
/// Trees on `n` vertices are grown from those on `n - 1` by attaching a leaf
/// at every vertex, then deduplicated by canonical form.
pub fn enumerate_trees(n: usize) -> Result<Vec<Forest>> {
    if !(1..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::Argument(format!("tree enumeration supports 1..={MAX_ENUMERATION_N}, got {n}")));
    }
    let mut level: BTreeMap<String, Forest> = BTreeMap::new();
    let single = Forest::new(1);
    level.insert(canonical_form(&single), single);
    for _ in 2..=n {
        let mut next = BTreeMap::new();
        for tree in level.values() {
            for v in 0..tree.len() {
                let mut grown = tree.clone();
                let leaf = grown.add_vertex();
                grown.add_edge(v, leaf).expect("fresh leaf cannot close a cycle");
                next.entry(canonical_form(&grown)).or_insert(grown);
            }
        }
        level = next;
    }
    Ok(level.into_values().collect())
}

/// Canonical string of a tree (AHU encoding rooted at the center, minimised
/// over the two centers of a bicentral tree). Equal strings iff isomorphic.
pub fn canonical_form(tree: &Forest) -> String {
    assert!(tree.is_connected(), "canonical_form expects a tree");
    centers(tree)
        .into_iter()
        .map(|c| rooted_code(tree, c, usize::MAX))
        .min()
        .unwrap_or_default()
}

pub(crate) fn centers(tree: &Forest) -> Vec<VertexId> {
    let n = tree.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut layer: Vec<VertexId> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in tree.neighbours(leaf) {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

fn rooted_code(tree: &Forest, v: VertexId, parent: VertexId) -> String {
    let mut parts: Vec<String> = tree
        .neighbours(v)
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| rooted_code(tree, w, v))
        .collect();
    parts.sort_unstable();
    let mut s = String::from("(");
    for p in parts {
        s.push_str(&p);
    }
    s.push(')');
    s
}
