use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Forest;
use crate::error::{Error, Result};

/// Tree families produced by [`gen_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    /// Path on `k` vertices.
    Path(usize),
    /// `K_{1,k}`: a center and `k` leaves.
    Star(usize),
    /// Center with three legs of the given lengths.
    Spider(usize, usize, usize),
    /// Level-`k` tower: three copies of level `k-1` joined to a fresh center.
    Theorem1(usize),
    /// Uniform random labelled tree on `n` vertices.
    Random { n: usize, seed: u64 },
}

pub fn gen_tree(kind: TreeKind) -> Result<Forest> {
    match kind {
        TreeKind::Path(k) => {
            if k == 0 {
                return Err(Error::Argument("path needs k >= 1".into()));
            }
            let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
            Forest::from_edges(k, &edges)
        }
        TreeKind::Star(k) => {
            if k == 0 {
                return Err(Error::Argument("star needs k >= 1".into()));
            }
            let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
            Forest::from_edges(k + 1, &edges)
        }
        TreeKind::Spider(a, b, c) => {
            let mut f = Forest::new(1);
            for len in [a, b, c] {
                let mut prev = 0;
                for _ in 0..len {
                    let v = f.add_vertex();
                    f.add_edge(prev, v)?;
                    prev = v;
                }
            }
            Ok(f)
        }
        TreeKind::Theorem1(k) => {
            if k > 12 {
                return Err(Error::Argument(format!("theorem1 level {k} is too large")));
            }
            // Complete ternary tree of depth k: vertex v has children 3v+1..=3v+3.
            let n = (3usize.pow(k as u32 + 1) - 1) / 2;
            let edges: Vec<_> = (1..n).map(|v| ((v - 1) / 3, v)).collect();
            Forest::from_edges(n, &edges)
        }
        TreeKind::Random { n, seed } => {
            if n == 0 {
                return Err(Error::Argument("random tree needs n >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if n <= 2 {
                let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
                return Forest::from_edges(n, &edges);
            }
            let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
            Forest::from_edges(n, &prufer_decode(n, &code))
        }
    }
}

/// Decode a Prüfer sequence of length `n - 2` into the edges of a labelled tree.
pub(crate) fn prufer_decode(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    debug_assert_eq!(code.len() + 2, n);
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(std::cmp::Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("prufer code always has a leaf");
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.push(std::cmp::Reverse(c));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    edges
}
