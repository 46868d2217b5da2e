use super::{check_size, neighbour_masks};
use crate::error::Result;
use crate::forest::Graph;

pub const PW_MAX_N: usize = 16;

/// Vertex separation (= pathwidth) by dynamic programming over the set of
/// vertices already laid out.
pub fn pathwidth_exact(g: &Graph) -> Result<usize> {
    check_size(g, PW_MAX_N, "pathwidth")?;
    let n = g.len();
    if n == 0 {
        return Ok(0);
    }
    let nbr = neighbour_masks(g);
    let full = (1usize << n) - 1;
    // best[s]: least max boundary over layouts whose prefix set is exactly s.
    let mut best = vec![u8::MAX; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let boundary = (0..n).filter(|&v| s >> v & 1 == 1 && (nbr[v] as usize) & !s != 0).count() as u8;
        let mut inner = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            inner = inner.min(best[s & !(1 << v)]);
        }
        best[s] = inner.max(boundary);
    }
    Ok(best[full] as usize)
}
