use rand::seq::index;

use crate::graph::{DiGraph, Vertex};
use crate::{seeded_rng, Error, Result};

/// Uniform G(n, m) DAG: `m` distinct unordered pairs, each edge pointing from
/// the smaller id to the larger one.
pub fn gen_random_dag(n: usize, m: usize, seed: u64) -> Result<DiGraph> {
    if n > Vertex::MAX as usize {
        return Err(Error::Capacity(format!("{n} vertices exceed the id range")));
    }
    let pairs = (n as u64) * (n.saturating_sub(1) as u64) / 2;
    if m as u64 > pairs {
        return Err(Error::Capacity(format!(
            "{m} edges requested, a DAG on {n} vertices has at most {pairs}"
        )));
    }
    let total = usize::try_from(pairs)
        .map_err(|_| Error::Capacity(format!("{pairs} vertex pairs exceed the address space")))?;
    let mut rng = seeded_rng(seed, 0);
    let edges = index::sample(&mut rng, total, m).into_iter().map(|x| {
        let (lo, hi) = unrank_pair(x as u64);
        (lo as Vertex, hi as Vertex)
    });
    Ok(DiGraph::new(n, edges))
}

/// Inverse of `x = hi * (hi - 1) / 2 + lo` with `lo < hi`.
fn unrank_pair(x: u64) -> (u64, u64) {
    let mut hi = ((1.0 + (1.0 + 8.0 * x as f64).sqrt()) / 2.0) as u64;
    while hi * (hi - 1) / 2 > x {
        hi -= 1;
    }
    while (hi + 1) * hi / 2 <= x {
        hi += 1;
    }
    (x - hi * (hi - 1) / 2, hi)
}
