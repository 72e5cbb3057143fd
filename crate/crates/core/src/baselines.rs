//! Exact reference answers: a full transitive-closure bit matrix and plain
//! per-query BFS.

use rayon::prelude::*;

use crate::bitset::words_for;
use crate::error::{Error, Result};
use crate::graph::{Bfs, DiGraph, Direction, Vertex};

/// Default ceiling on matrix storage, 4 GiB.
pub const DEFAULT_MATRIX_CAP: u64 = 4 << 30;

/// Row-major `n x n` reachability bits; bit `(s, t)` is set iff `s ->* t`.
/// The diagonal is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachMatrix {
    n: usize,
    row_words: usize,
    bits: Vec<u64>,
}

impl ReachMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn reaches(&self, s: Vertex, t: Vertex) -> bool {
        let (s, t) = (s as usize, t as usize);
        self.bits[s * self.row_words + t / 64] >> (t % 64) & 1 == 1
    }

    pub fn row(&self, s: Vertex) -> &[u64] {
        let i = s as usize * self.row_words;
        &self.bits[i..i + self.row_words]
    }

    /// Reachable ordered pairs of distinct vertices.
    pub fn positive_pairs(&self) -> u64 {
        let set: u64 = self.bits.iter().map(|w| w.count_ones() as u64).sum();
        set - self.n as u64
    }

    /// Heap bytes held by the bit array.
    pub fn size_bytes(&self) -> u64 {
        self.bits.len() as u64 * 8
    }
}

/// Bytes a matrix for `n` vertices would occupy.
pub fn matrix_bytes(n: usize) -> u64 {
    n as u64 * words_for(n) as u64 * 8
}

/// Closure by one BFS per source, rows filled in parallel. Fails when the
/// matrix would exceed [`DEFAULT_MATRIX_CAP`].
pub fn build_matrix(g: &DiGraph) -> Result<ReachMatrix> {
    build_matrix_capped(g, DEFAULT_MATRIX_CAP)
}

pub fn build_matrix_capped(g: &DiGraph, cap_bytes: u64) -> Result<ReachMatrix> {
    let n = g.n();
    let need = matrix_bytes(n);
    if need > cap_bytes {
        return Err(Error::Capacity(format!(
            "reachability matrix for {n} vertices needs {need} bytes, cap is {cap_bytes}"
        )));
    }
    let row_words = words_for(n);
    let mut bits = vec![0u64; n * row_words];
    if row_words > 0 {
        bits.par_chunks_mut(row_words).enumerate().for_each_init(
            || Bfs::new(n),
            |bfs, (s, row)| {
                bfs.for_each_reachable(g, s as Vertex, Direction::Forward, |t| {
                    row[t as usize / 64] |= 1 << (t % 64);
                });
            },
        );
    }
    Ok(ReachMatrix { n, row_words, bits })
}

/// Single-bit lookup.
pub fn matrix_query(mx: &ReachMatrix, s: Vertex, t: Vertex) -> bool {
    mx.reaches(s, t)
}

/// BFS from `s` with early exit on `t`.
pub fn bfs_query(g: &DiGraph, s: Vertex, t: Vertex) -> bool {
    Bfs::new(g.n()).search(g, s, t).0
}

/// Fraction of ordered pairs of distinct vertices that are reachable.
pub fn reachability_rho(mx: &ReachMatrix) -> Result<f64> {
    let n = mx.n as u64;
    if n < 2 {
        return Err(Error::Undefined(format!(
            "reachability ratio needs n >= 2, got {n}"
        )));
    }
    Ok(mx.positive_pairs() as f64 / (n * (n - 1)) as f64)
}
