//! Reachability queries on directed acyclic graphs.
//!
//! The index built by [`index::build_index`] answers most queries in constant
//! time from a handful of per-vertex integers: weak components, forward and
//! backward topological levels, a few randomized extended topological orderings
//! and reachability bitmasks for a small set of supportive vertices. Queries that
//! no observation can decide go to an exact fallback, by default a bidirectional
//! BFS that prunes with the same observations.
//!
//! Graphs with cycles are handled by condensing them first
//! ([`graph::scc_condense`], [`index::CondensedIndex`]).

pub mod baselines;
pub mod bitset;
mod error;
pub mod graph;
pub mod index;
pub mod observation;
pub mod supportive;
pub mod toporder;
pub mod workbench;

pub use error::{Error, Result};
pub use graph::{DiGraph, Direction, Vertex};
pub use index::{build_index, Params, ReachIndex};
pub use observation::{Answer, Observation};

/// Deterministic generator used for every randomized step.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Creates the generator for stream `stream` of a master seed.
///
/// Distinct streams are statistically independent, so orderings and support
/// selection can be built in any order (or in parallel) and still reproduce.
pub fn seeded_rng(seed: u64, stream: u64) -> Rng {
    use rand::SeedableRng;
    let mut rng = Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::graph::{DiGraph, Vertex};
    use rand::seq::SliceRandom;

    /// Acyclic graph with `m` edges drawn from all `i < j` pairs.
    pub fn random_dag(n: usize, m: usize, seed: u64) -> DiGraph {
        let mut pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
            .flat_map(|i| (i + 1..n as Vertex).map(move |j| (i, j)))
            .collect();
        pairs.shuffle(&mut crate::seeded_rng(seed, 99));
        pairs.truncate(m);
        DiGraph::new(n, pairs)
    }

    /// Reachability by DFS from every vertex over a plain adjacency list.
    pub fn brute_closure(g: &DiGraph) -> Vec<Vec<bool>> {
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in g.edges() {
            adj[u as usize].push(v as usize);
        }
        (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut stack = vec![s];
                seen[s] = true;
                while let Some(v) = stack.pop() {
                    for &w in &adj[v] {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                seen
            })
            .collect()
    }
}
