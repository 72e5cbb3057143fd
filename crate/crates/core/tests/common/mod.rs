#![allow(dead_code)]

use oreach::workbench::gen_random_dag;
use oreach::{seeded_rng, DiGraph, Vertex};
use rand::Rng;

/// A corpus graph with its exhaustive closure.
pub struct Case {
    pub id: usize,
    pub graph: DiGraph,
    pub closure: Closure,
}

/// `count` random DAGs with `n` uniform in `2..=max_n` and `m` uniform in
/// `0..=n(n-1)/2`.
pub fn corpus(count: usize, max_n: usize, seed: u64) -> Vec<Case> {
    let mut rng = seeded_rng(seed, 0);
    (0..count)
        .map(|id| {
            let n = rng.gen_range(2..=max_n);
            let m = rng.gen_range(0..=n * (n - 1) / 2);
            let graph = gen_random_dag(n, m, rng.gen()).expect("corpus graph");
            let closure = Closure::warshall(&graph);
            Case { id, graph, closure }
        })
        .collect()
}

/// Reflexive transitive closure by Warshall's algorithm on a dense matrix.
pub struct Closure {
    n: usize,
    reach: Vec<bool>,
}

impl Closure {
    pub fn warshall(g: &DiGraph) -> Self {
        let n = g.n();
        let mut reach = vec![false; n * n];
        for v in 0..n {
            reach[v * n + v] = true;
        }
        for (u, v) in g.edges() {
            reach[u as usize * n + v as usize] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i * n + k] {
                    for j in 0..n {
                        if reach[k * n + j] {
                            reach[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Closure { n, reach }
    }

    pub fn reaches(&self, s: Vertex, t: Vertex) -> bool {
        self.reach[s as usize * self.n + t as usize]
    }

    /// Ordered pairs of distinct vertices with `s ->* t`.
    pub fn positive_pairs(&self) -> u64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| i != j && self.reach[i * self.n + j])
                    .count() as u64
            })
            .sum()
    }
}

/// All ordered pairs of distinct vertices.
pub fn distinct_pairs(n: usize) -> impl Iterator<Item = (Vertex, Vertex)> {
    let n = n as Vertex;
    (0..n).flat_map(move |s| (0..n).filter(move |&t| t != s).map(move |t| (s, t)))
}
