//! Immutable directed graphs in compressed adjacency form, plus the linear-time
//! decompositions the index is built from.

mod components;
mod levels;
mod parse;
mod traverse;

use std::cell::Cell;

pub use components::{scc_condense, weak_components, CondensationMap};
pub use levels::{topological_levels, LevelAssignment};
pub use parse::{parse_graph, write_edge_list, write_gra, GraphFormat, ParsedGraph};
pub use traverse::{Bfs, BiSearch, Resolution, VisitMarks};

/// Dense vertex id in `0..n`.
pub type Vertex = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

thread_local! {
    static ADJACENCY_READS: Cell<u64> = const { Cell::new(0) };
}

/// Number of adjacency slices handed out on the current thread so far.
///
/// Every neighbor lookup bumps this counter, which lets tests prove that a
/// code path never touched the graph.
pub fn adjacency_reads() -> u64 {
    ADJACENCY_READS.with(Cell::get)
}

#[inline]
fn note_adjacency_read() {
    ADJACENCY_READS.with(|c| c.set(c.get() + 1));
}

/// Counts of edges discarded while building a simple graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Dropped {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// A simple directed graph with forward and reverse incidence stored in flat
/// offset/target arrays. Neighbor lists are sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<Vertex>,
    in_offsets: Vec<usize>,
    in_sources: Vec<Vertex>,
}

impl DiGraph {
    /// Builds a graph on `n` vertices, silently dropping self-loops and
    /// parallel edges.
    ///
    /// Panics if an endpoint is not below `n`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        Self::with_dropped(n, edges).0
    }

    pub fn with_dropped(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> (Self, Dropped) {
        assert!(
            n <= u32::MAX as usize + 1,
            "vertex count {n} exceeds 32-bit ids"
        );
        let mut dropped = Dropped::default();
        let edges: Vec<(Vertex, Vertex)> = edges
            .into_iter()
            .filter(|&(u, v)| {
                assert!(
                    (u as usize) < n && (v as usize) < n,
                    "edge ({u}, {v}) out of range for n = {n}"
                );
                if u == v {
                    dropped.self_loops += 1;
                }
                u != v
            })
            .collect();

        let (mut out_offsets, mut out_targets) = bucket(n, edges.iter().copied());
        // sort and dedup each list, compacting in place
        let mut write = 0;
        for v in 0..n {
            let (start, end) = (out_offsets[v], out_offsets[v + 1]);
            out_targets[start..end].sort_unstable();
            out_offsets[v] = write;
            let mut last = None;
            for i in start..end {
                let w = out_targets[i];
                if last == Some(w) {
                    dropped.duplicates += 1;
                    continue;
                }
                last = Some(w);
                out_targets[write] = w;
                write += 1;
            }
        }
        out_offsets[n] = write;
        out_targets.truncate(write);

        let (in_offsets, in_sources) = bucket(
            n,
            (0..n).flat_map(|u| {
                out_targets[out_offsets[u]..out_offsets[u + 1]]
                    .iter()
                    .map(move |&v| (v, u as Vertex))
            }),
        );

        (
            DiGraph {
                out_offsets,
                out_targets,
                in_offsets,
                in_sources,
            },
            dropped,
        )
    }

    pub fn n(&self) -> usize {
        self.out_offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.out_targets.len()
    }

    #[inline]
    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        note_adjacency_read();
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    #[inline]
    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        note_adjacency_read();
        let v = v as usize;
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex, dir: Direction) -> &[Vertex] {
        match dir {
            Direction::Forward => self.out_neighbors(v),
            Direction::Backward => self.in_neighbors(v),
        }
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        let v = v as usize;
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn degree(&self, v: Vertex, dir: Direction) -> usize {
        match dir {
            Direction::Forward => self.out_degree(v),
            Direction::Backward => self.in_degree(v),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n() as Vertex
    }

    /// All edges in (source, target) order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
                .iter()
                .map(move |&v| (u as Vertex, v))
        })
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let u = u as usize;
        self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
            .binary_search(&v)
            .is_ok()
    }

    /// Vertices without in-edges.
    pub fn sources(&self) -> Vec<Vertex> {
        self.vertices()
            .filter(|&v| self.in_degree(v) == 0)
            .collect()
    }

    /// Vertices without out-edges.
    pub fn sinks(&self) -> Vec<Vertex> {
        self.vertices()
            .filter(|&v| self.out_degree(v) == 0)
            .collect()
    }

    /// The graph with every edge flipped.
    pub fn reverse(&self) -> DiGraph {
        DiGraph {
            out_offsets: self.in_offsets.clone(),
            out_targets: self.in_sources.clone(),
            in_offsets: self.out_offsets.clone(),
            in_sources: self.out_targets.clone(),
        }
    }

    /// FNV-1a over the vertex count and the sorted edge list. Used to tie a
    /// serialized index to the graph it was built from.
    pub fn checksum(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(PRIME);
            }
        };
        feed(self.n() as u64);
        feed(self.m() as u64);
        for &off in &self.out_offsets {
            feed(off as u64);
        }
        for &t in &self.out_targets {
            feed(t as u64);
        }
        h
    }
}

/// Counting sort of `(key, value)` pairs into offset/value arrays.
fn bucket(
    n: usize,
    pairs: impl Iterator<Item = (Vertex, Vertex)> + Clone,
) -> (Vec<usize>, Vec<Vertex>) {
    let mut offsets = vec![0usize; n + 1];
    for (k, _) in pairs.clone() {
        offsets[k as usize + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut values = vec![0; offsets[n]];
    for (k, v) in pairs {
        values[cursor[k as usize]] = v;
        cursor[k as usize] += 1;
    }
    (offsets, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn drops_loops_and_duplicates() {
        let (g, d) = DiGraph::with_dropped(3, [(0, 1), (0, 1), (1, 1), (2, 0), (0, 2)]);
        assert_eq!(g.n(), 3);
        assert_eq!(g.m(), 3);
        assert_eq!(
            d,
            Dropped {
                self_loops: 1,
                duplicates: 1
            }
        );
        assert_eq!(g.out_neighbors(0), &[1, 2]);
        assert_eq!(g.in_neighbors(0), &[2]);
        assert_eq!(g.sources(), Vec::<Vertex>::new());
        assert_eq!(g.sinks(), vec![1]);
    }

    #[test]
    fn empty_graph() {
        let g = DiGraph::new(0, []);
        assert_eq!((g.n(), g.m()), (0, 0));
        assert_eq!(g.edges().count(), 0);
    }

    #[test]
    fn adjacency_reads_are_counted() {
        let g = DiGraph::new(2, [(0, 1)]);
        let before = adjacency_reads();
        let _ = g.out_neighbors(0);
        let _ = g.in_neighbors(1);
        assert_eq!(adjacency_reads() - before, 2);
        let _ = g.out_degree(0);
        assert_eq!(adjacency_reads() - before, 2);
    }

    #[test]
    fn checksum_separates_graphs() {
        let a = DiGraph::new(3, [(0, 1), (1, 2)]);
        let b = DiGraph::new(3, [(0, 1), (0, 2)]);
        let c = DiGraph::new(4, [(0, 1), (1, 2)]);
        assert_eq!(a.checksum(), a.clone().checksum());
        assert_ne!(a.checksum(), b.checksum());
        assert_ne!(a.checksum(), c.checksum());
    }

    fn arb_graph() -> impl Strategy<Value = DiGraph> {
        (1usize..40).prop_flat_map(|n| {
            prop::collection::vec((0..n as Vertex, 0..n as Vertex), 0..120)
                .prop_map(move |e| DiGraph::new(n, e))
        })
    }

    proptest! {
        #[test]
        fn reverse_is_an_involution(g in arb_graph()) {
            prop_assert_eq!(g.reverse().reverse(), g.clone());
            let fwd: BTreeSet<_> = g.edges().collect();
            let back: BTreeSet<_> = g.reverse().edges().map(|(u, v)| (v, u)).collect();
            prop_assert_eq!(fwd, back);
        }

        #[test]
        fn in_adjacency_mirrors_out_adjacency(g in arb_graph()) {
            for (u, v) in g.edges() {
                prop_assert!(g.in_neighbors(v).contains(&u));
            }
            let m_in: usize = g.vertices().map(|v| g.in_degree(v)).sum();
            prop_assert_eq!(m_in, g.m());
            for v in g.vertices() {
                prop_assert!(g.out_neighbors(v).windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!g.out_neighbors(v).contains(&v));
            }
        }
    }
}
