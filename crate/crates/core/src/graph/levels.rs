use std::collections::VecDeque;

use super::{DiGraph, Direction, Vertex};
use crate::error::{Error, Result};

/// Forward and backward topological levels of a DAG.
///
/// `fwd[v]` is the length of the longest path ending in `v` (0 for sources),
/// `bwd[v]` the length of the longest path starting in `v` (0 for sinks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelAssignment {
    pub fwd: Vec<u32>,
    pub bwd: Vec<u32>,
    pub fwd_max: u32,
    pub bwd_max: u32,
}

/// Kahn's algorithm with a FIFO queue, run once per direction.
pub fn topological_levels(dag: &DiGraph) -> Result<LevelAssignment> {
    let fwd = kahn_levels(dag, Direction::Forward)?;
    let bwd = kahn_levels(dag, Direction::Backward)?;
    Ok(LevelAssignment {
        fwd_max: fwd.iter().copied().max().unwrap_or(0),
        bwd_max: bwd.iter().copied().max().unwrap_or(0),
        fwd,
        bwd,
    })
}

fn kahn_levels(dag: &DiGraph, dir: Direction) -> Result<Vec<u32>> {
    let n = dag.n();
    let mut pending: Vec<usize> = dag
        .vertices()
        .map(|v| dag.degree(v, dir.reverse()))
        .collect();
    let mut level = vec![0u32; n];
    let mut queue: VecDeque<Vertex> = dag
        .vertices()
        .filter(|&v| pending[v as usize] == 0)
        .collect();
    let mut drained = 0;
    while let Some(v) = queue.pop_front() {
        drained += 1;
        let next = level[v as usize] + 1;
        for &w in dag.neighbors(v, dir) {
            let wi = w as usize;
            level[wi] = level[wi].max(next);
            pending[wi] -= 1;
            if pending[wi] == 0 {
                queue.push_back(w);
            }
        }
    }
    if drained != n {
        return Err(Error::NotAcyclic);
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diamond() {
        let g = DiGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]);
        let l = topological_levels(&g).unwrap();
        assert_eq!(l.fwd, vec![0, 1, 1, 2]);
        assert_eq!(l.bwd, vec![2, 1, 1, 0]);
        assert_eq!((l.fwd_max, l.bwd_max), (2, 2));
    }

    #[test]
    fn edgeless() {
        let l = topological_levels(&DiGraph::new(3, [])).unwrap();
        assert_eq!(l.fwd, vec![0; 3]);
        assert_eq!(l.bwd, vec![0; 3]);
    }

    #[test]
    fn path() {
        let l = topological_levels(&DiGraph::new(3, [(0, 1), (1, 2)])).unwrap();
        assert_eq!(l.fwd, vec![0, 1, 2]);
        assert_eq!(l.fwd_max, 2);
    }

    #[test]
    fn cycle_is_rejected() {
        let g = DiGraph::new(3, [(0, 1), (1, 2), (2, 1)]);
        assert!(matches!(topological_levels(&g), Err(Error::NotAcyclic)));
    }

    proptest! {
        #[test]
        fn levels_respect_edges_and_are_minimal(
            (n, edges) in (1usize..=64).prop_flat_map(|n| {
                (Just(n), prop::collection::vec((0..n as Vertex, 0..n as Vertex), 0..=3 * n))
            })
        ) {
            let g = DiGraph::new(n, edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))));
            let l = topological_levels(&g).unwrap();
            for (u, v) in g.edges() {
                prop_assert!(l.fwd[u as usize] < l.fwd[v as usize]);
                prop_assert!(l.bwd[u as usize] > l.bwd[v as usize]);
            }
            for v in g.vertices() {
                let vi = v as usize;
                prop_assert_eq!(l.fwd[vi] == 0, g.in_degree(v) == 0);
                prop_assert_eq!(l.bwd[vi] == 0, g.out_degree(v) == 0);
                let expect = g.in_neighbors(v).iter().map(|&u| l.fwd[u as usize] + 1).max().unwrap_or(0);
                prop_assert_eq!(l.fwd[vi], expect);
            }
        }
    }
}
