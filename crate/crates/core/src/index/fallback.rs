use std::str::FromStr;

use super::ReachIndex;
pub use crate::graph::Resolution;
use crate::graph::{Bfs, BiSearch, Direction, Vertex};

/// Exact resolver for queries the observations leave open. Implementations own
/// their scratch space, so each concurrent query stream needs its own.
pub trait Fallback {
    fn name(&self) -> &'static str;

    fn resolve(&mut self, ix: &ReachIndex, s: Vertex, t: Vertex) -> Resolution;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FallbackKind {
    PrunedBiBfs,
    BiBfs,
    Bfs,
}

impl FallbackKind {
    pub fn build(self, n: usize) -> Box<dyn Fallback + Send> {
        match self {
            FallbackKind::PrunedBiBfs => Box::new(PrunedBiBfs::new(n)),
            FallbackKind::BiBfs => Box::new(BiBfs::new(n)),
            FallbackKind::Bfs => Box::new(PlainBfs::new(n)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FallbackKind::PrunedBiBfs => "pbibfs",
            FallbackKind::BiBfs => "bibfs",
            FallbackKind::Bfs => "bfs",
        }
    }
}

impl FromStr for FallbackKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pbibfs" => Ok(FallbackKind::PrunedBiBfs),
            "bibfs" => Ok(FallbackKind::BiBfs),
            "bfs" => Ok(FallbackKind::Bfs),
            other => Err(format!(
                "unknown fallback `{other}` (expected pbibfs, bibfs or bfs)"
            )),
        }
    }
}

/// Probe for the pruned search: the observations on `(v, t)` for vertices
/// found going forward, on `(s, v)` going backward.
fn observation_probe(
    ix: &ReachIndex,
    s: Vertex,
    t: Vertex,
) -> impl FnMut(Direction, Vertex) -> Option<bool> + '_ {
    move |dir, v| match dir {
        Direction::Forward => ix.observe(v, t).0.reachable(),
        Direction::Backward => ix.observe(s, v).0.reachable(),
    }
}

/// Bidirectional BFS that prunes with the index's observations.
#[derive(Clone, Debug)]
pub struct PrunedBiBfs(BiSearch);

impl PrunedBiBfs {
    pub fn new(n: usize) -> Self {
        PrunedBiBfs(BiSearch::new(n))
    }
}

impl Fallback for PrunedBiBfs {
    fn name(&self) -> &'static str {
        "pbibfs"
    }

    fn resolve(&mut self, ix: &ReachIndex, s: Vertex, t: Vertex) -> Resolution {
        self.0
            .search_pruned(ix.graph(), s, t, observation_probe(ix, s, t))
    }
}

/// Pruned bidirectional BFS that tries the observations on `(s, t)` itself
/// first and only searches when they are inconclusive.
pub fn pruned_bibfs(
    ix: &ReachIndex,
    s: Vertex,
    t: Vertex,
    scratch: &mut PrunedBiBfs,
) -> Resolution {
    match ix.observe(s, t).0.reachable() {
        Some(reachable) => Resolution {
            reachable,
            expanded: 0,
            scanned: 0,
        },
        None => scratch.resolve(ix, s, t),
    }
}

/// Plain bidirectional BFS.
#[derive(Clone, Debug)]
pub struct BiBfs(BiSearch);

impl BiBfs {
    pub fn new(n: usize) -> Self {
        BiBfs(BiSearch::new(n))
    }
}

impl Fallback for BiBfs {
    fn name(&self) -> &'static str {
        "bibfs"
    }

    fn resolve(&mut self, ix: &ReachIndex, s: Vertex, t: Vertex) -> Resolution {
        self.0.search(ix.graph(), s, t)
    }
}

/// Forward BFS from `s`.
#[derive(Clone, Debug)]
pub struct PlainBfs(Bfs);

impl PlainBfs {
    pub fn new(n: usize) -> Self {
        PlainBfs(Bfs::new(n))
    }
}

impl Fallback for PlainBfs {
    fn name(&self) -> &'static str {
        "bfs"
    }

    fn resolve(&mut self, ix: &ReachIndex, s: Vertex, t: Vertex) -> Resolution {
        let (reachable, expanded) = self.0.search(ix.graph(), s, t);
        Resolution {
            reachable,
            expanded,
            scanned: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{adjacency_reads, DiGraph};
    use crate::index::{build_index, AnsweredBy, ObservationStats, Params};
    use crate::testutil::{brute_closure, random_dag};
    use proptest::prelude::*;

    fn bare(g: DiGraph) -> ReachIndex {
        build_index(
            g,
            Params {
                t: 0,
                k: 0,
                p: 1,
                h: 1,
                seed: 0,
            },
        )
        .unwrap()
    }

    #[test]
    fn diamond_siblings_exhaust() {
        let ix = bare(DiGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]));
        // equal forward levels already decide (1, 2); search it directly
        let r = PrunedBiBfs::new(4).resolve(&ix, 1, 2);
        assert!(!r.reachable);
        assert!(r.expanded >= 1);
        assert_eq!(
            pruned_bibfs(&ix, 1, 2, &mut PrunedBiBfs::new(4)).expanded,
            0
        );
    }

    #[test]
    fn path_frontiers_meet() {
        let ix = bare(DiGraph::new(3, [(0, 1), (1, 2)]));
        for fb in [
            FallbackKind::PrunedBiBfs,
            FallbackKind::BiBfs,
            FallbackKind::Bfs,
        ] {
            let r = fb.build(3).resolve(&ix, 0, 2);
            assert!(r.reachable, "{}", fb.name());
        }
        assert!(!BiBfs::new(3).resolve(&ix, 2, 0).reachable);
    }

    #[test]
    fn sink_source_exhausts_in_one_step() {
        let ix = bare(DiGraph::new(3, [(0, 1), (1, 2)]));
        let r = BiBfs::new(3).resolve(&ix, 2, 0);
        assert_eq!((r.reachable, r.expanded), (false, 1));
    }

    /// Two chains between a common root and a common sink. With no orderings or
    /// supports, a vertex early on one chain and one late on the other differ in
    /// both levels the right way round, so only search decides the pair.
    #[test]
    fn unknown_pair_needs_the_fallback() {
        // 0 -> 1 -> 2 -> 3 -> 4 -> 9 and 0 -> 5 -> 6 -> 7 -> 8 -> 9
        let g = DiGraph::new(
            10,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 9),
                (0, 5),
                (5, 6),
                (6, 7),
                (7, 8),
                (8, 9),
            ],
        );
        let ix = bare(g);
        assert_eq!(ix.observe(2, 7).0, crate::Answer::Unknown);
        let mut stats = ObservationStats::new();
        let out = ix.query(2, 7, &mut PrunedBiBfs::new(10), &mut stats);
        assert!(!out.answer);
        assert_eq!(out.answered_by, AnsweredBy::Fallback);
        assert!(out.work > 0);
        assert_eq!(stats.fallback_count(), 1);
        // and with one ordering plus one support, still exact
        let full = build_index(
            ix.graph().clone(),
            Params {
                t: 1,
                k: 1,
                p: 4,
                h: 8,
                seed: 2,
            },
        )
        .unwrap();
        assert!(
            !full
                .query(2, 7, &mut PrunedBiBfs::new(10), &mut stats)
                .answer
        );
    }

    #[test]
    fn fallback_kind_parses() {
        assert_eq!(
            "pbibfs".parse::<FallbackKind>(),
            Ok(FallbackKind::PrunedBiBfs)
        );
        assert!("dfs".parse::<FallbackKind>().is_err());
    }

    proptest! {
        #[test]
        fn every_fallback_is_exact(
            n in 1usize..=48, density in 0.0f64..1.0, gseed: u64, seed: u64,
            t in 0usize..=4, k in 0usize..=8
        ) {
            let max_m = n * (n - 1) / 2;
            let g = random_dag(n, (max_m as f64 * density * density) as usize, gseed);
            let r = brute_closure(&g);
            let (m, ix) = (g.m() as u64, build_index(g, Params { t, k, p: 2, h: 2, seed }).unwrap());
            let mut fbs: Vec<Box<dyn Fallback + Send>> =
                [FallbackKind::PrunedBiBfs, FallbackKind::BiBfs, FallbackKind::Bfs].map(|k| k.build(n)).into();
            for s in 0..n as Vertex {
                for u in 0..n as Vertex {
                    let truth = r[s as usize][u as usize];
                    for fb in fbs.iter_mut() {
                        let res = fb.resolve(&ix, s, u);
                        prop_assert_eq!(res.reachable, truth, "{} on ({}, {})", fb.name(), s, u);
                        prop_assert!(res.expanded <= 2 * n as u64);
                        prop_assert!(res.scanned <= 2 * m);
                        let mut stats = ObservationStats::new();
                        let before = adjacency_reads();
                        let out = ix.query(s, u, fb.as_mut(), &mut stats);
                        prop_assert_eq!(out.answer, truth);
                        if out.answered_by != AnsweredBy::Fallback {
                            prop_assert_eq!(out.work, 0);
                            prop_assert_eq!(adjacency_reads(), before);
                        } else {
                            prop_assert!(out.work > 0);
                        }
                    }
                }
            }
        }
    }
}
