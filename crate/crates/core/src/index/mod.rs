//! The reachability index: construction, the ordered observation pipeline and
//! exact fallbacks for the queries it cannot decide.
//!
//! Each query `(s, t)` runs these tests in order and stops at the first
//! decisive one:
//!
//! | test | checks                                            |
//! |------|---------------------------------------------------|
//! | 1    | `s == t`                                          |
//! | 2    | forward levels (B5), backward levels (B6)         |
//! | 3    | supports, positive (S1)                           |
//! | 4    | first ordering: B4, T1, T2, T3                    |
//! | 5    | supports, negative (S2, S3)                       |
//! | 6    | remaining orderings: B4 and their T observations  |
//! | 7    | different weak components (B2)                    |
//!
//! All of them read only the two vertices' records.

mod condensed;
mod fallback;
mod serial;
mod stats;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{topological_levels, weak_components, DiGraph, LevelAssignment, Vertex};
use crate::observation::{Answer, Observation};
use crate::supportive::{pick_supports, select_candidates, SupportSet};
use crate::toporder::{self, random_ordering, ExtTopOrder, Flavor, OrderEntry};

pub use condensed::CondensedIndex;
pub use fallback::{
    pruned_bibfs, BiBfs, Fallback, FallbackKind, PlainBfs, PrunedBiBfs, Resolution,
};
pub use serial::{payload_bytes_per_vertex, HEADER_BYTES, MAGIC, VERSION};
pub use stats::{AnsweredBy, Hit, ObservationStats, QueryOutcome, TESTS};

/// Construction parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    /// Number of extended topological orderings.
    pub t: usize,
    /// Number of supportive vertices.
    pub k: usize,
    /// Candidate pool size factor; the pool holds at most `k * p` vertices.
    pub p: usize,
    /// A level with at most `h` vertices counts as slim.
    pub h: usize,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            t: 4,
            k: 16,
            p: 75,
            h: 8,
            seed: 0,
        }
    }
}

impl Params {
    /// Flavor of ordering `i`: the first `ceil(t / 2)` are forward.
    pub fn flavor(&self, i: usize) -> Flavor {
        if i < self.t.div_ceil(2) {
            Flavor::Forward
        } else {
            Flavor::Backward
        }
    }

    /// Seed of ordering `i`, determined by the master seed, the flavor and the
    /// ordering's rank within its flavor.
    pub fn ordering_seed(&self, i: usize) -> u64 {
        let forward = self.t.div_ceil(2);
        let (tag, rank) = match self.flavor(i) {
            Flavor::Forward => (1u64, i),
            Flavor::Backward => (2u64, i - forward),
        };
        splitmix64(self.seed ^ splitmix64(tag << 32 | rank as u64))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

const WCC: usize = 0;
const FWD: usize = 1;
const BWD: usize = 2;
const ORDERS: usize = 3;

/// Per-vertex records `[wcc, fwd level, bwd level, (pos, hi/lo, max/min) * t]`
/// in one flat array, plus the support masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachIndex {
    graph: Arc<DiGraph>,
    params: Params,
    stride: usize,
    records: Vec<u32>,
    flavors: Vec<Flavor>,
    supports: SupportSet,
    fwd_max: u32,
    bwd_max: u32,
}

/// Builds the index of an acyclic graph: weak components, topological levels,
/// `t` randomized extended orderings and `k` supportive vertices.
pub fn build_index(dag: impl Into<Arc<DiGraph>>, params: Params) -> Result<ReachIndex> {
    let graph: Arc<DiGraph> = dag.into();
    let dag = &*graph;
    let wcc = weak_components(dag);
    let levels = topological_levels(dag)?;
    let orderings = (0..params.t)
        .into_par_iter()
        .map(|i| random_ordering(dag, params.flavor(i), params.ordering_seed(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = crate::seeded_rng(params.seed, 0x5u64 << 60);
    let pool = select_candidates(dag, &levels, params.k, params.p, params.h, &mut rng);
    let supports = pick_supports(&pool, dag, params.k);
    Ok(ReachIndex::assemble(
        graph, params, &wcc, &levels, &orderings, supports,
    ))
}

impl ReachIndex {
    fn assemble(
        graph: Arc<DiGraph>,
        params: Params,
        wcc: &[u32],
        levels: &LevelAssignment,
        orderings: &[ExtTopOrder],
        supports: SupportSet,
    ) -> ReachIndex {
        let n = graph.n();
        let stride = ORDERS + 3 * orderings.len();
        let mut records = Vec::with_capacity(n * stride);
        for v in 0..n {
            records.extend([wcc[v], levels.fwd[v], levels.bwd[v]]);
            for o in orderings {
                records.extend([o.pos[v], o.hi_or_lo[v], o.mx_or_mn[v]]);
            }
        }
        ReachIndex {
            graph,
            params,
            stride,
            records,
            flavors: orderings.iter().map(|o| o.flavor).collect(),
            supports,
            fwd_max: levels.fwd_max,
            bwd_max: levels.bwd_max,
        }
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<DiGraph> {
        &self.graph
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn supports(&self) -> &SupportSet {
        &self.supports
    }

    pub fn ordering_count(&self) -> usize {
        self.flavors.len()
    }

    pub fn wcc(&self, v: Vertex) -> u32 {
        self.record(v)[WCC]
    }

    /// Copies ordering `i` out of the packed records.
    pub fn ordering(&self, i: usize) -> ExtTopOrder {
        let n = self.n();
        let mut o = ExtTopOrder {
            pos: Vec::with_capacity(n),
            hi_or_lo: Vec::with_capacity(n),
            mx_or_mn: Vec::with_capacity(n),
            flavor: self.flavors[i],
            seed: Some(self.params.ordering_seed(i)),
        };
        for v in 0..n as Vertex {
            let e = self.entry(self.record(v), i);
            o.pos.push(e.pos);
            o.hi_or_lo.push(e.hi_or_lo);
            o.mx_or_mn.push(e.mx_or_mn);
        }
        o
    }

    pub fn levels(&self) -> LevelAssignment {
        let n = self.n() as Vertex;
        LevelAssignment {
            fwd: (0..n).map(|v| self.record(v)[FWD]).collect(),
            bwd: (0..n).map(|v| self.record(v)[BWD]).collect(),
            fwd_max: self.fwd_max,
            bwd_max: self.bwd_max,
        }
    }

    /// Serialized bytes per vertex, `12 + 12t + 2 * ceil(k / 8)`.
    pub fn payload_bytes_per_vertex(&self) -> usize {
        payload_bytes_per_vertex(self.flavors.len(), self.supports.k)
    }

    #[inline]
    fn record(&self, v: Vertex) -> &[u32] {
        let i = v as usize * self.stride;
        &self.records[i..i + self.stride]
    }

    #[inline]
    fn entry(&self, rec: &[u32], i: usize) -> OrderEntry {
        let j = ORDERS + 3 * i;
        OrderEntry {
            pos: rec[j],
            hi_or_lo: rec[j + 1],
            mx_or_mn: rec[j + 2],
        }
    }

    /// Runs tests 1 to 7 without touching the graph. Returns the answer and the
    /// number of the deciding test (0 when undecided).
    #[inline]
    pub fn observe(&self, s: Vertex, t: Vertex) -> (Answer, u8) {
        if s == t {
            return (Answer::Reachable(Observation::Trivial), 1);
        }
        let rs = self.record(s);
        let rt = self.record(t);
        // distinct vertices on the same level cannot reach each other
        if rt[FWD] <= rs[FWD] {
            return (Answer::Unreachable(Observation::B5), 2);
        }
        if rs[BWD] <= rt[BWD] {
            return (Answer::Unreachable(Observation::B6), 2);
        }
        let a = self.supports.answer_positive(s, t);
        if a.is_decisive() {
            return (a, 3);
        }
        if !self.flavors.is_empty() {
            let a = toporder::observe(self.flavors[0], self.entry(rs, 0), self.entry(rt, 0));
            if a.is_decisive() {
                return (a, 4);
            }
        }
        let a = self.supports.answer_negative(s, t);
        if a.is_decisive() {
            return (a, 5);
        }
        for (i, &flavor) in self.flavors.iter().enumerate().skip(1) {
            let a = toporder::observe(flavor, self.entry(rs, i), self.entry(rt, i));
            if a.is_decisive() {
                return (a, 6);
            }
        }
        if rs[WCC] != rt[WCC] {
            return (Answer::Unreachable(Observation::B2), 7);
        }
        (Answer::Unknown, 0)
    }

    /// Bit set (by [`Observation::index`]) of every observation that decides
    /// `(s, t)`.
    pub fn observe_all(&self, s: Vertex, t: Vertex) -> u32 {
        let mut seen = 0u32;
        let mut note = |a: Answer| {
            if let Some(o) = a.observation() {
                seen |= 1 << o.index();
            }
        };
        if s == t {
            note(Answer::Reachable(Observation::Trivial));
            return seen;
        }
        let rs = self.record(s);
        let rt = self.record(t);
        if rt[FWD] <= rs[FWD] {
            note(Answer::Unreachable(Observation::B5));
        }
        if rs[BWD] <= rt[BWD] {
            note(Answer::Unreachable(Observation::B6));
        }
        self.supports.observe_all(s, t, &mut note);
        for (i, &flavor) in self.flavors.iter().enumerate() {
            toporder::observe_all(flavor, self.entry(rs, i), self.entry(rt, i), &mut note);
        }
        if rs[WCC] != rt[WCC] {
            note(Answer::Unreachable(Observation::B2));
        }
        seen
    }

    /// The observation pipeline with statistics: first hit always, every
    /// applicable observation when `stats.track_overlap` is set.
    pub fn try_observations(&self, s: Vertex, t: Vertex, stats: &mut ObservationStats) -> Answer {
        let (answer, test) = self.observe(s, t);
        if stats.track_overlap {
            stats.record_overlap(self.observe_all(s, t));
        }
        if let Some(observation) = answer.observation() {
            stats.record_hit(Hit { test, observation }, answer.reachable().unwrap());
        }
        answer
    }

    /// Exact query: observations first, then `fallback`.
    pub fn query<F: Fallback + ?Sized>(
        &self,
        s: Vertex,
        t: Vertex,
        fallback: &mut F,
        stats: &mut ObservationStats,
    ) -> QueryOutcome {
        let (answer, test) = self.observe(s, t);
        if stats.track_overlap {
            stats.record_overlap(self.observe_all(s, t));
        }
        match answer {
            Answer::Reachable(observation) | Answer::Unreachable(observation) => {
                let reachable = observation.is_positive();
                stats.record_hit(Hit { test, observation }, reachable);
                QueryOutcome {
                    answer: reachable,
                    answered_by: AnsweredBy::Observation(Hit { test, observation }),
                    work: 0,
                }
            }
            Answer::Unknown => {
                let r = fallback.resolve(self, s, t);
                stats.record_fallback(r.reachable, r.expanded);
                QueryOutcome {
                    answer: r.reachable,
                    answered_by: AnsweredBy::Fallback,
                    work: r.expanded,
                }
            }
        }
    }

    /// Exact answer without statistics.
    pub fn reaches<F: Fallback + ?Sized>(&self, s: Vertex, t: Vertex, fallback: &mut F) -> bool {
        match self.observe(s, t).0.reachable() {
            Some(b) => b,
            None => fallback.resolve(self, s, t).reachable,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{brute_closure, random_dag};
    use proptest::prelude::*;

    fn diamond() -> DiGraph {
        DiGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    fn tiny(t: usize, k: usize) -> Params {
        Params {
            t,
            k,
            p: 4,
            h: 8,
            seed: 1,
        }
    }

    #[test]
    fn params_split_flavors() {
        let p = Params {
            t: 5,
            ..Params::default()
        };
        let flavors: Vec<_> = (0..5).map(|i| p.flavor(i)).collect();
        use Flavor::*;
        assert_eq!(flavors, vec![Forward, Forward, Forward, Backward, Backward]);
        // ordering seeds depend on (flavor, rank) only
        let q = Params { t: 2, ..p };
        assert_eq!(p.ordering_seed(0), q.ordering_seed(0));
        assert_eq!(p.ordering_seed(3), q.ordering_seed(1));
        assert_ne!(p.ordering_seed(0), p.ordering_seed(1));
    }

    #[test]
    fn diamond_index() {
        let ix = build_index(
            diamond(),
            Params {
                t: 2,
                k: 1,
                p: 4,
                h: 8,
                seed: 3,
            },
        )
        .unwrap();
        assert_eq!(ix.payload_bytes_per_vertex() * 4, 152);
        assert_eq!(ix.ordering_count(), 2);
        assert_eq!(ix.ordering(0).flavor, Flavor::Forward);
        assert_eq!(ix.ordering(1).flavor, Flavor::Backward);
        let (a, test) = ix.observe(0, 3);
        assert_eq!(a.reachable(), Some(true));
        assert!(test == 3 || test == 4, "answered at test {test}");
        assert_eq!(ix.observe(3, 0), (Answer::Unreachable(Observation::B5), 2));
        for s in 0..4 {
            for t in 0..4 {
                assert!(ix.observe(s, t).0.is_decisive(), "({s}, {t}) undecided");
            }
        }
    }

    #[test]
    fn degenerate_params() {
        let g = DiGraph::new(4, [(0, 1), (2, 3)]);
        let ix = build_index(g, tiny(0, 0)).unwrap();
        assert_eq!(ix.observe(0, 3), (Answer::Unreachable(Observation::B2), 7));
        // equal forward levels are decided one test earlier
        assert_eq!(ix.observe(0, 2), (Answer::Unreachable(Observation::B5), 2));
        assert_eq!(ix.payload_bytes_per_vertex(), 12);
        let one = build_index(DiGraph::new(1, []), Params::default()).unwrap();
        assert_eq!(
            one.observe(0, 0),
            (Answer::Reachable(Observation::Trivial), 1)
        );
    }

    #[test]
    fn cyclic_input_is_rejected() {
        let g = DiGraph::new(2, [(0, 1), (1, 0)]);
        assert!(matches!(
            build_index(g, Params::default()),
            Err(crate::Error::NotAcyclic)
        ));
    }

    #[test]
    fn levels_and_orderings_round_out_of_records() {
        let g = random_dag(30, 60, 8);
        let ix = build_index(g.clone(), Params::default()).unwrap();
        assert_eq!(ix.levels(), topological_levels(&g).unwrap());
        for i in 0..ix.ordering_count() {
            let o = ix.ordering(i);
            assert_eq!(o, random_ordering(&g, o.flavor, o.seed.unwrap()).unwrap());
        }
    }

    #[test]
    fn build_is_deterministic() {
        let g = Arc::new(random_dag(60, 200, 8));
        let a = build_index(
            g.clone(),
            Params {
                seed: 42,
                ..Params::default()
            },
        )
        .unwrap();
        let b = build_index(
            g.clone(),
            Params {
                seed: 42,
                ..Params::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        let c = build_index(
            g,
            Params {
                seed: 43,
                ..Params::default()
            },
        )
        .unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn overlap_counts_every_applicable_observation() {
        let g = DiGraph::new(3, [(0, 1), (1, 2)]);
        let ix = build_index(g, tiny(2, 1)).unwrap();
        let mut stats = ObservationStats::with_overlap();
        ix.try_observations(2, 0, &mut stats);
        // B5, B6 and B4 on both orderings all apply
        assert_eq!(stats.first_hit(2, Observation::B5), 1);
        assert_eq!(stats.overlap(Observation::B5), 1);
        assert_eq!(stats.overlap(Observation::B6), 1);
        assert_eq!(stats.overlap(Observation::B4), 1);
    }

    proptest! {
        #[test]
        fn observations_are_sound(
            n in 1usize..=48, density in 0.0f64..1.0, gseed: u64, seed: u64,
            t in 0usize..=5, k in 0usize..=20, h in 1usize..=8
        ) {
            let max_m = n * (n - 1) / 2;
            let g = random_dag(n, (max_m as f64 * density * density) as usize, gseed);
            let r = brute_closure(&g);
            let ix = build_index(g, Params { t, k, p: 3, h, seed }).unwrap();
            for s in 0..n as Vertex {
                for u in 0..n as Vertex {
                    let (a, test) = ix.observe(s, u);
                    if let Some(b) = a.reachable() {
                        prop_assert_eq!(b, r[s as usize][u as usize], "({}, {}) test {} {:?}", s, u, test, a);
                    }
                    let all = ix.observe_all(s, u);
                    if let Some(o) = a.observation() {
                        prop_assert!(all >> o.index() & 1 == 1);
                    }
                    for o in Observation::ALL {
                        if all >> o.index() & 1 == 1 {
                            prop_assert_eq!(o.is_positive(), r[s as usize][u as usize]);
                        }
                    }
                }
            }
        }
    }
}
