//! Supportive vertices: a few vertices whose complete in- and out-reachability
//! is stored as one bit per vertex, so that any query whose endpoints straddle a
//! support (or fall on different sides of one) is decided by bit logic.

use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::RngCore;
use rayon::prelude::*;

use crate::bitset::{words_for, BitSet};
use crate::graph::{Bfs, DiGraph, Direction, LevelAssignment, Vertex};
use crate::observation::{Answer, Observation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CandidateSource {
    /// On a forward or backward level holding at most `h` vertices.
    SlimLevel,
    /// Random fill from vertices on central forward levels.
    RandomCentral,
    /// Random fill from any remaining vertex, used only on degenerate graphs.
    RandomAny,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidatePool {
    pub candidates: Vec<Vertex>,
    pub sources: Vec<CandidateSource>,
}

impl CandidatePool {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    fn push(&mut self, v: Vertex, src: CandidateSource) {
        self.candidates.push(v);
        self.sources.push(src);
    }
}

/// Central levels `ceil(l_max / 5) ..= floor(4 * l_max / 5)`.
pub fn central_levels(l_max: u32) -> RangeInclusive<u32> {
    let l = l_max as u64;
    (l.div_ceil(5) as u32)..=((4 * l / 5) as u32)
}

/// Collects up to `k * p` candidates: every vertex on a slim forward level, then
/// on a slim backward level (ascending level, then id), topped up at random from
/// vertices on central forward levels.
pub fn select_candidates(
    dag: &DiGraph,
    levels: &LevelAssignment,
    k: usize,
    p: usize,
    h: usize,
    rng: &mut dyn RngCore,
) -> CandidatePool {
    let n = dag.n();
    let limit = k.saturating_mul(p).min(n);
    let mut pool = CandidatePool::default();
    let mut taken = vec![false; n];

    for (lv, l_max) in [(&levels.fwd, levels.fwd_max), (&levels.bwd, levels.bwd_max)] {
        for bucket in by_level(lv, l_max) {
            if bucket.len() > h {
                continue;
            }
            for v in bucket {
                if pool.len() == limit {
                    return pool;
                }
                if !std::mem::replace(&mut taken[v as usize], true) {
                    pool.push(v, CandidateSource::SlimLevel);
                }
            }
        }
    }

    let central = central_levels(levels.fwd_max);
    let fills = [
        (CandidateSource::RandomCentral, Some(central)),
        (CandidateSource::RandomAny, None),
    ];
    for (src, window) in fills {
        if pool.len() == limit {
            break;
        }
        let eligible: Vec<Vertex> = dag
            .vertices()
            .filter(|&v| !taken[v as usize])
            .filter(|&v| {
                window
                    .as_ref()
                    .is_none_or(|w| w.contains(&levels.fwd[v as usize]))
            })
            .collect();
        let need = (limit - pool.len()).min(eligible.len());
        for i in sample(rng, eligible.len(), need) {
            let v = eligible[i];
            taken[v as usize] = true;
            pool.push(v, src);
        }
    }
    pool
}

/// Vertices grouped by level, ascending level then id.
fn by_level(level: &[u32], l_max: u32) -> Vec<Vec<Vertex>> {
    let mut buckets = vec![
        Vec::new();
        if level.is_empty() {
            0
        } else {
            l_max as usize + 1
        }
    ];
    for (v, &l) in level.iter().enumerate() {
        buckets[l as usize].push(v as Vertex);
    }
    buckets
}

/// Out-reachability `R+(v)` and in-reachability `R-(v)`, both containing `v`.
pub fn reach_sets(dag: &DiGraph, v: Vertex) -> (BitSet, BitSet) {
    let mut bfs = Bfs::new(dag.n());
    let mut collect = |dir| {
        let mut set = BitSet::new(dag.n());
        bfs.for_each_reachable(dag, v, dir, |w| {
            set.insert(w as usize);
        });
        set
    };
    let out = collect(Direction::Forward);
    let inn = collect(Direction::Backward);
    (out, inn)
}

/// Supportive vertices with per-vertex reachability masks.
///
/// Slot `i` of `fwd(w)` is set iff support `i` reaches `w`; slot `i` of `bwd(w)`
/// is set iff `w` reaches support `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    pub supports: Vec<Vertex>,
    /// Requested number of supports; fixes the mask width even when fewer exist.
    pub k: usize,
    words: usize,
    fwd_mask: Vec<u64>,
    bwd_mask: Vec<u64>,
}

impl SupportSet {
    pub fn empty(n: usize, k: usize) -> Self {
        let words = words_for(k);
        SupportSet {
            supports: Vec::new(),
            k,
            words,
            fwd_mask: vec![0; n * words],
            bwd_mask: vec![0; n * words],
        }
    }

    /// Mask bytes stored per vertex and direction, `ceil(k / 8)`.
    pub fn mask_bytes(&self) -> usize {
        self.k.div_ceil(8)
    }

    pub fn words_per_vertex(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn fwd(&self, v: Vertex) -> &[u64] {
        let i = v as usize * self.words;
        &self.fwd_mask[i..i + self.words]
    }

    #[inline]
    pub fn bwd(&self, v: Vertex) -> &[u64] {
        let i = v as usize * self.words;
        &self.bwd_mask[i..i + self.words]
    }

    pub(crate) fn set_fwd_bit(&mut self, v: Vertex, slot: usize) {
        self.fwd_mask[v as usize * self.words + slot / 64] |= 1 << (slot % 64);
    }

    pub(crate) fn set_bwd_bit(&mut self, v: Vertex, slot: usize) {
        self.bwd_mask[v as usize * self.words + slot / 64] |= 1 << (slot % 64);
    }

    /// S1 only.
    #[inline]
    pub fn answer_positive(&self, s: Vertex, t: Vertex) -> Answer {
        if meets(self.bwd(s), self.fwd(t)) {
            Answer::Reachable(Observation::S1)
        } else {
            Answer::Unknown
        }
    }

    /// S2, then S3.
    #[inline]
    pub fn answer_negative(&self, s: Vertex, t: Vertex) -> Answer {
        if escapes(self.fwd(s), self.fwd(t)) {
            Answer::Unreachable(Observation::S2)
        } else if escapes(self.bwd(t), self.bwd(s)) {
            Answer::Unreachable(Observation::S3)
        } else {
            Answer::Unknown
        }
    }

    /// Every S observation that decides `(s, t)`.
    pub fn observe_all(&self, s: Vertex, t: Vertex, mut hit: impl FnMut(Answer)) {
        if meets(self.bwd(s), self.fwd(t)) {
            hit(Answer::Reachable(Observation::S1));
        }
        if escapes(self.fwd(s), self.fwd(t)) {
            hit(Answer::Unreachable(Observation::S2));
        }
        if escapes(self.bwd(t), self.bwd(s)) {
            hit(Answer::Unreachable(Observation::S3));
        }
    }

    /// S1, S2, S3 in that order.
    pub fn answer(&self, s: Vertex, t: Vertex) -> Answer {
        match self.answer_positive(s, t) {
            Answer::Unknown => self.answer_negative(s, t),
            decided => decided,
        }
    }
}

/// `a & b != 0` over whole mask words.
#[inline]
fn meets(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// `a & !b != 0`.
#[inline]
fn escapes(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & !y != 0)
}

/// Ranks `pool` by `|R+(v)| * |R-(v)|` (descending, ties to the smaller id), keeps
/// the best `k` and records their reachability in per-vertex masks.
pub fn pick_supports(pool: &CandidatePool, dag: &DiGraph, k: usize) -> SupportSet {
    let n = dag.n();
    let mut scored: Vec<(u64, Vertex)> = pool
        .candidates
        .par_iter()
        .map_init(
            || Bfs::new(n),
            |bfs, &v| {
                let out = bfs.for_each_reachable(dag, v, Direction::Forward, |_| {}) as u64;
                let inn = bfs.for_each_reachable(dag, v, Direction::Backward, |_| {}) as u64;
                (out * inn, v)
            },
        )
        .collect();
    scored.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);

    let mut set = SupportSet::empty(n, k);
    set.supports = scored.iter().map(|&(_, v)| v).collect();
    let mut bfs = Bfs::new(n);
    for slot in 0..set.supports.len() {
        let v = set.supports[slot];
        bfs.for_each_reachable(dag, v, Direction::Forward, |w| set.set_fwd_bit(w, slot));
        bfs.for_each_reachable(dag, v, Direction::Backward, |w| set.set_bwd_bit(w, slot));
    }
    set
}
