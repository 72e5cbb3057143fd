//! Extended topological orderings.
//!
//! A DFS-based topological sort that assigns positions back to front also knows,
//! for every vertex `v`, the contiguous block of positions filled while `v` was on
//! the stack. All of those vertices are reachable from `v`; the last of them is
//! `v`'s *high* index. Tracking the largest position of anything reachable gives
//! the *max* index. Run on the reverse graph and mirrored, the same procedure
//! yields *low* and *min* indices for in-reachability.

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::baselines::ReachMatrix;
use crate::error::{Error, Result};
use crate::graph::{DiGraph, Direction, Vertex};
use crate::observation::{Answer, Observation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// Built on the graph itself; carries high and max indices.
    Forward,
    /// Built on the reverse graph and mirrored; carries low and min indices.
    Backward,
}

/// A topological ordering with per-vertex high/max (forward flavor) or low/min
/// (backward flavor) indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtTopOrder {
    pub pos: Vec<u32>,
    pub hi_or_lo: Vec<u32>,
    pub mx_or_mn: Vec<u32>,
    pub flavor: Flavor,
    /// Seed of the generator that randomized the ordering, if any.
    pub seed: Option<u64>,
}

/// The three integers an ordering stores for one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderEntry {
    pub pos: u32,
    pub hi_or_lo: u32,
    pub mx_or_mn: u32,
}

impl ExtTopOrder {
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    #[inline]
    pub fn entry(&self, v: Vertex) -> OrderEntry {
        let v = v as usize;
        OrderEntry {
            pos: self.pos[v],
            hi_or_lo: self.hi_or_lo[v],
            mx_or_mn: self.mx_or_mn[v],
        }
    }

    /// Vertices listed by position.
    pub fn sequence(&self) -> Vec<Vertex> {
        let mut seq = vec![0; self.len()];
        for (v, &p) in self.pos.iter().enumerate() {
            seq[p as usize] = v as Vertex;
        }
        seq
    }

    /// Applies B4 and the flavor's T observations to `(s, t)`.
    pub fn answer(&self, s: Vertex, t: Vertex) -> Answer {
        observe(self.flavor, self.entry(s), self.entry(t))
    }
}

/// First decisive observation for `(s, t)`, tested in the order B4, then
/// T1/T2/T3 (forward) or T4/T5/T6 (backward).
#[inline]
pub(crate) fn observe(flavor: Flavor, s: OrderEntry, t: OrderEntry) -> Answer {
    if t.pos < s.pos {
        return Answer::Unreachable(Observation::B4);
    }
    match flavor {
        Flavor::Forward => {
            if t.pos <= s.hi_or_lo {
                Answer::Reachable(Observation::T1)
            } else if t.pos > s.mx_or_mn {
                Answer::Unreachable(Observation::T2)
            } else if t.pos == s.mx_or_mn {
                Answer::Reachable(Observation::T3)
            } else {
                Answer::Unknown
            }
        }
        Flavor::Backward => {
            if t.hi_or_lo <= s.pos {
                Answer::Reachable(Observation::T4)
            } else if s.pos < t.mx_or_mn {
                Answer::Unreachable(Observation::T5)
            } else if s.pos == t.mx_or_mn {
                Answer::Reachable(Observation::T6)
            } else {
                Answer::Unknown
            }
        }
    }
}

/// Every observation of this ordering that decides `(s, t)`, in test order.
pub(crate) fn observe_all(
    flavor: Flavor,
    s: OrderEntry,
    t: OrderEntry,
    mut hit: impl FnMut(Answer),
) {
    use Observation::*;
    if t.pos < s.pos {
        hit(Answer::Unreachable(B4));
    }
    let ordered = s.pos <= t.pos;
    let checks = match flavor {
        Flavor::Forward => [
            (ordered && t.pos <= s.hi_or_lo, T1),
            (t.pos > s.mx_or_mn, T2),
            (t.pos == s.mx_or_mn, T3),
        ],
        Flavor::Backward => [
            (ordered && t.hi_or_lo <= s.pos, T4),
            (s.pos < t.mx_or_mn, T5),
            (s.pos == t.mx_or_mn, T6),
        ],
    };
    for (holds, obs) in checks {
        if holds {
            hit(Answer::decided(obs.is_positive(), obs));
        }
    }
}

/// Forward extended topological sort starting DFS runs from `start_order` in
/// sequence; out-neighbors are visited in an order shuffled by `rng`.
///
/// Vertices not reached from `start_order` are visited afterwards in id order, so
/// every vertex gets a position even when `start_order` misses some sources.
pub fn extended_topsort(
    dag: &DiGraph,
    start_order: &[Vertex],
    rng: &mut dyn RngCore,
) -> Result<ExtTopOrder> {
    let (pos, hi, mx) = dfs_order(dag, Direction::Forward, start_order, Some(rng))?;
    Ok(ExtTopOrder {
        pos,
        hi_or_lo: hi,
        mx_or_mn: mx,
        flavor: Flavor::Forward,
        seed: None,
    })
}

/// Like [`extended_topsort`] but visits out-neighbors in stored (ascending) order.
pub fn extended_topsort_fixed(dag: &DiGraph, start_order: &[Vertex]) -> Result<ExtTopOrder> {
    let (pos, hi, mx) = dfs_order(dag, Direction::Forward, start_order, None)?;
    Ok(ExtTopOrder {
        pos,
        hi_or_lo: hi,
        mx_or_mn: mx,
        flavor: Flavor::Forward,
        seed: None,
    })
}

/// Backward-flavor ordering: a forward sort of the reverse graph started from the
/// sinks of `dag` (shuffled), mirrored back onto `dag`.
pub fn extended_topsort_backward(dag: &DiGraph, rng: &mut dyn RngCore) -> Result<ExtTopOrder> {
    let mut start = dag.sinks();
    start.shuffle(rng);
    let (pos, hi, mx) = dfs_order(dag, Direction::Backward, &start, Some(rng))?;
    Ok(mirror(pos, hi, mx))
}

/// Backward flavor with a caller-chosen start sequence on the reverse graph and
/// in-neighbors visited in stored order.
pub fn extended_topsort_backward_fixed(
    dag: &DiGraph,
    start_order: &[Vertex],
) -> Result<ExtTopOrder> {
    let (pos, hi, mx) = dfs_order(dag, Direction::Backward, start_order, None)?;
    Ok(mirror(pos, hi, mx))
}

/// A randomized ordering of the given flavor: DFS roots are the sources of the
/// traversal direction in random order, and children are shuffled.
pub fn random_ordering(dag: &DiGraph, flavor: Flavor, seed: u64) -> Result<ExtTopOrder> {
    let mut rng = crate::seeded_rng(seed, 0);
    let mut ord = match flavor {
        Flavor::Forward => {
            let mut start = dag.sources();
            start.shuffle(&mut rng);
            extended_topsort(dag, &start, &mut rng)?
        }
        Flavor::Backward => extended_topsort_backward(dag, &mut rng)?,
    };
    ord.seed = Some(seed);
    Ok(ord)
}

fn mirror(pos: Vec<u32>, hi: Vec<u32>, mx: Vec<u32>) -> ExtTopOrder {
    let last = pos.len().saturating_sub(1) as u32;
    let flip = |xs: Vec<u32>| xs.into_iter().map(|x| last - x).collect();
    ExtTopOrder {
        pos: flip(pos),
        hi_or_lo: flip(hi),
        mx_or_mn: flip(mx),
        flavor: Flavor::Backward,
        seed: None,
    }
}

const UNSEEN: u8 = 0;
const ACTIVE: u8 = 1;
const DONE: u8 = 2;

struct Frame {
    v: Vertex,
    children: usize,
    cursor: usize,
}

/// Iterative DFS assigning positions from `n - 1` downwards at finish time.
/// Returns `(pos, high, max)` with respect to `dir`.
fn dfs_order(
    g: &DiGraph,
    dir: Direction,
    start_order: &[Vertex],
    mut rng: Option<&mut dyn RngCore>,
) -> Result<(Vec<u32>, Vec<u32>, Vec<u32>)> {
    let n = g.n();
    let mut state = vec![UNSEEN; n];
    let mut pos = vec![0u32; n];
    let mut high = vec![0u32; n];
    let mut max = vec![0u32; n];
    // number of positions not yet handed out; the next finisher gets `free - 1`
    let mut free = n as u32;
    let mut stack: Vec<Frame> = Vec::new();
    let mut child_buf: Vec<Vertex> = Vec::new();

    let roots = start_order.iter().copied().chain(g.vertices());
    for root in roots {
        if state[root as usize] != UNSEEN {
            continue;
        }
        let mut entering = Some(root);
        loop {
            if let Some(v) = entering.take() {
                state[v as usize] = ACTIVE;
                high[v as usize] = free - 1;
                let start = child_buf.len();
                child_buf.extend_from_slice(g.neighbors(v, dir));
                if let Some(rng) = rng.as_deref_mut() {
                    child_buf[start..].shuffle(rng);
                }
                stack.push(Frame {
                    v,
                    children: start,
                    cursor: start,
                });
            }
            let Some(top) = stack.last_mut() else { break };
            if top.cursor < child_buf.len() {
                let w = child_buf[top.cursor];
                top.cursor += 1;
                match state[w as usize] {
                    UNSEEN => entering = Some(w),
                    ACTIVE => return Err(Error::NotAcyclic),
                    _ => {}
                }
                continue;
            }
            let Frame { v, children, .. } = stack.pop().unwrap();
            free -= 1;
            let vi = v as usize;
            pos[vi] = free;
            max[vi] = child_buf[children..]
                .iter()
                .map(|&w| max[w as usize])
                .fold(free, u32::max);
            state[vi] = DONE;
            child_buf.truncate(children);
        }
    }
    Ok((pos, high, max))
}

/// Pair counts describing how much of the reachability relation one ordering
/// decides on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    /// Ordered pairs `(s, t)`, `s != t`, with `pos(t) < pos(s)`.
    pub witnessed_negative: u64,
    /// Unreachable pairs decided by B4 or the flavor's negative T observation.
    pub answered_negative: u64,
    /// All unreachable ordered pairs of distinct vertices.
    pub negative_total: u64,
    /// Reachable pairs decided by the high/max (or low/min) observations.
    pub answered_positive: u64,
    /// All reachable ordered pairs of distinct vertices.
    pub positive_total: u64,
}

impl AnalysisReport {
    pub fn rho_minus(&self) -> Option<f64> {
        ratio(self.witnessed_negative, self.negative_total)
    }

    /// Like [`rho_minus`](Self::rho_minus) but crediting every negative answer
    /// the ordering gives, not only the `pos(t) < pos(s)` witnesses.
    pub fn rho_minus_answered(&self) -> Option<f64> {
        ratio(self.answered_negative, self.negative_total)
    }

    pub fn rho_plus(&self) -> Option<f64> {
        ratio(self.answered_positive, self.positive_total)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Counts negative pairs witnessed and positive pairs answered by `ord`,
/// using `oracle` as ground truth over all ordered pairs.
pub fn ordering_analysis(ord: &ExtTopOrder, oracle: &ReachMatrix) -> AnalysisReport {
    let n = ord.len();
    let mut r = AnalysisReport {
        witnessed_negative: 0,
        answered_negative: 0,
        negative_total: 0,
        answered_positive: 0,
        positive_total: 0,
    };
    for s in 0..n as Vertex {
        for t in 0..n as Vertex {
            if s == t {
                continue;
            }
            if oracle.reaches(s, t) {
                r.positive_total += 1;
                if let Answer::Reachable(_) = ord.answer(s, t) {
                    r.answered_positive += 1;
                }
            } else {
                r.negative_total += 1;
                if let Answer::Unreachable(_) = ord.answer(s, t) {
                    r.answered_negative += 1;
                }
            }
            if ord.pos[t as usize] < ord.pos[s as usize] {
                r.witnessed_negative += 1;
            }
        }
    }
    r
}
