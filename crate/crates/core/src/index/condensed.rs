use std::sync::Arc;

use super::{
    build_index, AnsweredBy, Fallback, Hit, ObservationStats, Params, QueryOutcome, ReachIndex,
};
use crate::error::Result;
use crate::graph::{scc_condense, DiGraph, Vertex};
use crate::observation::Observation;

/// An index over the condensation of an arbitrary digraph, queried with
/// original vertex ids.
#[derive(Clone, Debug)]
pub struct CondensedIndex {
    scc_of: Vec<Vertex>,
    index: ReachIndex,
}

impl CondensedIndex {
    pub fn build(g: &DiGraph, params: Params) -> Result<Self> {
        let cond = scc_condense(g);
        let index = build_index(Arc::new(cond.dag), params)?;
        Ok(CondensedIndex {
            scc_of: cond.scc_of,
            index,
        })
    }

    /// Pairs an existing index of the condensation with the component map.
    pub fn from_parts(scc_of: Vec<Vertex>, index: ReachIndex) -> Self {
        debug_assert!(scc_of.iter().all(|&c| (c as usize) < index.n()));
        CondensedIndex { scc_of, index }
    }

    pub fn index(&self) -> &ReachIndex {
        &self.index
    }

    pub fn component(&self, v: Vertex) -> Vertex {
        self.scc_of[v as usize]
    }

    pub fn query<F: Fallback + ?Sized>(
        &self,
        s: Vertex,
        t: Vertex,
        fallback: &mut F,
        stats: &mut ObservationStats,
    ) -> QueryOutcome {
        let (cs, ct) = (self.component(s), self.component(t));
        if s != t && cs == ct {
            let hit = Hit {
                test: 1,
                observation: Observation::SameScc,
            };
            stats.record_hit(hit, true);
            return QueryOutcome {
                answer: true,
                answered_by: AnsweredBy::Observation(hit),
                work: 0,
            };
        }
        self.index.query(cs, ct, fallback, stats)
    }
}
