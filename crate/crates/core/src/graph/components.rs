use std::collections::VecDeque;

use super::{DiGraph, Vertex};

/// Strongly connected components and the condensed DAG.
///
/// Component ids are numbered in topological order of the condensation, so every
/// condensed edge goes from a smaller to a larger id.
#[derive(Clone, Debug)]
pub struct CondensationMap {
    pub scc_of: Vec<Vertex>,
    pub dag: DiGraph,
    /// Smallest original vertex of each component.
    pub rep_of: Vec<Vertex>,
}

impl CondensationMap {
    pub fn component_count(&self) -> usize {
        self.rep_of.len()
    }

    pub fn same_component(&self, u: Vertex, v: Vertex) -> bool {
        self.scc_of[u as usize] == self.scc_of[v as usize]
    }

    /// True when every component is a single vertex.
    pub fn is_trivial(&self) -> bool {
        self.rep_of.len() == self.scc_of.len()
    }
}

const UNVISITED: u32 = u32::MAX;

/// Tarjan's algorithm with an explicit call stack, O(n + m).
pub fn scc_condense(g: &DiGraph) -> CondensationMap {
    let n = g.n();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<Vertex> = Vec::new();
    // (vertex, next out-neighbor cursor)
    let mut calls: Vec<(Vertex, usize)> = Vec::new();
    let mut found = vec![UNVISITED; n];
    let mut found_count = 0u32;
    let mut next_index = 0u32;

    for root in g.vertices() {
        if index[root as usize] != UNVISITED {
            continue;
        }
        calls.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut cursor)) = calls.last_mut() {
            let vi = v as usize;
            let succ = g.out_neighbors(v);
            if let Some(&w) = succ.get(*cursor) {
                *cursor += 1;
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = next_index;
                    low[wi] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    calls.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
                continue;
            }

            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                let pi = parent as usize;
                low[pi] = low[pi].min(low[vi]);
            }
            if low[vi] == index[vi] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w as usize] = false;
                    found[w as usize] = found_count;
                    if w == v {
                        break;
                    }
                }
                found_count += 1;
            }
        }
    }

    // Tarjan emits components sinks-first; flip to a topological numbering.
    let count = found_count as usize;
    let scc_of: Vec<Vertex> = found.iter().map(|&c| found_count - 1 - c).collect();
    let mut rep_of = vec![UNVISITED; count];
    for v in (0..n).rev() {
        rep_of[scc_of[v] as usize] = v as Vertex;
    }
    let dag = DiGraph::new(
        count,
        g.edges()
            .map(|(u, v)| (scc_of[u as usize], scc_of[v as usize]))
            .filter(|(a, b)| a != b),
    );
    CondensationMap {
        scc_of,
        dag,
        rep_of,
    }
}

/// Weakly connected component id per vertex, dense in `0..#components`.
pub fn weak_components(g: &DiGraph) -> Vec<u32> {
    let n = g.n();
    let mut comp = vec![UNVISITED; n];
    let mut queue = VecDeque::new();
    let mut next = 0u32;
    for root in g.vertices() {
        if comp[root as usize] != UNVISITED {
            continue;
        }
        comp[root as usize] = next;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for &w in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                if comp[w as usize] == UNVISITED {
                    comp[w as usize] = next;
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    comp
}
