use super::{DiGraph, Direction, Vertex};

/// Visited flags that clear in O(1) by bumping an epoch.
#[derive(Clone, Debug)]
pub struct VisitMarks {
    marks: Vec<u32>,
    epoch: u32,
}

impl VisitMarks {
    pub fn new(n: usize) -> Self {
        VisitMarks {
            marks: vec![0; n],
            epoch: 1,
        }
    }

    pub fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.marks.fill(0);
            self.epoch = 1;
        }
    }

    /// Marks `v`; returns false if it was already marked in this epoch.
    #[inline]
    pub fn mark(&mut self, v: Vertex) -> bool {
        let slot = &mut self.marks[v as usize];
        let fresh = *slot != self.epoch;
        *slot = self.epoch;
        fresh
    }

    #[inline]
    pub fn is_marked(&self, v: Vertex) -> bool {
        self.marks[v as usize] == self.epoch
    }
}

/// Reusable breadth-first search.
#[derive(Clone, Debug)]
pub struct Bfs {
    marks: VisitMarks,
    queue: Vec<Vertex>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs {
            marks: VisitMarks::new(n),
            queue: Vec::new(),
        }
    }

    /// Calls `visit` on every vertex reachable from `root` along `dir`,
    /// `root` included. Returns how many there were.
    pub fn for_each_reachable(
        &mut self,
        g: &DiGraph,
        root: Vertex,
        dir: Direction,
        mut visit: impl FnMut(Vertex),
    ) -> usize {
        self.marks.reset();
        self.queue.clear();
        self.marks.mark(root);
        self.queue.push(root);
        let mut head = 0;
        while let Some(&v) = self.queue.get(head) {
            head += 1;
            visit(v);
            for &w in g.neighbors(v, dir) {
                if self.marks.mark(w) {
                    self.queue.push(w);
                }
            }
        }
        self.queue.len()
    }

    /// Forward search from `s` that stops as soon as `t` is discovered.
    /// Returns the answer and the number of vertices expanded.
    pub fn search(&mut self, g: &DiGraph, s: Vertex, t: Vertex) -> (bool, u64) {
        if s == t {
            return (true, 0);
        }
        self.marks.reset();
        self.queue.clear();
        self.marks.mark(s);
        self.queue.push(s);
        let mut head = 0;
        while let Some(&v) = self.queue.get(head) {
            head += 1;
            for &w in g.out_neighbors(v) {
                if w == t {
                    return (true, head as u64);
                }
                if self.marks.mark(w) {
                    self.queue.push(w);
                }
            }
        }
        (false, head as u64)
    }
}

/// Result of an exact search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub reachable: bool,
    /// Vertices whose adjacency was scanned.
    pub expanded: u64,
    /// Adjacency entries inspected.
    pub scanned: u64,
}

/// Reusable bidirectional BFS.
#[derive(Clone, Debug)]
pub struct BiSearch {
    fwd: VisitMarks,
    bwd: VisitMarks,
    fq: Vec<Vertex>,
    bq: Vec<Vertex>,
}

impl BiSearch {
    pub fn new(n: usize) -> Self {
        BiSearch {
            fwd: VisitMarks::new(n),
            bwd: VisitMarks::new(n),
            fq: Vec::new(),
            bq: Vec::new(),
        }
    }

    /// Plain bidirectional search for `s ->* t`.
    pub fn search(&mut self, g: &DiGraph, s: Vertex, t: Vertex) -> Resolution {
        self.search_pruned(g, s, t, |_, _| None)
    }

    /// Alternates one forward and one backward expansion until the searches
    /// meet or either frontier runs dry.
    ///
    /// `probe` sees every newly discovered vertex together with the side that
    /// found it. `Some(true)` settles the query as reachable, `Some(false)`
    /// drops the vertex, `None` enqueues it.
    pub fn search_pruned(
        &mut self,
        g: &DiGraph,
        s: Vertex,
        t: Vertex,
        mut probe: impl FnMut(Direction, Vertex) -> Option<bool>,
    ) -> Resolution {
        let mut res = Resolution {
            reachable: s == t,
            expanded: 0,
            scanned: 0,
        };
        if s == t {
            return res;
        }
        self.fwd.reset();
        self.bwd.reset();
        self.fq.clear();
        self.bq.clear();
        self.fwd.mark(s);
        self.bwd.mark(t);
        self.fq.push(s);
        self.bq.push(t);
        let (mut fh, mut bh) = (0, 0);
        let mut dir = Direction::Forward;

        while fh < self.fq.len() && bh < self.bq.len() {
            let (u, own, other, queue) = match dir {
                Direction::Forward => {
                    fh += 1;
                    (self.fq[fh - 1], &mut self.fwd, &self.bwd, &mut self.fq)
                }
                Direction::Backward => {
                    bh += 1;
                    (self.bq[bh - 1], &mut self.bwd, &self.fwd, &mut self.bq)
                }
            };
            res.expanded += 1;
            for &w in g.neighbors(u, dir) {
                res.scanned += 1;
                if other.is_marked(w) {
                    res.reachable = true;
                    return res;
                }
                if !own.mark(w) {
                    continue;
                }
                match probe(dir, w) {
                    Some(true) => {
                        res.reachable = true;
                        return res;
                    }
                    Some(false) => {}
                    None => queue.push(w),
                }
            }
            dir = dir.reverse();
        }
        res
    }
}
