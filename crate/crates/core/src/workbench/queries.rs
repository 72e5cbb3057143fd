use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::baselines::{build_matrix_capped, matrix_bytes, ReachMatrix};
use crate::graph::{BiSearch, DiGraph, Vertex};
use crate::{seeded_rng, Error, Result};

/// Exact reachability used to label generated queries.
pub trait GroundTruth {
    fn reaches(&mut self, s: Vertex, t: Vertex) -> bool;
}

impl GroundTruth for ReachMatrix {
    fn reaches(&mut self, s: Vertex, t: Vertex) -> bool {
        ReachMatrix::reaches(self, s, t)
    }
}

/// Per-pair bidirectional BFS, for graphs whose closure does not fit in memory.
pub struct SearchOracle<'g> {
    graph: &'g DiGraph,
    search: BiSearch,
}

impl<'g> SearchOracle<'g> {
    pub fn new(graph: &'g DiGraph) -> Self {
        SearchOracle {
            graph,
            search: BiSearch::new(graph.n()),
        }
    }
}

impl GroundTruth for SearchOracle<'_> {
    fn reaches(&mut self, s: Vertex, t: Vertex) -> bool {
        self.search.search(self.graph, s, t).reachable
    }
}

/// The transitive-closure matrix when it fits in `cap_bytes`, per-pair search
/// otherwise.
pub fn oracle_for(g: &DiGraph, cap_bytes: u64) -> Result<Box<dyn GroundTruth + '_>> {
    if matrix_bytes(g.n()) <= cap_bytes {
        Ok(Box::new(build_matrix_capped(g, cap_bytes)?))
    } else {
        Ok(Box::new(SearchOracle::new(g)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Positive,
    Negative,
    Random,
    Mixed,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Positive => "positive",
            QueryKind::Negative => "negative",
            QueryKind::Random => "random",
            QueryKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive" | "pos" => Ok(QueryKind::Positive),
            "negative" | "neg" => Ok(QueryKind::Negative),
            "random" => Ok(QueryKind::Random),
            "mixed" => Ok(QueryKind::Mixed),
            _ => Err(Error::Format(format!("unknown query kind '{s}'"))),
        }
    }
}

/// A list of queries, optionally with their true answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySet {
    /// Name used in reports.
    pub label: String,
    pub pairs: Vec<(Vertex, Vertex)>,
    pub kind: QueryKind,
    pub seed: u64,
    pub expected: Option<Vec<bool>>,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn positives(&self) -> Option<usize> {
        self.expected
            .as_ref()
            .map(|e| e.iter().filter(|&&b| b).count())
    }
}

/// Samples `count` uniform pairs `s != t`, keeping only those of the requested
/// kind. A mixed set holds `count` positive and `count` negative queries in
/// random order.
///
/// Fails with [`Error::Infeasible`] once `n * (n - 1)` consecutive samples have
/// been rejected.
pub fn gen_queries(
    g: &DiGraph,
    kind: QueryKind,
    count: usize,
    seed: u64,
    oracle: &mut dyn GroundTruth,
) -> Result<QuerySet> {
    let (pairs, expected) = match kind {
        QueryKind::Mixed => {
            let (mut pairs, mut expected) = sample(g, Some(true), count, seed, 1, oracle)?;
            let (np, ne) = sample(g, Some(false), count, seed, 2, oracle)?;
            pairs.extend(np);
            expected.extend(ne);
            let mut perm: Vec<usize> = (0..pairs.len()).collect();
            perm.shuffle(&mut seeded_rng(seed, 3));
            (
                perm.iter().map(|&i| pairs[i]).collect(),
                perm.iter().map(|&i| expected[i]).collect(),
            )
        }
        QueryKind::Positive => sample(g, Some(true), count, seed, 0, oracle)?,
        QueryKind::Negative => sample(g, Some(false), count, seed, 0, oracle)?,
        QueryKind::Random => sample(g, None, count, seed, 0, oracle)?,
    };
    Ok(QuerySet {
        label: kind.name().to_string(),
        pairs,
        kind,
        seed,
        expected: Some(expected),
    })
}

type Labelled = (Vec<(Vertex, Vertex)>, Vec<bool>);

fn sample(
    g: &DiGraph,
    want: Option<bool>,
    count: usize,
    seed: u64,
    stream: u64,
    oracle: &mut dyn GroundTruth,
) -> Result<Labelled> {
    let n = g.n() as u64;
    let mut pairs = Vec::with_capacity(count);
    let mut expected = Vec::with_capacity(count);
    if count == 0 {
        return Ok((pairs, expected));
    }
    if n < 2 {
        return Err(Error::Infeasible(format!(
            "no pair of distinct vertices in a graph with {n} vertices"
        )));
    }
    let budget = n * (n - 1);
    let mut rejected = 0u64;
    let mut rng = seeded_rng(seed, stream);
    while pairs.len() < count {
        let s = rng.gen_range(0..n) as Vertex;
        let t = rng.gen_range(0..n - 1) as Vertex;
        let t = if t >= s { t + 1 } else { t };
        let r = oracle.reaches(s, t);
        if want.is_some_and(|w| w != r) {
            rejected += 1;
            if rejected >= budget {
                let what = if r { "negative" } else { "positive" };
                return Err(Error::Infeasible(format!(
                    "no {what} query found in {budget} consecutive samples"
                )));
            }
            continue;
        }
        rejected = 0;
        pairs.push((s, t));
        expected.push(r);
    }
    Ok((pairs, expected))
}

/// Writes `s t expected` lines (or `s t` without labels) after a comment
/// header. `name` maps vertices to the ids written.
pub fn write_queries<W: Write>(
    set: &QuerySet,
    mut w: W,
    name: impl Fn(Vertex) -> u64,
) -> Result<()> {
    writeln!(
        w,
        "# kind={} seed={} count={}",
        set.kind,
        set.seed,
        set.pairs.len()
    )?;
    for (i, &(s, t)) in set.pairs.iter().enumerate() {
        match &set.expected {
            Some(e) => writeln!(w, "{} {} {}", name(s), name(t), e[i] as u8)?,
            None => writeln!(w, "{} {}", name(s), name(t))?,
        }
    }
    w.flush()?;
    Ok(())
}

/// Query file contents before the ids are mapped onto a graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryFile {
    pub pairs: Vec<(u64, u64)>,
    pub expected: Option<Vec<bool>>,
    pub kind: Option<QueryKind>,
    pub seed: Option<u64>,
}

impl QueryFile {
    /// Maps file ids through `translate`; unknown ids are a format error.
    pub fn into_set(
        self,
        label: impl Into<String>,
        translate: impl Fn(u64) -> Option<Vertex>,
    ) -> Result<QuerySet> {
        let map = |x: u64| {
            translate(x)
                .ok_or_else(|| Error::Format(format!("query vertex {x} is not in the graph")))
        };
        let pairs = self
            .pairs
            .iter()
            .map(|&(s, t)| Ok((map(s)?, map(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(QuerySet {
            label: label.into(),
            pairs,
            kind: self.kind.unwrap_or(QueryKind::Random),
            seed: self.seed.unwrap_or(0),
            expected: self.expected,
        })
    }
}

/// Parses a query file. The expected column must be present on every line or
/// on none.
pub fn read_queries<R: BufRead>(reader: R) -> Result<QueryFile> {
    let mut file = QueryFile::default();
    let mut bits = Vec::new();
    let mut labelled = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            for kv in comment.split_whitespace() {
                match kv.split_once('=') {
                    Some(("kind", v)) => file.kind = v.parse().ok(),
                    Some(("seed", v)) => file.seed = v.parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno, msg };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(format!("expected 's t [expected]', got '{line}'")));
        }
        let id = |f: &str| {
            f.parse::<u64>()
                .map_err(|_| err(format!("bad vertex id '{f}'")))
        };
        file.pairs.push((id(fields[0])?, id(fields[1])?));
        let has_bit = fields.len() == 3;
        if *labelled.get_or_insert(has_bit) != has_bit {
            return Err(err("expected column present on some lines only".into()));
        }
        if has_bit {
            bits.push(match fields[2] {
                "0" => false,
                "1" => true,
                f => return Err(err(format!("expected bit must be 0 or 1, got '{f}'"))),
            });
        }
    }
    if labelled == Some(true) {
        file.expected = Some(bits);
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::build_matrix;
    use crate::testutil::{brute_closure, random_dag};

    fn diamond() -> DiGraph {
        DiGraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn negative_diamond() {
        let g = diamond();
        let mut mx = build_matrix(&g).unwrap();
        let set = gen_queries(&g, QueryKind::Negative, 7, 4, &mut mx).unwrap();
        assert_eq!(set.len(), 7);
        let closure = brute_closure(&g);
        for &(s, t) in &set.pairs {
            assert_ne!(s, t);
            assert!(!closure[s as usize][t as usize]);
        }
        assert_eq!(set.positives(), Some(0));
    }

    #[test]
    fn positive_on_edgeless_is_infeasible() {
        let g = DiGraph::new(5, []);
        let mut mx = build_matrix(&g).unwrap();
        let r = gen_queries(&g, QueryKind::Positive, 1, 0, &mut mx);
        assert!(matches!(r, Err(Error::Infeasible(_))));
        let r = gen_queries(&DiGraph::new(1, []), QueryKind::Random, 1, 0, &mut mx);
        assert!(matches!(r, Err(Error::Infeasible(_))));
        let empty = gen_queries(&g, QueryKind::Positive, 0, 0, &mut mx).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn mixed_is_half_positive() {
        let g = random_dag(40, 120, 2);
        let mut mx = build_matrix(&g).unwrap();
        let set = gen_queries(&g, QueryKind::Mixed, 100, 9, &mut mx).unwrap();
        assert_eq!(set.len(), 200);
        assert_eq!(set.positives(), Some(100));
        let closure = brute_closure(&g);
        let e = set.expected.as_ref().unwrap();
        for (i, &(s, t)) in set.pairs.iter().enumerate() {
            assert_eq!(closure[s as usize][t as usize], e[i]);
        }
        // shuffled rather than positives first
        assert!(e[..100].iter().any(|b| !b));
    }

    #[test]
    fn labels_match_under_both_oracles() {
        let g = random_dag(120, 500, 5);
        let closure = brute_closure(&g);
        let mut search = SearchOracle::new(&g);
        for kind in [QueryKind::Positive, QueryKind::Negative, QueryKind::Random] {
            let a = gen_queries(&g, kind, 300, 1, &mut search).unwrap();
            let mut mx = oracle_for(&g, u64::MAX).unwrap();
            let b = gen_queries(&g, kind, 300, 1, mx.as_mut()).unwrap();
            assert_eq!(a, b);
            for (i, &(s, t)) in a.pairs.iter().enumerate() {
                let r = closure[s as usize][t as usize];
                assert_eq!(a.expected.as_ref().unwrap()[i], r);
                match kind {
                    QueryKind::Positive => assert!(r),
                    QueryKind::Negative => assert!(!r),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn file_round_trip() {
        let g = random_dag(30, 60, 1);
        let mut mx = build_matrix(&g).unwrap();
        let set = gen_queries(&g, QueryKind::Mixed, 10, 77, &mut mx).unwrap();
        let mut buf = Vec::new();
        write_queries(&set, &mut buf, |v| v as u64 + 100).unwrap();
        let file = read_queries(&buf[..]).unwrap();
        assert_eq!(file.kind, Some(QueryKind::Mixed));
        assert_eq!(file.seed, Some(77));
        let back = file
            .into_set("mixed", |x| x.checked_sub(100).map(|v| v as Vertex))
            .unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn file_errors() {
        let ok = read_queries("# x\n".as_bytes()).unwrap();
        assert!(ok.pairs.is_empty() && ok.expected.is_none());
        let plain = read_queries("1 2\n\n3 4\n".as_bytes()).unwrap();
        assert_eq!(plain.pairs, vec![(1, 2), (3, 4)]);
        assert!(plain.expected.is_none());
        for bad in ["1\n", "1 2 3 4\n", "1 x\n", "1 2 1\n3 4\n", "1 2 5\n"] {
            assert!(
                matches!(read_queries(bad.as_bytes()), Err(Error::Parse { .. })),
                "{bad}"
            );
        }
        let unknown = read_queries("1 9\n".as_bytes())
            .unwrap()
            .into_set("q", |x| (x < 5).then_some(x as Vertex));
        assert!(matches!(unknown, Err(Error::Format(_))));
    }
}
