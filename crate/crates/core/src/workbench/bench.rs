use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

use super::QuerySet;
use crate::baselines::{build_matrix_capped, DEFAULT_MATRIX_CAP};
use crate::graph::{Bfs, BiSearch, DiGraph, Vertex};
use crate::index::{build_index, FallbackKind, ObservationStats, Params, TESTS};
use crate::observation::Observation;
use crate::{seeded_rng, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Full transitive-closure matrix.
    Matrix,
    Bfs,
    BiBfs,
    /// The observation index with the given fallback.
    OReach(FallbackKind),
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Matrix => "matrix",
            Algorithm::Bfs => "bfs",
            Algorithm::BiBfs => "bibfs",
            Algorithm::OReach(FallbackKind::PrunedBiBfs) => "oreach",
            Algorithm::OReach(FallbackKind::BiBfs) => "oreach-bibfs",
            Algorithm::OReach(FallbackKind::Bfs) => "oreach-bfs",
        }
    }

    /// Whether results depend on the index seed.
    pub fn is_seeded(self) -> bool {
        matches!(self, Algorithm::OReach(_))
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "matrix" => Algorithm::Matrix,
            "bfs" => Algorithm::Bfs,
            "bibfs" => Algorithm::BiBfs,
            "oreach" | "oreach-pbibfs" => Algorithm::OReach(FallbackKind::PrunedBiBfs),
            "oreach-bibfs" => Algorithm::OReach(FallbackKind::BiBfs),
            "oreach-bfs" => Algorithm::OReach(FallbackKind::Bfs),
            _ => return Err(Error::Format(format!("unknown algorithm '{s}'"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    /// Timed passes over each query set, each in a fresh random order.
    pub reps: usize,
    /// Index seeds for seeded algorithms.
    pub seeds: Vec<u64>,
    /// Index parameters; the seed is overridden by `seeds`.
    pub params: Params,
    pub matrix_cap: u64,
    /// Master seed of the per-repetition query permutations.
    pub shuffle_seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            reps: 5,
            seeds: (0..5).collect(),
            params: Params::default(),
            matrix_cap: DEFAULT_MATRIX_CAP,
            shuffle_seed: 0,
        }
    }
}

/// One (algorithm, query set) measurement.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub algorithm: String,
    pub query_set: String,
    pub queries: usize,
    pub reps: usize,
    pub seeds: usize,
    /// `median` or `mean-of-medians` (median per seed, mean over seeds).
    pub aggregation: &'static str,
    /// Average time per query in microseconds; `None` for an empty set.
    pub avg_query_us: Option<f64>,
    pub build_ms: f64,
    pub index_bytes: u64,
    pub fallback_rate: Option<f64>,
    /// Observation counters from one untimed pass per seed.
    pub stats: Option<ObservationStats>,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<BenchRow>,
}

const COLUMNS: [&str; 11] = [
    "algorithm",
    "query_set",
    "queries",
    "reps",
    "seeds",
    "aggregation",
    "avg_query_us",
    "build_ms",
    "index_bytes",
    "fallback_rate",
    "n",
];

fn opt(x: Option<f64>, prec: usize) -> String {
    x.map_or_else(|| "NA".into(), |v| format!("{v:.prec$}"))
}

impl BenchReport {
    /// One header row, one row per (algorithm, query set). Undefined values are
    /// written as `NA`.
    pub fn to_tsv(&self) -> String {
        let mut out = COLUMNS.join("\t");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{}\t{}",
                r.algorithm,
                r.query_set,
                r.queries,
                r.reps,
                r.seeds,
                r.aggregation,
                opt(r.avg_query_us, 4),
                r.build_ms,
                r.index_bytes,
                opt(r.fallback_rate, 6),
                self.n,
            );
        }
        out
    }

    /// Observation breakdown of every row that has one.
    pub fn stats_tsv(&self) -> String {
        let labels: Vec<(String, &ObservationStats)> = self
            .rows
            .iter()
            .filter_map(|r| {
                r.stats
                    .as_ref()
                    .map(|s| (format!("{}/{}", r.algorithm, r.query_set), s))
            })
            .collect();
        stats_report(labels.iter().map(|(l, s)| (l.as_str(), *s)))
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let h = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[h]
    } else {
        (xs[h - 1] + xs[h]) / 2.0
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Times `answer` over every repetition's permutation and checks each result
/// against the expected bits. Returns the median time per query in µs.
fn time_set(
    name: &str,
    set: &QuerySet,
    perms: &[Vec<usize>],
    answers: &mut Vec<bool>,
    mut answer: impl FnMut(Vertex, Vertex) -> bool,
) -> Result<Option<f64>> {
    if set.is_empty() {
        return Ok(None);
    }
    let mut times = Vec::with_capacity(perms.len());
    for perm in perms {
        answers.clear();
        let start = Instant::now();
        for &i in perm {
            let (s, t) = set.pairs[i];
            answers.push(answer(s, t));
        }
        let elapsed = start.elapsed();
        times.push(elapsed.as_secs_f64() * 1e6 / set.len() as f64);
        if let Some(expected) = &set.expected {
            for (&i, &got) in perm.iter().zip(answers.iter()) {
                if got != expected[i] {
                    let (s, t) = set.pairs[i];
                    return Err(Error::Mismatch {
                        algorithm: name.to_string(),
                        s,
                        t,
                        answer: got,
                        expected: expected[i],
                    });
                }
            }
        }
    }
    Ok(Some(median(&mut times)))
}

/// Runs every algorithm on every query set.
///
/// Each repetition processes a set sequentially in its own seeded random order
/// and is timed as a whole. Deterministic algorithms report the median over
/// repetitions; seeded ones the mean over seeds of the per-seed medians. Any
/// answer that disagrees with a set's expected bits aborts with
/// [`Error::Mismatch`].
pub fn bench(
    dag: &Arc<DiGraph>,
    algorithms: &[Algorithm],
    sets: &[QuerySet],
    cfg: &BenchConfig,
) -> Result<BenchReport> {
    let n = dag.n();
    for set in sets {
        if let Some(&(s, t)) = set
            .pairs
            .iter()
            .find(|&&(s, t)| s as usize >= n || t as usize >= n)
        {
            return Err(Error::Format(format!(
                "query ({s}, {t}) in set '{}' is outside the graph",
                set.label
            )));
        }
        if set.expected.as_ref().is_some_and(|e| e.len() != set.len()) {
            return Err(Error::Format(format!(
                "set '{}' has a wrong number of labels",
                set.label
            )));
        }
    }
    if cfg.reps == 0 {
        return Err(Error::Format("at least one repetition is required".into()));
    }
    let perms: Vec<Vec<Vec<usize>>> = sets
        .iter()
        .map(|set| {
            (0..cfg.reps)
                .map(|rep| {
                    let mut p: Vec<usize> = (0..set.len()).collect();
                    p.shuffle(&mut seeded_rng(cfg.shuffle_seed, rep as u64));
                    p
                })
                .collect()
        })
        .collect();
    let mut answers = Vec::new();
    let mut rows = Vec::new();

    for &alg in algorithms {
        let name = alg.name();
        let row = |set: &QuerySet, avg, build_ms, index_bytes| BenchRow {
            algorithm: name.to_string(),
            query_set: set.label.clone(),
            queries: set.len(),
            reps: cfg.reps,
            seeds: 1,
            aggregation: "median",
            avg_query_us: avg,
            build_ms,
            index_bytes,
            fallback_rate: None,
            stats: None,
        };
        match alg {
            Algorithm::Matrix => {
                let start = Instant::now();
                let mx = build_matrix_capped(dag, cfg.matrix_cap)?;
                let build = ms(start.elapsed());
                for (set, p) in sets.iter().zip(&perms) {
                    let avg = time_set(name, set, p, &mut answers, |s, t| mx.reaches(s, t))?;
                    rows.push(row(set, avg, build, mx.size_bytes()));
                }
            }
            Algorithm::Bfs => {
                let mut bfs = Bfs::new(n);
                for (set, p) in sets.iter().zip(&perms) {
                    let avg = time_set(name, set, p, &mut answers, |s, t| bfs.search(dag, s, t).0)?;
                    rows.push(row(set, avg, 0.0, 0));
                }
            }
            Algorithm::BiBfs => {
                let mut bi = BiSearch::new(n);
                for (set, p) in sets.iter().zip(&perms) {
                    let avg = time_set(name, set, p, &mut answers, |s, t| {
                        bi.search(dag, s, t).reachable
                    })?;
                    rows.push(row(set, avg, 0.0, 0));
                }
            }
            Algorithm::OReach(kind) => {
                let seeds: &[u64] = if cfg.seeds.is_empty() {
                    std::slice::from_ref(&cfg.params.seed)
                } else {
                    &cfg.seeds
                };
                let mut per_set: Vec<(Vec<f64>, ObservationStats)> = sets
                    .iter()
                    .map(|_| (Vec::new(), ObservationStats::with_overlap()))
                    .collect();
                let mut build_total = 0.0;
                let mut bytes = 0;
                for &seed in seeds {
                    let params = Params { seed, ..cfg.params };
                    let start = Instant::now();
                    let ix = build_index(Arc::clone(dag), params)?;
                    build_total += ms(start.elapsed());
                    bytes = ix.serialized_len() as u64;
                    let mut fb = kind.build(n);
                    for ((set, p), (avgs, stats)) in sets.iter().zip(&perms).zip(&mut per_set) {
                        let avg = time_set(name, set, p, &mut answers, |s, t| {
                            ix.reaches(s, t, fb.as_mut())
                        })?;
                        avgs.extend(avg);
                        for &(s, t) in &set.pairs {
                            ix.query(s, t, fb.as_mut(), stats);
                        }
                    }
                }
                for (set, (avgs, stats)) in sets.iter().zip(per_set) {
                    let mean =
                        (!avgs.is_empty()).then(|| avgs.iter().sum::<f64>() / avgs.len() as f64);
                    rows.push(BenchRow {
                        seeds: seeds.len(),
                        aggregation: "mean-of-medians",
                        fallback_rate: stats.fallback_rate(),
                        stats: Some(stats),
                        ..row(set, mean, build_total / seeds.len() as f64, bytes)
                    });
                }
            }
        }
    }
    Ok(BenchReport {
        n,
        m: dag.m(),
        rows,
    })
}

/// Observations each test can report, in test order.
const TEST_OBSERVATIONS: [&[Observation]; TESTS as usize] = {
    use Observation::*;
    [
        &[Trivial, SameScc],
        &[B5, B6],
        &[S1],
        &[B4, T1, T2, T3],
        &[S2, S3],
        &[B4, T1, T2, T3, T4, T5, T6],
        &[B2],
    ]
};

/// Observation statistics as TSV: one row per (query set, test, observation)
/// with first-hit and overlap counts and their shares of the set's queries,
/// then a fallback row. Sets without queries contribute no rows.
pub fn stats_report<'a>(sets: impl IntoIterator<Item = (&'a str, &'a ObservationStats)>) -> String {
    let mut out = String::from(
        "query_set\ttest\tobservation\tfirst_hit\tfirst_hit_share\toverlap\toverlap_share\n",
    );
    for (label, st) in sets {
        let q = st.queries();
        if q == 0 {
            continue;
        }
        let share = |x: u64| x as f64 / q as f64;
        for (i, observations) in TEST_OBSERVATIONS.iter().enumerate() {
            let test = i as u8 + 1;
            for &obs in *observations {
                let hits = st.first_hit(test, obs);
                let _ = write!(out, "{label}\t{test}\t{obs}\t{hits}\t{:.6}\t", share(hits));
                if st.track_overlap {
                    let o = st.overlap(obs);
                    let _ = writeln!(out, "{o}\t{:.6}", share(o));
                } else {
                    out.push_str("NA\tNA\n");
                }
            }
        }
        let fb = st.fallback_count();
        let _ = writeln!(out, "{label}\t-\tfallback\t{fb}\t{:.6}\tNA\tNA", share(fb));
    }
    out
}
