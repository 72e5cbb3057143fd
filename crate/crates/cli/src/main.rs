use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use oreach::baselines::DEFAULT_MATRIX_CAP;
use oreach::graph::{
    parse_graph, scc_condense, write_edge_list, write_gra, CondensationMap, GraphFormat,
    ParsedGraph,
};
use oreach::index::{CondensedIndex, FallbackKind, ObservationStats};
use oreach::workbench::{self, Algorithm, BenchConfig, QueryKind, QuerySet};
use oreach::{Params, ReachIndex, Vertex};

/// Reachability index workbench.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a uniform random DAG with edges from smaller to larger id.
    GenGraph {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "edge-list")]
        format: GraphFormat,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a labelled query set.
    GenQueries {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        kind: QueryKind,
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest closure matrix used as the oracle; per-pair search above it.
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        matrix_cap: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an index of the graph's condensation and write it to a file.
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out_index: PathBuf,
    },
    /// Answer the queries in a file, one `s t 0|1` line per query.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value = "pbibfs")]
        fallback: FallbackKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time algorithms on query sets and write a TSV report.
    Bench {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, num_args = 1.., required = true)]
        queries: Vec<PathBuf>,
        /// matrix, bfs, bibfs, oreach, oreach-bibfs, oreach-bfs
        #[arg(long, num_args = 1.., default_values = ["matrix", "oreach"])]
        algos: Vec<Algorithm>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Index seeds for the seeded algorithms.
        #[arg(long, num_args = 1.., default_values_t = [0u64, 1, 2, 3, 4])]
        seeds: Vec<u64>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = DEFAULT_MATRIX_CAP)]
        matrix_cap: u64,
        #[arg(long)]
        out_tsv: Option<PathBuf>,
        /// Also write the observation breakdown of the index runs.
        #[arg(long)]
        stats_tsv: Option<PathBuf>,
    },
    /// Observation statistics (first hit and overlap) of an index on query sets.
    Stats {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, num_args = 1.., required = true)]
        queries: Vec<PathBuf>,
        #[arg(long, default_value = "pbibfs")]
        fallback: FallbackKind,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Graph file; `.gra` files are read as gra, anything else as an edge list.
    #[arg(long)]
    graph: PathBuf,
    /// Override the format guessed from the extension.
    #[arg(long = "graph-format")]
    graph_format: Option<GraphFormat>,
    /// Write the original-to-dense id table of sparse inputs here.
    #[arg(long)]
    remap_out: Option<PathBuf>,
}

#[derive(Args)]
struct ParamArgs {
    /// Extended topological orderings.
    #[arg(long, default_value_t = 4)]
    t: usize,
    /// Supportive vertices.
    #[arg(long, default_value_t = 16)]
    k: usize,
    /// Candidate pool multiplier.
    #[arg(long, default_value_t = 75)]
    p: usize,
    /// Largest population of a slim level.
    #[arg(long, default_value_t = 8)]
    h: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ParamArgs {
    fn params(&self) -> Params {
        Params {
            t: self.t,
            k: self.k,
            p: self.p,
            h: self.h,
            seed: self.seed,
        }
    }
}

/// A parsed graph and its condensation.
struct Loaded {
    parsed: ParsedGraph,
    cond: CondensationMap,
}

fn load_parsed(args: &GraphArgs) -> Result<ParsedGraph> {
    let format = args.graph_format.unwrap_or_else(|| {
        match args.graph.extension().and_then(|e| e.to_str()) {
            Some("gra") => GraphFormat::Gra,
            _ => GraphFormat::EdgeList,
        }
    });
    let file =
        File::open(&args.graph).with_context(|| format!("opening {}", args.graph.display()))?;
    let parsed = parse_graph(BufReader::new(file), format)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    if parsed.dropped_edges() > 0 {
        eprintln!(
            "dropped {} self loops and {} duplicate edges",
            parsed.self_loops, parsed.duplicates
        );
    }
    if let Some(path) = &args.remap_out {
        if parsed.remap.is_none() {
            eprintln!("vertex ids are dense, writing an empty remap table");
        }
        parsed.write_remap(create(path)?)?;
    }
    Ok(parsed)
}

fn load(args: &GraphArgs) -> Result<Loaded> {
    let parsed = load_parsed(args)?;
    let cond = scc_condense(&parsed.graph);
    if !cond.is_trivial() {
        eprintln!(
            "condensed {} vertices into {} components",
            parsed.graph.n(),
            cond.component_count()
        );
    }
    Ok(Loaded { parsed, cond })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_set(path: &Path, translate: impl Fn(u64) -> Option<Vertex>) -> Result<QuerySet> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let raw = workbench::read_queries(BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    let label = path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    raw.into_set(label, translate)
        .with_context(|| format!("mapping {}", path.display()))
}

fn read_sets(
    paths: &[PathBuf],
    translate: impl Fn(u64) -> Option<Vertex>,
) -> Result<Vec<QuerySet>> {
    paths.iter().map(|p| read_set(p, &translate)).collect()
}

fn load_index(path: &Path, cond: CondensationMap) -> Result<CondensedIndex> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let index = ReachIndex::from_bytes(&bytes, cond.dag)
        .with_context(|| format!("loading {} (was it built from this graph?)", path.display()))?;
    Ok(CondensedIndex::from_parts(cond.scc_of, index))
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::GenGraph {
            n,
            m,
            seed,
            format,
            out,
        } => {
            let g = workbench::gen_random_dag(n, m, seed)?;
            let w = output(&out)?;
            match format {
                GraphFormat::EdgeList => write_edge_list(&g, w)?,
                GraphFormat::Gra => write_gra(&g, w)?,
            }
        }
        Cmd::GenQueries {
            graph,
            kind,
            count,
            seed,
            matrix_cap,
            out,
        } => {
            let parsed = load_parsed(&graph)?;
            let g = &parsed.graph;
            let mut oracle = workbench::oracle_for(g, matrix_cap)?;
            let set = workbench::gen_queries(g, kind, count, seed, oracle.as_mut())?;
            let name = |v: Vertex| parsed.remap.as_ref().map_or(v as u64, |r| r[v as usize]);
            workbench::write_queries(&set, output(&out)?, name)?;
        }
        Cmd::Build {
            graph,
            params,
            out_index,
        } => {
            let loaded = load(&graph)?;
            let start = Instant::now();
            let ix = oreach::build_index(Arc::new(loaded.cond.dag), params.params())?;
            let took = start.elapsed();
            let mut w = create(&out_index)?;
            ix.write_to(&mut w)?;
            w.flush()?;
            eprintln!(
                "indexed {} vertices in {:.1} ms, {} bytes",
                ix.n(),
                took.as_secs_f64() * 1e3,
                ix.serialized_len()
            );
        }
        Cmd::Query {
            index,
            graph,
            pairs,
            fallback,
            out,
        } => {
            let Loaded { parsed, cond } = load(&graph)?;
            let set = read_set(&pairs, parsed.translator())?;
            let ix = load_index(&index, cond)?;
            let mut fb = fallback.build(ix.index().n());
            let mut st = ObservationStats::new();
            let name = |v: Vertex| parsed.remap.as_ref().map_or(v as u64, |r| r[v as usize]);
            let mut w = output(&out)?;
            let mut wrong = 0usize;
            for (i, &(s, t)) in set.pairs.iter().enumerate() {
                let r = ix.query(s, t, fb.as_mut(), &mut st).answer;
                if set.expected.as_ref().is_some_and(|e| e[i] != r) {
                    wrong += 1;
                }
                writeln!(w, "{} {} {}", name(s), name(t), r as u8)?;
            }
            w.flush()?;
            if wrong > 0 {
                bail!("{wrong} answers disagree with the expected column");
            }
        }
        Cmd::Bench {
            graph,
            queries,
            algos,
            reps,
            seeds,
            params,
            matrix_cap,
            out_tsv,
            stats_tsv,
        } => {
            let Loaded { parsed, cond } = load(&graph)?;
            let dense = parsed.translator();
            let sets = read_sets(&queries, |x| dense(x).map(|v| cond.scc_of[v as usize]))?;
            let cfg = BenchConfig {
                reps,
                seeds,
                params: params.params(),
                matrix_cap,
                shuffle_seed: params.seed,
            };
            let dag = Arc::new(cond.dag);
            let report = workbench::bench(&dag, &algos, &sets, &cfg)?;
            output(&out_tsv)?.write_all(report.to_tsv().as_bytes())?;
            if let Some(path) = stats_tsv {
                create(&path)?.write_all(report.stats_tsv().as_bytes())?;
            }
        }
        Cmd::Stats {
            index,
            graph,
            queries,
            fallback,
            out,
        } => {
            let Loaded { parsed, cond } = load(&graph)?;
            let sets = read_sets(&queries, parsed.translator())?;
            let ix = load_index(&index, cond)?;
            let mut fb = fallback.build(ix.index().n());
            let mut all = Vec::new();
            for set in &sets {
                let mut st = ObservationStats::with_overlap();
                for &(s, t) in &set.pairs {
                    ix.query(s, t, fb.as_mut(), &mut st);
                }
                all.push(st);
            }
            let report = workbench::stats_report(sets.iter().map(|s| s.label.as_str()).zip(&all));
            output(&out)?.write_all(report.as_bytes())?;
        }
    }
    Ok(())
}
