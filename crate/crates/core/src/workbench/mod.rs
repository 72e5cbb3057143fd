//! Experiment tooling: random DAGs, labelled query sets, timed benchmarks and
//! observation statistics.

mod bench;
mod generate;
mod queries;

pub use bench::{bench, stats_report, Algorithm, BenchConfig, BenchReport, BenchRow};
pub use generate::gen_random_dag;
pub use queries::{
    gen_queries, oracle_for, read_queries, write_queries, GroundTruth, QueryFile, QueryKind,
    QuerySet, SearchOracle,
};
