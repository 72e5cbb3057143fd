//! Text graph formats.
//!
//! * edge list: one `u v` pair per line, `#`/`%` comment lines ignored;
//! * gra: an optional header line, the vertex count `n`, then one
//!   `i: j1 j2 ... #` line per vertex listing its out-neighbors.
//!
//! An edge list may declare its vertex count in a leading `# n=<count>` comment
//! (as [`write_edge_list`] does), which keeps trailing isolated vertices. Without
//! it, ids that do not cover `0..=max` are treated as sparse and remapped to
//! `0..n` in ascending order of original id; the table is kept so query files
//! written against the original ids can be translated.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use super::{DiGraph, Vertex};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Gra,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "edge-list" | "edgelist" | "el" => Ok(GraphFormat::EdgeList),
            "gra" => Ok(GraphFormat::Gra),
            other => Err(format!(
                "unknown graph format `{other}` (expected edge-list or gra)"
            )),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: DiGraph,
    pub self_loops: usize,
    pub duplicates: usize,
    /// `remap[dense] = original`, present only when the input ids were sparse.
    pub remap: Option<Vec<u64>>,
}

impl ParsedGraph {
    /// Translates an id as written in the input file to its dense id.
    pub fn translator(&self) -> impl Fn(u64) -> Option<Vertex> + '_ {
        let table: Option<HashMap<u64, Vertex>> = self.remap.as_ref().map(|r| {
            r.iter()
                .enumerate()
                .map(|(dense, &orig)| (orig, dense as Vertex))
                .collect()
        });
        let n = self.graph.n() as u64;
        move |orig| match &table {
            Some(t) => t.get(&orig).copied(),
            None => (orig < n).then_some(orig as Vertex),
        }
    }

    /// Writes the remap table as `original dense` lines. No-op for dense input.
    pub fn write_remap<W: Write>(&self, mut w: W) -> Result<()> {
        if let Some(remap) = &self.remap {
            writeln!(w, "# original dense")?;
            for (dense, orig) in remap.iter().enumerate() {
                writeln!(w, "{orig} {dense}")?;
            }
        }
        Ok(())
    }

    pub fn dropped_edges(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

pub fn parse_graph<R: BufRead>(reader: R, format: GraphFormat) -> Result<ParsedGraph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(reader),
        GraphFormat::Gra => parse_gra(reader),
    }
}

fn is_comment(line: &str) -> bool {
    line.is_empty() || line.starts_with('#') || line.starts_with('%')
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    let id: u64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a vertex id, found `{tok}`"),
    })?;
    if id > u32::MAX as u64 {
        return Err(Error::Parse {
            line,
            msg: format!("vertex id {id} does not fit in 32 bits"),
        });
    }
    Ok(id)
}

/// Reads `n=<count>` out of a `# n=<count> ...` comment.
fn declared_count(comment: &str) -> Option<u64> {
    comment
        .trim_start_matches(['#', '%'])
        .split_whitespace()
        .find_map(|tok| tok.strip_prefix("n="))
        .and_then(|c| c.parse().ok())
}

fn parse_edge_list<R: BufRead>(reader: R) -> Result<ParsedGraph> {
    let mut raw = Vec::new();
    let mut declared = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if is_comment(line) {
            if raw.is_empty() && declared.is_none() {
                declared = declared_count(line);
            }
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(a), Some(b), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected `u v`, found `{line}`"),
            });
        };
        raw.push((parse_id(a, i + 1)?, parse_id(b, i + 1)?));
    }

    if let Some(n) = declared {
        if n > u32::MAX as u64 + 1 {
            return Err(Error::Format(format!(
                "vertex count {n} exceeds 32-bit ids"
            )));
        }
        if let Some(&(u, v)) = raw.iter().find(|&&(u, v)| u.max(v) >= n) {
            return Err(Error::Format(format!(
                "edge ({u}, {v}) outside the declared vertex count {n}"
            )));
        }
        let (graph, dropped) = DiGraph::with_dropped(
            n as usize,
            raw.iter().map(|&(u, v)| (u as Vertex, v as Vertex)),
        );
        return Ok(ParsedGraph {
            graph,
            self_loops: dropped.self_loops,
            duplicates: dropped.duplicates,
            remap: None,
        });
    }

    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let dense = ids.last().is_none_or(|&max| max + 1 == ids.len() as u64);

    let (graph, dropped, remap) = if dense {
        let (g, d) = DiGraph::with_dropped(
            ids.len(),
            raw.iter().map(|&(u, v)| (u as Vertex, v as Vertex)),
        );
        (g, d, None)
    } else {
        let lookup = |x: u64| ids.binary_search(&x).unwrap() as Vertex;
        let (g, d) =
            DiGraph::with_dropped(ids.len(), raw.iter().map(|&(u, v)| (lookup(u), lookup(v))));
        (g, d, Some(ids))
    };
    Ok(ParsedGraph {
        graph,
        self_loops: dropped.self_loops,
        duplicates: dropped.duplicates,
        remap,
    })
}

fn parse_gra<R: BufRead>(reader: R) -> Result<ParsedGraph> {
    let mut n: Option<usize> = None;
    let mut header_skipped = false;
    let mut seen: Vec<bool> = Vec::new();
    let mut listed = 0usize;
    let mut edges = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let Some(n) = n else {
            if line.starts_with('#') {
                continue;
            }
            match line.parse::<u64>() {
                Ok(count) if count <= u32::MAX as u64 + 1 => {
                    n = Some(count as usize);
                    seen = vec![false; count as usize];
                }
                Ok(count) => {
                    return Err(Error::Format(format!(
                        "vertex count {count} exceeds 32-bit ids"
                    )))
                }
                Err(_) if !header_skipped => header_skipped = true,
                Err(_) => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected the vertex count, found `{line}`"),
                    })
                }
            }
            continue;
        };

        let (head, rest) = line.split_once(':').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("expected `i: neighbors #`, found `{line}`"),
        })?;
        let v = parse_id(head.trim(), lineno)? as usize;
        if v >= n {
            return Err(Error::Format(format!(
                "line {lineno}: vertex {v} outside the declared count {n}"
            )));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Format(format!(
                "line {lineno}: vertex {v} listed twice"
            )));
        }
        listed += 1;
        let Some(body) = rest.trim_end().strip_suffix('#') else {
            return Err(Error::Parse {
                line: lineno,
                msg: "neighbor list not terminated by `#`".into(),
            });
        };
        for tok in body.split_whitespace() {
            let w = parse_id(tok, lineno)? as usize;
            if w >= n {
                return Err(Error::Format(format!(
                    "line {lineno}: neighbor {w} outside the declared count {n}"
                )));
            }
            edges.push((v as Vertex, w as Vertex));
        }
    }

    let n = n.ok_or_else(|| Error::Format("missing vertex count".into()))?;
    if listed != n {
        return Err(Error::Format(format!(
            "declared {n} vertices but listed {listed}"
        )));
    }
    let (graph, dropped) = DiGraph::with_dropped(n, edges);
    Ok(ParsedGraph {
        graph,
        self_loops: dropped.self_loops,
        duplicates: dropped.duplicates,
        remap: None,
    })
}

pub fn write_edge_list<W: Write>(g: &DiGraph, mut w: W) -> Result<()> {
    writeln!(w, "# n={} m={}", g.n(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

pub fn write_gra<W: Write>(g: &DiGraph, mut w: W) -> Result<()> {
    writeln!(w, "graph_for_greach")?;
    writeln!(w, "{}", g.n())?;
    for v in g.vertices() {
        write!(w, "{v}:")?;
        for &x in g.out_neighbors(v) {
            write!(w, " {x}")?;
        }
        writeln!(w, " #")?;
    }
    Ok(())
}
