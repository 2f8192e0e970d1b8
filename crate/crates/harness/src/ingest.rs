//! Plain-text edge lists: one edge per line, two whitespace-separated ids,
//! `#` comment lines.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nbloc::graph::simplify;
use nbloc::Graph;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Keep only the largest connected component.
    pub giant_component: bool,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            giant_component: true,
        }
    }
}

/// A simplified graph and the original id of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: Graph,
    pub ids: Vec<String>,
}

pub fn ingest_edge_list(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<EdgeList> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    parse_edge_list(BufReader::new(file), opts).map_err(|e| match e {
        HarnessError::Io { source, .. } => HarnessError::io(path, source),
        other => other,
    })
}

pub fn parse_edge_list<R: BufRead>(reader: R, opts: &IngestOptions) -> Result<EdgeList> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut intern = |tok: &str| -> usize {
        *index.entry(tok.to_string()).or_insert_with(|| {
            ids.push(tok.to_string());
            ids.len() - 1
        })
    };
    for (no, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io("<edge list>", e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(HarnessError::Parse {
                line: no + 1,
                message: format!("expected two node ids, found {} fields", tokens.len()),
            });
        }
        let a = intern(tokens[0]);
        let b = intern(tokens[1]);
        edges.push((a, b));
    }
    let graph = simplify(&edges, ids.len())?;
    if graph.edge_count() == 0 {
        return Err(
            nbloc::Error::Input("edge list has no edges between distinct nodes".into()).into(),
        );
    }
    if !opts.giant_component {
        return Ok(EdgeList { graph, ids });
    }
    let (giant, map) = graph.largest_component();
    let ids = map.iter().map(|&old| ids[old].clone()).collect();
    Ok(EdgeList { graph: giant, ids })
}

/// Writes `g` as an edge list, using `ids` for node names when given.
pub fn write_edge_list<W: Write>(
    g: &Graph,
    ids: Option<&[String]>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "# nodes {} edges {}", g.node_count(), g.edge_count())?;
    for (a, b) in g.edges() {
        match ids {
            Some(ids) => writeln!(out, "{} {}", ids[a], ids[b])?,
            None => writeln!(out, "{a} {b}")?,
        }
    }
    Ok(())
}
