//! Edge-list text format: one edge per line, two whitespace-separated node
//! tokens and an optional third label token; `#` starts a comment line.
//! Node tokens may be arbitrary strings and are re-indexed densely in order
//! of first appearance.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Edge, EdgeLabel, Graph, NodeId};
use crate::error::{Error, Result};

/// Result of loading an edge list, with the cleanup counts.
#[derive(Debug)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original token for each dense node index.
    pub node_names: Vec<String>,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

/// Load an edge list. Duplicate lines (in either orientation) are
/// collapsed, self-loops are dropped and counted. Edges with no label
/// column are labeled `Empirical`.
pub fn load_edge_list<P: AsRef<Path>>(path: P) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path_str.clone(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut ids: HashMap<String, NodeId> = HashMap::new();
    let mut node_names: Vec<String> = Vec::new();
    let intern = |token: &str, names: &mut Vec<String>, ids: &mut HashMap<String, NodeId>| {
        if let Some(&id) = ids.get(token) {
            return id;
        }
        let id = names.len() as NodeId;
        names.push(token.to_string());
        ids.insert(token.to_string(), id);
        id
    };

    let mut pairs: HashMap<(NodeId, NodeId), EdgeLabel> = HashMap::new();
    let mut self_loops = 0usize;
    let mut duplicates = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|source| Error::Io {
            path: path_str.clone(),
            source,
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::MalformedLine {
                path: path_str.clone(),
                line: lineno,
                msg: format!("expected 2 node tokens (plus optional label), got {}", tokens.len()),
            });
        }
        let label = if tokens.len() == 3 {
            EdgeLabel::parse(tokens[2]).ok_or_else(|| Error::MalformedLine {
                path: path_str.clone(),
                line: lineno,
                msg: format!("unknown edge label {:?}", tokens[2]),
            })?
        } else {
            EdgeLabel::Empirical
        };
        let a = intern(tokens[0], &mut node_names, &mut ids);
        let b = intern(tokens[1], &mut node_names, &mut ids);
        if a == b {
            self_loops += 1;
            continue;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if pairs.insert(key, label).is_some() {
            duplicates += 1;
        }
    }

    let n = node_names.len();
    let mut edges: Vec<Edge> = pairs
        .into_iter()
        .map(|((u, v), label)| Edge { u, v, label })
        .collect();
    edges.sort_unstable_by_key(|e| (e.u, e.v));
    Ok(LoadedGraph {
        graph: Graph::from_sorted_edges(n, edges),
        node_names,
        self_loops_dropped: self_loops,
        duplicates_collapsed: duplicates,
    })
}

/// Write a graph in the same format, with the label column filled in.
pub fn write_edge_list<P: AsRef<Path>>(graph: &Graph, path: P) -> Result<()> {
    let path = path.as_ref();
    let path_str = path.display().to_string();
    let io_err = |source| Error::Io {
        path: path_str.clone(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "# nodes: {}", graph.node_count())?;
        writeln!(w, "# edges: {}", graph.edge_count())?;
        for e in graph.edges() {
            writeln!(w, "{} {} {}", e.u, e.v, e.label.as_str())?;
        }
        w.flush()
    })()
    .map_err(|source| Error::Io {
        path: path_str.clone(),
        source,
    })
}
