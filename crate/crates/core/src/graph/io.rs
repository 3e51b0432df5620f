use std::fs;
use std::path::Path;

use super::{FiniteGraph, Graph, VertexId};
use crate::error::{Error, Result};

/// Parses an edge list: one `u v` pair per line, `#` starts a comment. A
/// line with a single id declares an isolated vertex (only useful for the
/// one-vertex graph, since graphs must be connected).
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ids = line
            .split_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map(VertexId)
                    .map_err(|e| Error::parse(t, format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        match ids[..] {
            [v] => vertices.push(v),
            [a, b] => {
                vertices.extend([a, b]);
                edges.push((a, b));
            }
            _ => return Err(Error::parse(raw, format!("line {}: expected `u v`", lineno + 1))),
        }
    }
    vertices.sort_unstable();
    vertices.dedup();
    FiniteGraph::from_edges(&vertices, &edges).map(Graph::finite)
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    parse_edge_list(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let g = parse_edge_list("# triangle\n0 1\n\n1 2  # second\n2 0\n").unwrap();
        assert_eq!(g.as_finite().unwrap().edge_count(), 3);
    }

    #[test]
    fn duplicate_edge_is_rejected() {
        assert!(parse_edge_list("0 1\n1 0\n").is_err());
    }

    #[test]
    fn single_vertex_file() {
        let g = parse_edge_list("42\n").unwrap();
        assert_eq!(g.as_finite().unwrap().vertex_count(), 1);
    }

    #[test]
    fn garbage_is_a_parse_error() {
        assert!(matches!(parse_edge_list("0 x\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("0 1 2\n"), Err(Error::Parse { .. })));
    }
}
