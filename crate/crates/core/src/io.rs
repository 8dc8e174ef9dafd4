//! Plain-text graph, signal and partition files.
//!
//! * edge list: `src,dst[,weight]` per line, weight defaulting to 1; a line
//!   with a single id declares an isolated node
//! * signal: `node_id,value`
//! * partition: `node_id,community_id`
//!
//! Lines starting with `#` are comments. Signal and partition files may
//! start with their column names as a header. Reals are written in the
//! shortest form that parses back to the same `f64`.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::{compare_ids, Graph, GraphBuilder, GraphSignal};

fn parse_error(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        msg: msg.into(),
    }
}

/// Non-blank, non-comment rows split on commas, with 1-based line numbers.
fn records(path: &Path) -> Result<Vec<(u64, Vec<String>)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(k, l)| (k as u64 + 1, l.split(',').map(|f| f.trim().to_string()).collect()))
        .collect())
}

fn parse_real(path: &Path, line: u64, field: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| parse_error(path, line, format!("`{field}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_error(path, line, format!("`{field}` is not finite")));
    }
    Ok(v)
}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty() || id.contains([',', '"', '\n', '\r']) || id.starts_with('#') || id.trim() != id {
        return Err(Error::Data(format!("node id `{id}` cannot be written unquoted")));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    let mut builder = GraphBuilder::new();
    for (line, row) in records(path)? {
        match row.len() {
            1 => {
                builder.add_node(&row[0]);
            }
            2 | 3 => {
                let w = if row.len() == 3 {
                    parse_real(path, line, &row[2])?
                } else {
                    1.0
                };
                builder
                    .add_edge(&row[0], &row[1], w)
                    .map_err(|e| parse_error(path, line, e.to_string()))?;
            }
            k => return Err(parse_error(path, line, format!("expected 2 or 3 fields, found {k}"))),
        }
    }
    builder.build().map_err(|e| match e {
        Error::InvalidGraph(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_edge_list(path: &Path, graph: &Graph) -> Result<()> {
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "# src,dst,weight").map_err(io)?;
    for id in graph.node_ids() {
        check_id(id)?;
    }
    for i in 0..graph.node_count() {
        if graph.neighbors(i).next().is_none() {
            writeln!(w, "{}", graph.node_id(i)).map_err(io)?;
        }
    }
    for (i, j, weight) in graph.edges() {
        writeln!(w, "{},{},{}", graph.node_id(i), graph.node_id(j), weight).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn is_header(row: &[String], names: [&str; 2]) -> bool {
    row.len() == 2 && row[0].eq_ignore_ascii_case(names[0]) && row[1].eq_ignore_ascii_case(names[1])
}

/// Two-column rows, header removed, ids unique.
fn pairs(path: &Path, header: [&str; 2]) -> Result<Vec<(u64, String, String)>> {
    let rows = records(path)?;
    let mut out = Vec::with_capacity(rows.len());
    let mut seen = HashSet::new();
    for (k, (line, row)) in rows.into_iter().enumerate() {
        if k == 0 && is_header(&row, header) {
            continue;
        }
        if row.len() != 2 {
            return Err(parse_error(path, line, format!("expected 2 fields, found {}", row.len())));
        }
        if !seen.insert(row[0].to_string()) {
            return Err(parse_error(path, line, format!("node `{}` listed twice", row[0])));
        }
        out.push((line, row[0].clone(), row[1].clone()));
    }
    if out.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    Ok(out)
}

/// `(node_id, value)` rows in file order.
pub fn read_signal_entries(path: &Path) -> Result<Vec<(String, f64)>> {
    pairs(path, ["node_id", "value"])?
        .into_iter()
        .map(|(line, id, v)| Ok((id, parse_real(path, line, &v)?)))
        .collect()
}

/// Signal file aligned to `graph`; every node must be listed exactly once.
pub fn read_signal(path: &Path, graph: &Graph) -> Result<GraphSignal> {
    let rows = pairs(path, ["node_id", "value"])?;
    let mut values = vec![f64::NAN; graph.node_count()];
    for (line, id, v) in rows {
        let i = graph
            .index_of(&id)
            .ok_or_else(|| parse_error(path, line, format!("node `{id}` is not in the graph")))?;
        values[i] = parse_real(path, line, &v)?;
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::Data(format!(
            "{}: no value for node `{}`",
            path.display(),
            graph.node_id(i)
        )));
    }
    GraphSignal::new(values)
}

pub fn write_signal(path: &Path, graph: &Graph, x: &[f64]) -> Result<()> {
    crate::error::check_len(graph.node_count(), x.len())?;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "node_id,value").map_err(io)?;
    for (i, v) in x.iter().enumerate() {
        check_id(graph.node_id(i))?;
        writeln!(w, "{},{}", graph.node_id(i), v).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Partition file aligned to `graph`. Communities are numbered in id order.
pub fn read_partition(path: &Path, graph: &Graph) -> Result<Partition> {
    let rows = pairs(path, ["node_id", "community_id"])?;
    let mut names: Vec<String> = rows.iter().map(|r| r.2.clone()).collect();
    names.sort_by(|a, b| compare_ids(a, b));
    names.dedup();
    let lookup: HashMap<&str, usize> = names.iter().enumerate().map(|(c, s)| (s.as_str(), c)).collect();
    let mut labels = vec![usize::MAX; graph.node_count()];
    for (line, id, c) in &rows {
        let i = graph
            .index_of(id)
            .ok_or_else(|| parse_error(path, *line, format!("node `{id}` is not in the graph")))?;
        labels[i] = lookup[c.as_str()];
    }
    if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(Error::InvalidPartition(format!(
            "{}: node `{}` has no community",
            path.display(),
            graph.node_id(i)
        )));
    }
    Partition::with_names(labels, names)
}

pub fn write_partition(path: &Path, graph: &Graph, p: &Partition) -> Result<()> {
    crate::error::check_len(graph.node_count(), p.len())?;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "node_id,community_id").map_err(io)?;
    for i in 0..p.len() {
        check_id(graph.node_id(i))?;
        check_id(p.name(p.label(i)))?;
        writeln!(w, "{},{}", graph.node_id(i), p.name(p.label(i))).map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Serializes `value` as pretty JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn edge_list_parsing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        fs::write(&p, "# toy\na,b\nb, c ,2.5\n\nd\na,b,0.5\n").unwrap();
        let g = read_edge_list(&p).unwrap();
        assert_eq!(g.node_ids(), &["a", "b", "c", "d"]);
        assert_eq!(g.weight(0, 1), 1.5);
        assert_eq!(g.weight(1, 2), 2.5);
        assert_eq!(g.degree(3), 0.0);
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        fs::write(&p, "a,b\nb,c,heavy\n").unwrap();
        match read_edge_list(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        fs::write(&p, "a,b\n# note\nc,c\n").unwrap();
        let r = read_edge_list(&p);
        assert!(matches!(r, Err(Error::Parse { line: 3, .. })), "{r:?}");
        fs::write(&p, "a,b,1,2\n").unwrap();
        assert!(matches!(read_edge_list(&p), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_signal_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        fs::write(&p, "").unwrap();
        assert!(read_signal(&p, &fixtures::k3()).is_err());
        fs::write(&p, "node_id,value\n").unwrap();
        assert!(read_signal(&p, &fixtures::k3()).is_err());
    }

    #[test]
    fn signal_must_cover_graph() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let g = fixtures::k3();
        fs::write(&p, "1,0.5\n2,1\n").unwrap();
        assert!(read_signal(&p, &g).is_err());
        fs::write(&p, "1,0.5\n2,1\n3,2\n9,1\n").unwrap();
        assert!(matches!(read_signal(&p, &g), Err(Error::Parse { line: 4, .. })));
        fs::write(&p, "1,0.5\n2,1\n2,2\n").unwrap();
        assert!(matches!(read_signal(&p, &g), Err(Error::Parse { line: 3, .. })));
        fs::write(&p, "3,2\n1,0.5\n2,1e-3\n").unwrap();
        assert_eq!(read_signal(&p, &g).unwrap().values(), &[0.5, 1e-3, 2.0]);
    }

    #[test]
    fn round_trips_are_exact() {
        let dir = tempfile::tempdir().unwrap();
        let (g, p) = fixtures::planted_hub();
        let x: Vec<f64> = (0..g.node_count()).map(|i| (i as f64 + 0.1).sqrt() / 3.0).collect();
        let ge = dir.path().join("g.csv");
        let se = dir.path().join("s.csv");
        let pe = dir.path().join("p.csv");
        write_edge_list(&ge, &g).unwrap();
        write_signal(&se, &g, &x).unwrap();
        write_partition(&pe, &g, &p).unwrap();
        let g2 = read_edge_list(&ge).unwrap();
        assert_eq!(g2.content_hash(), g.content_hash());
        assert_eq!(read_signal(&se, &g2).unwrap().values(), x.as_slice());
        assert_eq!(read_partition(&pe, &g2).unwrap(), p);
    }
}
