//! File formats: METIS adjacency graphs, plain edge lists, and coordinate
//! dumps with bit-exact round-tripping.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{BuildStats, Graph, Layout};

/// Repairs and notices collected while reading a graph file.
#[derive(Debug, Clone, Default)]
pub struct ParseStats {
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
    /// Edge count declared by a METIS header, when it disagrees with the
    /// edges actually present.
    pub declared_edge_mismatch: Option<(usize, usize)>,
}

impl ParseStats {
    fn absorb(&mut self, b: BuildStats) {
        self.self_loops_dropped += b.self_loops_dropped;
        self.duplicates_merged += b.duplicates_merged;
    }

    pub fn warnings(&self) -> usize {
        self.self_loops_dropped
            + self.duplicates_merged
            + usize::from(self.declared_edge_mismatch.is_some())
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Read a graph in METIS adjacency format.
///
/// Header `n m [fmt [ncon]]`; `fmt` is up to three binary digits flagging
/// node sizes (unsupported), node weights, and edge weights. One line per
/// node lists its 1-indexed neighbors, interleaved with edge weights when
/// flagged. Lines starting with `%` are comments. Target lengths are 1.
pub fn read_metis(path: &Path) -> Result<(Graph, ParseStats)> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);

    let mut lines = reader.lines().enumerate();
    let mut next_content = || -> Result<Option<(usize, String)>> {
        for (idx, line) in lines.by_ref() {
            let line = line?;
            if line.starts_with('%') {
                continue;
            }
            return Ok(Some((idx + 1, line)));
        }
        Ok(None)
    };

    let (header_line, header) = next_content()?
        .ok_or_else(|| parse_err(path, 1, "empty file: expected a header line"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 2 || fields.len() > 4 {
        return Err(parse_err(
            path,
            header_line,
            format!("header must be 'n m [fmt [ncon]]', got {} fields", fields.len()),
        ));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(path, header_line, "invalid node count"))?;
    let declared_m: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(path, header_line, "invalid edge count"))?;
    let fmt: u32 = if fields.len() >= 3 {
        fields[2]
            .parse()
            .map_err(|_| parse_err(path, header_line, "invalid fmt field"))?
    } else {
        0
    };
    let has_edge_weights = fmt % 10 == 1;
    let has_node_weights = (fmt / 10) % 10 == 1;
    if fmt / 100 % 10 == 1 {
        return Err(parse_err(path, header_line, "node sizes (fmt=1xx) are not supported"));
    }
    let ncon: usize = if fields.len() == 4 {
        fields[3]
            .parse()
            .map_err(|_| parse_err(path, header_line, "invalid ncon field"))?
    } else {
        1
    };
    if has_node_weights && ncon != 1 {
        return Err(parse_err(
            path,
            header_line,
            "multi-constraint node weights (ncon > 1) are not supported",
        ));
    }
    if n == 0 {
        return Err(parse_err(path, header_line, "graph must have at least one node"));
    }

    let mut node_weight = vec![1.0f64; n];
    // Arc map (u, v) -> (omega, line); symmetry is validated afterwards.
    let mut arcs: std::collections::HashMap<(u32, u32), (f64, usize)> =
        std::collections::HashMap::new();
    let mut stats = ParseStats::default();

    for u in 0..n {
        let (line_no, line) = next_content()?.ok_or_else(|| {
            parse_err(path, 0, format!("unexpected end of file: node line {} missing", u + 1))
        })?;
        let mut tokens = line.split_whitespace();
        if has_node_weights {
            let tok = tokens.next().ok_or_else(|| {
                parse_err(path, line_no, "missing node weight")
            })?;
            let w: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("invalid node weight '{tok}'")))?;
            if !(w >= 0.0) || !w.is_finite() {
                return Err(parse_err(path, line_no, format!("node weight must be >= 0, got {w}")));
            }
            node_weight[u] = w;
        }
        loop {
            let Some(tok) = tokens.next() else { break };
            let v1: usize = tok
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("invalid neighbor id '{tok}'")))?;
            if v1 == 0 || v1 > n {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("neighbor id {v1} out of range 1..={n}"),
                ));
            }
            let v = (v1 - 1) as u32;
            let omega = if has_edge_weights {
                let wt = tokens.next().ok_or_else(|| {
                    parse_err(path, line_no, format!("neighbor {v1} is missing its edge weight"))
                })?;
                wt.parse::<f64>()
                    .map_err(|_| parse_err(path, line_no, format!("invalid edge weight '{wt}'")))?
            } else {
                1.0
            };
            if v as usize == u {
                stats.self_loops_dropped += 1;
                continue;
            }
            // First occurrence wins for repeated arcs on a line.
            arcs.entry((u as u32, v)).or_insert((omega, line_no));
        }
    }

    // Symmetry: every arc needs its reverse with an equal weight.
    let mut edges: Vec<(u32, u32, f64, f64)> = Vec::with_capacity(arcs.len() / 2);
    for (&(u, v), &(w, line_no)) in &arcs {
        match arcs.get(&(v, u)) {
            None => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!(
                        "asymmetric adjacency: node {} lists {} but not vice versa",
                        u + 1,
                        v + 1
                    ),
                ));
            }
            Some(&(w2, _)) if w2 != w => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!(
                        "asymmetric edge weight on ({}, {}): {} vs {}",
                        u + 1,
                        v + 1,
                        w,
                        w2
                    ),
                ));
            }
            _ => {}
        }
        if u < v {
            edges.push((u, v, w, 1.0));
        }
    }
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    if edges.len() != declared_m {
        stats.declared_edge_mismatch = Some((declared_m, edges.len()));
    }

    let (graph, build_stats) = Graph::build_weighted_with_stats(n, &edges, Some(node_weight))?;
    stats.absorb(build_stats);
    Ok((graph, stats))
}

/// Read a whitespace-separated edge list: one `u v [omega [d]]` per line,
/// 0-indexed ids, `#` comments. The node count is one past the largest id.
pub fn read_edge_list(path: &Path) -> Result<(Graph, ParseStats)> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut edges: Vec<(u32, u32, f64, f64)> = Vec::new();
    let mut max_id = 0u32;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() < 2 || tokens.len() > 4 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 'u v [omega [d]]', got {} tokens", tokens.len()),
            ));
        }
        let u: u32 = tokens[0]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid node id '{}'", tokens[0])))?;
        let v: u32 = tokens[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid node id '{}'", tokens[1])))?;
        let omega: f64 = if tokens.len() >= 3 {
            tokens[2]
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("invalid weight '{}'", tokens[2])))?
        } else {
            1.0
        };
        let d: f64 = if tokens.len() == 4 {
            tokens[3]
                .parse()
                .map_err(|_| parse_err(path, line_no, format!("invalid length '{}'", tokens[3])))?
        } else {
            1.0
        };
        max_id = max_id.max(u).max(v);
        edges.push((u, v, omega, d));
    }
    if edges.is_empty() {
        return Err(parse_err(path, 1, "edge list contains no edges"));
    }
    let n = max_id as usize + 1;
    let (graph, build_stats) = Graph::build_with_stats(n, &edges)?;
    let mut stats = ParseStats::default();
    stats.absorb(build_stats);
    Ok((graph, stats))
}

/// Write one `x y` pair per line in node order, with round-trip precision.
pub fn write_coords(path: &Path, layout: &Layout) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for c in layout.coords() {
        writeln!(file, "{:?} {:?}", c[0], c[1])?;
    }
    file.flush()?;
    Ok(())
}

/// Read a coordinate file written by `write_coords`; bitwise inverse.
pub fn read_coords(path: &Path) -> Result<Layout> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut coords = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 'x y', got {} tokens", tokens.len()),
            ));
        }
        let x: f64 = tokens[0]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid coordinate '{}'", tokens[0])))?;
        let y: f64 = tokens[1]
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid coordinate '{}'", tokens[1])))?;
        coords.push([x, y]);
    }
    Ok(Layout::new(coords))
}
