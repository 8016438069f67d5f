//! Weighted undirected graphs in compressed adjacency form, plus the 2D
//! layout vector they are drawn into.
//!
//! Node ids are dense 0-based integers. Adjacency is symmetric, sorted per
//! node, and free of self-loops and parallel edges. Each undirected edge
//! carries a weight `omega` (used by clustering and contraction) and a target
//! length `d > 0` (used by the stress term). Graphs and layouts are immutable
//! after construction and safe to read from any number of threads.

use crate::error::{Error, Result};

/// Counts of repairs applied while building a graph from dirty input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    /// Offsets into the arc arrays, length `n + 1`.
    xadj: Vec<usize>,
    /// Neighbor node id per arc, ascending within each node's range.
    adj_node: Vec<u32>,
    /// Undirected edge id per arc, aligned with `adj_node`.
    adj_edge: Vec<u32>,
    /// Canonical endpoints per edge, `u < v`, ordered by `(u, v)`.
    edges: Vec<(u32, u32)>,
    node_weight: Vec<f64>,
    edge_omega: Vec<f64>,
    edge_dist: Vec<f64>,
}

impl Graph {
    /// Build a graph from an edge list `(u, v, omega, d)`.
    ///
    /// Self-loops are dropped and duplicate undirected edges merged keeping
    /// the first occurrence; both repairs are counted in the returned stats.
    /// Node weights default to 1.
    pub fn build_with_stats(
        n: usize,
        edge_list: &[(u32, u32, f64, f64)],
    ) -> Result<(Graph, BuildStats)> {
        Self::build_weighted_with_stats(n, edge_list, None)
    }

    pub fn build(n: usize, edge_list: &[(u32, u32, f64, f64)]) -> Result<Graph> {
        Ok(Self::build_with_stats(n, edge_list)?.0)
    }

    /// As `build_with_stats`, with explicit node weights.
    pub fn build_weighted_with_stats(
        n: usize,
        edge_list: &[(u32, u32, f64, f64)],
        node_weight: Option<Vec<f64>>,
    ) -> Result<(Graph, BuildStats)> {
        assert!(n >= 1, "graph needs at least one node");
        let mut stats = BuildStats::default();

        let mut canonical: Vec<(u32, u32, f64, f64, usize)> = Vec::with_capacity(edge_list.len());
        for (idx, &(u, v, w, d)) in edge_list.iter().enumerate() {
            if u as usize >= n || v as usize >= n {
                return Err(Error::NodeOutOfRange {
                    u: u as usize,
                    v: v as usize,
                    n,
                });
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NonPositiveTargetLength {
                    u: u as usize,
                    v: v as usize,
                    d,
                });
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidEdgeWeight {
                    u: u as usize,
                    v: v as usize,
                    w,
                });
            }
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            canonical.push((a, b, w, d, idx));
        }

        // First occurrence wins for duplicates: sort by endpoints then input
        // position, keep the earliest of each run.
        canonical.sort_by_key(|&(a, b, _, _, idx)| (a, b, idx));
        let mut edges = Vec::with_capacity(canonical.len());
        let mut edge_omega = Vec::with_capacity(canonical.len());
        let mut edge_dist = Vec::with_capacity(canonical.len());
        for &(a, b, w, d, _) in &canonical {
            if edges.last() == Some(&(a, b)) {
                stats.duplicates_merged += 1;
                continue;
            }
            edges.push((a, b));
            edge_omega.push(w);
            edge_dist.push(d);
        }

        let node_weight = match node_weight {
            Some(c) => {
                assert_eq!(c.len(), n, "node weight vector length mismatch");
                c
            }
            None => vec![1.0; n],
        };

        let mut per_node: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            per_node[a as usize].push((b, e as u32));
            per_node[b as usize].push((a, e as u32));
        }

        let mut xadj = Vec::with_capacity(n + 1);
        let mut adj_node = Vec::with_capacity(2 * edges.len());
        let mut adj_edge = Vec::with_capacity(2 * edges.len());
        xadj.push(0);
        for list in &mut per_node {
            list.sort_unstable();
            for &(nbr, e) in list.iter() {
                adj_node.push(nbr);
                adj_edge.push(e);
            }
            xadj.push(adj_node.len());
        }

        Ok((
            Graph {
                xadj,
                adj_node,
                adj_edge,
                edges,
                node_weight,
                edge_omega,
                edge_dist,
            },
            stats,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.node_weight.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.xadj[u + 1] - self.xadj[u]
    }

    /// Sorted neighbor ids of `u`.
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.adj_node[self.xadj[u]..self.xadj[u + 1]]
    }

    /// Edge ids aligned with `neighbors(u)`.
    pub fn incident_edges(&self, u: usize) -> &[u32] {
        &self.adj_edge[self.xadj[u]..self.xadj[u + 1]]
    }

    /// Index range of `u`'s arcs in the flat adjacency arrays; per-arc data
    /// built in adjacency order can be sliced with it.
    pub fn arc_range(&self, u: usize) -> std::ops::Range<usize> {
        self.xadj[u]..self.xadj[u + 1]
    }

    pub fn node_weight(&self, u: usize) -> f64 {
        self.node_weight[u]
    }

    pub fn node_weights(&self) -> &[f64] {
        &self.node_weight
    }

    pub fn max_node_weight(&self) -> f64 {
        self.node_weight.iter().cloned().fold(0.0, f64::max)
    }

    pub fn total_node_weight(&self) -> f64 {
        self.node_weight.iter().sum()
    }

    /// Canonical `(u, v)` endpoints per edge id, `u < v`.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn omega(&self, edge: usize) -> f64 {
        self.edge_omega[edge]
    }

    pub fn target_length(&self, edge: usize) -> f64 {
        self.edge_dist[edge]
    }

    pub fn target_lengths(&self) -> &[f64] {
        &self.edge_dist
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edge_omega.iter().sum()
    }

    /// Dump the edge list in canonical order; rebuilding from it reproduces
    /// the graph exactly.
    pub fn edge_dump(&self) -> Vec<(u32, u32, f64, f64)> {
        self.edges
            .iter()
            .enumerate()
            .map(|(e, &(u, v))| (u, v, self.edge_omega[e], self.edge_dist[e]))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.node_count()];
        self.bfs_mark(0, &mut seen) == self.node_count()
    }

    fn bfs_mark(&self, start: usize, seen: &mut [bool]) -> usize {
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(start as u32);
        seen[start] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in self.neighbors(u as usize) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    /// Extract a maximum-cardinality connected component.
    ///
    /// Ties are broken toward the component containing the smallest original
    /// node index. Returns the component graph and the old-to-new index map
    /// (`None` for dropped nodes); retained nodes keep their relative order.
    pub fn largest_connected_component(&self) -> (Graph, Vec<Option<u32>>) {
        let n = self.node_count();
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(start as u32);
            component[start] = id;
            let mut size = 1usize;
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbors(u as usize) {
                    if component[v as usize] == usize::MAX {
                        component[v as usize] = id;
                        size += 1;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }

        // Components are discovered in order of their minimum node index, so
        // the first maximum is the required tie-break winner.
        let best = sizes
            .iter()
            .enumerate()
            .max_by_key(|&(id, &s)| (s, std::cmp::Reverse(id)))
            .map(|(id, _)| id)
            .unwrap();

        let mut map = vec![None; n];
        let mut next = 0u32;
        for u in 0..n {
            if component[u] == best {
                map[u] = Some(next);
                next += 1;
            }
        }

        let mut sub_edges = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if let (Some(nu), Some(nv)) = (map[u as usize], map[v as usize]) {
                sub_edges.push((nu, nv, self.edge_omega[e], self.edge_dist[e]));
            }
        }
        let weights = (0..n)
            .filter(|&u| map[u].is_some())
            .map(|u| self.node_weight[u])
            .collect();
        let (graph, _) =
            Graph::build_weighted_with_stats(next as usize, &sub_edges, Some(weights))
                .expect("component edges are valid by construction");
        (graph, map)
    }
}

/// Dense per-node 2D coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    coords: Vec<[f64; 2]>,
}

impl Layout {
    pub fn new(coords: Vec<[f64; 2]>) -> Self {
        Layout { coords }
    }

    pub fn zeros(n: usize) -> Self {
        Layout {
            coords: vec![[0.0, 0.0]; n],
        }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [[f64; 2]] {
        &mut self.coords
    }

    pub fn into_coords(self) -> Vec<[f64; 2]> {
        self.coords
    }

    /// Error if any coordinate is non-finite.
    pub fn check_finite(&self) -> Result<()> {
        for (i, c) in self.coords.iter().enumerate() {
            if !c[0].is_finite() || !c[1].is_finite() {
                return Err(Error::NonFiniteCoordinate { node: i });
            }
        }
        Ok(())
    }

    /// Error unless the layout covers exactly the nodes of `g`.
    pub fn check_matches(&self, g: &Graph) -> Result<()> {
        if self.len() != g.node_count() {
            return Err(Error::LayoutLengthMismatch {
                len: self.len(),
                n: g.node_count(),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Layout {
        Layout {
            coords: self.coords.iter().map(|c| [c[0] * s, c[1] * s]).collect(),
        }
    }
}

impl std::ops::Index<usize> for Layout {
    type Output = [f64; 2];
    fn index(&self, i: usize) -> &[f64; 2] {
        &self.coords[i]
    }
}

pub fn euclidean(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}
