//! Per-level optimization context: adjusted target lengths, stress weights,
//! and the optional coarse-graph approximation data for the entropy term.

use crate::error::{Error, Result};
use crate::graph::{Graph, Layout};

/// Optimization target lengths for one hierarchy level:
/// `d(u,v) * (sqrt(c(u)) + sqrt(c(v)))` per edge, so that the nodes a
/// supervertex represents have room to unfold inside a disc of radius
/// `sqrt(c)`. Contracted graphs store unit lengths, which makes this
/// `sqrt(c(u)) + sqrt(c(v))` on coarse levels; on the finest level (unit
/// weights) it scales the input lengths uniformly, which the optimal-scale
/// step of the evaluation protocol absorbs. Applying the adjustment on every
/// level keeps consecutive levels' equilibria at consistent scale — with
/// plain input lengths on the finest level the whole layout would have to
/// contract globally through local moves, which stalls convergence. The
/// stress weight is always `1 / d^2`.
pub fn adjusted_distances(g: &Graph) -> Vec<f64> {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| {
            g.target_length(e)
                * (g.node_weight(u as usize).sqrt() + g.node_weight(v as usize).sqrt())
        })
        .collect()
}

/// Coarse-graph data used to approximate the entropy term: the composed map
/// to the approximation level, per-supervertex represented-node counts and
/// weight totals, member lists, and the supervertex coordinates, which are
/// refreshed to weighted midpoints after every approximate iteration.
#[derive(Debug, Clone)]
pub struct ApproxContext {
    pub(crate) map: Vec<u32>,
    /// Number of current-level nodes each supervertex represents.
    pub(crate) nu: Vec<f64>,
    pub(crate) member_start: Vec<usize>,
    /// Current-level nodes grouped by supervertex, ascending within a group.
    pub(crate) members: Vec<u32>,
    pub layout: Vec<[f64; 2]>,
}

impl ApproxContext {
    pub fn approx_node_count(&self) -> usize {
        self.nu.len()
    }
}

/// Everything `iterate_exact` / `iterate_approx` need for one level.
#[derive(Debug, Clone)]
pub struct LevelContext<'g> {
    pub(crate) graph: &'g Graph,
    /// Adjusted target length per arc, aligned with the adjacency arrays.
    pub(crate) arc_dist: Vec<f64>,
    /// Stress weight `1/d^2` per arc.
    pub(crate) arc_weight: Vec<f64>,
    /// `rho(u)`: sum of stress weights over the edges incident to `u`.
    pub(crate) rho: Vec<f64>,
    pub(crate) guard_distance: f64,
    pub(crate) guard_seed: u64,
    pub(crate) approx: Option<ApproxContext>,
}

impl<'g> LevelContext<'g> {
    /// Context for exact (quadratic) iteration.
    pub fn exact(
        graph: &'g Graph,
        edge_dist: Vec<f64>,
        guard_distance: f64,
        guard_seed: u64,
    ) -> Result<Self> {
        Self::assemble(graph, edge_dist, guard_distance, guard_seed, None)
    }

    /// Context whose entropy term is approximated through `map`, with the
    /// supervertex coordinates initialized to the weighted midpoints of the
    /// current layout `x`.
    pub fn with_approx(
        graph: &'g Graph,
        edge_dist: Vec<f64>,
        map: Vec<u32>,
        approx_node_count: usize,
        x: &Layout,
        guard_distance: f64,
        guard_seed: u64,
    ) -> Result<Self> {
        x.check_matches(graph)?;
        let layout = weighted_midpoints(&map, approx_node_count, x, graph.node_weights());
        Self::with_approx_layout(graph, edge_dist, map, layout, guard_distance, guard_seed)
    }

    /// As `with_approx`, but with explicitly supplied supervertex coordinates.
    pub fn with_approx_layout(
        graph: &'g Graph,
        edge_dist: Vec<f64>,
        map: Vec<u32>,
        approx_layout: Vec<[f64; 2]>,
        guard_distance: f64,
        guard_seed: u64,
    ) -> Result<Self> {
        let n = graph.node_count();
        assert_eq!(map.len(), n, "approximation map must cover every node");
        let k = approx_layout.len();
        let mut nu = vec![0.0f64; k];
        let mut member_count = vec![0usize; k];
        for &c in &map {
            assert!((c as usize) < k, "map target out of range");
            nu[c as usize] += 1.0;
            member_count[c as usize] += 1;
        }
        debug_assert_eq!(nu.iter().sum::<f64>() as usize, n);

        let mut member_start = Vec::with_capacity(k + 1);
        member_start.push(0);
        for &c in &member_count {
            member_start.push(member_start.last().unwrap() + c);
        }
        let mut cursor = member_start.clone();
        let mut members = vec![0u32; n];
        for (v, &c) in map.iter().enumerate() {
            members[cursor[c as usize]] = v as u32;
            cursor[c as usize] += 1;
        }

        let approx = ApproxContext {
            map,
            nu,
            member_start,
            members,
            layout: approx_layout,
        };
        Self::assemble(graph, edge_dist, guard_distance, guard_seed, Some(approx))
    }

    fn assemble(
        graph: &'g Graph,
        edge_dist: Vec<f64>,
        guard_distance: f64,
        guard_seed: u64,
        approx: Option<ApproxContext>,
    ) -> Result<Self> {
        assert_eq!(edge_dist.len(), graph.edge_count());
        let n = graph.node_count();
        for (e, &d) in edge_dist.iter().enumerate() {
            if !(d > 0.0) || !d.is_finite() {
                let (u, v) = graph.edges()[e];
                return Err(Error::NonPositiveTargetLength {
                    u: u as usize,
                    v: v as usize,
                    d,
                });
            }
        }
        let edge_weight: Vec<f64> = edge_dist.iter().map(|&d| 1.0 / (d * d)).collect();

        let mut arc_dist = Vec::with_capacity(2 * graph.edge_count());
        let mut arc_weight = Vec::with_capacity(2 * graph.edge_count());
        let mut rho = vec![0.0f64; n];
        for u in 0..n {
            if n > 1 && graph.degree(u) == 0 {
                return Err(Error::IsolatedNode { node: u });
            }
            for &e in graph.incident_edges(u) {
                arc_dist.push(edge_dist[e as usize]);
                arc_weight.push(edge_weight[e as usize]);
                rho[u] += edge_weight[e as usize];
            }
        }

        Ok(LevelContext {
            graph,
            arc_dist,
            arc_weight,
            rho,
            guard_distance,
            guard_seed,
            approx,
        })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn has_approx(&self) -> bool {
        self.approx.is_some()
    }

    pub fn approx(&self) -> Option<&ApproxContext> {
        self.approx.as_ref()
    }

    /// Arc range of `u` in the aligned `arc_dist` / `arc_weight` arrays.
    pub(crate) fn arc_range(&self, u: usize) -> std::ops::Range<usize> {
        self.graph.arc_range(u)
    }
}

/// Weighted midpoint of each supervertex's members: `sum(c_v * x_v) / sum(c_v)`,
/// members taken in ascending node order.
pub fn weighted_midpoints(
    map: &[u32],
    approx_node_count: usize,
    x: &Layout,
    node_weight: &[f64],
) -> Vec<[f64; 2]> {
    let mut acc = vec![[0.0f64; 2]; approx_node_count];
    let mut total = vec![0.0f64; approx_node_count];
    for (v, &c) in map.iter().enumerate() {
        let w = node_weight[v];
        acc[c as usize][0] += w * x[v][0];
        acc[c as usize][1] += w * x[v][1];
        total[c as usize] += w;
    }
    for (a, &t) in acc.iter_mut().zip(&total) {
        if t > 0.0 {
            a[0] /= t;
            a[1] /= t;
        }
    }
    acc
}
