//! Dynamic-graph support: locality-bounded random edge perturbation and the
//! layout update that reuses prior coordinates.
//!
//! Perturbation protects a random BFS spanning tree so the graph stays
//! connected, removes a fraction of the remaining edges, and inserts the same
//! number of new edges between nodes that are close in the *original* graph.
//! The update then re-optimizes only the finest level, starting at the final
//! penalty weight.

use rand::Rng;

use crate::coarsen::{build_hierarchy, CoarseningParams};
use crate::error::{Error, Result};
use crate::graph::{Graph, Layout};
use crate::layout::{
    adjusted_distances, optimize_level, weighted_midpoints, LevelContext, OptimizerParams,
};
use crate::rng::{self, Stage};

#[derive(Debug, Clone)]
pub struct PerturbationParams {
    /// Percentage of the edge count to remove and to insert.
    pub x_percent: f64,
    /// Inserted edges connect nodes at original-graph distance in `(1, D]`.
    pub max_insert_distance: usize,
    pub seed: u64,
}

/// What the perturbation actually did.
#[derive(Debug, Clone, Default)]
pub struct PerturbStats {
    pub removed: usize,
    pub inserted: usize,
    /// True when fewer non-tree edges existed than requested removals.
    pub removal_capped: bool,
    /// Insertion attempts abandoned after exhausting their re-draws.
    pub failed_insertions: usize,
}

/// Randomly perturb a connected graph while preserving connectivity.
///
/// Removals draw `round(x% * m)` edges uniformly from the non-tree edges of
/// a BFS spanning tree grown at a random root (capped at their count).
/// Insertions draw a random node `u`, then a uniform candidate among nodes at
/// original-graph distance in `(1, D]` from `u` that are not currently
/// adjacent to `u`; `u` is re-drawn up to `n` times before the insertion is
/// skipped with a warning count. New edges carry unit weight and length.
pub fn perturb(g: &Graph, params: &PerturbationParams) -> Result<(Graph, PerturbStats)> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if !(params.x_percent >= 0.0 && params.x_percent < 100.0) {
        return Err(Error::InvalidParameter(format!(
            "x_percent must lie in [0, 100), got {}",
            params.x_percent
        )));
    }
    if params.max_insert_distance < 2 {
        return Err(Error::InvalidParameter(
            "max_insert_distance must be at least 2".into(),
        ));
    }

    let n = g.node_count();
    let m = g.edge_count();
    let k = (params.x_percent / 100.0 * m as f64).round() as usize;
    let mut stats = PerturbStats::default();

    // BFS spanning tree from a random root; the edges that first reach each
    // node are protected from removal.
    let mut tree_rng = rng::stream(params.seed, Stage::PerturbTree, 0);
    let root = tree_rng.random_range(0..n);
    let mut tree_edge = vec![false; m];
    {
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        seen[root] = true;
        queue.push_back(root as u32);
        while let Some(u) = queue.pop_front() {
            for (&v, &e) in g.neighbors(u as usize).iter().zip(g.incident_edges(u as usize)) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    tree_edge[e as usize] = true;
                    queue.push_back(v);
                }
            }
        }
    }

    let mut non_tree: Vec<u32> = (0..m as u32).filter(|&e| !tree_edge[e as usize]).collect();
    let remove_count = k.min(non_tree.len());
    stats.removal_capped = remove_count < k;
    let mut remove_rng = rng::stream(params.seed, Stage::PerturbRemove, 0);
    // Partial Fisher-Yates: the first `remove_count` entries become the sample.
    for i in 0..remove_count {
        let j = remove_rng.random_range(i..non_tree.len());
        non_tree.swap(i, j);
    }
    let mut removed = vec![false; m];
    for &e in &non_tree[..remove_count] {
        removed[e as usize] = true;
    }
    stats.removed = remove_count;

    // Evolving edge set of Q.
    let mut present: std::collections::HashSet<(u32, u32)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| !removed[e])
        .map(|(_, &pair)| pair)
        .collect();

    let mut inserted: Vec<(u32, u32, f64, f64)> = Vec::with_capacity(k);
    let mut insert_rng = rng::stream(params.seed, Stage::PerturbInsert, 0);
    let mut candidates: Vec<u32> = Vec::new();
    for _ in 0..k {
        let mut placed = false;
        for _attempt in 0..n {
            let u = insert_rng.random_range(0..n as u32);
            collect_candidates(g, u, params.max_insert_distance, &present, &mut candidates);
            if candidates.is_empty() {
                continue;
            }
            let v = candidates[insert_rng.random_range(0..candidates.len())];
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            present.insert((a, b));
            inserted.push((a, b, 1.0, 1.0));
            placed = true;
            break;
        }
        if !placed {
            stats.failed_insertions += 1;
        }
    }
    stats.inserted = inserted.len();

    let mut edges: Vec<(u32, u32, f64, f64)> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|&(e, _)| !removed[e])
        .map(|(e, &(u, v))| (u, v, g.omega(e), g.target_length(e)))
        .collect();
    edges.extend_from_slice(&inserted);
    let (q, _) =
        Graph::build_weighted_with_stats(n, &edges, Some(g.node_weights().to_vec()))?;
    debug_assert!(q.is_connected());
    Ok((q, stats))
}

/// Nodes at distance in `(1, D]` from `u` in `g`, excluding current neighbors
/// of `u` in the evolving edge set; ascending order (BFS by depth, sorted
/// adjacency).
fn collect_candidates(
    g: &Graph,
    u: u32,
    max_distance: usize,
    present: &std::collections::HashSet<(u32, u32)>,
    out: &mut Vec<u32>,
) {
    out.clear();
    let n = g.node_count();
    let mut depth = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    depth[u as usize] = 0;
    queue.push_back(u);
    while let Some(w) = queue.pop_front() {
        let dw = depth[w as usize];
        if dw as usize >= max_distance {
            continue;
        }
        for &v in g.neighbors(w as usize) {
            if depth[v as usize] == u32::MAX {
                depth[v as usize] = dw + 1;
                queue.push_back(v);
                if dw + 1 >= 2 {
                    let key = if u < v { (u, v) } else { (v, u) };
                    if !present.contains(&key) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out.sort_unstable();
}

/// Re-optimize the finest level of `q` starting from `prior`, with the
/// penalty weight fixed at its minimum from the start.
///
/// With `approx_depth >= 1` the hierarchy of `q` is truncated after that many
/// coarsening levels and the coarsest truncated level approximates repulsion;
/// its coordinates are seeded with the weighted midpoints of the prior
/// positions of each cluster. Coarser levels are never optimized.
pub fn update_layout(
    q: &Graph,
    prior: &Layout,
    p: &OptimizerParams,
    cp: &CoarseningParams,
    seed: u64,
) -> Result<Layout> {
    if prior.len() != q.node_count() {
        return Err(Error::NodeSetMismatch {
            graph_n: q.node_count(),
            prior_n: prior.len(),
        });
    }
    prior.check_finite()?;
    p.validate()?;

    let fixed = OptimizerParams {
        alpha0: p.alpha_min,
        ..p.clone()
    };

    let dists = adjusted_distances(q);
    if p.approx_depth == 0 {
        let mut ctx = LevelContext::exact(q, dists, p.guard_distance, seed)?;
        return optimize_level(&mut ctx, prior.clone(), &fixed);
    }

    let truncated = CoarseningParams {
        max_levels: Some(p.approx_depth),
        ..cp.clone()
    };
    let hierarchy = build_hierarchy(q, &truncated, seed);
    if hierarchy.depth() == 1 {
        // Graph too small to coarsen; fall back to exact iteration.
        let mut ctx = LevelContext::exact(q, dists, p.guard_distance, seed)?;
        return optimize_level(&mut ctx, prior.clone(), &fixed);
    }
    let deepest = hierarchy.depth() - 1;
    let map = if deepest == 1 {
        hierarchy.maps[0].clone()
    } else {
        hierarchy.composed_map(0, deepest)
    };
    let approx_n = hierarchy.levels[deepest].node_count();
    let approx_layout = weighted_midpoints(&map, approx_n, prior, q.node_weights());
    let mut ctx = LevelContext::with_approx_layout(
        q,
        dists,
        map,
        approx_layout,
        p.guard_distance,
        seed,
    )?;
    optimize_level(&mut ctx, prior.clone(), &fixed)
}
