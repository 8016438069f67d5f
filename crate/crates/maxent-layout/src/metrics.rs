//! Layout quality evaluation: full stress over shortest-path targets, the
//! maxent-stress objective, coincident-point jitter, and the optimal uniform
//! scale for fair cross-layout comparison.
//!
//! All pair sums run over unordered pairs `u < v`. Evaluations are pure reads
//! over immutable inputs; parallel partial sums are combined in fixed
//! partition order so results do not depend on the worker count.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{euclidean, Graph, Layout};
use crate::rng::{self, Stage};

/// Default node-count guard for the O(n^2) distance matrix.
pub const DEFAULT_APSP_LIMIT: usize = 200_000;

const ROW_CHUNK: usize = 64;

/// All-pairs hop distances, stored densely.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.dist[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.dist[u * self.n..(u + 1) * self.n]
    }
}

/// BFS hop distances from every node, with unit edge lengths.
pub fn apsp_unit(g: &Graph) -> Result<DistanceMatrix> {
    apsp_unit_with_limit(g, DEFAULT_APSP_LIMIT)
}

pub fn apsp_unit_with_limit(g: &Graph, limit: usize) -> Result<DistanceMatrix> {
    let n = g.node_count();
    if n > limit {
        return Err(Error::ApspLimitExceeded { n, limit });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut dist = vec![u32::MAX; n * n];
    dist.par_chunks_mut(n).enumerate().for_each(|(source, row)| {
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(source as u32);
        row[source] = 0;
        while let Some(u) = queue.pop_front() {
            let du = row[u as usize];
            for &v in g.neighbors(u as usize) {
                if row[v as usize] == u32::MAX {
                    row[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    });
    Ok(DistanceMatrix { n, dist })
}

/// Full stress `sum_{u<v} (|x_u - x_v| - d_uv)^2 / d_uv^2` with `d` the hop
/// distance.
pub fn full_stress(g: &Graph, dm: &DistanceMatrix, x: &Layout) -> f64 {
    assert_eq!(dm.node_count(), g.node_count(), "distance matrix mismatch");
    assert_eq!(x.len(), g.node_count(), "layout length mismatch");
    let n = g.node_count();
    let coords = x.coords();
    let parts: Vec<f64> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(ROW_CHUNK)
        .map(|rows| {
            let mut acc = 0.0f64;
            for &u in rows {
                let row = dm.row(u);
                let xu = coords[u];
                for v in u + 1..n {
                    let d = row[v] as f64;
                    let l = euclidean(xu, coords[v]);
                    let diff = l - d;
                    acc += diff * diff / (d * d);
                }
            }
            acc
        })
        .collect();
    parts.into_iter().sum()
}

/// The maxent-stress objective at penalty weight `alpha`:
/// stress over the edges (with the graph's stored target lengths) minus
/// `alpha` times the log-distance sum over non-edge pairs.
///
/// Errors if a non-edge pair coincides exactly; callers evaluate jittered
/// layouts.
pub fn maxent_stress(g: &Graph, x: &Layout, alpha: f64) -> Result<f64> {
    x.check_matches(g)?;
    x.check_finite()?;
    let n = g.node_count();
    let coords = x.coords();

    let mut edge_part = 0.0f64;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let d = g.target_length(e);
        let l = euclidean(coords[u as usize], coords[v as usize]);
        let diff = l - d;
        edge_part += diff * diff / (d * d);
    }

    let entropy_parts: Vec<Result<f64>> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(ROW_CHUNK)
        .map(|rows| {
            let mut acc = 0.0f64;
            for &u in rows {
                let xu = coords[u];
                let nbrs = g.neighbors(u);
                // Walk the sorted neighbor list alongside v to skip edges.
                let mut ni = nbrs.partition_point(|&w| (w as usize) <= u);
                for v in u + 1..n {
                    if ni < nbrs.len() && nbrs[ni] as usize == v {
                        ni += 1;
                        continue;
                    }
                    let l = euclidean(xu, coords[v]);
                    if l == 0.0 {
                        return Err(Error::CoincidentPair { u, v });
                    }
                    acc += l.ln();
                }
            }
            Ok(acc)
        })
        .collect();

    let mut entropy = 0.0f64;
    for part in entropy_parts {
        entropy += part?;
    }
    Ok(edge_part - alpha * entropy)
}

/// Perturb every node that shares its exact position with another node by
/// `+-delta` per component, `delta` uniform in `[1e-7, 1e-4]`, sign by fair
/// coin. Nodes at unique positions are returned bit-identically. Re-rolls up
/// to ten times if coincidences survive.
pub fn jitter_coincident(x: &Layout, seed: u64) -> Result<Layout> {
    const MAX_ATTEMPTS: usize = 10;
    const LO: f64 = 1e-7;
    const HI: f64 = 1e-4;

    let mut rng = rng::stream(seed, Stage::Jitter, 0);
    let mut out = x.clone();
    for _ in 0..MAX_ATTEMPTS {
        let coincident = coincident_nodes(&out);
        if coincident.is_empty() {
            return Ok(out);
        }
        for &v in &coincident {
            let coords = out.coords_mut();
            for comp in 0..2 {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let delta = LO + rng.random::<f64>() * (HI - LO);
                coords[v][comp] += sign * delta;
            }
        }
    }
    if coincident_nodes(&out).is_empty() {
        Ok(out)
    } else {
        Err(Error::JitterFailed {
            attempts: MAX_ATTEMPTS,
        })
    }
}

/// Ascending ids of nodes whose exact position is shared with another node.
fn coincident_nodes(x: &Layout) -> Vec<usize> {
    let mut groups: std::collections::HashMap<(u64, u64), Vec<usize>> =
        std::collections::HashMap::new();
    for (v, c) in x.coords().iter().enumerate() {
        groups
            .entry((c[0].to_bits(), c[1].to_bits()))
            .or_default()
            .push(v);
    }
    let mut out: Vec<usize> = groups
        .into_values()
        .filter(|g| g.len() > 1)
        .flatten()
        .collect();
    out.sort_unstable();
    out
}

/// As `optimal_scale`, but with hop distances recomputed per source row
/// instead of being read from a stored matrix; O(n) memory per worker, for
/// graphs too large to hold the full distance matrix.
pub fn optimal_scale_streamed(g: &Graph, x: &Layout) -> Result<f64> {
    x.check_matches(g)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.node_count();
    let coords = x.coords();
    let parts: Vec<(f64, f64)> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(ROW_CHUNK)
        .map(|rows| {
            let mut row = vec![u32::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for &u in rows {
                row.iter_mut().for_each(|d| *d = u32::MAX);
                queue.clear();
                row[u] = 0;
                queue.push_back(u as u32);
                while let Some(w) = queue.pop_front() {
                    let dw = row[w as usize];
                    for &v in g.neighbors(w as usize) {
                        if row[v as usize] == u32::MAX {
                            row[v as usize] = dw + 1;
                            queue.push_back(v);
                        }
                    }
                }
                let xu = coords[u];
                for v in u + 1..n {
                    let d = row[v] as f64;
                    let l = euclidean(xu, coords[v]);
                    num += l / d;
                    den += (l * l) / (d * d);
                }
            }
            (num, den)
        })
        .collect();
    let (num, den) = parts
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (pa, pb)| (a + pa, b + pb));
    if den == 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok(num / den)
}

/// The scalar `s` minimizing `sum_{u<v} w_uv (s |x_u - x_v| - d_uv)^2`, in
/// closed form: `s = sum(w d l) / sum(w l^2)`.
pub fn optimal_scale(g: &Graph, dm: &DistanceMatrix, x: &Layout) -> Result<f64> {
    assert_eq!(dm.node_count(), g.node_count(), "distance matrix mismatch");
    x.check_matches(g)?;
    let n = g.node_count();
    let coords = x.coords();
    let parts: Vec<(f64, f64)> = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(ROW_CHUNK)
        .map(|rows| {
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for &u in rows {
                let row = dm.row(u);
                let xu = coords[u];
                for v in u + 1..n {
                    let d = row[v] as f64;
                    let l = euclidean(xu, coords[v]);
                    num += l / d; // w * d * l with w = 1/d^2
                    den += (l * l) / (d * d);
                }
            }
            (num, den)
        })
        .collect();
    let (num, den) = parts
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (pa, pb)| (a + pa, b + pb));
    if den == 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok(num / den)
}
