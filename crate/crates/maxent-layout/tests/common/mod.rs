//! Shared generators and independent oracles for the integration suites.
//!
//! The oracles re-implement the checked formulas directly from their
//! definitions (explicit non-adjacency tests, double loops, numeric search)
//! and deliberately share no code with the library's computation paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maxent_layout::graph::{Graph, Layout};
use maxent_layout::rng::pair_direction;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Path of a bundled benchmark instance under the workspace `data/` tree.
pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

/// Connected random graph: a random spanning tree plus `extra` random edges.
pub fn random_connected(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges: Vec<(u32, u32, f64, f64)> = Vec::new();
    for v in 1..n as u32 {
        let parent = rng.random_range(0..v);
        edges.push((parent, v, 1.0, 1.0));
    }
    for _ in 0..extra {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a != b {
            edges.push((a, b, 1.0, 1.0));
        }
    }
    Graph::build(n, &edges).unwrap()
}

/// Random layout with coordinates in `[0, span)^2`.
pub fn random_layout(n: usize, span: f64, rng: &mut ChaCha8Rng) -> Layout {
    Layout::new(
        (0..n)
            .map(|_| [rng.random::<f64>() * span, rng.random::<f64>() * span])
            .collect(),
    )
}

/// Triangulated grid mesh: `side^2` nodes with row, column, and one diagonal
/// edge per cell (Delaunay-like density, m ~ 3n).
pub fn tri_mesh(side: usize) -> Graph {
    let idx = |r: usize, c: usize| (r * side + c) as u32;
    let mut pairs = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                pairs.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < side {
                pairs.push((idx(r, c), idx(r + 1, c)));
            }
            if r + 1 < side && c + 1 < side {
                pairs.push((idx(r, c), idx(r + 1, c + 1)));
            }
        }
    }
    let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, 1.0, 1.0)).collect();
    Graph::build(side * side, &edges).unwrap()
}

/// 3D box mesh with 6-neighborhood plus one body diagonal per cell
/// (structural-problem shape: m ~ 3.9n, diameter ~ 3*side).
pub fn box_mesh(side: usize) -> Graph {
    let idx = |x: usize, y: usize, z: usize| ((x * side + y) * side + z) as u32;
    let mut pairs = Vec::new();
    for x in 0..side {
        for y in 0..side {
            for z in 0..side {
                if x + 1 < side {
                    pairs.push((idx(x, y, z), idx(x + 1, y, z)));
                }
                if y + 1 < side {
                    pairs.push((idx(x, y, z), idx(x, y + 1, z)));
                }
                if z + 1 < side {
                    pairs.push((idx(x, y, z), idx(x, y, z + 1)));
                }
                if x + 1 < side && y + 1 < side && z + 1 < side {
                    pairs.push((idx(x, y, z), idx(x + 1, y + 1, z + 1)));
                }
            }
        }
    }
    let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, 1.0, 1.0)).collect();
    Graph::build(side * side * side, &edges).unwrap()
}

/// Denser mesh with both diagonals per cell (structural-problem density,
/// m ~ 4n).
pub fn quad_mesh(side: usize) -> Graph {
    let idx = |r: usize, c: usize| (r * side + c) as u32;
    let mut pairs = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                pairs.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < side {
                pairs.push((idx(r, c), idx(r + 1, c)));
            }
            if r + 1 < side && c + 1 < side {
                pairs.push((idx(r, c), idx(r + 1, c + 1)));
                pairs.push((idx(r, c + 1), idx(r + 1, c)));
            }
        }
    }
    let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, 1.0, 1.0)).collect();
    Graph::build(side * side, &edges).unwrap()
}

/// Direct evaluation of the local update rule for every node: stress term
/// over edges, repulsion summed explicitly over non-adjacent pairs (checked
/// against an edge set), same degeneracy guard as the documented contract.
pub fn naive_local_update(
    g: &Graph,
    edge_dist: &[f64],
    x: &Layout,
    alpha: f64,
    guard: f64,
    guard_seed: u64,
) -> Vec<[f64; 2]> {
    let n = g.node_count();
    let edge_set: std::collections::HashSet<(u32, u32)> = g.edges().iter().copied().collect();
    let is_edge = |a: usize, b: usize| {
        let key = if a < b {
            (a as u32, b as u32)
        } else {
            (b as u32, a as u32)
        };
        edge_set.contains(&key)
    };

    let mut weight = vec![0.0f64; g.edge_count()];
    for (e, w) in weight.iter_mut().enumerate() {
        *w = 1.0 / (edge_dist[e] * edge_dist[e]);
    }

    let mut out = vec![[0.0f64; 2]; n];
    for u in 0..n {
        let xu = x[u];
        let mut rho = 0.0f64;
        let mut stress = [0.0f64; 2];
        for (&v, &e) in g.neighbors(u).iter().zip(g.incident_edges(u)) {
            let xv = x[v as usize];
            let w = weight[e as usize];
            let d = edge_dist[e as usize];
            rho += w;
            let dx = xu[0] - xv[0];
            let dy = xu[1] - xv[1];
            let dist = (dx * dx + dy * dy).sqrt();
            let dir = if dist < guard {
                pair_direction(u as u32, v, guard_seed)
            } else {
                [dx / dist, dy / dist]
            };
            stress[0] += w * (xv[0] + d * dir[0]);
            stress[1] += w * (xv[1] + d * dir[1]);
        }
        let mut rep = [0.0f64; 2];
        for v in 0..n {
            if v == u || is_edge(u, v) {
                continue;
            }
            let xv = x[v];
            let dx = xu[0] - xv[0];
            let dy = xu[1] - xv[1];
            let d2 = dx * dx + dy * dy;
            if d2 < guard * guard {
                let dir = pair_direction(u as u32, v as u32, guard_seed);
                rep[0] += dir[0] / guard;
                rep[1] += dir[1] / guard;
            } else {
                rep[0] += dx / d2;
                rep[1] += dy / d2;
            }
        }
        out[u] = [
            stress[0] / rho + alpha * rep[0] / rho,
            stress[1] / rho + alpha * rep[1] / rho,
        ];
    }
    out
}

/// Full stress by definition: double loop over unordered pairs with
/// brute-force BFS hop distances.
pub fn naive_full_stress(g: &Graph, x: &Layout) -> f64 {
    let n = g.node_count();
    let mut total = 0.0f64;
    for u in 0..n {
        let dist = bfs_row(g, u);
        for v in u + 1..n {
            let d = dist[v] as f64;
            let dx = x[u][0] - x[v][0];
            let dy = x[u][1] - x[v][1];
            let l = (dx * dx + dy * dy).sqrt();
            total += (l - d) * (l - d) / (d * d);
        }
    }
    total
}

/// Maxent objective by definition: edge stress with stored target lengths
/// minus alpha times log distances over explicitly screened non-edges.
pub fn naive_maxent(g: &Graph, x: &Layout, alpha: f64) -> f64 {
    let n = g.node_count();
    let edge_set: std::collections::HashSet<(u32, u32)> = g.edges().iter().copied().collect();
    let mut stress = 0.0f64;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let d = g.target_length(e);
        let dx = x[u as usize][0] - x[v as usize][0];
        let dy = x[u as usize][1] - x[v as usize][1];
        let l = (dx * dx + dy * dy).sqrt();
        stress += (l - d) * (l - d) / (d * d);
    }
    let mut entropy = 0.0f64;
    for u in 0..n {
        for v in u + 1..n {
            if edge_set.contains(&(u as u32, v as u32)) {
                continue;
            }
            let dx = x[u][0] - x[v][0];
            let dy = x[u][1] - x[v][1];
            entropy += (dx * dx + dy * dy).sqrt().ln();
        }
    }
    stress - alpha * entropy
}

pub fn bfs_row(g: &Graph, source: usize) -> Vec<u32> {
    let n = g.node_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u as usize) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = dist[u as usize] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Stress of the uniformly scaled layout, for the golden-section oracle.
pub fn scaled_full_stress(g: &Graph, x: &Layout, s: f64) -> f64 {
    naive_full_stress(g, &x.scaled(s))
}

/// Golden-section bracketing followed by one parabolic-vertex step with wide
/// sample spacing. Plain golden section cannot localize a smooth minimum
/// beyond ~sqrt(machine epsilon) because comparisons near the bottom drown
/// in rounding; the objective here is exactly quadratic, so the vertex of a
/// parabola through three well-separated samples recovers the minimizer to
/// near machine precision.
pub fn numeric_minimizer(lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let rough = golden_section(lo, hi, 1e-6, &mut f);
    let h = (rough.abs() * 0.05).max(1e-4);
    let (fm, fc, fp) = (f(rough - h), f(rough), f(rough + h));
    let denom = fp - 2.0 * fc + fm;
    if denom <= 0.0 {
        return rough;
    }
    rough - h * (fp - fm) / (2.0 * denom)
}

/// One-dimensional golden-section minimizer over `[lo, hi]`.
pub fn golden_section(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - phi * (hi - lo);
    let mut d = lo + phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + phi * (hi - lo);
            fd = f(d);
        }
    }
    (lo + hi) / 2.0
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = x.ln();
        let ly = y.ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
