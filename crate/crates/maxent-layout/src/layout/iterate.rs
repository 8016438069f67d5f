//! The local iteration kernels.
//!
//! One iteration moves every node to a weighted combination of a stress term
//! over its edges and a repulsion ("entropy") term over all other nodes:
//!
//! ```text
//! x_u <- (1/rho_u) * sum_{uv in E} w_uv (x_v + d_uv (x_u - x_v)/|x_u - x_v|)
//!      + (alpha/rho_u) * sum_{uv not in E} (x_u - x_v)/|x_u - x_v|^2
//! ```
//!
//! All reads come from the previous layout (Jacobi style), so node updates
//! are independent: the result is bitwise identical regardless of update
//! order or worker count. The non-edge sum is evaluated as the sum over all
//! pairs minus the sum over edges, which is the same operation sequence the
//! approximate kernel degenerates to under an identity map; the two kernels
//! therefore agree bitwise in that case.
//!
//! The approximate kernel replaces far-field repulsion by supervertices of a
//! coarser level: exact r-values inside the node's own cluster, one
//! count-scaled r-value per other supervertex, minus the edge r-values that
//! the first two sums over-counted. After each approximate pass the
//! supervertex coordinates are refreshed to the weighted midpoints of the
//! nodes they represent.

use rayon::prelude::*;

use super::context::{weighted_midpoints, LevelContext};
use crate::error::Result;
use crate::graph::Layout;
use crate::rng::pair_direction;

const NODE_CHUNK: usize = 512;
const NORM_CHUNK: usize = 4096;

/// Repulsion vector `(xu - xv) / |xu - xv|^2` with the degenerate-pair guard:
/// below `guard` separation the direction is a deterministic hash of the id
/// pair and the magnitude is that of a pair at `guard` distance.
#[inline]
fn r_value(u: u32, v: u32, xu: [f64; 2], xv: [f64; 2], guard: f64, seed: u64) -> [f64; 2] {
    let dx = xu[0] - xv[0];
    let dy = xu[1] - xv[1];
    let d2 = dx * dx + dy * dy;
    if d2 < guard * guard {
        let dir = pair_direction(u, v, seed);
        [dir[0] / guard, dir[1] / guard]
    } else {
        [dx / d2, dy / d2]
    }
}

/// Unit direction from `xv` toward `xu`, guarded like `r_value`.
#[inline]
fn unit_direction(u: u32, v: u32, xu: [f64; 2], xv: [f64; 2], guard: f64, seed: u64) -> [f64; 2] {
    let dx = xu[0] - xv[0];
    let dy = xu[1] - xv[1];
    let dist = (dx * dx + dy * dy).sqrt();
    if dist < guard {
        pair_direction(u, v, seed)
    } else {
        [dx / dist, dy / dist]
    }
}

#[inline]
fn stress_sum(ctx: &LevelContext, coords: &[[f64; 2]], u: usize) -> [f64; 2] {
    let xu = coords[u];
    let mut acc = [0.0f64; 2];
    let range = ctx.arc_range(u);
    let nbrs = ctx.graph.neighbors(u);
    for (ai, &v) in range.zip(nbrs) {
        let xv = coords[v as usize];
        let w = ctx.arc_weight[ai];
        let d = ctx.arc_dist[ai];
        let dir = unit_direction(u as u32, v, xu, xv, ctx.guard_distance, ctx.guard_seed);
        acc[0] += w * (xv[0] + d * dir[0]);
        acc[1] += w * (xv[1] + d * dir[1]);
    }
    acc
}

/// Shared finishing step; both kernels must combine terms identically for
/// their identity-map equivalence to hold bitwise.
#[inline]
fn finish(stress: [f64; 2], entropy: [f64; 2], rho: f64, alpha: f64) -> [f64; 2] {
    [
        (stress[0] + alpha * entropy[0]) / rho,
        (stress[1] + alpha * entropy[1]) / rho,
    ]
}

fn update_node_exact(ctx: &LevelContext, coords: &[[f64; 2]], alpha: f64, u: usize) -> [f64; 2] {
    let xu = coords[u];
    let stress = stress_sum(ctx, coords, u);

    let guard = ctx.guard_distance;
    let seed = ctx.guard_seed;
    let mut ent = [0.0f64; 2];
    // All pairs, ascending.
    for (v, &xv) in coords.iter().enumerate() {
        if v == u {
            continue;
        }
        let r = r_value(u as u32, v as u32, xu, xv, guard, seed);
        ent[0] += r[0];
        ent[1] += r[1];
    }
    // Remove the pairs that are edges.
    for &v in ctx.graph.neighbors(u) {
        let r = r_value(u as u32, v, xu, coords[v as usize], guard, seed);
        ent[0] -= r[0];
        ent[1] -= r[1];
    }

    finish(stress, ent, ctx.rho[u], alpha)
}

fn update_node_approx(ctx: &LevelContext, coords: &[[f64; 2]], alpha: f64, u: usize) -> [f64; 2] {
    let approx = ctx.approx.as_ref().expect("approximate context required");
    let xu = coords[u];
    let stress = stress_sum(ctx, coords, u);

    let guard = ctx.guard_distance;
    let seed = ctx.guard_seed;
    let mut ent = [0.0f64; 2];

    // Exact r-values inside u's own cluster, ascending member order.
    let c = approx.map[u] as usize;
    for &v in &approx.members[approx.member_start[c]..approx.member_start[c + 1]] {
        if v as usize == u {
            continue;
        }
        let r = r_value(u as u32, v, xu, coords[v as usize], guard, seed);
        ent[0] += r[0];
        ent[1] += r[1];
    }
    // One count-scaled r-value per other supervertex, ascending.
    for (vp, &xvp) in approx.layout.iter().enumerate() {
        if vp == c {
            continue;
        }
        let nu = approx.nu[vp];
        let r = r_value(u as u32, vp as u32, xu, xvp, guard, seed);
        ent[0] += nu * r[0];
        ent[1] += nu * r[1];
    }
    // Remove the edge pairs counted by the sums above.
    for &v in ctx.graph.neighbors(u) {
        let r = r_value(u as u32, v, xu, coords[v as usize], guard, seed);
        ent[0] -= r[0];
        ent[1] -= r[1];
    }

    finish(stress, ent, ctx.rho[u], alpha)
}

fn run_pass(
    ctx: &LevelContext,
    x: &Layout,
    alpha: f64,
    kernel: fn(&LevelContext, &[[f64; 2]], f64, usize) -> [f64; 2],
) -> Result<Layout> {
    x.check_matches(ctx.graph)?;
    x.check_finite()?;
    let n = x.len();
    if n == 1 {
        return Ok(x.clone());
    }
    let coords = x.coords();
    let mut out = vec![[0.0f64; 2]; n];
    out.par_chunks_mut(NODE_CHUNK)
        .enumerate()
        .for_each(|(chunk_index, chunk)| {
            let base = chunk_index * NODE_CHUNK;
            for (i, slot) in chunk.iter_mut().enumerate() {
                *slot = kernel(ctx, coords, alpha, base + i);
            }
        });
    Ok(Layout::new(out))
}

/// One exact iteration; O(n^2).
pub fn iterate_exact(ctx: &LevelContext, x: &Layout, alpha: f64) -> Result<Layout> {
    run_pass(ctx, x, alpha, update_node_exact)
}

/// One approximate iteration; O(m + sum_u(cluster(u) + k)) where `k` is the
/// approximation level's node count. Refreshes the supervertex coordinates
/// from the updated layout before returning.
pub fn iterate_approx(ctx: &mut LevelContext, x: &Layout, alpha: f64) -> Result<Layout> {
    assert!(ctx.approx.is_some(), "context has no approximation data");
    let out = run_pass(ctx, x, alpha, update_node_approx)?;
    let approx = ctx.approx.as_mut().unwrap();
    approx.layout = weighted_midpoints(
        &approx.map,
        approx.layout.len(),
        &out,
        ctx.graph.node_weights(),
    );
    Ok(out)
}

/// Relative movement `|x_new - x_old| / |x_old|` over all 2n scalars.
///
/// Partial sums are taken over fixed-size index chunks and combined in chunk
/// order, so the value is bitwise independent of the worker count. A zero
/// base norm yields infinity ("not converged").
pub fn relative_change(old: &Layout, new: &Layout) -> f64 {
    assert_eq!(old.len(), new.len(), "layout lengths differ");
    let parts: Vec<(f64, f64)> = old
        .coords()
        .par_chunks(NORM_CHUNK)
        .zip(new.coords().par_chunks(NORM_CHUNK))
        .map(|(a, b)| {
            let mut diff = 0.0f64;
            let mut base = 0.0f64;
            for (ca, cb) in a.iter().zip(b) {
                let dx = cb[0] - ca[0];
                let dy = cb[1] - ca[1];
                diff += dx * dx + dy * dy;
                base += ca[0] * ca[0] + ca[1] * ca[1];
            }
            (diff, base)
        })
        .collect();
    let (diff, base) = parts
        .into_iter()
        .fold((0.0, 0.0), |(d, b), (pd, pb)| (d + pd, b + pb));
    if base == 0.0 {
        f64::INFINITY
    } else {
        diff.sqrt() / base.sqrt()
    }
}
