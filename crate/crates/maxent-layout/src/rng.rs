//! Seeded random-stream derivation.
//!
//! Every stochastic stage of the pipeline draws from its own generator,
//! derived from the master seed, a stage tag, and a per-stage index (the
//! hierarchy level for clustering and prolongation, zero elsewhere). Streams
//! are therefore independent of one another and reproducible regardless of
//! which stages actually run.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// Stage tags for stream derivation. The numeric tag of each variant is part
/// of the reproducibility contract and must not be reordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Clustering,
    Prolong,
    Jitter,
    PerturbTree,
    PerturbRemove,
    PerturbInsert,
}

impl Stage {
    fn tag(self) -> u64 {
        match self {
            Stage::Clustering => 1,
            Stage::Prolong => 2,
            Stage::Jitter => 3,
            Stage::PerturbTree => 4,
            Stage::PerturbRemove => 5,
            Stage::PerturbInsert => 6,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the generator for `(seed, stage, index)`.
pub fn stream(seed: u64, stage: Stage, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(stage.tag() ^ splitmix64(index)));
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Deterministic unit direction for a degenerate (near-coincident) pair.
///
/// Hashed from the ordered id pair and the seed, and antisymmetric in the
/// argument order so that the two endpoints push in opposite directions.
pub fn pair_direction(u: u32, v: u32, seed: u64) -> [f64; 2] {
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    let h = splitmix64(seed ^ ((u64::from(lo) << 32) | u64::from(hi)));
    let angle = (h as f64 / u64::MAX as f64) * std::f64::consts::TAU;
    let dir = [angle.cos(), angle.sin()];
    if u <= v {
        dir
    } else {
        [-dir[0], -dir[1]]
    }
}
