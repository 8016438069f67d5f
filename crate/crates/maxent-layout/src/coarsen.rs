//! Multilevel hierarchy construction: size-constrained label propagation and
//! cluster contraction.
//!
//! Starting from the input graph, each level is clustered under a weight
//! bound, the clusters are contracted into supervertices, and the process
//! repeats until at most two nodes remain. Construction is single-threaded;
//! the produced hierarchy is immutable and may be read concurrently.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;
use crate::rng::{self, Stage};

/// Tuning parameters for hierarchy construction.
#[derive(Debug, Clone)]
pub struct CoarseningParams {
    /// Divisor `f` in the cluster-size cap `|V|/f`. Decayed by 0.7 whenever a
    /// contraction shrinks the graph by less than 10%.
    pub f0: f64,
    /// Base `b` of the per-level cap `b^h`; level `h` counts from 1.
    pub b: f64,
    /// Maximum label propagation rounds per level.
    pub rounds: usize,
    /// Stop after this many coarsening levels (used by the dynamic update
    /// path); `None` coarsens until at most two nodes remain.
    pub max_levels: Option<usize>,
    /// Abort after this many consecutive ineffective `f`-decays.
    pub max_stalled_decays: usize,
}

impl Default for CoarseningParams {
    fn default() -> Self {
        CoarseningParams {
            f0: 20.0,
            b: 2.0,
            rounds: 3,
            max_levels: None,
            max_stalled_decays: 10,
        }
    }
}

/// A partition of the nodes into weight-bounded clusters.
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Cluster label per node. Labels are node ids of the singleton start and
    /// need not be dense.
    pub label: Vec<u32>,
    /// Total member weight per label id.
    pub cluster_weight: Vec<f64>,
    /// The bound the clustering was built under.
    pub bound: f64,
}

/// The sequence of contracted graphs. `levels[0]` is the finest (input)
/// graph; `maps[i]` sends a level-`i` node to its level-`i+1` supervertex and
/// `counts[i]` records how many level-`i` nodes each supervertex represents.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<Graph>,
    pub maps: Vec<Vec<u32>>,
    pub counts: Vec<Vec<u32>>,
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn coarsest(&self) -> &Graph {
        self.levels.last().unwrap()
    }

    /// Compose the per-level maps into a single map from level `from` to the
    /// coarser level `to`.
    pub fn composed_map(&self, from: usize, to: usize) -> Vec<u32> {
        assert!(from < to && to < self.levels.len());
        let mut map = self.maps[from].clone();
        for level in from + 1..to {
            let next = &self.maps[level];
            for entry in map.iter_mut() {
                *entry = next[*entry as usize];
            }
        }
        map
    }
}

/// Cluster weight bound for coarsening level `level_index` (counting from 1):
/// `max(max_node_weight, min(b^h, n_finest / f))`.
pub fn size_bound(level_index: u32, n_finest: usize, f: f64, b: f64, max_node_weight: f64) -> f64 {
    assert!(f > 0.0 && b > 1.0);
    let cap = (b.powi(level_index as i32)).min(n_finest as f64 / f);
    max_node_weight.max(cap)
}

/// Size-constrained label propagation.
///
/// Starts from the singleton clustering and performs up to `rounds` rounds.
/// Each round visits all nodes in a freshly shuffled order; a node moves to
/// the label with the largest incident edge weight among labels that stay
/// within `bound` after the move (its own label is always admissible), with
/// uniform random tie-breaking. Moves require strict improvement, so a round
/// without moves is a fixed point and terminates the loop early. One round
/// runs in O(n + m).
pub fn sclap_cluster(g: &Graph, bound: f64, rounds: usize, rng: &mut ChaCha8Rng) -> Clustering {
    let n = g.node_count();
    debug_assert!(
        g.max_node_weight() <= bound,
        "bound must admit every node somewhere"
    );

    let mut label: Vec<u32> = (0..n as u32).collect();
    let mut cluster_weight: Vec<f64> = g.node_weights().to_vec();

    // Timestamped scratch accumulator: score[l] is valid iff stamp[l] == now.
    let mut score = vec![0.0f64; n];
    let mut stamp = vec![0u64; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut ties: Vec<u32> = Vec::new();
    let mut now = 0u64;

    let mut order: Vec<u32> = (0..n as u32).collect();
    for _ in 0..rounds {
        shuffle(&mut order, rng);
        let mut moved = 0usize;
        for &v in &order {
            let v = v as usize;
            now += 1;
            touched.clear();
            for (&u, &_e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                let l = label[u as usize] as usize;
                if stamp[l] != now {
                    stamp[l] = now;
                    score[l] = 0.0;
                    touched.push(l as u32);
                }
            }
            for (&u, &e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                score[label[u as usize] as usize] += g.omega(e as usize);
            }

            let current = label[v];
            let current_score = if stamp[current as usize] == now {
                score[current as usize]
            } else {
                0.0
            };

            // Strictly better admissible labels only; ties drawn uniformly.
            let w_v = g.node_weight(v);
            let mut best = current_score;
            ties.clear();
            for &l in &touched {
                if l == current {
                    continue;
                }
                let s = score[l as usize];
                if s <= current_score || cluster_weight[l as usize] + w_v > bound {
                    continue;
                }
                if s > best {
                    best = s;
                    ties.clear();
                    ties.push(l);
                } else if s == best {
                    ties.push(l);
                }
            }
            if ties.is_empty() {
                continue;
            }
            let pick = if ties.len() == 1 {
                ties[0]
            } else {
                ties[rng.random_range(0..ties.len())]
            };
            cluster_weight[current as usize] -= w_v;
            cluster_weight[pick as usize] += w_v;
            debug_assert!(cluster_weight[pick as usize] <= bound + 1e-9);
            label[v] = pick;
            moved += 1;
        }
        if moved == 0 {
            break;
        }
    }

    Clustering {
        label,
        cluster_weight,
        bound,
    }
}

// Fisher-Yates; kept local so the draw pattern is pinned by this crate rather
// than by a library whose sampling internals might change.
fn shuffle(items: &mut [u32], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}

/// Contract each cluster into a supervertex.
///
/// Supervertex weight is the sum of member weights; an edge joins two
/// supervertices iff some input edge crosses the clusters, with weight equal
/// to the sum of crossing edge weights. Intra-cluster edges vanish. Target
/// lengths are left at 1 and recomputed per level downstream. Returns the
/// coarse graph and the fine-to-coarse map.
pub fn contract(g: &Graph, cl: &Clustering) -> (Graph, Vec<u32>) {
    let n = g.node_count();
    assert_eq!(cl.label.len(), n);

    // Dense coarse ids in ascending label order.
    let mut coarse_of_label: Vec<u32> = vec![u32::MAX; n];
    let mut occupied: Vec<u32> = cl.label.clone();
    occupied.sort_unstable();
    occupied.dedup();
    let coarse_n = occupied.len();
    for (cid, &l) in occupied.iter().enumerate() {
        coarse_of_label[l as usize] = cid as u32;
    }

    let map: Vec<u32> = cl
        .label
        .iter()
        .map(|&l| coarse_of_label[l as usize])
        .collect();

    let mut coarse_weight = vec![0.0f64; coarse_n];
    for v in 0..n {
        coarse_weight[map[v] as usize] += g.node_weight(v);
    }

    let mut crossing: Vec<(u32, u32, f64)> = Vec::new();
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let (cu, cv) = (map[u as usize], map[v as usize]);
        if cu == cv {
            continue;
        }
        let (a, b) = if cu < cv { (cu, cv) } else { (cv, cu) };
        crossing.push((a, b, g.omega(e)));
    }
    crossing.sort_by_key(|&(a, b, _)| (a, b));

    let mut coarse_edges: Vec<(u32, u32, f64, f64)> = Vec::new();
    for (a, b, w) in crossing {
        match coarse_edges.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 += w,
            _ => coarse_edges.push((a, b, w, 1.0)),
        }
    }

    let (coarse, _) =
        Graph::build_weighted_with_stats(coarse_n, &coarse_edges, Some(coarse_weight))
            .expect("contracted edges are valid by construction");
    (coarse, map)
}

/// Build the full hierarchy by repeated clustering and contraction.
///
/// Level `h = 1, 2, ...` computes its bound from the current working value of
/// `f`; `f` decays by 0.7 after any contraction that shrinks the level by
/// less than 10%. Stops once the coarsest graph has at most two nodes, after
/// `max_levels` contractions when set, or after `max_stalled_decays`
/// consecutive decays that produced no shrinkage at all.
pub fn build_hierarchy(g: &Graph, params: &CoarseningParams, seed: u64) -> Hierarchy {
    let n_finest = g.node_count();
    let mut levels = vec![g.clone()];
    let mut maps: Vec<Vec<u32>> = Vec::new();
    let mut counts: Vec<Vec<u32>> = Vec::new();

    let mut f = params.f0;
    let mut level_index = 1u32;
    let mut stalled = 0usize;

    while levels.last().unwrap().node_count() > 2 {
        if let Some(cap) = params.max_levels {
            if maps.len() >= cap {
                break;
            }
        }
        let current = levels.last().unwrap();
        let bound = size_bound(level_index, n_finest, f, params.b, current.max_node_weight());
        let mut rng = rng::stream(seed, Stage::Clustering, maps.len() as u64);
        let clustering = sclap_cluster(current, bound, params.rounds, &mut rng);
        let (coarse, map) = contract(current, &clustering);

        let cur_n = current.node_count();
        let coarse_n = coarse.node_count();
        if coarse_n >= cur_n {
            // No shrinkage: decay f and retry the same level.
            f *= 0.7;
            stalled += 1;
            if stalled >= params.max_stalled_decays {
                break;
            }
            continue;
        }

        let mut count = vec![0u32; coarse_n];
        for &c in &map {
            count[c as usize] += 1;
        }
        maps.push(map);
        counts.push(count);
        levels.push(coarse);
        level_index += 1;

        if coarse_n as f64 > 0.9 * cur_n as f64 {
            f *= 0.7;
            stalled += 1;
            if stalled >= params.max_stalled_decays {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    Hierarchy {
        levels,
        maps,
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stage};

    fn unit_graph(n: usize, pairs: &[(u32, u32)]) -> Graph {
        let edges: Vec<_> = pairs.iter().map(|&(u, v)| (u, v, 1.0, 1.0)).collect();
        Graph::build(n, &edges).unwrap()
    }

    #[test]
    fn size_bound_examples() {
        // Fine level: b^h dominates.
        assert_eq!(size_bound(1, 10_000, 20.0, 2.0, 1.0), 2.0);
        // Deep level: |V|/f dominates.
        assert_eq!(size_bound(10, 100, 20.0, 2.0, 1.0), 5.0);
        // Heavy node dominates everything.
        assert_eq!(size_bound(1, 10_000, 20.0, 2.0, 7.0), 7.0);
    }

    #[test]
    fn edgeless_graph_stays_singleton() {
        let g = Graph::build(4, &[(0, 1, 0.0, 1.0)]).unwrap();
        // Zero-weight edge gives no strict improvement anywhere.
        let mut rng = stream(42, Stage::Clustering, 0);
        let cl = sclap_cluster(&g, 4.0, 5, &mut rng);
        assert_eq!(cl.label, vec![0, 1, 2, 3]);
    }

    #[test]
    fn triangle_collapses_to_one_cluster() {
        let g = unit_graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let mut rng = stream(42, Stage::Clustering, 0);
        let cl = sclap_cluster(&g, 3.0, 3, &mut rng);
        assert_eq!(cl.label[0], cl.label[1]);
        assert_eq!(cl.label[1], cl.label[2]);
        // Exhaustive stability check: the single-cluster state admits no move.
        assert_stable(&g, &cl);
    }

    #[test]
    fn bridged_triangles_form_two_full_clusters() {
        let g = unit_graph(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]);
        let mut rng = stream(42, Stage::Clustering, 0);
        let cl = sclap_cluster(&g, 3.0, 5, &mut rng);
        assert_eq!(cl.label[0], cl.label[1]);
        assert_eq!(cl.label[1], cl.label[2]);
        assert_eq!(cl.label[3], cl.label[4]);
        assert_eq!(cl.label[4], cl.label[5]);
        assert_ne!(cl.label[0], cl.label[3]);
        assert_stable(&g, &cl);
    }

    /// Exhaustive check that no node can strictly improve its incident
    /// cluster weight without exceeding the bound.
    fn assert_stable(g: &Graph, cl: &Clustering) {
        for v in 0..g.node_count() {
            let mut gain = std::collections::HashMap::new();
            for (&u, &e) in g.neighbors(v).iter().zip(g.incident_edges(v)) {
                *gain.entry(cl.label[u as usize]).or_insert(0.0) += g.omega(e as usize);
            }
            let own = gain.get(&cl.label[v]).copied().unwrap_or(0.0);
            for (&l, &s) in &gain {
                if l == cl.label[v] {
                    continue;
                }
                let fits = cl.cluster_weight[l as usize] + g.node_weight(v) <= cl.bound;
                assert!(
                    !(fits && s > own),
                    "node {v} could improve by moving to label {l}"
                );
            }
        }
    }

    #[test]
    fn contract_two_clusters_sums_weights() {
        // Clusters {a,b} and {c}; edges (a,b,1), (a,c,2), (b,c,3).
        let g = Graph::build(
            3,
            &[(0, 1, 1.0, 1.0), (0, 2, 2.0, 1.0), (1, 2, 3.0, 1.0)],
        )
        .unwrap();
        let cl = Clustering {
            label: vec![0, 0, 2],
            cluster_weight: vec![2.0, 0.0, 1.0],
            bound: 2.0,
        };
        let (coarse, map) = contract(&g, &cl);
        assert_eq!(coarse.node_count(), 2);
        assert_eq!(coarse.edge_count(), 1);
        assert_eq!(coarse.node_weight(0), 2.0);
        assert_eq!(coarse.node_weight(1), 1.0);
        assert_eq!(coarse.omega(0), 5.0);
        assert_eq!(map, vec![0, 0, 1]);
    }

    #[test]
    fn contract_total_collapse() {
        let g = unit_graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let cl = Clustering {
            label: vec![1, 1, 1],
            cluster_weight: vec![0.0, 3.0, 0.0],
            bound: 3.0,
        };
        let (coarse, _) = contract(&g, &cl);
        assert_eq!(coarse.node_count(), 1);
        assert_eq!(coarse.edge_count(), 0);
        assert_eq!(coarse.node_weight(0), 3.0);
    }

    #[test]
    fn contract_matches_pairwise_crossing_oracle() {
        // 6 random-ish nodes in 2 clusters; oracle recomputes each coarse
        // edge weight by brute force over all fine edges.
        let g = Graph::build(
            6,
            &[
                (0, 1, 1.5, 1.0),
                (0, 3, 2.0, 1.0),
                (1, 4, 0.5, 1.0),
                (2, 5, 1.0, 1.0),
                (2, 3, 4.0, 1.0),
                (4, 5, 2.5, 1.0),
                (1, 2, 3.0, 1.0),
            ],
        )
        .unwrap();
        let label = vec![0u32, 0, 0, 4, 4, 4];
        let cl = Clustering {
            label: label.clone(),
            cluster_weight: vec![3.0, 0.0, 0.0, 0.0, 3.0, 0.0],
            bound: 3.0,
        };
        let (coarse, map) = contract(&g, &cl);

        let mut oracle = 0.0;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if label[u as usize] != label[v as usize] {
                oracle += g.omega(e);
            }
        }
        assert_eq!(coarse.edge_count(), 1);
        assert_eq!(coarse.omega(0), oracle);
        assert_eq!(map, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn two_node_input_is_already_coarsest() {
        let g = unit_graph(2, &[(0, 1)]);
        let h = build_hierarchy(&g, &CoarseningParams::default(), 1);
        assert_eq!(h.depth(), 1);
        assert_eq!(h.coarsest().node_count(), 2);
    }

    #[test]
    fn single_node_input_is_degenerate_hierarchy() {
        let g = Graph::build_weighted_with_stats(1, &[], Some(vec![1.0]))
            .unwrap()
            .0;
        let h = build_hierarchy(&g, &CoarseningParams::default(), 1);
        assert_eq!(h.depth(), 1);
    }

    #[test]
    fn star_hierarchy_shrinks_to_two_nodes() {
        let pairs: Vec<(u32, u32)> = (1..9).map(|v| (0, v)).collect();
        let g = unit_graph(9, &pairs);
        let h = build_hierarchy(&g, &CoarseningParams::default(), 42);
        for i in 1..h.depth() {
            assert!(h.levels[i].node_count() < h.levels[i - 1].node_count());
        }
        assert!(h.coarsest().node_count() <= 2);
        // Level-count regression for the fixed seed.
        assert_eq!(h.depth(), 6);
    }

    #[test]
    fn hierarchy_conserves_weights_level_to_level() {
        let pairs: Vec<(u32, u32)> = (0..19).map(|v| (v, v + 1)).chain([(0, 10), (5, 15)]).collect();
        let g = unit_graph(20, &pairs);
        let h = build_hierarchy(&g, &CoarseningParams::default(), 3);
        for i in 0..h.depth() - 1 {
            let fine = &h.levels[i];
            let coarse = &h.levels[i + 1];
            assert!((fine.total_node_weight() - coarse.total_node_weight()).abs() < 1e-9);

            let crossing: f64 = fine
                .edges()
                .iter()
                .enumerate()
                .filter(|&(_, &(u, v))| h.maps[i][u as usize] != h.maps[i][v as usize])
                .map(|(e, _)| fine.omega(e))
                .sum();
            assert!((crossing - coarse.total_edge_weight()).abs() < 1e-9);

            // Count support matches the map.
            let total: u32 = h.counts[i].iter().sum();
            assert_eq!(total as usize, fine.node_count());
        }
    }

    #[test]
    fn hierarchy_is_deterministic_for_fixed_seed() {
        let pairs: Vec<(u32, u32)> = (0..29).map(|v| (v, v + 1)).chain([(3, 17), (9, 25)]).collect();
        let g = unit_graph(30, &pairs);
        let a = build_hierarchy(&g, &CoarseningParams::default(), 5);
        let b = build_hierarchy(&g, &CoarseningParams::default(), 5);
        assert_eq!(a.depth(), b.depth());
        for i in 0..a.depth() {
            assert_eq!(a.levels[i], b.levels[i]);
        }
        assert_eq!(a.maps, b.maps);
    }
}
