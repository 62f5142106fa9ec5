//! Helpers shared by the integration suites. The oracles here (exhaustive
//! tree enumeration, depth-weighted path length, interval lookup) are
//! deliberately independent of the code paths they check.

// Each integration test binary compiles its own copy of this module and
// uses a different subset of it.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutable_categorical::workload::WeightDistribution;
use mutable_categorical::MutableCategorical64;

pub type Tree = MutableCategorical64<u64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

pub fn ulp(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1) - x
}

/// True when `u` lies within one ulp of an adjacent partition boundary,
/// where the tree walk and the prefix-sum oracles may legitimately round
/// to different sides.
pub fn near_boundary(u: f64, sorted_boundaries: &[f64]) -> bool {
    let at = sorted_boundaries.partition_point(|&b| b <= u);
    let mut close = false;
    if at < sorted_boundaries.len() {
        close |= (sorted_boundaries[at] - u).abs() <= ulp(sorted_boundaries[at]);
    }
    if at > 0 {
        close |= (u - sorted_boundaries[at - 1]).abs() <= ulp(sorted_boundaries[at - 1]);
    }
    close
}

pub fn random_tree(
    rng: &mut ChaCha8Rng,
    n: usize,
    dist: WeightDistribution,
    rotations: bool,
) -> Tree {
    let mut tree = Tree::new(rotations);
    for key in 0..n as u64 {
        tree.add(key, dist.sample(rng)).expect("fresh key");
    }
    tree
}

/// Churns a tree with `ops` random add/remove/reweight mutations, keeping
/// at least one category. Returns the keys still present.
pub fn churn(
    tree: &mut Tree,
    rng: &mut ChaCha8Rng,
    dist: WeightDistribution,
    ops: usize,
) -> Vec<u64> {
    // Key order must not depend on tree shape, or matched-seed runs with
    // different rotation policies would target different keys.
    let mut live: Vec<u64> = tree.leaves().map(|(k, _, _)| *k).collect();
    live.sort_unstable();
    let mut next = live.iter().copied().max().map_or(0, |k| k + 1);
    for _ in 0..ops {
        match rng.random_range(0..3u32) {
            0 => {
                tree.add(next, dist.sample(rng)).expect("fresh key");
                live.push(next);
                next += 1;
            }
            1 if live.len() > 1 => {
                let key = live.swap_remove(rng.random_range(0..live.len()));
                tree.remove(&key).expect("live key");
            }
            2 if !live.is_empty() => {
                let key = live[rng.random_range(0..live.len())];
                tree.set_weight(&key, dist.sample(rng)).expect("live key");
            }
            _ => {}
        }
    }
    live
}

/// Exhaustive minimum of the expected path length over every full binary
/// tree on the given leaves: a subset's best cost is its weight sum plus
/// the best costs of the two halves, minimized over all bipartitions.
pub fn brute_force_optimal(weights: &[f64]) -> f64 {
    let n = weights.len();
    assert!((1..=16).contains(&n), "exhaustive search is exponential");
    let full = (1usize << n) - 1;
    let mut sum = vec![0.0f64; full + 1];
    let mut cost = vec![f64::INFINITY; full + 1];
    for mask in 1..=full {
        let mut s = 0.0;
        for (i, w) in weights.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s += w;
            }
        }
        sum[mask] = s;
        if mask.count_ones() == 1 {
            cost[mask] = 0.0;
            continue;
        }
        let low_bit = mask & mask.wrapping_neg();
        let mut best = f64::INFINITY;
        let mut part = (mask - 1) & mask;
        while part > 0 {
            // Pin the lowest set bit to one side so each unordered
            // bipartition is scored exactly once.
            if part & low_bit != 0 && part != mask {
                let other = mask & !part;
                let split = cost[part] + cost[other];
                if split < best {
                    best = split;
                }
            }
            part = (part - 1) & mask;
        }
        cost[mask] = sum[mask] + best;
    }
    cost[full] / sum[full]
}

/// Depth-weighted route to the expected path length, independent of the
/// branch-mass accumulation inside the tree.
pub fn path_length_by_depths(tree: &Tree) -> f64 {
    let total = tree.total_weight();
    tree.leaves().map(|(_, w, d)| w * d as f64).sum::<f64>() / total
}

/// Prints the acceptance verdict line for a criterion and panics on
/// failure so the test harness records it.
pub fn report(ok: bool, label: &str, detail: &str) {
    if ok {
        println!("PASS: {label} — {detail}");
    } else {
        println!("FAIL: {label} — {detail}");
        panic!("{label}: {detail}");
    }
}
