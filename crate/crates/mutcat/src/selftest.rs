//! Randomized cross-checks of the distribution against its independent
//! oracles, driven entirely through the public API. Each check prints one
//! `ok`/`FAILED` line; the caller turns any failure into exit code 2.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutable_categorical::baseline::{leaf_intervals, CdfTable};
use mutable_categorical::huffman::{entropy, optimal_expected_length};
use mutable_categorical::workload::WeightDistribution;
use mutable_categorical::MutableCategorical64;

type Tree = MutableCategorical64<u64>;
type Check = fn(u64) -> Result<(), String>;

pub fn run(seed: u64) -> usize {
    let checks: [(&str, Check); 5] = [
        (
            "invariants under randomized operations",
            invariants_under_random_ops,
        ),
        (
            "sampler agrees with interval and cdf oracles",
            sampler_agreement,
        ),
        (
            "optimal length matches exhaustive minimum",
            huffman_against_brute_force,
        ),
        (
            "path length identity and optimality bounds",
            path_length_identity,
        ),
        ("reweight equals delete-then-add", modify_equivalence),
    ];
    let mut failures = 0;
    for (name, check) in checks {
        match check(seed) {
            Ok(()) => println!("ok {name}"),
            Err(detail) => {
                failures += 1;
                println!("FAILED {name}: {detail}");
            }
        }
    }
    failures
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize, dist: WeightDistribution, rotations: bool) -> Tree {
    let mut tree = Tree::new(rotations);
    for key in 0..n as u64 {
        tree.add(key, dist.sample(rng)).expect("fresh key");
    }
    tree
}

fn invariants_under_random_ops(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for dist in WeightDistribution::ALL {
        for rotations in [false, true] {
            let mut tree = Tree::new(rotations);
            let mut shadow: HashMap<u64, f64> = HashMap::new();
            let mut next = 0u64;
            let mut live: Vec<u64> = Vec::new();
            for op in 0..2_000u32 {
                match rng.random_range(0..3u32) {
                    0 => {
                        let w = dist.sample(&mut rng);
                        tree.add(next, w).map_err(|e| format!("add failed: {e}"))?;
                        shadow.insert(next, w);
                        live.push(next);
                        next += 1;
                    }
                    1 if live.len() > 1 => {
                        let key = live.swap_remove(rng.random_range(0..live.len()));
                        tree.remove(&key)
                            .map_err(|e| format!("remove failed: {e}"))?;
                        shadow.remove(&key);
                    }
                    2 if !live.is_empty() => {
                        let key = live[rng.random_range(0..live.len())];
                        let w = dist.sample(&mut rng);
                        tree.set_weight(&key, w)
                            .map_err(|e| format!("set_weight failed: {e}"))?;
                        shadow.insert(key, w);
                    }
                    _ => continue,
                }
                let violations = tree.validate();
                if let Some(first) = violations.first() {
                    return Err(format!("op {op} ({dist}, rotations={rotations}): {first}"));
                }
                if tree.len() != shadow.len() {
                    return Err(format!("size {} != shadow {}", tree.len(), shadow.len()));
                }
                let total: f64 = shadow.values().sum();
                if (tree.total_weight() - total).abs() > 1e-9 * total.max(1.0) {
                    return Err(format!(
                        "total {} != shadow total {total}",
                        tree.total_weight()
                    ));
                }
            }
            for (key, &w) in &shadow {
                if tree.weight_of(key) != Some(w) {
                    return Err(format!("weight_of({key}) lost its stored value"));
                }
            }
        }
    }
    Ok(())
}

fn sampler_agreement(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0001);
    for round in 0..20 {
        let n = rng.random_range(2..512);
        let dist = WeightDistribution::ALL[round % 3];
        let tree = random_tree(&mut rng, n, dist, round % 2 == 0);
        let intervals = leaf_intervals(&tree).map_err(|e| e.to_string())?;
        let cdf =
            CdfTable::build(tree.leaves().map(|(k, w, _)| (*k, w))).map_err(|e| e.to_string())?;
        let boundaries: Vec<f64> = intervals.iter().map(|iv| iv.hi).collect();
        let total = tree.total_weight();
        for _ in 0..2_000 {
            let u = rng.random::<f64>() * total;
            if u >= total || near_boundary(u, &boundaries) {
                continue;
            }
            let walked = *tree.sample(u).map_err(|e| e.to_string())?;
            let slot = intervals.partition_point(|iv| iv.hi <= u);
            let oracle = *intervals[slot].key;
            let table = *cdf.sample(u).map_err(|e| e.to_string())?;
            if walked != oracle || walked != table {
                return Err(format!(
                    "u={u}: walk gave {walked}, intervals gave {oracle}, cdf gave {table}"
                ));
            }
        }
    }
    Ok(())
}

fn near_boundary(u: f64, boundaries: &[f64]) -> bool {
    let at = boundaries.partition_point(|&b| b <= u);
    let mut close = false;
    if at < boundaries.len() {
        close |= (boundaries[at] - u).abs() <= ulp(boundaries[at]);
    }
    if at > 0 {
        close |= (u - boundaries[at - 1]).abs() <= ulp(boundaries[at - 1]);
    }
    close
}

fn ulp(x: f64) -> f64 {
    f64::from_bits(x.to_bits() + 1) - x
}

/// Exhaustive minimum weighted depth over every full binary tree: each
/// subset's best cost is its weight sum plus the best costs of the two
/// halves, minimized over all proper bipartitions.
fn brute_force_optimal(weights: &[f64]) -> f64 {
    let n = weights.len();
    assert!((1..=16).contains(&n));
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
        let mut part = (mask - 1) & mask;
        let mut best = f64::INFINITY;
        while part > 0 {
            // Fix the lowest set bit on one side so each bipartition is
            // visited once.
            if part & low_bit != 0 && part != mask {
                let rest = mask & !part;
                let split = cost[part] + cost[rest];
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

fn huffman_against_brute_force(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0002);
    for round in 0..50 {
        let n = rng.random_range(1..=8);
        let dist = WeightDistribution::ALL[round % 3];
        let weights: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let fast = optimal_expected_length(&weights).map_err(|e| e.to_string())?;
        let exact = brute_force_optimal(&weights);
        if (fast - exact).abs() > 1e-9 * exact.max(1.0) {
            return Err(format!(
                "weights {weights:?}: fast {fast} vs exhaustive {exact}"
            ));
        }
    }
    for round in 0..20 {
        let n = rng.random_range(2..512);
        let dist = WeightDistribution::ALL[round % 3];
        let weights: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
        let e = optimal_expected_length(&weights).map_err(|e| e.to_string())?;
        let h = entropy(&weights).map_err(|e| e.to_string())?;
        if !(h <= e + 1e-9 && e < h + 1.0) {
            return Err(format!(
                "n={n}: entropy {h} does not bound optimal length {e}"
            ));
        }
    }
    Ok(())
}

fn path_length_identity(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0003);
    for round in 0..100 {
        let n = rng.random_range(1..=128);
        let dist = WeightDistribution::ALL[round % 3];
        let tree = random_tree(&mut rng, n, dist, round % 2 == 0);
        let from_sums = tree.expected_path_length().map_err(|e| e.to_string())?;
        let total = tree.total_weight();
        let from_depths: f64 = tree.leaves().map(|(_, w, d)| w * d as f64).sum::<f64>() / total;
        if (from_sums - from_depths).abs() > 1e-9 * from_depths.max(1e-12) {
            return Err(format!(
                "branch sums {from_sums} vs depth sums {from_depths}"
            ));
        }
        let weights: Vec<f64> = tree.leaves().map(|(_, w, _)| w).collect();
        let optimal = optimal_expected_length(&weights).map_err(|e| e.to_string())?;
        if from_sums < optimal * (1.0 - 1e-9) {
            return Err(format!(
                "maintained {from_sums} undercuts optimal {optimal}"
            ));
        }
    }
    Ok(())
}

fn modify_equivalence(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0004);
    for round in 0..100 {
        let n = rng.random_range(1..=64);
        let dist = WeightDistribution::ALL[round % 3];
        let tree = random_tree(&mut rng, n, dist, round % 2 == 0);
        let key = rng.random_range(0..n as u64);
        let weight = dist.sample(&mut rng);
        let mut direct = tree.clone();
        direct.set_weight(&key, weight).map_err(|e| e.to_string())?;
        let mut composed = tree;
        composed.remove(&key).map_err(|e| e.to_string())?;
        composed.add(key, weight).map_err(|e| e.to_string())?;
        if direct != composed {
            return Err(format!(
                "round {round}: reweight({key}) diverged from delete+add"
            ));
        }
    }
    Ok(())
}
