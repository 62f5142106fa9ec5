//! Reference quantities for the optimal static tree over a weight multiset.
//!
//! [`optimal_expected_length`] rebuilds the optimal tree from scratch on
//! every call; it is a measurement tool for benchmarks and property tests,
//! not something to keep on a hot path.

use std::collections::VecDeque;

use num_traits::Float;

use crate::error::{check_weight, Error, Result};

/// Expected branches per lookup of the optimal tree for `weights`,
/// built by repeatedly merging the two lightest nodes. The result does not
/// depend on how ties are broken: every optimal tree shares the same
/// weighted depth sum. A single weight costs zero branches.
pub fn optimal_expected_length<W: Float>(weights: &[W]) -> Result<W> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    for &w in weights {
        check_weight(w)?;
    }
    if weights.len() == 1 {
        return Ok(W::zero());
    }
    let mut base: Vec<W> = weights.to_vec();
    base.sort_by(|x, y| x.partial_cmp(y).expect("weights are finite"));
    let mut base: VecDeque<W> = base.into();
    // Merge sums come out in nondecreasing order, so the two lightest
    // remaining nodes are always at the front of one of the two queues.
    let mut merged: VecDeque<W> = VecDeque::with_capacity(base.len());
    let mut branch_mass = W::zero();
    let mut root = W::zero();
    for _ in 1..weights.len() {
        let x = pop_lightest(&mut base, &mut merged);
        let y = pop_lightest(&mut base, &mut merged);
        let sum = x + y;
        branch_mass = branch_mass + sum;
        merged.push_back(sum);
        root = sum;
    }
    Ok(branch_mass / root)
}

fn pop_lightest<W: Float>(base: &mut VecDeque<W>, merged: &mut VecDeque<W>) -> W {
    match (base.front(), merged.front()) {
        (Some(&x), Some(&y)) if x <= y => base.pop_front().unwrap(),
        (Some(_), None) => base.pop_front().unwrap(),
        (_, Some(_)) => merged.pop_front().unwrap(),
        (None, None) => unreachable!("queues exhausted before all merges"),
    }
}

/// Shannon entropy in bits of the normalized weights. Bounds the optimal
/// expected length from below, and from above less one branch.
pub fn entropy<W: Float>(weights: &[W]) -> Result<W> {
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    for &w in weights {
        check_weight(w)?;
    }
    if weights.len() == 1 {
        return Ok(W::zero());
    }
    let total = weights.iter().fold(W::zero(), |acc, &w| acc + w);
    let mut h = W::zero();
    for &w in weights {
        let p = w / total;
        h = h - p * p.log2();
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_weight_is_free() {
        assert_eq!(optimal_expected_length(&[42.0]), Ok(0.0));
        assert_eq!(entropy(&[1.0]), Ok(0.0));
    }

    #[test]
    fn dyadic_three_way() {
        // Depths 1, 2, 2 for weights 1/2, 1/4, 1/4.
        let weights = [0.5, 0.25, 0.25];
        let e = optimal_expected_length(&weights).unwrap();
        assert!((e - 1.5).abs() < 1e-12);
        let h = entropy(&weights).unwrap();
        assert!((h - 1.5).abs() < 1e-12);
    }

    #[test]
    fn two_equal_outcomes() {
        assert_eq!(entropy(&[1.0, 1.0]), Ok(1.0));
        assert_eq!(optimal_expected_length(&[1.0, 1.0]), Ok(1.0));
    }

    #[test]
    fn rejects_empty_and_bad_weights() {
        assert_eq!(optimal_expected_length::<f64>(&[]), Err(Error::Empty));
        assert_eq!(entropy::<f64>(&[]), Err(Error::Empty));
        assert_eq!(
            optimal_expected_length(&[1.0, 0.0]),
            Err(Error::InvalidWeight)
        );
        assert_eq!(
            optimal_expected_length(&[1.0, -2.0]),
            Err(Error::InvalidWeight)
        );
        assert_eq!(entropy(&[f64::NAN]), Err(Error::InvalidWeight));
    }

    #[test]
    fn permutation_invariant_exactly() {
        let weights = [3.25, 0.5, 9.0, 0.5, 2.0, 7.75, 1.0, 1.0];
        let reference = optimal_expected_length(&weights).unwrap();
        let mut rotated = weights.to_vec();
        for _ in 0..weights.len() {
            rotated.rotate_left(1);
            assert_eq!(optimal_expected_length(&rotated), Ok(reference));
        }
        let mut reversed = weights.to_vec();
        reversed.reverse();
        assert_eq!(optimal_expected_length(&reversed), Ok(reference));
    }

    #[test]
    fn skewed_weights_stay_cheap() {
        // One dominant weight keeps lookups near one branch no matter how
        // many rare categories exist.
        let mut weights = vec![0.1 / 1023.0; 1023];
        weights.push(0.9);
        let e = optimal_expected_length(&weights).unwrap();
        let expected = 0.9 + (0.1 / 1023.0) * (1022.0 * 11.0 + 10.0);
        assert!((e - expected).abs() < 1e-9, "expected {expected}, got {e}");
        let h = entropy(&weights).unwrap();
        assert!(h <= e && e < h + 1.0);
    }

    #[test]
    fn entropy_bound_holds_for_uniform_sizes() {
        for n in [2usize, 3, 5, 17, 64, 1000] {
            let weights = vec![1.0; n];
            let e = optimal_expected_length(&weights).unwrap();
            let h = entropy(&weights).unwrap();
            assert!((h - (n as f64).log2()).abs() < 1e-9);
            assert!(h <= e + 1e-12 && e < h + 1.0, "n={n}: h={h}, e={e}");
        }
    }
}
