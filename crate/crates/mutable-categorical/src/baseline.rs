//! The textbook cumulative-table sampler and an interval oracle for the
//! tree walk.
//!
//! A [`CdfTable`] is the standard prefix-sum + binary-search sampler. It is
//! exact and simple, but any weight change forces an O(n) rebuild, which is
//! precisely the cost the tree structure avoids. Here it serves as a
//! correctness baseline.

use std::collections::HashSet;
use std::hash::Hash;

use num_traits::Float;

use crate::error::{check_weight, Error, Result};
use crate::tree::MutableCategorical;

/// Immutable prefix-sum table over keyed weights, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfTable<K, W> {
    keys: Vec<K>,
    cumulative: Vec<W>,
}

impl<K: Eq + Hash + Clone, W: Float> CdfTable<K, W> {
    /// Builds the table from `(key, weight)` pairs; O(n).
    pub fn build<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, W)>,
    {
        let mut keys = Vec::new();
        let mut cumulative = Vec::new();
        let mut seen = HashSet::new();
        let mut acc = W::zero();
        for (key, weight) in pairs {
            check_weight(weight)?;
            if !seen.insert(key.clone()) {
                return Err(Error::DuplicateKey);
            }
            acc = acc + weight;
            keys.push(key);
            cumulative.push(acc);
        }
        if keys.is_empty() {
            return Err(Error::Empty);
        }
        Ok(CdfTable { keys, cumulative })
    }

    /// Binary-searches for the first key whose cumulative weight exceeds `u`.
    /// A `u` exactly equal to a cumulative value belongs to the next
    /// interval.
    pub fn sample(&self, u: W) -> Result<&K> {
        if !(u >= W::zero() && u < self.total()) {
            return Err(Error::OutOfRange);
        }
        let i = self.cumulative.partition_point(|&c| c <= u);
        Ok(&self.keys[i])
    }

    pub fn total(&self) -> W {
        *self.cumulative.last().expect("table is never empty")
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn cumulative(&self) -> &[W] {
        &self.cumulative
    }
}

/// The half-open interval of sample points that the tree walk maps to `key`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeafInterval<'a, K, W> {
    pub key: &'a K,
    pub lo: W,
    pub hi: W,
}

/// Enumerates each category's share of `[0, total_weight)` in walk order:
/// at every sum node the first child owns the low part of the parent's
/// interval. Intervals are adjacent by construction and their widths equal
/// the leaf weights up to rounding of the running sum.
pub fn leaf_intervals<K, W>(dist: &MutableCategorical<K, W>) -> Result<Vec<LeafInterval<'_, K, W>>>
where
    K: Eq + Hash + Clone,
    W: Float,
{
    if dist.is_empty() {
        return Err(Error::Empty);
    }
    let mut out = Vec::with_capacity(dist.len());
    let mut acc = W::zero();
    for (key, weight, _) in dist.leaves() {
        let lo = acc;
        acc = acc + weight;
        out.push(LeafInterval { key, lo, hi: acc });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_single_pair() {
        let table = CdfTable::build([("A", 1.0)]).unwrap();
        assert_eq!(table.cumulative(), &[1.0]);
        assert_eq!(table.total(), 1.0);
    }

    #[test]
    fn build_prefix_sums_in_order() {
        let table = CdfTable::build([("A", 1.0), ("B", 2.0), ("C", 3.0)]).unwrap();
        assert_eq!(table.keys(), &["A", "B", "C"]);
        assert_eq!(table.cumulative(), &[1.0, 3.0, 6.0]);
    }

    #[test]
    fn build_rejects_duplicates_and_bad_weights() {
        assert_eq!(
            CdfTable::build([("A", 1.0), ("A", 2.0)]).unwrap_err(),
            Error::DuplicateKey
        );
        assert_eq!(
            CdfTable::build([("A", 1.0), ("B", -2.0)]).unwrap_err(),
            Error::InvalidWeight
        );
        assert_eq!(CdfTable::<&str, f64>::build([]).unwrap_err(), Error::Empty);
    }

    #[test]
    fn sample_boundaries() {
        let table = CdfTable::build([("A", 1.0), ("B", 2.0), ("C", 3.0)]).unwrap();
        assert_eq!(table.sample(0.0), Ok(&"A"));
        assert_eq!(table.sample(2.5), Ok(&"B"));
        assert_eq!(table.sample(5.999), Ok(&"C"));
        // Cumulative points belong to the next key.
        assert_eq!(table.sample(1.0), Ok(&"B"));
        assert_eq!(table.sample(3.0), Ok(&"C"));
        assert_eq!(table.sample(6.0), Err(Error::OutOfRange));
        assert_eq!(table.sample(-0.5), Err(Error::OutOfRange));
    }

    #[test]
    fn intervals_of_single_leaf() {
        let mut dist = MutableCategorical::new(false);
        dist.add("A", 0.7).unwrap();
        let intervals = leaf_intervals(&dist).unwrap();
        assert_eq!(intervals.len(), 1);
        assert_eq!((intervals[0].lo, intervals[0].hi), (0.0, 0.7));
    }

    #[test]
    fn intervals_follow_walk_order() {
        let mut dist = MutableCategorical::new(false);
        dist.add("A", 1.0).unwrap();
        dist.add("B", 2.0).unwrap();
        let intervals = leaf_intervals(&dist).unwrap();
        let flat: Vec<_> = intervals.iter().map(|iv| (*iv.key, iv.lo, iv.hi)).collect();
        assert_eq!(flat, vec![("A", 0.0, 1.0), ("B", 1.0, 3.0)]);
    }

    #[test]
    fn intervals_of_nested_tree() {
        let mut dist = MutableCategorical::new(false);
        dist.add("A", 0.9).unwrap();
        dist.add("B", 0.05).unwrap();
        dist.add("C", 0.5).unwrap();
        let intervals = leaf_intervals(&dist).unwrap();
        let flat: Vec<_> = intervals.iter().map(|iv| (*iv.key, iv.lo, iv.hi)).collect();
        assert_eq!(flat[0], ("A", 0.0, 0.9));
        assert_eq!(flat[1].0, "B");
        assert!((flat[1].1 - 0.9).abs() < 1e-12 && (flat[1].2 - 0.95).abs() < 1e-12);
        assert_eq!(flat[2].0, "C");
        assert!((flat[2].1 - 0.95).abs() < 1e-12 && (flat[2].2 - 1.45).abs() < 1e-12);
        // Adjacency is exact, not approximate.
        assert_eq!(flat[0].2, flat[1].1);
        assert_eq!(flat[1].2, flat[2].1);
        assert_eq!(
            leaf_intervals(&MutableCategorical::<u8, f64>::new(false)).unwrap_err(),
            Error::Empty
        );
    }
}
