//! Mutable categorical distributions with O(log n) sampling and mutation.
//!
//! The standard way to sample a categorical distribution — prefix sums plus
//! binary search — is cheap to query but costs O(n) to rebuild whenever a
//! weight changes. This crate instead keeps the categories in a weighted
//! binary tree whose internal nodes store subtree weight sums. Sampling,
//! adding, removing and reweighting a category all walk a single
//! root-to-leaf path, and the tree's expected lookup cost stays within a
//! few percent of the optimal (Huffman) tree for the same weights.
//!
//! The crate ships three supporting pieces used by the benchmark CLI and
//! the test suite:
//!
//! * [`huffman`]: the optimal expected path length and entropy of a weight
//!   multiset, the baseline every measurement compares against;
//! * [`baseline`]: the prefix-sum sampler and an interval oracle that
//!   enumerates exactly which slice of `[0, total_weight)` the tree maps to
//!   each category;
//! * [`workload`]: deterministic, seedable drivers for the steady-state and
//!   mass-deletion experiments, reporting measured-vs-optimal ratios.
//!
//! Core types are generic over the weight scalar through [`num_traits::Float`];
//! use the [`MutableCategorical64`] / [`MutableCategorical32`] aliases for
//! the common cases. All benchmarks run on `f64`.
//!
//! ```
//! use mutable_categorical::MutableCategorical64;
//!
//! let mut dist: MutableCategorical64<&str> = MutableCategorical64::new(false);
//! dist.add("rare", 0.1).unwrap();
//! dist.add("common", 0.9).unwrap();
//! assert_eq!(dist.sample(0.95).unwrap(), &"common");
//! dist.set_weight(&"rare", 2.0).unwrap();
//! assert_eq!(dist.sample(0.95).unwrap(), &"rare");
//! assert_eq!(dist.remove(&"common"), Ok(0.9));
//! ```

mod error;
mod tree;

pub mod baseline;
pub mod huffman;
pub mod workload;

pub use error::{Error, Result};
pub use tree::{Leaves, MutableCategorical, Violation};

/// Distribution with `f64` weights, the default for measurement work.
pub type MutableCategorical64<K> = MutableCategorical<K, f64>;

/// Distribution with `f32` weights. Float-sum validation then needs a
/// tolerance suited to `f32`, see
/// [`MutableCategorical::validate_with_tolerance`].
pub type MutableCategorical32<K> = MutableCategorical<K, f32>;
