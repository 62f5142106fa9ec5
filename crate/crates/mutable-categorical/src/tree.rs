//! A mutable categorical distribution stored as a weighted binary tree.
//!
//! Leaves hold the categories; every internal node ("sum node") carries the
//! total weight of the leaves beneath it. Sampling walks from the root,
//! comparing a uniform draw against child weights, so both sampling and
//! single-category mutation cost one root-to-leaf path instead of a full
//! rebuild of a cumulative table.
//!
//! Insertion descends along the lighter child while the subtree still
//! outweighs the new category and splices a fresh sum node in at the stop
//! point; removal splices the leaf's sibling into its parent's place. The
//! shape this maintains is close to the optimal (Huffman) tree for the
//! current weights, and an optional rotation pass run on the modified path
//! tightens it further after each mutation.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use num_traits::Float;
use rand::distr::uniform::SampleUniform;
use rand::Rng;

use crate::error::{check_weight, Error, Result};

/// Index of a node slot in the arena.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct NodeId(usize);

#[derive(Clone, Debug)]
enum NodeKind<K> {
    Leaf { key: K },
    Sum { a: NodeId, b: NodeId },
}

#[derive(Clone, Debug)]
struct Node<K, W> {
    value: W,
    parent: Option<NodeId>,
    kind: NodeKind<K>,
}

/// A categorical distribution over keyed categories with un-normalized
/// positive weights, supporting sampling and per-category mutation along a
/// single tree path.
///
/// Weights are kept raw; the probability of a category is its weight divided
/// by [`total_weight`](Self::total_weight), and [`sample`](Self::sample)
/// consumes a point in `[0, total_weight)`. This avoids any O(n)
/// renormalization when weights change.
///
/// An instance is single-writer: mutations must not run concurrently with
/// any other operation, while read-only calls may be shared freely. The
/// structure owns no interior mutability and moves between threads.
#[derive(Clone, Debug)]
pub struct MutableCategorical<K, W> {
    nodes: Vec<Option<Node<K, W>>>,
    free: Vec<NodeId>,
    root: Option<NodeId>,
    index: HashMap<K, NodeId>,
    rotations: bool,
    visits: u64,
    rotation_count: u64,
}

impl<K, W> MutableCategorical<K, W> {
    /// Creates an empty distribution. When `rotations_enabled` is set, every
    /// mutation finishes with a rotation pass over the modified path, which
    /// keeps the tree closer to optimal under delete-heavy workloads.
    pub fn new(rotations_enabled: bool) -> Self {
        MutableCategorical {
            nodes: Vec::new(),
            free: Vec::new(),
            root: None,
            index: HashMap::new(),
            rotations: rotations_enabled,
            visits: 0,
            rotation_count: 0,
        }
    }

    /// Number of categories.
    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn rotations_enabled(&self) -> bool {
        self.rotations
    }

    /// Cumulative count of node slots examined by mutating operations.
    /// One mutation touches O(depth) nodes, so this is the natural cost
    /// meter for add/remove/set_weight.
    pub fn node_visits(&self) -> u64 {
        self.visits
    }

    pub fn reset_node_visits(&mut self) {
        self.visits = 0;
    }

    /// Total number of rotations applied since creation.
    pub fn rotation_count(&self) -> u64 {
        self.rotation_count
    }

    /// Iterates over `(key, weight, depth)` for every category, in the
    /// left-to-right order the sampling walk partitions `[0, total_weight)`.
    pub fn leaves(&self) -> Leaves<'_, K, W> {
        let mut stack = Vec::new();
        if let Some(root) = self.root {
            stack.push((root, 0));
        }
        Leaves { tree: self, stack }
    }

    fn node(&self, id: NodeId) -> &Node<K, W> {
        self.nodes[id.0]
            .as_ref()
            .expect("node id points at a live slot")
    }

    fn node_mut(&mut self, id: NodeId) -> &mut Node<K, W> {
        self.nodes[id.0]
            .as_mut()
            .expect("node id points at a live slot")
    }

    fn alloc(&mut self, node: Node<K, W>) -> NodeId {
        match self.free.pop() {
            Some(id) => {
                self.nodes[id.0] = Some(node);
                id
            }
            None => {
                self.nodes.push(Some(node));
                NodeId(self.nodes.len() - 1)
            }
        }
    }

    fn release(&mut self, id: NodeId) -> Node<K, W> {
        let node = self.nodes[id.0].take().expect("released node is live");
        self.free.push(id);
        node
    }

    fn replace_child(&mut self, parent: NodeId, old: NodeId, new: NodeId) {
        match &mut self.node_mut(parent).kind {
            NodeKind::Sum { a, b } => {
                if *a == old {
                    *a = new;
                } else {
                    debug_assert_eq!(*b, old);
                    *b = new;
                }
            }
            NodeKind::Leaf { .. } => unreachable!("leaf has no children"),
        }
    }

    fn touch(&mut self, n: u64) {
        self.visits += n;
    }
}

impl<K, W: Float> MutableCategorical<K, W> {
    /// Total un-normalized weight; zero for an empty distribution.
    pub fn total_weight(&self) -> W {
        match self.root {
            Some(root) => self.node(root).value,
            None => W::zero(),
        }
    }

    /// Maps `u` in `[0, total_weight)` to a category: at each sum node,
    /// descend into the first child if `u` is below its weight, otherwise
    /// subtract that weight and descend into the second. Each category owns
    /// a contiguous interval of measure equal to its weight, up to float
    /// rounding at the interval boundaries.
    pub fn sample(&self, u: W) -> Result<&K> {
        let root = self.root.ok_or(Error::Empty)?;
        if !(u >= W::zero() && u < self.node(root).value) {
            return Err(Error::OutOfRange);
        }
        let mut id = root;
        let mut u = u;
        loop {
            match &self.node(id).kind {
                NodeKind::Leaf { key } => return Ok(key),
                NodeKind::Sum { a, b } => {
                    let first = self.node(*a).value;
                    if u < first {
                        id = *a;
                    } else {
                        // If rounding pushed the residual to or past the
                        // second child's weight, the walk keeps taking the
                        // second branch and lands on the rightmost leaf of
                        // this subtree, i.e. it behaves as if u were just
                        // below the subtree's weight.
                        u = u - first;
                        id = *b;
                    }
                }
            }
        }
    }

    /// Draws `u` uniformly from `[0, total_weight)` and samples with it.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&K>
    where
        W: SampleUniform,
    {
        let root = self.root.ok_or(Error::Empty)?;
        let total = self.node(root).value;
        loop {
            let u = rng.random_range(W::zero()..total);
            // The range is half-open, but float scaling may in rare cases
            // round up to the endpoint; redraw instead of returning a key
            // for a point outside the partition.
            if u < total {
                return self.sample(u);
            }
        }
    }

    /// Expected number of branches traversed per lookup: the sum of all
    /// sum-node weights divided by the total weight. A single-category
    /// distribution has path length zero.
    pub fn expected_path_length(&self) -> Result<W> {
        let root = self.root.ok_or(Error::Empty)?;
        Ok(self.sum_node_total() / self.node(root).value)
    }

    /// Un-normalized branch mass: the sum of every sum node's value. Each
    /// branch contributes the weight reachable below it, so this equals the
    /// weight-depth sum over all leaves.
    pub(crate) fn sum_node_total(&self) -> W {
        let mut acc = W::zero();
        let mut stack = Vec::new();
        if let Some(root) = self.root {
            stack.push(root);
        }
        while let Some(id) = stack.pop() {
            if let NodeKind::Sum { a, b } = &self.node(id).kind {
                acc = acc + self.node(id).value;
                stack.push(*a);
                stack.push(*b);
            }
        }
        acc
    }

    fn lighter_child(&self, a: NodeId, b: NodeId) -> NodeId {
        // Ties deterministically pick the second child.
        if self.node(a).value < self.node(b).value {
            a
        } else {
            b
        }
    }

    fn recompute(&mut self, id: NodeId) {
        if let NodeKind::Sum { a, b } = self.node(id).kind {
            self.node_mut(id).value = {
                let (a, b) = (self.node(a).value, self.node(b).value);
                a + b
            };
        }
    }

    /// Walks from `start` to the root. `start`'s own value must already be
    /// exact; every ancestor is re-derived from its current children, and
    /// when rotations are enabled each node on the path gets one
    /// check-and-rotate. A rotation never restarts the walk, so the whole
    /// pass stays O(depth).
    fn ascend(&mut self, start: NodeId) {
        let mut cur = Some(start);
        while let Some(id) = cur {
            self.touch(1);
            if id != start {
                self.recompute(id);
            }
            if self.rotations {
                self.maybe_rotate(id);
            }
            cur = self.node(id).parent;
        }
    }

    /// Applies at most one beneficial rotation below `p` and returns the
    /// resulting decrease of the branch-mass sum.
    ///
    /// With children `c` and `d` where `d` is a sum node over grandchildren
    /// `g` and `h`: whenever a grandchild outweighs `c`, replacing
    /// `Sum(c, Sum(g, h))` by `Sum(Sum(c, h'), g')` (promoting the heavier
    /// grandchild `g'`) shrinks the branch-mass sum by `g'.value - c.value`.
    /// Both child orderings are candidates; the larger decrease wins.
    fn maybe_rotate(&mut self, p: NodeId) -> Option<W> {
        let (x, y) = match &self.node(p).kind {
            NodeKind::Sum { a, b } => (*a, *b),
            NodeKind::Leaf { .. } => return None,
        };
        self.touch(2);
        let mut best: Option<(W, NodeId, NodeId, NodeId, NodeId)> = None;
        for (c, d) in [(x, y), (y, x)] {
            let (g, h) = match &self.node(d).kind {
                NodeKind::Sum { a, b } => (*a, *b),
                NodeKind::Leaf { .. } => continue,
            };
            self.touch(2);
            let (promote, demote) = if self.node(h).value > self.node(g).value {
                (h, g)
            } else {
                (g, h)
            };
            let gain = self.node(promote).value - self.node(c).value;
            if gain > W::zero() && best.is_none_or(|(top, ..)| gain > top) {
                best = Some((gain, c, d, promote, demote));
            }
        }
        let (gain, c, d, promote, demote) = best?;
        // Reuse d's slot as the new inner pair Sum(c, h'); p keeps its slot
        // and place in the tree, so the walk above it is unaffected.
        self.node_mut(d).kind = NodeKind::Sum { a: c, b: demote };
        self.node_mut(c).parent = Some(d);
        self.node_mut(promote).parent = Some(p);
        self.node_mut(p).kind = NodeKind::Sum { a: d, b: promote };
        let inner = self.node(c).value + self.node(demote).value;
        self.node_mut(d).value = inner;
        self.node_mut(p).value = inner + self.node(promote).value;
        self.touch(4);
        self.rotation_count += 1;
        Some(gain)
    }
}

impl<K: Eq + Hash + Clone, W: Float> MutableCategorical<K, W> {
    /// Stored weight of `key`, if present.
    pub fn weight_of(&self, key: &K) -> Option<W> {
        self.index.get(key).map(|&id| self.node(id).value)
    }

    pub fn contains_key(&self, key: &K) -> bool {
        self.index.contains_key(key)
    }

    /// Inserts a new category. Starting at the root, the walk descends into
    /// the lighter child while the current subtree still outweighs the new
    /// category (strictly), then a fresh sum node adopts the stop node as
    /// its first child and the new leaf as its second. A stop at the root
    /// makes the fresh sum node the new root.
    pub fn add(&mut self, key: K, weight: W) -> Result<()> {
        check_weight(weight)?;
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateKey);
        }
        let leaf = self.alloc(Node {
            value: weight,
            parent: None,
            kind: NodeKind::Leaf { key: key.clone() },
        });
        self.index.insert(key, leaf);
        self.touch(1);
        let Some(root) = self.root else {
            self.root = Some(leaf);
            return Ok(());
        };
        let mut stop = root;
        loop {
            self.touch(1);
            let node = self.node(stop);
            if node.value <= weight {
                break;
            }
            match &node.kind {
                NodeKind::Leaf { .. } => break,
                NodeKind::Sum { a, b } => stop = self.lighter_child(*a, *b),
            }
        }
        let parent = self.node(stop).parent;
        let joined = self.node(stop).value + weight;
        let sum = self.alloc(Node {
            value: joined,
            parent,
            kind: NodeKind::Sum { a: stop, b: leaf },
        });
        self.node_mut(stop).parent = Some(sum);
        self.node_mut(leaf).parent = Some(sum);
        match parent {
            None => self.root = Some(sum),
            Some(p) => self.replace_child(p, stop, sum),
        }
        self.ascend(sum);
        Ok(())
    }

    /// Removes a category and returns its weight. The leaf's parent sum
    /// node is spliced out and replaced by the leaf's sibling; removing the
    /// last category empties the tree.
    pub fn remove(&mut self, key: &K) -> Result<W> {
        self.remove_entry(key).map(|(_, w)| w)
    }

    /// Changes a category's weight. This is literally removal followed by
    /// re-insertion at the new weight, so the resulting tree is identical
    /// to that composition.
    pub fn set_weight(&mut self, key: &K, weight: W) -> Result<()> {
        check_weight(weight)?;
        let (key, _) = self.remove_entry(key)?;
        self.add(key, weight)
    }

    fn remove_entry(&mut self, key: &K) -> Result<(K, W)> {
        let leaf = self.index.remove(key).ok_or(Error::KeyNotFound)?;
        let node = self.release(leaf);
        let key = match node.kind {
            NodeKind::Leaf { key } => key,
            NodeKind::Sum { .. } => unreachable!("index maps keys to leaves"),
        };
        self.touch(1);
        match node.parent {
            None => self.root = None,
            Some(parent) => {
                let sibling = match &self.node(parent).kind {
                    NodeKind::Sum { a, b } => {
                        if *a == leaf {
                            *b
                        } else {
                            *a
                        }
                    }
                    NodeKind::Leaf { .. } => unreachable!("leaf parent is a sum node"),
                };
                let grand = self.node(parent).parent;
                self.release(parent);
                self.node_mut(sibling).parent = grand;
                match grand {
                    None => self.root = Some(sibling),
                    Some(g) => self.replace_child(g, parent, sibling),
                }
                self.touch(2);
                self.ascend(sibling);
            }
        }
        Ok((key, node.value))
    }
}

// ---------------------------------------------------------------------------
// Validation

/// A structural or bookkeeping defect found by [`MutableCategorical::validate`].
/// `node` values are arena slot numbers, stable for the lifetime of a node.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A sum node's stored value disagrees with its children's sum.
    SumMismatch {
        node: usize,
        stored: f64,
        expected: f64,
    },
    /// A node's stored value is non-positive or non-finite.
    BadValue { node: usize, value: f64 },
    /// A child's parent link does not point back at its parent.
    BadParentLink { node: usize },
    /// The root has a parent link.
    RootHasParent { node: usize },
    /// A child pointer leads to a freed slot.
    DanglingChild { node: usize },
    /// A node is reachable through two different paths.
    SharedNode { node: usize },
    /// A leaf reachable from the root is missing from the key index, or the
    /// index maps its key elsewhere.
    MissingIndexEntry { node: usize },
    /// An index entry points at a slot that is freed, not a leaf, or not
    /// attached to the tree.
    DetachedIndexEntry { node: usize },
    /// Reachable leaf count and index size disagree.
    LeafCountMismatch { leaves: usize, indexed: usize },
    /// A tree with n leaves must contain exactly n - 1 sum nodes.
    SumCountMismatch { leaves: usize, sums: usize },
    /// The root value drifted away from the exact sum of leaf weights.
    TotalWeightDrift { stored: f64, actual: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SumMismatch {
                node,
                stored,
                expected,
            } => {
                write!(
                    f,
                    "sum node {node}: stored {stored} but children sum to {expected}"
                )
            }
            Violation::BadValue { node, value } => {
                write!(f, "node {node}: invalid value {value}")
            }
            Violation::BadParentLink { node } => {
                write!(f, "node {node}: parent link does not match tree structure")
            }
            Violation::RootHasParent { node } => write!(f, "root node {node} has a parent link"),
            Violation::DanglingChild { node } => {
                write!(f, "node {node}: child pointer leads to a freed slot")
            }
            Violation::SharedNode { node } => {
                write!(f, "node {node} is reachable through two paths")
            }
            Violation::MissingIndexEntry { node } => {
                write!(f, "leaf {node} is not indexed under its key")
            }
            Violation::DetachedIndexEntry { node } => {
                write!(f, "index entry points at detached or non-leaf slot {node}")
            }
            Violation::LeafCountMismatch { leaves, indexed } => {
                write!(f, "{leaves} reachable leaves but {indexed} index entries")
            }
            Violation::SumCountMismatch { leaves, sums } => {
                write!(
                    f,
                    "{leaves} leaves require {} sum nodes, found {sums}",
                    leaves - 1
                )
            }
            Violation::TotalWeightDrift { stored, actual } => {
                write!(f, "root value {stored} drifted from leaf total {actual}")
            }
        }
    }
}

impl<K: Eq + Hash + Clone, W: Float> MutableCategorical<K, W> {
    /// Checks every structural invariant at the default relative tolerance
    /// of 1e-9, suitable for `f64` weights. Returns an empty list iff the
    /// structure is healthy.
    pub fn validate(&self) -> Vec<Violation> {
        self.validate_with_tolerance(W::from(1e-9).unwrap_or_else(W::epsilon))
    }

    /// Like [`validate`](Self::validate) with an explicit relative
    /// tolerance for the float-sum checks (pick a few hundred epsilon for
    /// `f32` trees).
    pub fn validate_with_tolerance(&self, rel_tol: W) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.nodes.len()];
        let mut leaves = 0usize;
        let mut sums = 0usize;
        // Compensated sum of reachable leaf weights, so the reference total
        // stays honest for large trees and the drift check measures only
        // the maintained root value.
        let mut leaf_total = W::zero();
        let mut carry = W::zero();

        let value_ok = |v: W| v.is_finite() && v > W::zero();
        let as_f64 = |v: W| v.to_f64().unwrap_or(f64::NAN);

        if let Some(root) = self.root {
            if self.node(root).parent.is_some() {
                out.push(Violation::RootHasParent { node: root.0 });
            }
            let mut stack = vec![root];
            while let Some(id) = stack.pop() {
                if self.nodes.get(id.0).is_none_or(|slot| slot.is_none()) {
                    out.push(Violation::DanglingChild { node: id.0 });
                    continue;
                }
                if seen[id.0] {
                    out.push(Violation::SharedNode { node: id.0 });
                    continue;
                }
                seen[id.0] = true;
                let node = self.node(id);
                if !value_ok(node.value) {
                    out.push(Violation::BadValue {
                        node: id.0,
                        value: as_f64(node.value),
                    });
                }
                match &node.kind {
                    NodeKind::Leaf { key } => {
                        leaves += 1;
                        let y = node.value - carry;
                        let t = leaf_total + y;
                        carry = (t - leaf_total) - y;
                        leaf_total = t;
                        if self.index.get(key) != Some(&id) {
                            out.push(Violation::MissingIndexEntry { node: id.0 });
                        }
                    }
                    NodeKind::Sum { a, b } => {
                        sums += 1;
                        for child in [*a, *b] {
                            if self.nodes.get(child.0).is_none_or(|slot| slot.is_none()) {
                                out.push(Violation::DanglingChild { node: id.0 });
                                continue;
                            }
                            if self.node(child).parent != Some(id) {
                                out.push(Violation::BadParentLink { node: child.0 });
                            }
                            stack.push(child);
                        }
                        if let (Some(va), Some(vb)) = (
                            self.nodes[a.0].as_ref().map(|n| n.value),
                            self.nodes[b.0].as_ref().map(|n| n.value),
                        ) {
                            let expected = va + vb;
                            if (node.value - expected).abs() > rel_tol * node.value.abs() {
                                out.push(Violation::SumMismatch {
                                    node: id.0,
                                    stored: as_f64(node.value),
                                    expected: as_f64(expected),
                                });
                            }
                        }
                    }
                }
            }
        }

        for (key, &id) in &self.index {
            let attached = seen.get(id.0).copied().unwrap_or(false);
            let is_matching_leaf =
                self.nodes.get(id.0).and_then(|s| s.as_ref()).is_some_and(
                    |node| matches!(&node.kind, NodeKind::Leaf { key: k } if k == key),
                );
            if !attached || !is_matching_leaf {
                out.push(Violation::DetachedIndexEntry { node: id.0 });
            }
        }

        if leaves != self.index.len() {
            out.push(Violation::LeafCountMismatch {
                leaves,
                indexed: self.index.len(),
            });
        }
        if leaves > 0 && sums != leaves - 1 {
            out.push(Violation::SumCountMismatch { leaves, sums });
        }

        if let Some(root) = self.root {
            let stored = self.node(root).value;
            if (stored - leaf_total).abs() > rel_tol * leaf_total.abs() {
                out.push(Violation::TotalWeightDrift {
                    stored: as_f64(stored),
                    actual: as_f64(leaf_total),
                });
            }
        }

        out
    }
}

/// Structural equality: same rotation policy and identical trees (shape,
/// keys and exact weight values), regardless of arena slot layout.
impl<K: PartialEq, W: Float> PartialEq for MutableCategorical<K, W> {
    fn eq(&self, other: &Self) -> bool {
        if self.rotations != other.rotations {
            return false;
        }
        match (self.root, other.root) {
            (None, None) => true,
            (Some(left), Some(right)) => {
                let mut stack = vec![(left, right)];
                while let Some((i, j)) = stack.pop() {
                    let (ni, nj) = (self.node(i), other.node(j));
                    if ni.value != nj.value {
                        return false;
                    }
                    match (&ni.kind, &nj.kind) {
                        (NodeKind::Leaf { key: a }, NodeKind::Leaf { key: b }) if a == b => {}
                        (NodeKind::Sum { a: ia, b: ib }, NodeKind::Sum { a: ja, b: jb }) => {
                            stack.push((*ia, *ja));
                            stack.push((*ib, *jb));
                        }
                        _ => return false,
                    }
                }
                true
            }
            _ => false,
        }
    }
}

/// Iterator over `(key, weight, depth)` triples in sampling order.
pub struct Leaves<'a, K, W> {
    tree: &'a MutableCategorical<K, W>,
    stack: Vec<(NodeId, usize)>,
}

impl<'a, K, W: Copy> Iterator for Leaves<'a, K, W> {
    type Item = (&'a K, W, usize);

    fn next(&mut self) -> Option<Self::Item> {
        while let Some((id, depth)) = self.stack.pop() {
            let node = self.tree.node(id);
            match &node.kind {
                NodeKind::Leaf { key } => return Some((key, node.value, depth)),
                NodeKind::Sum { a, b } => {
                    self.stack.push((*b, depth + 1));
                    self.stack.push((*a, depth + 1));
                }
            }
        }
        None
    }
}
