//! Weight-balanced search trees over buckets.
//!
//! Bucket `k` of a key list is the half-open interval `[keys[k], keys[k+1])`;
//! the last bucket is unbounded above. A tree holds only buckets of positive
//! weight and is built by recursive weight-balanced splitting, so a bucket of
//! weight `w` out of a total `W` sits at depth at most `log2(W / w)`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Missing child.
pub const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub bucket: u32,
    pub weight: f64,
    pub left: u32,
    pub right: u32,
}

/// Result of one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchResult {
    /// Bucket containing the query, or `None` if the search left the tree.
    pub bucket: Option<u32>,
    /// Nodes visited.
    pub steps: u32,
}

/// Tree layout over bucket indices, independent of the key type.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchShape {
    nodes: Vec<TreeNode>,
    root: u32,
    depth_budget: Option<u32>,
}

impl SearchShape {
    /// Weight-balanced tree over the buckets with positive weight; nodes
    /// deeper than `depth_budget` (root at depth 0) are dropped.
    pub fn weighted(weights: &[f64], depth_budget: Option<u32>) -> Result<Self> {
        for &w in weights {
            if !w.is_finite() || w < 0.0 {
                return invalid(format!("weight {w} is not finite and non-negative"));
            }
        }
        let included: Vec<(u32, f64)> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (i as u32, w))
            .collect();
        let mut prefix = Vec::with_capacity(included.len() + 1);
        prefix.push(0.0);
        for &(_, w) in &included {
            prefix.push(prefix.last().unwrap() + w);
        }
        let mut shape = SearchShape {
            nodes: Vec::with_capacity(included.len()),
            root: NIL,
            depth_budget,
        };
        shape.root = shape.split(&included, &prefix, 0, included.len(), 0);
        Ok(shape)
    }

    /// Tree over all `k` buckets with equal weights.
    pub fn balanced(k: usize) -> Self {
        Self::weighted(&vec![1.0; k], None).expect("unit weights are valid")
    }

    fn split(
        &mut self,
        items: &[(u32, f64)],
        prefix: &[f64],
        lo: usize,
        hi: usize,
        depth: u32,
    ) -> u32 {
        if lo >= hi || self.depth_budget.is_some_and(|b| depth > b) {
            return NIL;
        }
        let left = |r: usize| prefix[r] - prefix[lo];
        let right = |r: usize| prefix[hi] - prefix[r + 1];
        // Smallest r with left(r) >= right(r); the optimum is r or r - 1.
        let (mut a, mut b) = (lo, hi - 1);
        while a < b {
            let m = (a + b) / 2;
            if left(m) >= right(m) {
                b = m;
            } else {
                a = m + 1;
            }
        }
        let mut r = a;
        if r > lo && left(r - 1).max(right(r - 1)) <= left(r).max(right(r)) {
            r -= 1;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(TreeNode {
            bucket: items[r].0,
            weight: items[r].1,
            left: NIL,
            right: NIL,
        });
        let l = self.split(items, prefix, lo, r, depth + 1);
        let rt = self.split(items, prefix, r + 1, hi, depth + 1);
        self.nodes[id as usize].left = l;
        self.nodes[id as usize].right = rt;
        id
    }

    /// Descends from the root; `probe(bucket)` reports whether the query is
    /// left of (`Less`), inside (`Equal`) or right of (`Greater`) the bucket.
    pub fn search<F: FnMut(u32) -> Ordering>(&self, mut probe: F) -> SearchResult {
        let mut cur = self.root;
        let mut steps = 0;
        while cur != NIL {
            let node = &self.nodes[cur as usize];
            steps += 1;
            match probe(node.bucket) {
                Ordering::Less => cur = node.left,
                Ordering::Greater => cur = node.right,
                Ordering::Equal => {
                    return SearchResult {
                        bucket: Some(node.bucket),
                        steps,
                    }
                }
            }
        }
        SearchResult {
            bucket: None,
            steps,
        }
    }

    /// Index of the root node, `NIL` when empty.
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn depth_budget(&self) -> Option<u32> {
        self.depth_budget
    }

    /// Depth of every stored bucket (root at depth 0).
    pub fn depths(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = Vec::new();
        if self.root != NIL {
            stack.push((self.root, 0));
        }
        while let Some((id, d)) = stack.pop() {
            let node = &self.nodes[id as usize];
            out.push((node.bucket, d));
            for c in [node.left, node.right] {
                if c != NIL {
                    stack.push((c, d + 1));
                }
            }
        }
        out
    }

    /// Number of levels (0 for an empty tree).
    pub fn height(&self) -> u32 {
        self.depths().iter().map(|&(_, d)| d + 1).max().unwrap_or(0)
    }
}

/// Search tree over the buckets of a sorted key list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSearchTree<K> {
    keys: Vec<K>,
    shape: SearchShape,
}

fn check_increasing<K: PartialOrd>(keys: &[K]) -> Result<()> {
    if keys.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less)) {
        return invalid("keys are not strictly increasing");
    }
    Ok(())
}

impl<K: PartialOrd> WeightedSearchTree<K> {
    pub fn build(keys: Vec<K>, weights: &[f64], depth_budget: Option<u32>) -> Result<Self> {
        if keys.len() != weights.len() {
            return invalid("keys and weights differ in length");
        }
        check_increasing(&keys)?;
        let shape = SearchShape::weighted(weights, depth_budget)?;
        Ok(Self { keys, shape })
    }

    /// Balanced tree over every bucket.
    pub fn balanced_tree(keys: Vec<K>) -> Result<Self> {
        check_increasing(&keys)?;
        let shape = SearchShape::balanced(keys.len());
        Ok(Self { keys, shape })
    }

    /// Finds the bucket containing `x`. Each visited node costs two key
    /// comparisons.
    pub fn search(&self, x: &K) -> SearchResult {
        let keys = &self.keys;
        self.shape
            .search(|k| bucket_probe(keys, k as usize, x))
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn shape(&self) -> &SearchShape {
        &self.shape
    }
}

/// Position of `x` relative to bucket `k` of `keys`.
pub fn bucket_probe<K: PartialOrd>(keys: &[K], k: usize, x: &K) -> Ordering {
    if *x < keys[k] {
        Ordering::Less
    } else if k + 1 < keys.len() && *x >= keys[k + 1] {
        Ordering::Greater
    } else {
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_three() {
        let t = WeightedSearchTree::build(vec![1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], None).unwrap();
        assert_eq!(t.shape().nodes()[0].bucket, 1);
        assert_eq!(t.shape().height(), 2);
        assert_eq!(t.search(&2.5).bucket, Some(1));
        assert_eq!(t.search(&0.5).bucket, None);
    }

    #[test]
    fn zero_weights_are_skipped() {
        let t = WeightedSearchTree::build(vec![0.0, 1.0, 2.0], &[0.0, 5.0, 0.0], None).unwrap();
        assert_eq!(t.shape().len(), 1);
        let r = t.search(&2.5);
        assert_eq!(r.bucket, None);
        assert_eq!(r.steps, 1);
    }
}
