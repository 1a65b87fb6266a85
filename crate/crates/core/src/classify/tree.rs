//! CART decision tree with Gini impurity.
//!
//! Thresholds are searched exhaustively at midpoints between consecutive
//! distinct values of each candidate feature; rows with value ≤ threshold
//! go left. There is no depth limit; growth stops only when a node is pure,
//! has fewer than two rows, or its candidate features are all constant.
//! Zero-gain splits are taken (both children are always nonempty, so growth
//! terminates), which lets patterns like XOR resolve below the root exactly
//! as in standard CART. Leaves store the fraction of fake rows, which is
//! the score. The same builder serves the random forest, which restricts
//! the candidate feature set per split.

use alloc::vec::Vec;

use super::DatasetRow;
use crate::label::Label;

/// Flat tree node; children are indices into the arena.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "node", rename_all = "snake_case"))]
pub enum TreeNode {
    Leaf {
        fake_fraction: f64,
        samples: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreeModel {
    nodes: Vec<TreeNode>,
    feature_dim: usize,
}

pub(super) fn train(rows: &[DatasetRow]) -> TreeModel {
    let features: Vec<&[f64]> = rows.iter().map(|r| r.features.as_slice()).collect();
    let labels: Vec<Label> = rows.iter().map(|r| r.label).collect();
    let dim = features[0].len();
    let all: Vec<usize> = (0..dim).collect();
    let mut nodes = Vec::new();
    grow(&features, &labels, (0..rows.len()).collect(), &all, &mut nodes);
    TreeModel {
        nodes,
        feature_dim: dim,
    }
}

/// Builds the subtree over `rows` (indices into the training set) trying
/// only `candidates` as split features; returns the subtree root's arena
/// index. The random forest passes a per-node sample of candidates; the
/// plain tree passes all features.
pub(super) fn grow(
    features: &[&[f64]],
    labels: &[Label],
    rows: Vec<usize>,
    candidates: &[usize],
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let n = rows.len();
    let fakes = rows.iter().filter(|&&r| labels[r] == Label::Fake).count();
    let pure = fakes == 0 || fakes == n;

    let best = if pure || n < 2 {
        None
    } else {
        best_split(features, labels, &rows, candidates)
    };
    match best {
        None => {
            nodes.push(TreeNode::Leaf {
                fake_fraction: fakes as f64 / n as f64,
                samples: n,
            });
            nodes.len() - 1
        }
        Some((feature, threshold)) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .into_iter()
                .partition(|&r| features[r][feature] <= threshold);
            // Reserve this node's slot before growing children so the root
            // of every subtree precedes its descendants.
            let slot = nodes.len();
            nodes.push(TreeNode::Leaf {
                fake_fraction: 0.0,
                samples: 0,
            });
            let left = grow(features, labels, left_rows, candidates, nodes);
            let right = grow(features, labels, right_rows, candidates, nodes);
            nodes[slot] = TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            };
            slot
        }
    }
}

/// Exhaustive (feature, threshold) search: maximal Gini gain, ties resolved
/// to the first candidate encountered (candidate order, then value order).
/// None iff every candidate feature is constant over `rows`.
pub(super) fn best_split(
    features: &[&[f64]],
    labels: &[Label],
    rows: &[usize],
    candidates: &[usize],
) -> Option<(usize, f64)> {
    let n = rows.len() as f64;
    let total_fakes = rows.iter().filter(|&&r| labels[r] == Label::Fake).count() as f64;
    let parent_gini = gini(total_fakes, n);

    let mut best: Option<(f64, usize, f64)> = None;
    let mut order: Vec<usize> = rows.to_vec();
    for &feature in candidates {
        order.sort_by(|&a, &b| features[a][feature].total_cmp(&features[b][feature]));
        let mut left_n = 0.0;
        let mut left_fakes = 0.0;
        for w in 0..order.len() - 1 {
            let row = order[w];
            left_n += 1.0;
            if labels[row] == Label::Fake {
                left_fakes += 1.0;
            }
            let lo = features[row][feature];
            let hi = features[order[w + 1]][feature];
            if lo == hi {
                continue;
            }
            let right_n = n - left_n;
            let weighted = (left_n * gini(left_fakes, left_n)
                + right_n * gini(total_fakes - left_fakes, right_n))
                / n;
            let gain = parent_gini - weighted;
            if best.map_or(true, |(g, _, _)| gain > g) {
                let mut threshold = lo + (hi - lo) / 2.0;
                if threshold >= hi {
                    // Adjacent floats round the midpoint up; fall back to
                    // the left value so both sides stay nonempty under the
                    // ≤ predicate.
                    threshold = lo;
                }
                best = Some((gain, feature, threshold));
            }
        }
    }
    best.map(|(_, feature, threshold)| (feature, threshold))
}

fn gini(fakes: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    let pf = fakes / n;
    let pr = 1.0 - pf;
    1.0 - pf * pf - pr * pr
}

impl TreeModel {
    pub(super) fn from_arena(nodes: Vec<TreeNode>, feature_dim: usize) -> TreeModel {
        TreeModel { nodes, feature_dim }
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Depth of the longest root-to-leaf path (single leaf = 1).
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 1,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, left).max(walk(nodes, right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    /// Fake fraction stored in the leaf the query routes to.
    pub fn score(&self, query: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { fake_fraction, .. } => return fake_fraction,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if query[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}
