//! Deterministic floating-point reductions.
//!
//! All large sums in the crate go through [`tree_sum`]: a pairwise reduction
//! with a fixed split shape. The result depends only on the input order, not
//! on chunking or thread scheduling, and the O(log n) error growth keeps the
//! double sums reproducible and accurate.

use alloc::vec::Vec;

const LEAF: usize = 32;

/// Pairwise tree sum over a slice, fixed recursion shape.
pub fn tree_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
}

/// Tree sum over the values produced by an exact-size iterator.
pub fn tree_sum_iter<I: Iterator<Item = f64>>(iter: I) -> f64 {
    let xs: Vec<f64> = iter.collect();
    tree_sum(&xs)
}
