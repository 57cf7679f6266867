//! Deterministic pairwise summation.
//!
//! Every reduction in this crate funnels through these helpers: fixed midpoint
//! splits, left-to-right base blocks of 32. The tree depends only on the term
//! count, so results are bit-identical regardless of thread count, and the
//! error grows like O(log n) instead of O(n).

use crate::C64;

const BASE: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BASE {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

pub fn pairwise_sum_c64(xs: &[C64]) -> C64 {
    if xs.len() <= BASE {
        let mut acc = C64::new(0.0, 0.0);
        for &x in xs {
            acc += x;
        }
        acc
    } else {
        let mid = xs.len() / 2;
        pairwise_sum_c64(&xs[..mid]) + pairwise_sum_c64(&xs[mid..])
    }
}

/// Pairwise sum of `f(i)` for `i` in `0..n` without materializing the terms.
pub fn pairwise_map_sum<F: Fn(usize) -> f64>(n: usize, f: &F) -> f64 {
    range_sum(0, n, f)
}

fn range_sum<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
    if hi - lo <= BASE {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        range_sum(lo, mid, f) + range_sum(mid, hi, f)
    }
}

/// Complex variant of [`pairwise_map_sum`].
pub fn pairwise_map_sum_c64<F: Fn(usize) -> C64>(n: usize, f: &F) -> C64 {
    range_sum_c64(0, n, f)
}

fn range_sum_c64<F: Fn(usize) -> C64>(lo: usize, hi: usize, f: &F) -> C64 {
    if hi - lo <= BASE {
        let mut acc = C64::new(0.0, 0.0);
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + (hi - lo) / 2;
        range_sum_c64(lo, mid, f) + range_sum_c64(mid, hi, f)
    }
}
