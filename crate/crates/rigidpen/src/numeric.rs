//! Deterministic floating-point reductions.
//!
//! All moment sums, norms and solver dot products in this crate go through
//! the pairwise tree reductions below. The summation order depends only on
//! the slice layout (grid indexing), so results are bit-reproducible run to
//! run and independent of thread count.

const PAIRWISE_LEAF: usize = 32;

/// Pairwise tree sum over a slice, splitting ranges in half down to a small
/// sequential leaf.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_LEAF {
        let mut acc = 0.0;
        for &v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise tree dot product of two equal-length slices.
pub fn pairwise_dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    if a.len() <= PAIRWISE_LEAF {
        let mut acc = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            acc += x * y;
        }
        return acc;
    }
    let mid = a.len() / 2;
    pairwise_dot(&a[..mid], &b[..mid]) + pairwise_dot(&a[mid..], &b[mid..])
}

/// Pairwise sum of `f(i)` for `i` in `0..n` without materializing a buffer.
pub fn pairwise_sum_fn(n: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= PAIRWISE_LEAF {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += f(i);
            }
            return acc;
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}
