//! Deterministic parallel summation.
//!
//! Index ranges are cut into fixed blocks of [`BLOCK`] terms. Each block is
//! summed left to right and the block totals are combined by a pairwise tree
//! whose shape depends only on the range length, so results are identical
//! for every thread count.

use std::ops::Add;

use num_traits::Zero;
use rayon::prelude::*;

pub const BLOCK: u64 = 4096;

/// Pairwise (tree) reduction with a fixed shape.
pub fn tree_sum<T: Copy + Add<Output = T> + Zero>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        n => {
            let mid = n.next_power_of_two() / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}

/// `Σ_{i ∈ [lo, hi)} f(i)`.
pub fn sum_range<T, F>(lo: u64, hi: u64, f: F) -> T
where
    T: Copy + Add<Output = T> + Zero + Send,
    F: Fn(u64) -> T + Sync,
{
    if hi <= lo {
        return T::zero();
    }
    let blocks = (hi - lo).div_ceil(BLOCK);
    let partial: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = lo + b * BLOCK;
            let end = (start + BLOCK).min(hi);
            (start..end).fold(T::zero(), |acc, i| acc + f(i))
        })
        .collect();
    tree_sum(&partial)
}

/// Sum of a slice with the same blocking as [`sum_range`].
pub fn sum_slice<T>(xs: &[T]) -> T
where
    T: Copy + Add<Output = T> + Zero + Send + Sync,
{
    sum_range(0, xs.len() as u64, |i| xs[i as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn matches_exact_integer_sum() {
        let s: f64 = sum_range(1, 100_001, |i| i as f64);
        assert_eq!(s, 5_000_050_000.0);
    }

    #[test]
    fn empty_range_is_zero() {
        let s: Complex64 = sum_range(5, 5, |_| Complex64::new(1.0, 1.0));
        assert_eq!(s, Complex64::zero());
    }

    #[test]
    fn bit_stable_across_thread_counts() {
        let f = |i: u64| Complex64::new((i as f64).sin(), (i as f64 * 0.37).cos());
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sum_range(0, 300_000, f));
        let b = four.install(|| sum_range(0, 300_000, f));
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
