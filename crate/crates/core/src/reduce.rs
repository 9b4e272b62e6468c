use rayon::prelude::*;

/// Sums `f(0) + ... + f(n-1)` where each term is evaluated in parallel but
/// the final accumulation runs in index order, so the result is bitwise
/// identical for any thread count.
pub(crate) fn ordered_sum<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let parts: Vec<f64> = (0..n).into_par_iter().map(f).collect();
    parts.iter().sum()
}
