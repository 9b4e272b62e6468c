//! Riesz energies on S^2 and the analytic lower bounds built from the
//! frame-potential bound.
//!
//! Energies are pair sums `sum_{i<j} sign(s) / r_ij^s`, the same quantity as
//! half the unrestricted double sum with the (divergent) diagonal dropped.
//! The regularized energy uses `r_ij(delta) = sqrt(2 (1 + delta - P_i . P_j))`,
//! which is finite on the diagonal.
//!
//! The calibrated and asymptotic bounds are only defined for the Coulomb
//! case `s = 1`.

use crate::config::Configuration;
use crate::error::{invalid, require_dim, Error, Result};
use crate::frames::BoundReport;
use crate::reduce::ordered_sum;

fn check_exponent(s: f64) -> Result<()> {
    if !(s >= -1.0) || s == 0.0 {
        return invalid(format!("Riesz exponent must satisfy s >= -1 and s != 0, got {s}"));
    }
    Ok(())
}

/// Chordal distance computed from the difference vector; `sqrt(2(1 - t))`
/// loses all precision for nearly coincident points.
pub(crate) fn chord(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `sum_{i<j} sign(s) / r_ij^s`.
pub fn riesz_energy(config: &Configuration, s: f64) -> Result<f64> {
    check_exponent(s)?;
    let n = config.len();
    if s > 0.0 {
        if let Some((i, j)) = first_coincident(config) {
            return Err(Error::InfiniteEnergy(i, j));
        }
    }
    let sign = s.signum();
    Ok(ordered_sum(n, |i| (i + 1..n).map(|j| sign * chord(config.point(i), config.point(j)).powf(-s)).sum()))
}

pub(crate) fn first_coincident(config: &Configuration) -> Option<(usize, usize)> {
    let n = config.len();
    for i in 0..n {
        for j in i + 1..n {
            if config.point(i) == config.point(j) {
                return Some((i, j));
            }
        }
    }
    None
}

/// `E(-1) = -sum_{i<j} r_ij` against `-2 N^2 / 3`.
pub fn sum_distance_bound(config: &Configuration) -> Result<BoundReport> {
    require_dim(config.dim(), 3)?;
    let n = config.len() as f64;
    Ok(BoundReport::lower(riesz_energy(config, -1.0)?, -2.0 * n * n / 3.0))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return invalid(format!("regularizer delta must be positive and finite, got {delta}"));
    }
    Ok(())
}

/// `(1/2) [sum_{i,j} 1 / r_ij(delta) - N / sqrt(2 delta)]`, i.e. the
/// off-diagonal Coulomb sum with regularized distances.
pub fn regularized_energy(config: &Configuration, delta: f64) -> Result<f64> {
    require_dim(config.dim(), 3)?;
    check_delta(delta)?;
    let n = config.len();
    let off = ordered_sum(n, |i| {
        (i + 1..n)
            .map(|j| {
                let r2 = 2.0 * delta + chord(config.point(i), config.point(j)).powi(2);
                1.0 / r2.sqrt()
            })
            .sum()
    });
    Ok(off)
}

/// Coefficients `(-1)^l binom(-1/2, l) = binom(2l, l) / 4^l`, via the ratio
/// recurrence.
pub fn inverse_sqrt_coefficients(l_max: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(l_max + 1);
    let mut cur = 1.0;
    c.push(cur);
    for l in 1..=l_max {
        cur *= (2 * l - 1) as f64 / (2 * l) as f64;
        c.push(cur);
    }
    c
}

/// Truncated frame-potential series for [`regularized_energy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvaluation {
    pub value: f64,
    /// Magnitude of the `l = l_max` term, a proxy for the truncation error.
    pub last_term: f64,
}

/// `(1/(2 sqrt 2)) sum_{l<=l_max} (-1)^l binom(-1/2,l) FP_l / (1+delta)^{l+1/2}
/// - N / (2 sqrt(2 delta))`.
pub fn energy_series(config: &Configuration, delta: f64, l_max: usize) -> Result<SeriesEvaluation> {
    require_dim(config.dim(), 3)?;
    check_delta(delta)?;
    let n = config.len();
    let coeffs = inverse_sqrt_coefficients(l_max);
    let scale = 1.0 / (1.0 + delta);
    // All frame potentials in one pass: FP_l = N + 2 sum_{i<j} t_ij^l.
    let mut fps: Vec<f64> = vec![0.0; l_max + 1];
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0.0; l_max + 1];
                for j in i + 1..n {
                    let t = config.dot(i, j);
                    let mut p = 1.0;
                    for r in row.iter_mut() {
                        *r += p;
                        p *= t;
                    }
                }
                row
            })
            .collect()
    };
    for row in rows {
        for (f, r) in fps.iter_mut().zip(row) {
            *f += r;
        }
    }
    let mut value = 0.0;
    let mut last_term = 0.0;
    let mut damp = scale.sqrt();
    for (l, fp) in fps.iter().enumerate() {
        let term = coeffs[l] * (n as f64 + 2.0 * fp) * damp / (2.0 * 2f64.sqrt());
        value += term;
        last_term = term.abs();
        damp *= scale;
    }
    value -= n as f64 / (2.0 * (2.0 * delta).sqrt());
    Ok(SeriesEvaluation { value, last_term })
}

/// The energy series with every frame potential replaced by its lower bound:
/// `(N/4) (2N / sqrt(delta + sqrt(delta (delta+2)) + 1) - sqrt(2/delta))`.
pub fn calibrated_bound(n: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if !(n >= 1.0) {
        return invalid(format!("n must be at least 1, got {n}"));
    }
    let root = (delta + (delta * (delta + 2.0)).sqrt() + 1.0).sqrt();
    Ok(n / 4.0 * (2.0 * n / root - (2.0 / delta).sqrt()))
}

/// The regularizer maximizing [`calibrated_bound`]: `4 / (4N - sqrt(8N+1) - 1)`.
pub fn delta_star(n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return invalid(format!("delta* needs n >= 2, got {n}"));
    }
    Ok(4.0 / (4.0 * n - (8.0 * n + 1.0).sqrt() - 1.0))
}

/// Five-term large-N expansion of `calibrated_bound(N, delta*(N))`:
/// `N^2/2 - N^{3/2}/sqrt 2 + N/8 + sqrt(N)/(16 sqrt 2) + 1/64`.
///
/// The `N^{3/2}` coefficient here is `1/sqrt 2`, larger in magnitude than
/// the value seen numerically for true Thomson minima (about 0.553), so the
/// bound is not tight at that order.
pub fn asymptotic_bound(n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return invalid(format!("n must be at least 1, got {n}"));
    }
    let r2 = 2f64.sqrt();
    Ok(n * n / 2.0 - n.powf(1.5) / r2 + n / 8.0 + n.sqrt() / (16.0 * r2) + 1.0 / 64.0)
}

/// Riesz s = 1 energy against `calibrated_bound(N, delta*(N))`.
pub fn coulomb_bound_report(config: &Configuration) -> Result<BoundReport> {
    require_dim(config.dim(), 3)?;
    let n = config.len() as f64;
    let value = riesz_energy(config, 1.0)?;
    let bound = if n >= 2.0 { calibrated_bound(n, delta_star(n)?)? } else { 0.0 };
    Ok(BoundReport::lower(value, bound))
}
