//! Frame potentials and their bounds.
//!
//! All double and triple sums run over *every* ordered index tuple,
//! including `i = j` (and repeated indices in the triple sum). Many
//! frame-potential codes drop the diagonal; the bounds here are stated for
//! the unrestricted sums, so dropping it would break them.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::config::{Configuration, Weights};
use crate::error::{invalid, require_dim, Result};
use crate::reduce::ordered_sum;
use crate::specfun::{double_factorial, gamma_lk, uniform_fp_coeff, HarmonicTable};

/// Relative tolerance used by [`BoundReport`] unless overridden.
pub const DEFAULT_REL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// A functional compared against a bound. `residual` is how far the value
/// sits on the allowed side (`value - bound` for lower bounds, `bound -
/// value` for upper bounds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub value: f64,
    pub bound: f64,
    pub residual: f64,
    pub saturated: bool,
    pub tolerance: f64,
}

impl BoundReport {
    pub fn lower(value: f64, bound: f64) -> Self {
        Self::build(BoundKind::Lower, value, bound, DEFAULT_REL_TOLERANCE * bound.abs().max(1.0))
    }

    pub fn upper(value: f64, bound: f64) -> Self {
        Self::build(BoundKind::Upper, value, bound, DEFAULT_REL_TOLERANCE * bound.abs().max(1.0))
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self::build(self.kind, self.value, self.bound, tolerance)
    }

    fn build(kind: BoundKind, value: f64, bound: f64, tolerance: f64) -> Self {
        let residual = match kind {
            BoundKind::Lower => value - bound,
            BoundKind::Upper => bound - value,
        };
        Self { kind, value, bound, residual, saturated: residual.abs() <= tolerance, tolerance }
    }

    /// True unless the bound is violated beyond the tolerance.
    pub fn holds(&self) -> bool {
        self.residual >= -self.tolerance
    }
}

/// `sum_{i,j} (P_i . P_j)^l`. Diagonal terms contribute exactly 1 each.
pub fn frame_potential(config: &Configuration, l: usize) -> f64 {
    let n = config.len();
    let off = ordered_sum(n, |i| (i + 1..n).map(|j| config.dot(i, j).powi(l as i32)).sum());
    n as f64 + 2.0 * off
}

/// `sum_{i,j} (f_i . f_j) (P_i . P_j)^l` for scalar or vector weights.
pub fn weighted_frame_potential(config: &Configuration, weights: &Weights, l: usize) -> Result<f64> {
    let n = config.len();
    weights.check_len(n)?;
    let diag: f64 = (0..n).map(|i| weights.pair(i, i)).sum();
    let off = ordered_sum(n, |i| (i + 1..n).map(|j| weights.pair(i, j) * config.dot(i, j).powi(l as i32)).sum());
    Ok(diag + 2.0 * off)
}

/// The lower bound `coeff(l, d) * weight_total`, where `weight_total` is N^2
/// for plain sums, `(sum f_i)^2` for scalar weights and `sum_{ij} f_i . f_j`
/// for vector weights.
pub fn fp_lower_bound(l: usize, d: usize, weight_total: f64) -> f64 {
    uniform_fp_coeff(l, d) * weight_total
}

/// Frame potential against its lower bound. Scalar weights must be
/// non-negative; `None` means unit weights.
pub fn fp_bound_report(config: &Configuration, weights: Option<&Weights>, l: usize) -> Result<BoundReport> {
    match weights {
        None => {
            let n = config.len() as f64;
            Ok(BoundReport::lower(frame_potential(config, l), fp_lower_bound(l, config.dim(), n * n)))
        }
        Some(w) => {
            if let Weights::Scalar(s) = w {
                if s.iter().any(|&x| !(x >= 0.0)) {
                    return invalid("scalar weights for the lower bound must be non-negative");
                }
            }
            let value = weighted_frame_potential(config, w, l)?;
            Ok(BoundReport::lower(value, fp_lower_bound(l, config.dim(), w.total())))
        }
    }
}

/// Discrete expansion coefficients `C_{l,m} = sum_i f_i conj(Y_{l,m}(P_i))`
/// on S^2, scalar (one component) or vector valued.
#[derive(Debug, Clone)]
pub struct HarmonicCoefficients {
    l_max: usize,
    components: usize,
    data: Vec<Complex64>,
}

impl HarmonicCoefficients {
    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// First component of C_{l,m}.
    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.component(l, m, 0)
    }

    pub fn component(&self, l: usize, m: i64, c: usize) -> Complex64 {
        let idx = (l * l + l) as i64 + m;
        self.data[idx as usize * self.components + c]
    }

    /// `sum_m |C_{l,m}|^2` (summed over components for vector weights).
    pub fn power(&self, l: usize) -> f64 {
        let lo = l * l * self.components;
        let hi = (l + 1) * (l + 1) * self.components;
        self.data[lo..hi].iter().map(|c| c.norm_sqr()).sum()
    }
}

const CHUNK: usize = 64;

/// Computes C_{l,m} for l <= l_max. `None` means unit weights.
pub fn harmonic_coefficients(config: &Configuration, weights: Option<&Weights>, l_max: usize) -> Result<HarmonicCoefficients> {
    use rayon::prelude::*;
    require_dim(config.dim(), 3)?;
    let n = config.len();
    if let Some(w) = weights {
        w.check_len(n)?;
    }
    let components = match weights {
        Some(Weights::Vector { dim, .. }) => *dim,
        _ => 1,
    };
    let width = (l_max + 1) * (l_max + 1);
    let weight_of = |i: usize, c: usize| match weights {
        None => 1.0,
        Some(Weights::Scalar(s)) => s[i],
        Some(Weights::Vector { values, .. }) => values[i][c],
    };
    // Fixed chunking keeps the summation order independent of threading.
    let partials: Vec<Vec<Complex64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); width * components];
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(n) {
                let table = HarmonicTable::at_point(l_max, config.point(i));
                for (idx, y) in table.values().iter().enumerate() {
                    let yc = y.conj();
                    for c in 0..components {
                        acc[idx * components + c] += yc * weight_of(i, c);
                    }
                }
            }
            acc
        })
        .collect();
    let mut data = vec![Complex64::new(0.0, 0.0); width * components];
    for part in partials {
        for (d, p) in data.iter_mut().zip(part) {
            *d += p;
        }
    }
    Ok(HarmonicCoefficients { l_max, components, data })
}

/// `sum_k Gamma_{l,k} sum_j |C_{k,j}|^2` on S^2, optionally weighted.
pub fn weighted_frame_potential_spectral(config: &Configuration, weights: Option<&Weights>, l: usize) -> Result<f64> {
    let coeffs = harmonic_coefficients(config, weights, l)?;
    let mut acc = 0.0;
    for k in (l % 2..=l).step_by(2) {
        acc += gamma_lk(l, k)? * coeffs.power(k);
    }
    Ok(acc)
}

/// Spectral evaluation of [`frame_potential`] on S^2.
pub fn frame_potential_spectral(config: &Configuration, l: usize) -> Result<f64> {
    weighted_frame_potential_spectral(config, None, l)
}

fn check_afp_order(l: usize) -> Result<()> {
    if l % 2 == 1 {
        return invalid(format!("antisymmetric frame potential vanishes identically for odd l = {l}"));
    }
    if l < 2 {
        return invalid("antisymmetric frame potential needs l >= 2");
    }
    Ok(())
}

/// `sum_{i,j,k} [(P_i x P_j) . P_k]^l` for even `l >= 2` on S^2.
///
/// Terms with a repeated index vanish, and the six orderings of a distinct
/// triple share the same value for even `l`, so only `i < j < k` is visited.
pub fn antisymmetric_fp(config: &Configuration, l: usize) -> Result<f64> {
    check_afp_order(l)?;
    let p = config.to_vec3()?;
    let n = p.len();
    let e = l as i32;
    let s = ordered_sum(n, |i| {
        let mut row = 0.0;
        for j in i + 1..n {
            let c = cross(&p[i], &p[j]);
            for q in &p[j + 1..] {
                row += dot3(&c, q).powi(e);
            }
        }
        row
    });
    Ok(6.0 * s)
}

/// Continuous uniform-density value
/// `2 sqrt(pi) n^3 Gamma(l/2+1) / ((l-1)(l+1)^2 Gamma(l/2-1/2))`.
pub fn afp_uniform(l: usize, n: f64) -> Result<f64> {
    check_afp_order(l)?;
    // Gamma(m+1)/Gamma(m-1/2) = m! 2^{m-1} / ((2m-3)!! sqrt(pi)) with m = l/2.
    let m = l / 2;
    let fact: f64 = (1..=m).map(|k| k as f64).product();
    let ratio = fact * 2f64.powi(m as i32 - 1) / double_factorial(2 * m as i64 - 3);
    let lf = l as f64;
    Ok(2.0 * n.powi(3) * ratio / ((lf - 1.0) * (lf + 1.0) * (lf + 1.0)))
}

/// The l = 2 antisymmetric frame potential from the degree-2 expansion
/// coefficients alone.
pub fn afp2_spectral(config: &Configuration) -> Result<f64> {
    let coeffs = harmonic_coefficients(config, None, 2)?;
    let n = config.len() as f64;
    let c0 = coeffs.get(2, 0).re;
    let c1 = coeffs.get(2, 1);
    let c2 = coeffs.get(2, 2);
    let (a1, a2) = (c1.norm_sqr(), c2.norm_sqr());
    let mixed = (c2.conj() * c1 * c1 + c2 * c1.conj() * c1.conj()).re;
    let cubic = 16.0 * PI.powf(1.5) / (45.0 * 5f64.sqrt())
        * (6.0 * (a1 - 2.0 * a2) * c0 + 3.0 * 6f64.sqrt() * mixed + 2.0 * c0.powi(3));
    Ok(2.0 * n.powi(3) / 9.0 - 8.0 / 15.0 * PI * n * (c0 * c0 + 2.0 * a1 + 2.0 * a2) + cubic)
}

/// `antisymmetric_fp(., 2)` against the upper bound `2 N^3 / 9`.
pub fn afp_upper_bound_report(config: &Configuration) -> Result<BoundReport> {
    let n = config.len() as f64;
    let value = antisymmetric_fp(config, 2)?;
    Ok(BoundReport::upper(value, 2.0 * n.powi(3) / 9.0))
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
