//! Coefficient machinery for harmonic expansions on S^{d-1}.
//!
//! The central objects are the reproducing-kernel polynomials `F_l` with
//! `sum_m conj(Y_{l,m}(x)) Y_{l,m}(y) = F_l(x . y)`, and the expansion
//! `t^l = sum_k B_k^l F_{l-2k}(t)` whose coefficients are all non-negative.
//! The `k = l/2` term carries the uniform-density frame potential and hence
//! the lower bound on every frame potential.

mod harmonics;
mod kappa;

pub use harmonics::{sph_harm, HarmonicTable};
pub use kappa::{kappa_table, KappaTable};

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Above this size factorial-type products switch to log space.
const EXACT_LIMIT: usize = 30;

/// A real polynomial in one variable, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Trailing zero coefficients are dropped, so the leading coefficient of
    /// a nonzero polynomial is never zero.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of t^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

/// 1 for even `l`, 0 for odd.
pub fn parity(l: usize) -> f64 {
    if l.is_multiple_of(2) {
        1.0
    } else {
        0.0
    }
}

/// m!! with the conventions 0!! = (-1)!! = 1.
pub fn double_factorial(m: i64) -> f64 {
    if m <= EXACT_LIMIT as i64 {
        let mut acc = 1.0;
        let mut k = m;
        while k > 1 {
            acc *= k as f64;
            k -= 2;
        }
        acc
    } else {
        ln_double_factorial(m).exp()
    }
}

pub fn ln_double_factorial(m: i64) -> f64 {
    let mut acc = 0.0;
    let mut k = m;
    while k > 1 {
        acc += (k as f64).ln();
        k -= 2;
    }
    acc
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Surface area of the unit sphere S^{d-1} in R^d.
pub fn sphere_area(d: usize) -> f64 {
    // omega_{d+2} = 2 pi omega_d / d, seeded with omega_1 = 2, omega_2 = 2 pi.
    let (mut area, mut k) = if d % 2 == 1 { (2.0, 1) } else { (2.0 * PI, 2) };
    while k < d {
        area *= 2.0 * PI / k as f64;
        k += 2;
    }
    area
}

/// Dimension of the space of degree-`l` spherical harmonics on S^{d-1}.
pub fn harmonic_dim(l: usize, d: usize) -> u64 {
    match d {
        0 | 1 => 0,
        2 => {
            if l == 0 {
                1
            } else {
                2
            }
        }
        _ => {
            // (2l+d-2)(l+d-3)! / (l!(d-2)!) = (2l+d-2)/(d-2) * binom(l+d-3, l)
            let mut binom: u128 = 1;
            for i in 0..l as u128 {
                binom = binom * (d as u128 - 2 + i) / (i + 1);
            }
            ((2 * l + d - 2) as u128 * binom / (d as u128 - 2)) as u64
        }
    }
}

/// The Gegenbauer polynomial C_l^nu via its explicit finite sum.
pub fn gegenbauer(l: usize, nu: f64) -> Result<Polynomial> {
    if !(nu > 0.0) {
        return invalid(format!("Gegenbauer parameter must be positive, got {nu}"));
    }
    let mut coeffs = vec![0.0; l + 1];
    for k in 0..=l / 2 {
        // Gamma(nu + l - k) / Gamma(nu) as a rising factorial.
        let rising: f64 = (0..l - k).map(|j| nu + j as f64).product();
        let denom = (ln_factorial(k) + ln_factorial(l - 2 * k)).exp();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs[l - 2 * k] = sign * 2f64.powi((l - 2 * k) as i32) * rising / denom;
    }
    Ok(Polynomial::new(coeffs))
}

fn chebyshev_t(l: usize) -> Polynomial {
    let mut prev = vec![1.0];
    if l == 0 {
        return Polynomial::new(prev);
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..l {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += 2.0 * c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
    }
    Polynomial::new(cur)
}

/// The addition-theorem polynomial F_l on S^{d-1}.
///
/// For d >= 3 this is `(2l+d-2) / ((d-2) omega_d) * C_l^{(d-2)/2}`. On the
/// circle the Gegenbauer form degenerates; there the limit is used:
/// `F_0 = 1/(2 pi)` and `F_l = T_l / pi`, matching the Fourier basis
/// `cos(k theta)/sqrt(pi)`, `sin(k theta)/sqrt(pi)`.
pub fn addition_poly(l: usize, d: usize) -> Result<Polynomial> {
    match d {
        0 | 1 => invalid(format!("dimension must be at least 2, got {d}")),
        2 => {
            let scale = if l == 0 { 1.0 / (2.0 * PI) } else { 1.0 / PI };
            Ok(chebyshev_t(l).scaled(scale))
        }
        _ => {
            let nu = (d as f64 - 2.0) / 2.0;
            let scale = (2 * l + d - 2) as f64 / ((d as f64 - 2.0) * sphere_area(d));
            Ok(gegenbauer(l, nu)?.scaled(scale))
        }
    }
}

/// Coefficients B_k^l of `t^l = sum_k B_k^l F_{l-2k}(t)`, k = 0..=l/2.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerExpansion {
    pub l: usize,
    pub d: usize,
    pub b: Vec<f64>,
}

impl PowerExpansion {
    /// Evaluates `sum_k B_k F_{l-2k}(t)`, which should reproduce `t^l`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (k, bk) in self.b.iter().enumerate() {
            acc += bk * addition_poly(self.l - 2 * k, self.d)?.eval(t);
        }
        Ok(acc)
    }

    /// The `k = l/2` coefficient divided by omega_d: the frame potential of
    /// the uniform density per unit N^2. Zero for odd `l`.
    pub fn uniform_coefficient(&self) -> f64 {
        if self.l % 2 == 1 {
            return 0.0;
        }
        self.b[self.l / 2] / sphere_area(self.d)
    }
}

/// Solves the triangular system matching `t^l` degree by degree against
/// F_l, F_{l-2}, ...
pub fn power_expansion(l: usize, d: usize) -> Result<PowerExpansion> {
    let mut residual = vec![0.0; l + 1];
    residual[l] = 1.0;
    let mut b = Vec::with_capacity(l / 2 + 1);
    for k in 0..=l / 2 {
        let deg = l - 2 * k;
        let f = addition_poly(deg, d)?;
        let lead = f.leading();
        if lead == 0.0 || f.degree() != Some(deg) {
            return Err(Error::Internal(format!("F_{deg} has degenerate leading coefficient")));
        }
        let bk = residual[deg] / lead;
        for (i, c) in f.coeffs().iter().enumerate() {
            residual[i] -= bk * c;
        }
        residual[deg] = 0.0;
        b.push(bk);
    }
    // Opposite-parity coefficients are never touched; same-parity ones have
    // all been eliminated. Anything left is rounding.
    let leftover = residual.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if leftover > 1e-9 {
        return Err(Error::Internal(format!("power expansion residual {leftover:e}")));
    }
    Ok(PowerExpansion { l, d, b })
}

/// The uniform-density frame-potential coefficient
/// `(l-1)!! (d-2)!! / (l+d-2)!!` for even `l`, zero for odd `l`.
///
/// The unweighted lower bound is this value times N^2.
pub fn uniform_fp_coeff(l: usize, d: usize) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let (l, d) = (l as i64, d as i64);
    if l + d <= EXACT_LIMIT as i64 {
        double_factorial(l - 1) * double_factorial(d - 2) / double_factorial(l + d - 2)
    } else {
        (ln_double_factorial(l - 1) + ln_double_factorial(d - 2) - ln_double_factorial(l + d - 2)).exp()
    }
}

/// Gamma_{l,k} of the d = 3 expansion `cos^l = sum_k Gamma_{l,k} F_k`:
/// `4 pi l! / (2^{(l-k)/2} ((l-k)/2)! (l+k+1)!!)` when `l - k` is even, zero
/// otherwise.
pub fn gamma_lk(l: usize, k: usize) -> Result<f64> {
    if k > l {
        return invalid(format!("k = {k} exceeds l = {l}"));
    }
    if (l - k) % 2 == 1 {
        return Ok(0.0);
    }
    let h = (l - k) / 2;
    if l <= EXACT_LIMIT {
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        Ok(4.0 * PI * fact(l) / (2f64.powi(h as i32) * fact(h) * double_factorial((l + k + 1) as i64)))
    } else {
        let ln = (4.0 * PI).ln() + ln_factorial(l)
            - h as f64 * 2f64.ln()
            - ln_factorial(h)
            - ln_double_factorial((l + k + 1) as i64);
        Ok(ln.exp())
    }
}
