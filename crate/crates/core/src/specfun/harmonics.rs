//! Complex orthonormal spherical harmonics on S^2, Condon-Shortley phase.
//!
//! Values come from the fully normalized associated-Legendre recurrence,
//! which stays well scaled for large degree.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Every Y_{l,m} for l <= l_max at one point, indexed by `l*l + l + m`.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    l_max: usize,
    values: Vec<Complex64>,
}

impl HarmonicTable {
    pub fn at_angles(l_max: usize, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::build(l_max, ct, st, Complex64::new(cp, sp))
    }

    /// Evaluates at the unit vector `p` (polar angle from +z).
    pub fn at_point(l_max: usize, p: &[f64]) -> Self {
        let rho = p[0].hypot(p[1]);
        let phase = if rho > 0.0 { Complex64::new(p[0] / rho, p[1] / rho) } else { Complex64::new(1.0, 0.0) };
        Self::build(l_max, p[2], rho, phase)
    }

    fn build(l_max: usize, cos_t: f64, sin_t: f64, phase: Complex64) -> Self {
        let n = (l_max + 1) * (l_max + 1);
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        let mut legendre = vec![0.0; l_max + 1];
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        let mut eimp = Complex64::new(1.0, 0.0);
        for m in 0..=l_max {
            if m > 0 {
                let mf = m as f64;
                pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_t;
                eimp *= phase;
            }
            legendre[m] = pmm;
            if m < l_max {
                legendre[m + 1] = (2.0 * m as f64 + 3.0).sqrt() * cos_t * pmm;
            }
            for l in m + 2..=l_max {
                let a = recurrence_factor(l, m);
                let a_prev = recurrence_factor(l - 1, m);
                legendre[l] = a * (cos_t * legendre[l - 1] - legendre[l - 2] / a_prev);
            }
            for l in m..=l_max {
                let y = eimp * legendre[l];
                values[index(l, m as i64)] = y;
                if m > 0 {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    values[index(l, -(m as i64))] = y.conj() * sign;
                }
            }
        }
        Self { l_max, values }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.values[index(l, m)]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

fn recurrence_factor(l: usize, m: usize) -> f64 {
    let (l, m) = (l as f64, m as f64);
    ((4.0 * l * l - 1.0) / (l * l - m * m)).sqrt()
}

/// Flat index of (l, m) in a table ordered by degree, then order.
pub(crate) fn index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// A single Y_{l,m}(theta, phi) with theta the polar angle.
pub fn sph_harm(l: usize, m: i64, theta: f64, phi: f64) -> Result<Complex64> {
    if m.unsigned_abs() as usize > l {
        return invalid(format!("|m| = {} exceeds l = {l}", m.abs()));
    }
    Ok(HarmonicTable::at_angles(l, theta, phi).get(l, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gegenbauer;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn legendre(l: usize, t: f64) -> f64 {
        // Bonnet recurrence, independent of the normalized tables above.
        let (mut p0, mut p1) = (1.0, t);
        if l == 0 {
            return p0;
        }
        for n in 1..l {
            let nf = n as f64;
            let p2 = ((2.0 * nf + 1.0) * t * p1 - nf * p0) / (nf + 1.0);
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn low_degree_closed_forms() {
        let y00 = sph_harm(0, 0, 1.1, 2.3).unwrap();
        assert!((y00.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && y00.im == 0.0);
        for th in [0.0, 0.3, 1.2, PI] {
            let y10 = sph_harm(1, 0, th, 0.7).unwrap();
            assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * th.cos()).abs() < 1e-15);
            let y11 = sph_harm(1, 1, th, 0.7).unwrap();
            let want = Complex64::from_polar(-(3.0 / (8.0 * PI)).sqrt() * th.sin(), 0.7);
            assert!((y11 - want).norm() < 1e-15);
            let y22 = sph_harm(2, 2, th, 0.7).unwrap();
            let want = Complex64::from_polar(0.25 * (15.0 / (2.0 * PI)).sqrt() * th.sin().powi(2), 1.4);
            assert!((y22 - want).norm() < 1e-15);
        }
        assert!(sph_harm(2, 3, 0.1, 0.1).is_err());
    }

    #[test]
    fn addition_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let (t1, p1) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let (t2, p2) = (rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let a = HarmonicTable::at_angles(8, t1, p1);
            let b = HarmonicTable::at_angles(8, t2, p2);
            let cos_g = t1.cos() * t2.cos() + t1.sin() * t2.sin() * (p1 - p2).cos();
            for l in 0..=8usize {
                let s: Complex64 = (-(l as i64)..=l as i64).map(|m| a.get(l, m).conj() * b.get(l, m)).sum();
                let want = (2 * l + 1) as f64 / (4.0 * PI) * legendre(l, cos_g);
                assert!((s.re - want).abs() < 1e-12 && s.im.abs() < 1e-12, "l={l}");
                // Legendre P_l is the Gegenbauer polynomial with nu = 1/2.
                assert!((gegenbauer(l, 0.5).unwrap().eval(cos_g) - legendre(l, cos_g)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn point_and_angle_forms_agree() {
        let (th, ph) = (0.9f64, -2.2f64);
        let p = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
        let a = HarmonicTable::at_angles(10, th, ph);
        let b = HarmonicTable::at_point(10, &p);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn orthonormal_on_a_quadrature_grid() {
        // Gauss-free check: equally spaced phi integrates e^{i(m-m')phi} exactly
        // and a fine midpoint grid in cos(theta) is enough at 1e-4.
        let (nt, np) = (2000, 16);
        let l_max = 4;
        let n = (l_max + 1) * (l_max + 1);
        let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
        for it in 0..nt {
            let u = -1.0 + (it as f64 + 0.5) * 2.0 / nt as f64;
            for ip in 0..np {
                let ph = ip as f64 * 2.0 * PI / np as f64;
                let t = HarmonicTable::at_angles(l_max, u.acos(), ph);
                let w = (2.0 / nt as f64) * (2.0 * PI / np as f64);
                for a in 0..n {
                    for b in 0..n {
                        gram[a * n + b] += t.values()[a].conj() * t.values()[b] * w;
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * n + b] - want).norm() < 1e-4, "{a} {b} {}", gram[a * n + b]);
            }
        }
    }
}
