//! Harmonic decomposition of the squared triple product
//! `[(a x b) . c]^2 = sum kappa(l1,m1,l2,m2,l3,m3) Y_{l1 m1}(a) Y_{l2 m2}(b) Y_{l3 m3}(c)`
//! with all degrees at most 2.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::HarmonicTable;

/// Index sextuple (l1, m1, l2, m2, l3, m3).
pub type KappaIndex = [i32; 6];

/// Nonzero expansion coefficients; absent entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaTable {
    entries: BTreeMap<KappaIndex, f64>,
}

impl KappaTable {
    pub fn get(&self, idx: KappaIndex) -> f64 {
        self.entries.get(&idx).copied().unwrap_or(0.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&KappaIndex, &f64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sums the expansion at three unit vectors in R^3. The result is real up
    /// to rounding.
    pub fn expand(&self, a: &[f64], b: &[f64], c: &[f64]) -> Complex64 {
        let (ya, yb, yc) = (HarmonicTable::at_point(2, a), HarmonicTable::at_point(2, b), HarmonicTable::at_point(2, c));
        self.entries
            .iter()
            .map(|(k, v)| {
                ya.get(k[0] as usize, k[1] as i64) * yb.get(k[2] as usize, k[3] as i64) * yc.get(k[4] as usize, k[5] as i64) * *v
            })
            .sum()
    }
}

/// The fixed table of nonzero coefficients.
pub fn kappa_table() -> KappaTable {
    let p32 = PI.powf(1.5);
    let s5 = 5f64.sqrt();
    let groups: [(&[KappaIndex], f64); 7] = [
        (&[[0, 0, 0, 0, 0, 0]], 16.0 * p32 / 9.0),
        (
            &[
                [2, -1, 2, -1, 2, 2],
                [2, -2, 2, 1, 2, 1],
                [2, 1, 2, -2, 2, 1],
                [2, -1, 2, 2, 2, -1],
                [2, 2, 2, -1, 2, -1],
                [2, 1, 2, 1, 2, -2],
            ],
            16.0 / 15.0 * (2.0f64 / 15.0).sqrt() * p32,
        ),
        (
            &[
                [0, 0, 2, -1, 2, 1],
                [2, -1, 0, 0, 2, 1],
                [0, 0, 2, 1, 2, -1],
                [2, 1, 0, 0, 2, -1],
                [2, -1, 2, 1, 0, 0],
                [2, 1, 2, -1, 0, 0],
            ],
            16.0 * p32 / 45.0,
        ),
        (&[[2, 0, 2, 0, 2, 0]], 32.0 * p32 / (45.0 * s5)),
        (
            &[
                [2, -1, 2, 0, 2, 1],
                [2, 0, 2, -1, 2, 1],
                [2, -1, 2, 1, 2, 0],
                [2, 1, 2, -1, 2, 0],
                [2, 0, 2, 1, 2, -1],
                [2, 1, 2, 0, 2, -1],
            ],
            -16.0 * p32 / (45.0 * s5),
        ),
        (
            &[
                [2, -2, 2, 0, 2, 2],
                [2, 0, 2, -2, 2, 2],
                [2, -2, 2, 2, 2, 0],
                [2, 2, 2, -2, 2, 0],
                [2, 0, 2, 2, 2, -2],
                [2, 2, 2, 0, 2, -2],
            ],
            -32.0 * p32 / (45.0 * s5),
        ),
        (
            &[
                [0, 0, 2, -2, 2, 2],
                [2, -2, 0, 0, 2, 2],
                [0, 0, 2, 0, 2, 0],
                [2, 0, 0, 0, 2, 0],
                [0, 0, 2, 2, 2, -2],
                [2, 2, 0, 0, 2, -2],
                [2, -2, 2, 2, 0, 0],
                [2, 0, 2, 0, 0, 0],
                [2, 2, 2, -2, 0, 0],
            ],
            -16.0 * p32 / 45.0,
        ),
    ];
    let mut entries = BTreeMap::new();
    for (keys, value) in groups {
        for k in keys {
            entries.insert(*k, value);
        }
    }
    KappaTable { entries }
}
