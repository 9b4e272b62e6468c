//! Lattice points seen through circular (2D) or spherical (3D) windows, and
//! the weighted frame potentials of their directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Configuration, Weights};
use crate::error::{invalid, Error, Result};
use crate::frames::weighted_frame_potential;
use crate::specfun::uniform_fp_coeff;

/// Weight exponents swept when none are given.
pub const DEFAULT_GAMMAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Relative slack on the window radius so that shells lying exactly on the
/// boundary are kept despite rounding.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    /// Triangular lattice in the plane, basis (1, 0) and (1/2, sqrt 3/2).
    Hexagonal,
    /// Simple cubic lattice in space.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    /// Nearest-neighbour distance.
    pub spacing: f64,
}

impl Lattice {
    pub fn hexagonal(spacing: f64) -> Self {
        Self { kind: LatticeKind::Hexagonal, spacing }
    }

    pub fn cubic(spacing: f64) -> Self {
        Self { kind: LatticeKind::Cubic, spacing }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            LatticeKind::Hexagonal => 2,
            LatticeKind::Cubic => 3,
        }
    }

    fn basis(&self) -> Vec<Vec<f64>> {
        let s = self.spacing;
        match self.kind {
            LatticeKind::Hexagonal => vec![vec![s, 0.0], vec![0.5 * s, 0.5 * 3f64.sqrt() * s]],
            LatticeKind::Cubic => vec![vec![s, 0.0, 0.0], vec![0.0, s, 0.0], vec![0.0, 0.0, s]],
        }
    }

    /// Centre of the conventional unit cell at the origin.
    pub fn cell_center(&self) -> Vec<f64> {
        let basis = self.basis();
        (0..self.dim()).map(|k| basis.iter().map(|b| 0.5 * b[k]).sum()).collect()
    }

    /// `count` points drawn uniformly from the unit cell at the origin.
    pub fn random_cell_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let basis = self.basis();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let t: Vec<f64> = (0..self.dim()).map(|_| rng.random_range(0.0..1.0)).collect();
                (0..self.dim()).map(|k| basis.iter().zip(&t).map(|(b, ti)| ti * b[k]).sum()).collect()
            })
            .collect()
    }

    /// All lattice points within `r` of `center`, shifted so `center` is the
    /// origin. A lattice point at the centre itself is dropped.
    pub fn window(&self, r: f64, center: &[f64]) -> Result<WindowSample> {
        if !(r > 0.0 && r.is_finite()) {
            return invalid(format!("window radius must be positive, got {r}"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return invalid(format!("lattice spacing must be positive, got {}", self.spacing));
        }
        let dim = self.dim();
        if center.len() != dim {
            return invalid(format!("window centre has {} coordinates, expected {dim}", center.len()));
        }
        let basis = self.basis();
        // The shortest basis-row height bounds how many steps fit in the window.
        let height = match self.kind {
            LatticeKind::Hexagonal => 0.5 * 3f64.sqrt() * self.spacing,
            LatticeKind::Cubic => self.spacing,
        };
        let reach = center.iter().map(|c| c * c).sum::<f64>().sqrt() + r;
        let m = (reach / height).ceil() as i64 + 1;
        let limit = r * (1.0 + BOUNDARY_SLACK);
        let mut points = Vec::new();
        let mut idx = vec![-m; dim];
        loop {
            let p: Vec<f64> = (0..dim)
                .map(|k| basis.iter().zip(&idx).map(|(b, &i)| i as f64 * b[k]).sum::<f64>() - center[k])
                .collect();
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm <= limit && norm >= BOUNDARY_SLACK * self.spacing {
                points.push(p);
            }
            let mut k = 0;
            while k < dim {
                idx[k] += 1;
                if idx[k] <= m {
                    break;
                }
                idx[k] = -m;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        Ok(WindowSample { lattice: *self, radius: r, center: center.to_vec(), points })
    }
}

/// Lattice points inside one observation window, relative to its centre.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSample {
    pub lattice: Lattice,
    pub radius: f64,
    pub center: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

impl WindowSample {
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Unit directions of the points and their weights `(|p|/r)^gamma`.
    pub fn directions(&self, gamma: f64) -> Result<(Configuration, Weights)> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return invalid(format!("gamma must be nonnegative, got {gamma}"));
        }
        if self.points.is_empty() {
            return invalid("window contains no points");
        }
        let mut weights = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return invalid(format!("window point {i} is at the origin"));
            }
            weights.push((norm / self.radius).powf(gamma));
        }
        Ok((Configuration::new(self.dim(), &self.points)?, Weights::Scalar(weights)))
    }
}

pub fn hexagonal_window(r: f64, spacing: f64, center: [f64; 2]) -> Result<WindowSample> {
    Lattice::hexagonal(spacing).window(r, &center)
}

pub fn cubic_window(r: f64, spacing: f64, center: [f64; 3]) -> Result<WindowSample> {
    Lattice::cubic(spacing).window(r, &center)
}

/// `sum_ij w_i w_j (u_i . u_j)^l` over window directions `u` with weights
/// `w = (|p|/r)^gamma`.
pub fn window_fp(ws: &WindowSample, gamma: f64, l: usize) -> Result<f64> {
    let (config, weights) = ws.directions(gamma)?;
    weighted_frame_potential(&config, &weights, l)
}

/// Normalized distance of [`window_fp`] above its lower bound; zero when the
/// window directions saturate it.
pub fn window_delta(ws: &WindowSample, gamma: f64, l: usize) -> Result<f64> {
    let (config, weights) = ws.directions(gamma)?;
    let fp = weighted_frame_potential(&config, &weights, l)?;
    let Weights::Scalar(w) = &weights else { unreachable!() };
    let total: f64 = w.iter().sum();
    let n = ws.len() as f64;
    Ok((fp - uniform_fp_coeff(l, ws.dim()) * total * total) / (n * n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub center: Vec<f64>,
    pub delta: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanStats {
    pub lattice: Lattice,
    pub radius: f64,
    pub gamma: f64,
    pub l: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub entries: Vec<ScanEntry>,
}

impl ScanStats {
    pub fn to_csv(&self) -> String {
        let axes = ["x", "y", "z"];
        let mut out = String::new();
        for a in &axes[..self.lattice.dim()] {
            out.push_str(a);
            out.push(',');
        }
        out.push_str("delta,error\n");
        for e in &self.entries {
            for c in &e.center {
                out.push_str(&format!("{c:.16e},"));
            }
            match (&e.delta, &e.error) {
                (Some(d), _) => out.push_str(&format!("{d:.16e},\n")),
                (None, err) => out.push_str(&format!(",{}\n", err.as_deref().unwrap_or("").replace(',', ";"))),
            }
        }
        out
    }
}

/// Evaluates [`window_delta`] with the window centred at each of `centers`.
/// Failing centres are kept as flagged entries; the summary covers the rest.
pub fn window_scan(lattice: &Lattice, r: f64, gamma: f64, l: usize, centers: &[Vec<f64>]) -> Result<ScanStats> {
    if centers.is_empty() {
        return invalid("window scan needs at least one centre");
    }
    let entries: Vec<ScanEntry> = centers
        .par_iter()
        .map(|c| {
            let value = lattice.window(r, c).and_then(|ws| window_delta(&ws, gamma, l));
            match value {
                Ok(d) => ScanEntry { center: c.clone(), delta: Some(d), error: None },
                Err(e) => ScanEntry { center: c.clone(), delta: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    let values: Vec<f64> = entries.iter().filter_map(|e| e.delta).collect();
    if values.is_empty() {
        let first = entries[0].error.clone().unwrap_or_default();
        return Err(Error::InvalidArgument(format!("no window centre produced a value: {first}")));
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / k;
    Ok(ScanStats {
        lattice: *lattice,
        radius: r,
        gamma,
        l,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std_dev: var.sqrt(),
        entries,
    })
}
