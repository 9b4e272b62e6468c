//! Point configurations on the unit sphere S^{d-1} and the per-point weights
//! attached to them.
//!
//! A [`Configuration`] is immutable once built. Every point is renormalized
//! on construction, so downstream code can rely on `|P_i| = 1` to within a
//! couple of ulps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};

/// Input rows whose norm deviates from 1 by more than this are rejected by
/// [`load_configuration`].
pub const LOAD_NORM_TOLERANCE: f64 = 1e-6;

/// N unit vectors in R^d, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
}

impl Configuration {
    /// Builds a configuration from raw vectors, renormalizing each one.
    ///
    /// Fails when `dim < 2`, when there are no points, when a row has the
    /// wrong length, or when a row is zero or non-finite.
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim < 2 {
            return invalid(format!("dimension must be at least 2, got {dim}"));
        }
        if points.is_empty() {
            return invalid("a configuration needs at least one point");
        }
        let mut coords = Vec::with_capacity(dim * points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return invalid(format!("point {i} has {} coordinates, expected {dim}", p.len()));
            }
            let norm = norm(p);
            if !(norm.is_finite() && norm > 0.0) {
                return invalid(format!("point {i} has zero or non-finite norm"));
            }
            coords.extend(p.iter().map(|x| x / norm));
        }
        Ok(Self { dim, coords })
    }

    /// Convenience constructor for d = 3.
    pub fn from_vec3(points: &[[f64; 3]]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
        Self::new(3, &rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn dot(&self, i: usize, j: usize) -> f64 {
        dot(self.point(i), self.point(j))
    }

    /// The points as fixed-size arrays. Fails unless d = 3.
    pub fn to_vec3(&self) -> Result<Vec<[f64; 3]>> {
        crate::error::require_dim(self.dim, 3)?;
        Ok(self.points().map(|p| [p[0], p[1], p[2]]).collect())
    }

    /// Applies the same linear map (row-major `dim x dim`) to every point and
    /// renormalizes. Used for global rotations.
    pub fn transformed(&self, matrix: &[Vec<f64>]) -> Result<Self> {
        if matrix.len() != self.dim || matrix.iter().any(|r| r.len() != self.dim) {
            return invalid("matrix shape does not match the configuration dimension");
        }
        let rows: Vec<Vec<f64>> = self
            .points()
            .map(|p| matrix.iter().map(|row| dot(row, p)).collect())
            .collect();
        Self::new(self.dim, &rows)
    }

    /// The same points listed in the order given by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return invalid("permutation length does not match the number of points");
        }
        let mut seen = vec![false; perm.len()];
        for &i in perm {
            if i >= perm.len() || std::mem::replace(&mut seen[i], true) {
                return invalid(format!("not a permutation: index {i} is out of range or repeated"));
            }
        }
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| self.point(i).to_vec()).collect();
        Self::new(self.dim, &rows)
    }
}

/// Per-point scalar or vector weights.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Scalar(Vec<f64>),
    /// Vectors in R^m; m is unrelated to the sphere dimension.
    Vector { dim: usize, values: Vec<Vec<f64>> },
}

impl Weights {
    pub fn unit(n: usize) -> Self {
        Weights::Scalar(vec![1.0; n])
    }

    pub fn vector(values: Vec<Vec<f64>>) -> Result<Self> {
        let dim = values.first().map(Vec::len).unwrap_or(0);
        if dim == 0 {
            return invalid("vector weights need at least one component");
        }
        if values.iter().any(|v| v.len() != dim) {
            return invalid("vector weights have ragged rows");
        }
        Ok(Weights::Vector { dim, values })
    }

    pub fn len(&self) -> usize {
        match self {
            Weights::Scalar(s) => s.len(),
            Weights::Vector { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Inner product f_i . f_j (plain product for scalars).
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        match self {
            Weights::Scalar(s) => s[i] * s[j],
            Weights::Vector { values, .. } => dot(&values[i], &values[j]),
        }
    }

    /// The double sum of f_i . f_j over all ordered pairs, i.e. |sum_i f_i|^2.
    pub fn total(&self) -> f64 {
        match self {
            Weights::Scalar(s) => {
                let t: f64 = s.iter().sum();
                t * t
            }
            Weights::Vector { dim, values } => {
                let mut acc = vec![0.0; *dim];
                for v in values {
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += x;
                    }
                }
                dot(&acc, &acc)
            }
        }
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return invalid(format!("{} weights supplied for {n} points", self.len()));
        }
        Ok(())
    }

    pub fn all_positive(&self) -> bool {
        match self {
            Weights::Scalar(s) => s.iter().all(|&x| x > 0.0),
            Weights::Vector { .. } => false,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Great-circle distance between two unit vectors.
pub fn geodesic_distance(a: &[f64], b: &[f64]) -> f64 {
    // atan2 form stays accurate for nearly parallel vectors.
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    2.0 * norm(&diff).atan2(norm(&sum))
}

/// `n` i.i.d. points from the rotation-invariant measure on S^{d-1}.
pub fn sample_uniform(n: usize, d: usize, seed: u64) -> Result<Configuration> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    if d < 2 {
        return invalid(format!("dimension must be at least 2, got {d}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        // A zero draw has probability zero but would fail normalization.
        if norm(&v) > 1e-300 {
            rows.push(v);
        }
    }
    Configuration::new(d, &rows)
}

/// Adds an independent N(0, sigma^2) displacement to every coordinate, then
/// projects back onto the sphere. `sigma == 0` returns the input unchanged.
pub fn perturb(config: &Configuration, sigma: f64, seed: u64) -> Result<Configuration> {
    if !(sigma >= 0.0) {
        return invalid(format!("sigma must be non-negative, got {sigma}"));
    }
    if sigma == 0.0 {
        return Ok(config.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = config
        .points()
        .map(|p| {
            p.iter()
                .map(|x| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + sigma * z
                })
                .collect()
        })
        .collect();
    Configuration::new(config.dim(), &rows).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("perturbation collapsed a point: {m}")),
        other => other,
    })
}

fn parse_rows(text: &str) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("non-numeric token {tok:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parse { line: line_no, message: "non-finite value".into() });
        }
        match width {
            None => width = Some(fields.len()),
            Some(w) if w != fields.len() => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected {w} fields, found {}", fields.len()),
                })
            }
            _ => {}
        }
        rows.push((line_no, fields));
    }
    Ok(rows)
}

/// Parses the whitespace-separated point format: one point per line, `#`
/// comments, dimension taken from the first data line.
pub fn load_configuration(text: &str) -> Result<Configuration> {
    let rows = parse_rows(text)?;
    let Some((_, first)) = rows.first() else {
        return Err(Error::Parse { line: 0, message: "no data lines".into() });
    };
    let dim = first.len();
    if dim < 2 {
        return Err(Error::Parse { line: rows[0].0, message: "points need at least 2 coordinates".into() });
    }
    for (line, p) in &rows {
        let n = norm(p);
        if (n - 1.0).abs() > LOAD_NORM_TOLERANCE {
            return Err(Error::Parse {
                line: *line,
                message: format!("point norm {n} deviates from 1 by more than {LOAD_NORM_TOLERANCE}"),
            });
        }
    }
    let points: Vec<Vec<f64>> = rows.into_iter().map(|(_, p)| p).collect();
    Configuration::new(dim, &points)
}

/// Writes one point per line with round-trip exact formatting.
pub fn save_configuration(config: &Configuration) -> String {
    let mut out = format!("# {} points in R^{}\n", config.len(), config.dim());
    for p in config.points() {
        let fields: Vec<String> = p.iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a weights file: one scalar per line, or `m` fields per line for
/// vector weights.
pub fn load_weights(text: &str) -> Result<Weights> {
    let rows = parse_rows(text)?;
    if rows.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data lines".into() });
    }
    if rows[0].1.len() == 1 {
        Ok(Weights::Scalar(rows.into_iter().map(|(_, r)| r[0]).collect()))
    } else {
        Weights::vector(rows.into_iter().map(|(_, r)| r).collect())
    }
}
