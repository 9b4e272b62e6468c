//! Local minimization of Riesz energies on the sphere.
//!
//! Plain projected-gradient descent: the Euclidean gradient is projected
//! onto each point's tangent plane, a trial step length comes from the
//! Barzilai-Borwein quotient of the last two iterates, and an Armijo
//! backtracking search accepts or shrinks it. After each step every point
//! is renormalized (retraction).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{perturb, Configuration};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    /// Riesz exponent.
    pub s: f64,
    pub max_iters: usize,
    /// Stop once the largest tangent-gradient norm drops to this. `None`
    /// means `1e-10 * N`.
    pub grad_tol: Option<f64>,
    /// Largest displacement of any point on the first step.
    pub initial_step: f64,
    /// Upper bound on any single displacement.
    pub max_step: f64,
    pub backtrack: f64,
    pub sufficient_decrease: f64,
    pub max_backtracks: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            s: 1.0,
            max_iters: 50_000,
            grad_tol: None,
            initial_step: 0.05,
            max_step: 0.2,
            backtrack: 0.5,
            sufficient_decrease: 1e-4,
            max_backtracks: 60,
        }
    }
}

impl MinimizeOptions {
    pub fn grad_tol_for(&self, n: usize) -> f64 {
        self.grad_tol.unwrap_or(1e-10 * n as f64)
    }

    fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return invalid("max_iters must be at least 1");
        }
        if let Some(t) = self.grad_tol {
            if !(t > 0.0) {
                return invalid("grad_tol must be positive");
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return invalid("backtrack factor must lie in (0, 1)");
        }
        if !(self.initial_step > 0.0 && self.max_step > 0.0) {
            return invalid("step sizes must be positive");
        }
        if !(self.s >= -1.0) || self.s == 0.0 {
            return invalid(format!("Riesz exponent must satisfy s >= -1 and s != 0, got {}", self.s));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizationResult {
    pub config: Configuration,
    pub energy: f64,
    pub iterations: usize,
    /// Largest per-point tangent-gradient norm at `config`.
    pub final_grad_norm: f64,
    pub converged: bool,
    /// Energy after every accepted step, starting with the initial energy.
    pub trace: Vec<f64>,
    /// Set when the run stopped for a reason other than convergence.
    pub message: Option<String>,
}

/// Energy and tangent gradient over a flat coordinate buffer.
fn energy_and_gradient(coords: &[f64], dim: usize, s: f64) -> Result<(f64, Vec<f64>)> {
    let n = coords.len() / dim;
    let sign = s.signum();
    let rows: Vec<Result<(f64, Vec<f64>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let pi = &coords[i * dim..(i + 1) * dim];
            let mut e = 0.0;
            let mut g = vec![0.0; dim];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let pj = &coords[j * dim..(j + 1) * dim];
                let r2: f64 = pi.iter().zip(pj).map(|(a, b)| (a - b) * (a - b)).sum();
                if r2 == 0.0 {
                    return Err(Error::InfiniteEnergy(i.min(j), i.max(j)));
                }
                let r = r2.sqrt();
                let rs = if s == 1.0 { 1.0 / r } else { r.powf(-s) };
                if j > i {
                    e += sign * rs;
                }
                // d/dP_i of sign(s) r^{-s} = -|s| r^{-s-2} (P_i - P_j)
                let f = -s.abs() * rs / r2;
                for k in 0..dim {
                    g[k] += f * (pi[k] - pj[k]);
                }
            }
            let radial: f64 = g.iter().zip(pi).map(|(a, b)| a * b).sum();
            for k in 0..dim {
                g[k] -= radial * pi[k];
            }
            Ok((e, g))
        })
        .collect();
    let mut energy = 0.0;
    let mut grad = Vec::with_capacity(coords.len());
    for row in rows {
        let (e, g) = row?;
        energy += e;
        grad.extend(g);
    }
    Ok((energy, grad))
}

/// Tangent-projected gradient of the pair-sum Riesz energy, one vector per
/// point (`g_i . P_i = 0`).
pub fn energy_gradient(config: &Configuration, s: f64) -> Result<Vec<Vec<f64>>> {
    if !(s >= -1.0) || s == 0.0 {
        return invalid(format!("Riesz exponent must satisfy s >= -1 and s != 0, got {s}"));
    }
    let dim = config.dim();
    let coords: Vec<f64> = config.points().flatten().copied().collect();
    let (_, g) = energy_and_gradient(&coords, dim, s)?;
    Ok(g.chunks_exact(dim).map(|c| c.to_vec()).collect())
}

fn max_point_norm(v: &[f64], dim: usize) -> f64 {
    v.chunks_exact(dim).map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

fn retract(x: &[f64], dir: &[f64], alpha: f64, dim: usize) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a - alpha * d).collect();
    for c in out.chunks_exact_mut(dim) {
        let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in c.iter_mut() {
            *v /= norm;
        }
    }
    out
}

fn to_config(coords: &[f64], dim: usize) -> Result<Configuration> {
    let rows: Vec<Vec<f64>> = coords.chunks_exact(dim).map(|c| c.to_vec()).collect();
    Configuration::new(dim, &rows)
}

/// Projected-gradient descent with backtracking line search.
///
/// Energies are non-increasing along accepted steps up to the rounding
/// floor of the energy sum (`16 eps |E|`); below that floor the line search
/// cannot distinguish a decrease from noise.
pub fn local_minimize(config: &Configuration, opts: &MinimizeOptions) -> Result<MinimizationResult> {
    opts.validate()?;
    let dim = config.dim();
    let n = config.len();
    let tol = opts.grad_tol_for(n);
    let mut x: Vec<f64> = config.points().flatten().copied().collect();
    let (mut energy, mut grad) = energy_and_gradient(&x, dim, opts.s)?;
    let mut trace = vec![energy];
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut alpha_prev = 0.0;
    let mut message = None;
    let mut iterations = 0;
    let mut gnorm = max_point_norm(&grad, dim);

    while gnorm > tol {
        if iterations >= opts.max_iters {
            message = Some(format!("reached max_iters = {}", opts.max_iters));
            break;
        }
        let mut alpha = match &prev {
            None => opts.initial_step / gnorm,
            Some((xp, gp)) => {
                let (mut ss, mut sy) = (0.0, 0.0);
                for k in 0..x.len() {
                    let sk = x[k] - xp[k];
                    let yk = grad[k] - gp[k];
                    ss += sk * sk;
                    sy += sk * yk;
                }
                if sy > 0.0 {
                    ss / sy
                } else {
                    2.0 * alpha_prev
                }
            }
        };
        alpha = alpha.min(opts.max_step / gnorm);
        let g2: f64 = grad.iter().map(|v| v * v).sum();
        let slack = 16.0 * f64::EPSILON * energy.abs();
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let trial = retract(&x, &grad, alpha, dim);
            // Collisions count as failed trial steps.
            if let Ok((e, g)) = energy_and_gradient(&trial, dim, opts.s) {
                if e <= energy - opts.sufficient_decrease * alpha * g2 + slack {
                    accepted = Some((trial, e, g));
                    break;
                }
            }
            alpha *= opts.backtrack;
        }
        let Some((trial, e, g)) = accepted else {
            message = Some(format!("line search failed after {} backtracks", opts.max_backtracks));
            break;
        };
        prev = Some((std::mem::replace(&mut x, trial), std::mem::replace(&mut grad, g)));
        energy = e;
        alpha_prev = alpha;
        trace.push(energy);
        iterations += 1;
        gnorm = max_point_norm(&grad, dim);
    }

    let out = to_config(&x, dim)?;
    // Report the energy of the renormalized output exactly.
    let out_coords: Vec<f64> = out.points().flatten().copied().collect();
    let (final_energy, final_grad) = energy_and_gradient(&out_coords, dim, opts.s)?;
    let final_grad_norm = max_point_norm(&final_grad, dim);
    Ok(MinimizationResult {
        config: out,
        energy: final_energy,
        iterations,
        final_grad_norm,
        converged: final_grad_norm <= tol,
        trace,
        message,
    })
}

/// One perturb-and-reminimize run of an [`ensemble`].
#[derive(Debug, Clone)]
pub struct EnsembleMember {
    pub index: usize,
    pub seed: u64,
    pub outcome: Result<MinimizationResult>,
}

impl EnsembleMember {
    pub fn energy(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|r| r.energy)
    }
}

/// Perturbs `seed_config` `count` times (Gaussian, scale `sigma` per
/// coordinate) and locally minimizes each copy. Members run in parallel;
/// the output is sorted by energy with failed members last.
pub fn ensemble(
    seed_config: &Configuration,
    count: usize,
    sigma: f64,
    seed: u64,
    opts: &MinimizeOptions,
) -> Result<Vec<EnsembleMember>> {
    if count < 1 {
        return invalid("ensemble count must be at least 1");
    }
    if !(sigma > 0.0) {
        return invalid(format!("ensemble sigma must be positive, got {sigma}"));
    }
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| rng.next_u64()).collect();
    let mut members: Vec<EnsembleMember> = seeds
        .par_iter()
        .enumerate()
        .map(|(index, &member_seed)| {
            let outcome = perturb(seed_config, sigma, member_seed).and_then(|c| local_minimize(&c, opts));
            EnsembleMember { index, seed: member_seed, outcome }
        })
        .collect();
    members.sort_by(|a, b| match (a.energy(), b.energy()) {
        (Some(x), Some(y)) => x.total_cmp(&y).then(a.index.cmp(&b.index)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.index.cmp(&b.index),
    });
    Ok(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::sample_uniform;
    use crate::riesz::riesz_energy;

    #[test]
    fn antipodal_pair_is_stationary() {
        let c = Configuration::from_vec3(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        for g in energy_gradient(&c, 1.0).unwrap() {
            assert!(g.iter().all(|v| v.abs() < 1e-15));
        }
    }

    #[test]
    fn gradient_is_tangent() {
        let c = sample_uniform(20, 3, 2).unwrap();
        for s in [1.0, 2.0, -1.0, 0.5] {
            let g = energy_gradient(&c, s).unwrap();
            for (gi, p) in g.iter().zip(c.points()) {
                let d: f64 = gi.iter().zip(p).map(|(a, b)| a * b).sum();
                let scale = gi.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
                assert!(d.abs() < 1e-14 * scale, "s={s}: {d}");
            }
        }
    }

    #[test]
    fn energy_agrees_with_riesz_module() {
        let c = sample_uniform(30, 3, 9).unwrap();
        let coords: Vec<f64> = c.points().flatten().copied().collect();
        for s in [1.0, 2.5, -1.0] {
            let (e, _) = energy_and_gradient(&coords, 3, s).unwrap();
            let want = riesz_energy(&c, s).unwrap();
            assert!((e - want).abs() < 1e-12 * want.abs());
        }
    }

    #[test]
    fn coincident_points_error() {
        let c = crate::solids::north_pole(2);
        assert_eq!(energy_gradient(&c, 1.0), Err(Error::InfiniteEnergy(0, 1)));
    }

    #[test]
    fn two_points_go_antipodal() {
        let c = sample_uniform(2, 3, 4).unwrap();
        let r = local_minimize(&c, &MinimizeOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.config.dot(0, 1) + 1.0).abs() < 1e-8);
        assert!((r.energy - 0.5).abs() < 1e-8);
    }

    #[test]
    fn trace_is_monotone_up_to_rounding() {
        let c = sample_uniform(15, 3, 5).unwrap();
        let r = local_minimize(&c, &MinimizeOptions::default()).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1] <= w[0] + 16.0 * f64::EPSILON * w[0].abs());
        }
        assert!((r.energy - riesz_energy(&r.config, 1.0).unwrap()).abs() < 1e-12 * r.energy);
    }

    #[test]
    fn bad_options_rejected() {
        let c = sample_uniform(4, 3, 1).unwrap();
        let opts = MinimizeOptions { max_iters: 0, ..Default::default() };
        assert!(local_minimize(&c, &opts).is_err());
        let opts = MinimizeOptions { grad_tol: Some(0.0), ..Default::default() };
        assert!(local_minimize(&c, &opts).is_err());
        assert!(ensemble(&c, 0, 0.1, 1, &MinimizeOptions::default()).is_err());
        assert!(ensemble(&c, 3, 0.0, 1, &MinimizeOptions::default()).is_err());
    }

    #[test]
    fn max_iters_reports_non_convergence() {
        let c = sample_uniform(30, 3, 1).unwrap();
        let opts = MinimizeOptions { max_iters: 3, ..Default::default() };
        let r = local_minimize(&c, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
        assert!(r.message.is_some());
    }
}
