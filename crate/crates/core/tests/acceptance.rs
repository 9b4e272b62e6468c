//! Acceptance gate: one PASS/FAIL line per criterion, with timings against
//! the runtime budgets. Runs as a plain binary so the report is always shown.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphere_bounds::frames::{
    afp2_spectral, afp_uniform, afp_upper_bound_report, antisymmetric_fp, fp_bound_report, fp_lower_bound, frame_potential,
    frame_potential_spectral,
};
use sphere_bounds::lattices::{hexagonal_window, window_delta, Lattice};
use sphere_bounds::optimize::{energy_gradient, ensemble, local_minimize, MinimizeOptions};
use sphere_bounds::riesz::{
    asymptotic_bound, calibrated_bound, delta_star, energy_series, regularized_energy, riesz_energy, sum_distance_bound,
};
use sphere_bounds::solids::{cube, icosahedron, octahedron, tetrahedron};
use sphere_bounds::specfun::{kappa_table, power_expansion};
use sphere_bounds::voronoi::{spherical_voronoi, strain_energy_summary, StrainMode};
use sphere_bounds::{sample_uniform, Configuration, Weights};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: sphere_bounds::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn odd_double_factorial(m: i64) -> f64 {
    (1..=m).rev().step_by(2).map(|k| k as f64).product()
}

fn coefficient_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=6usize {
        for l in (0..=12usize).step_by(2) {
            let closed = odd_double_factorial(l as i64 - 1) * odd_double_factorial(d as i64 - 2)
                / odd_double_factorial((l + d) as i64 - 2);
            let got = lib(power_expansion(l, d))?.uniform_coefficient();
            let e = rel(got, closed);
            worst = worst.max(e);
            check(e <= 1e-12, || format!("l={l} d={d}: {got} vs {closed}"))?;
        }
    }
    Ok(format!("35 (l, d) pairs, worst relative error {worst:.1e}"))
}

fn tetrahedron_saturation() -> Outcome {
    let fp = frame_potential(&tetrahedron(), 2);
    let bound = fp_lower_bound(2, 3, 16.0);
    check((fp - 16.0 / 3.0).abs() <= 1e-12 && (bound - 16.0 / 3.0).abs() <= 1e-12, || format!("FP {fp}, bound {bound}"))?;
    Ok(format!("FP_2 = {fp:.15}, bound = {bound:.15}"))
}

fn octahedron_afp() -> Outcome {
    let c = octahedron();
    // Independent oracle: all 216 ordered triples.
    let mut brute = 0.0;
    for a in c.points() {
        for b in c.points() {
            for p in c.points() {
                let det = a[0] * (b[1] * p[2] - b[2] * p[1]) - a[1] * (b[0] * p[2] - b[2] * p[0]) + a[2] * (b[0] * p[1] - b[1] * p[0]);
                brute += det * det;
            }
        }
    }
    let afp = lib(antisymmetric_fp(&c, 2))?;
    let bound = 2.0 * 216.0 / 9.0;
    check((afp - 48.0).abs() <= 1e-12 && (brute - 48.0).abs() <= 1e-12 && bound == 48.0, || {
        format!("AFP {afp}, brute force {brute}, bound {bound}")
    })?;
    Ok(format!("AFP_2 = {afp}, brute force = {brute}, 2N^3/9 = {bound}"))
}

fn platonic_directions() -> Outcome {
    let mut notes = Vec::new();
    let cases: [(&str, Configuration, &[usize]); 3] =
        [("tetrahedron", tetrahedron(), &[4, 6, 8]), ("cube", cube(), &[4, 6, 8]), ("octahedron", octahedron(), &[4, 6, 8, 10])];
    for (name, c, orders) in cases {
        for &l in orders {
            let afp = lib(antisymmetric_fp(&c, l))?;
            let uni = lib(afp_uniform(l, c.len() as f64))?;
            check(afp > uni, || format!("{name} l={l}: AFP {afp} <= uniform {uni}"))?;
            notes.push(format!("{name}:{l} {afp:.3}>{uni:.3}"));
        }
    }
    Ok(notes.join(", "))
}

fn spectral_matches_direct() -> Outcome {
    let mut worst_fp: f64 = 0.0;
    for seed in 0..20 {
        let c = lib(sample_uniform(50, 3, 1000 + seed))?;
        for l in 0..=6 {
            let e = rel(lib(frame_potential_spectral(&c, l))?, frame_potential(&c, l));
            worst_fp = worst_fp.max(e);
            check(e <= 1e-8, || format!("seed {seed} l={l}: relative error {e:.2e}"))?;
        }
    }
    let mut worst_afp: f64 = 0.0;
    for seed in 0..10 {
        let c = lib(sample_uniform(40, 3, 2000 + seed))?;
        let e = rel(lib(afp2_spectral(&c))?, lib(antisymmetric_fp(&c, 2))?);
        worst_afp = worst_afp.max(e);
        check(e <= 1e-8, || format!("seed {seed}: AFP_2 relative error {e:.2e}"))?;
    }
    Ok(format!("worst FP {worst_fp:.1e}, worst AFP_2 {worst_afp:.1e}"))
}

fn kappa_identity() -> Outcome {
    let table = kappa_table();
    let pts = lib(sample_uniform(300, 3, 77))?;
    let mut worst: f64 = 0.0;
    for t in 0..100 {
        let (a, b, c) = (pts.point(3 * t), pts.point(3 * t + 1), pts.point(3 * t + 2));
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
        let z = table.expand(a, b, c);
        let e = (z.re - det * det).abs().max(z.im.abs());
        worst = worst.max(e);
        check(e <= 1e-10, || format!("triple {t}: {} vs {}", z, det * det))?;
    }
    Ok(format!("100 triples, worst absolute error {worst:.1e}"))
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Result<Weights, String> {
    if rng.random_bool(0.5) {
        Ok(Weights::Scalar((0..n).map(|_| rng.random_range(0.0..2.0)).collect()))
    } else {
        let m = rng.random_range(1..=4);
        lib(Weights::vector((0..n).map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()))
    }
}

fn bound_sweeps() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut min_scaled = f64::INFINITY;
    for k in 0..200 {
        let d = 2 + k % 4;
        let n = rng.random_range(1..=40);
        let c = lib(sample_uniform(n, d, 5000 + k as u64))?;
        let w = random_weights(&mut rng, n)?;
        for l in 0..=8 {
            let r = lib(fp_bound_report(&c, Some(&w), l))?;
            min_scaled = min_scaled.min(r.residual / r.bound.abs().max(1.0));
            check(r.holds(), || format!("config {k} d={d} n={n} l={l}: value {} < bound {}", r.value, r.bound))?;
        }
    }
    let mut max_afp_excess = f64::NEG_INFINITY;
    for k in 0..100u64 {
        let n = 4 + (k as usize % 37);
        let c = lib(sample_uniform(n, 3, 9000 + k))?;
        let r = lib(afp_upper_bound_report(&c))?;
        let n3 = (n as f64).powi(3);
        max_afp_excess = max_afp_excess.max((r.value - r.bound) / n3);
        check(r.value <= r.bound + 1e-9 * n3, || format!("AFP config {k}: {} > {}", r.value, r.bound))?;
    }
    Ok(format!("min scaled FP residual {min_scaled:.2e}, max AFP_2 excess / N^3 {max_afp_excess:.2e}"))
}

fn riesz_chain() -> Outcome {
    let mut worst_series: f64 = 0.0;
    for k in 0..100u64 {
        let n = 2 + (k as usize * 37) % 99;
        let c = lib(sample_uniform(n, 3, 300 + k))?;
        let e = lib(riesz_energy(&c, 1.0))?;
        for delta in [1e-3, 1e-2, 1e-1, 1.0] {
            let reg = lib(regularized_energy(&c, delta))?;
            let cal = lib(calibrated_bound(n as f64, delta))?;
            check(e > reg && reg > cal, || format!("config {k} n={n} delta={delta}: {e} > {reg} > {cal} fails"))?;
        }
        let sd = lib(sum_distance_bound(&c))?;
        check(sd.holds(), || format!("config {k}: E(-1) = {} below {}", sd.value, sd.bound))?;
        let series = lib(energy_series(&c, 0.1, 200))?.value;
        let direct = lib(regularized_energy(&c, 0.1))?;
        let err = (series - direct).abs();
        worst_series = worst_series.max(err);
        check(err <= 1e-6, || format!("config {k} n={n}: series {series} vs direct {direct}"))?;
    }
    for n in [10.0, 100.0, 1000.0] {
        let ds = lib(delta_star(n))?;
        let peak = lib(calibrated_bound(n, ds))?;
        for f in [0.999, 1.001, 0.99, 1.01, 0.9, 1.1] {
            let v = lib(calibrated_bound(n, ds * f))?;
            check(v < peak, || format!("N={n}: bound at {f} delta* is {v} >= {peak}"))?;
        }
    }
    Ok(format!("400 (config, delta) chains, worst series error {worst_series:.1e}"))
}

fn asymptotic_formula() -> Outcome {
    let n = 1e4;
    let cal = lib(calibrated_bound(n, lib(delta_star(n))?))?;
    let asy = lib(asymptotic_bound(n))?;
    let e = rel(asy, cal);
    check(e <= 1e-6, || format!("{cal} vs {asy}"))?;
    Ok(format!("calibrated {cal:.6}, expansion {asy:.6}, relative {e:.1e}"))
}

/// Minimized configurations shared between the Thomson and Voronoi criteria.
#[derive(Default)]
struct Minima {
    configs: Vec<(String, Configuration)>,
}

fn thomson(minima: &mut Minima, csv_path: &std::path::Path) -> Outcome {
    let opts = MinimizeOptions::default();
    let oracles = [(2usize, 0.5), (3, 3f64.sqrt()), (4, 6.0 / (8.0f64 / 3.0).sqrt())];
    for (n, want) in oracles {
        let r = lib(local_minimize(&lib(sample_uniform(n, 3, 40 + n as u64))?, &opts))?;
        check(r.converged && (r.energy - want).abs() <= 1e-8, || format!("N={n}: {} vs {want}", r.energy))?;
        minima.configs.push((format!("N={n}"), r.config));
    }
    let mut twelve = Vec::new();
    for seed in 0..20 {
        let r = lib(local_minimize(&lib(sample_uniform(12, 3, 700 + seed))?, &opts))?;
        check(r.converged, || format!("N=12 start {seed} did not converge"))?;
        twelve.push(r.energy);
        minima.configs.push((format!("N=12 start {seed}"), r.config));
    }
    let consensus = twelve.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = twelve.iter().map(|e| e - consensus).fold(0.0, f64::max);
    check(spread <= 1e-8, || format!("N=12 starts spread {spread:.2e}"))?;

    let mut worst_fd: f64 = 0.0;
    for seed in 0..3 {
        let c = lib(sample_uniform(15, 3, 60 + seed))?;
        let g = lib(energy_gradient(&c, 1.0))?;
        for i in 0..c.len() {
            let norm = g[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            let v: Vec<f64> = g[i].iter().map(|x| x / norm).collect();
            let h = 1e-5;
            let shifted = |s: f64| -> Result<f64, String> {
                let rows: Vec<Vec<f64>> = c
                    .points()
                    .enumerate()
                    .map(|(k, p)| if k == i { p.iter().zip(&v).map(|(a, b)| a + s * h * b).collect() } else { p.to_vec() })
                    .collect();
                lib(riesz_energy(&lib(Configuration::new(3, &rows))?, 1.0))
            };
            let fd = (shifted(1.0)? - shifted(-1.0)?) / (2.0 * h);
            let e = rel(fd, norm);
            worst_fd = worst_fd.max(e);
            check(e <= 1e-6, || format!("gradient point {i}: fd {fd} vs {norm}"))?;
        }
    }

    // Scaled perturb-and-reminimize demonstration.
    let start = lib(local_minimize(&lib(sample_uniform(100, 3, 2016))?, &opts))?;
    check(start.converged, || "N=100 start did not converge".into())?;
    let members = lib(ensemble(&start.config, 50, 0.05, 972, &opts))?;
    let mut csv = String::from(
        "member,energy,total_strain,defects,strain_fp,strain_bound,strain_residual,energy_fp,energy_bound,energy_residual,vector_fp,vector_bound,vector_residual\n",
    );
    let mut runs = vec![("start".to_string(), start.config.clone())];
    for m in &members {
        let r = m.outcome.as_ref().map_err(|e| format!("member {}: {e}", m.index))?;
        runs.push((m.index.to_string(), r.config.clone()));
    }
    let mut min_residual = f64::INFINITY;
    for (name, c) in &runs {
        let s = lib(strain_energy_summary(c, 2, StrainMode::Projected))?;
        for r in [&s.strain, &s.energy_weighted, &s.strain_vector] {
            min_residual = min_residual.min(r.residual);
            check(r.holds(), || format!("N=100 {name}: residual {} below zero", r.residual))?;
        }
        writeln!(
            csv,
            "{name},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.energy,
            s.total_strain,
            s.defects,
            s.strain.value,
            s.strain.bound,
            s.strain.residual,
            s.energy_weighted.value,
            s.energy_weighted.bound,
            s.energy_weighted.residual,
            s.strain_vector.value,
            s.strain_vector.bound,
            s.strain_vector.residual
        )
        .expect("string write");
        minima.configs.push((format!("N=100 {name}"), c.clone()));
    }
    std::fs::write(csv_path, csv).map_err(|e| e.to_string())?;
    let lowest = members[0].energy().unwrap_or(f64::NAN);
    Ok(format!(
        "N=12 consensus {consensus:.9} (spread {spread:.1e}), worst FD {worst_fd:.1e}; N=100 start {:.6}, best of 50 {lowest:.6}, min residual {min_residual:.2e}, CSV {}",
        start.energy,
        csv_path.display()
    ))
}

fn voronoi_euler(minima: &Minima) -> Outcome {
    let mut checked = 0;
    let mut skipped = Vec::new();
    let mut worst_area: f64 = 0.0;
    let extra = [("octahedron".to_string(), octahedron()), ("icosahedron".to_string(), icosahedron())];
    for (name, c) in minima.configs.iter().chain(extra.iter()) {
        if c.len() < 4 {
            // A diagram needs four generators.
            skipped.push(name.clone());
            continue;
        }
        let d = lib(spherical_voronoi(c))?;
        check(d.total_charge() == 12, || format!("{name}: total charge {}", d.total_charge()))?;
        let area = d.total_area();
        worst_area = worst_area.max((area - 4.0 * PI).abs());
        check((area - 4.0 * PI).abs() <= 1e-8, || format!("{name}: area {area}"))?;
        checked += 1;
    }
    let ico = lib(spherical_voronoi(&icosahedron()))?;
    check((0..12).all(|i| ico.sides(i) == 5), || "icosahedron cells are not all pentagons".into())?;
    Ok(format!("{checked} diagrams, worst area error {worst_area:.1e}; skipped {} (N < 4)", skipped.join(", ")))
}

fn lattice_saturation() -> Outcome {
    let spacing = 1.0;
    let hex = lib(hexagonal_window(4.0 * spacing, spacing, [0.0, 0.0]))?;
    let mut worst: f64 = 0.0;
    let mut min6 = f64::INFINITY;
    for gamma in [0.0, 1.0, 2.0] {
        for l in 1..=5 {
            let d = lib(window_delta(&hex, gamma, l))?;
            worst = worst.max(d.abs());
            check(d <= 1e-10, || format!("hexagonal gamma={gamma} l={l}: {d}"))?;
        }
        let d6 = lib(window_delta(&hex, gamma, 6))?;
        min6 = min6.min(d6);
        check(d6 > 0.0, || format!("hexagonal gamma={gamma} l=6: {d6}"))?;
    }
    let cubic = Lattice::cubic(spacing);
    for k in 1..=3 {
        let ws = lib(cubic.window(k as f64 * spacing, &cubic.cell_center()))?;
        for gamma in [0.0, 1.0, 2.0] {
            let d = lib(window_delta(&ws, gamma, 2))?;
            worst = worst.max(d.abs());
            check(d <= 1e-10, || format!("cubic r={k} gamma={gamma}: {d}"))?;
        }
    }
    Ok(format!("worst |delta| {worst:.1e}, hexagonal delta_6 >= {min6:.3e}"))
}

fn main() {
    let csv_path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("thomson_n100_ensemble.csv");
    let mut minima = Minima::default();
    let mut failures = 0;
    let mut report = |id: usize, name: &str, budget: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        let elapsed = t.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(e) => (false, e),
        };
        if !ok {
            failures += 1;
        }
        println!("{} #{id:<2} {name} [{:.2}s / {}s] {detail}", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64(), budget.as_secs());
    };
    let s = Duration::from_secs;
    report(1, "coefficient identity", s(1), &mut coefficient_identity);
    report(2, "tetrahedron saturation", s(1), &mut tetrahedron_saturation);
    report(3, "octahedron AFP saturation", s(1), &mut octahedron_afp);
    report(4, "Platonic AFP above uniform", s(5), &mut platonic_directions);
    report(5, "spectral equals direct", s(30), &mut spectral_matches_direct);
    report(6, "triple-product expansion", s(1), &mut kappa_identity);
    report(7, "bound sweeps", s(60), &mut bound_sweeps);
    report(8, "Riesz bound chain", s(60), &mut riesz_chain);
    report(9, "asymptotic expansion", s(1), &mut asymptotic_formula);
    report(10, "Thomson minimization", s(120), &mut || thomson(&mut minima, &csv_path));
    report(11, "Voronoi Euler and area", s(30), &mut || voronoi_euler(&minima));
    report(12, "lattice window saturation", s(10), &mut lattice_saturation);
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 12 acceptance criteria passed");
}
