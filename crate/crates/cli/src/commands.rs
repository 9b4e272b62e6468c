use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use sphere_bounds::config::load_weights;
use sphere_bounds::frames::{
    afp2_spectral, afp_uniform, afp_upper_bound_report, antisymmetric_fp, fp_bound_report, weighted_frame_potential_spectral,
    BoundReport,
};
use sphere_bounds::lattices::{window_delta, window_fp, window_scan, Lattice, DEFAULT_GAMMAS};
use sphere_bounds::optimize::{ensemble, local_minimize, MinimizeOptions};
use sphere_bounds::riesz::{
    asymptotic_bound, calibrated_bound, coulomb_bound_report, delta_star, energy_series, regularized_energy, sum_distance_bound,
};
use sphere_bounds::specfun::{gamma_lk, kappa_table, power_expansion, uniform_fp_coeff};
use sphere_bounds::voronoi::{spherical_voronoi, strain_energy_summary, StrainMode};
use sphere_bounds::{load_configuration, sample_uniform, save_configuration, solids, Configuration, Weights};

use crate::output::{Cell, Output, Table};
use crate::{
    AfpArgs, CliError, CoeffsArgs, Command, EnsembleArgs, FpArgs, InputArgs, MinimizeArgs, RieszArgs, Solid, SolverArgs,
    StrainChoice, VoronoiArgs, WeightKind, WindowArgs,
};

pub struct CommandResult {
    pub output: Output,
    /// Files written besides the main output.
    pub extra_outputs: Vec<PathBuf>,
}

impl From<Output> for CommandResult {
    fn from(output: Output) -> Self {
        Self { output, extra_outputs: Vec::new() }
    }
}

pub fn dispatch(command: &Command) -> Result<CommandResult, CliError> {
    match command {
        Command::Fp(a) => fp(a).map(Into::into),
        Command::Afp(a) => afp(a).map(Into::into),
        Command::Coeffs(a) => coeffs(a).map(Into::into),
        Command::Riesz(a) => riesz(a).map(Into::into),
        Command::Minimize(a) => minimize(a),
        Command::Ensemble(a) => run_ensemble(a),
        Command::Voronoi(a) => voronoi(a),
        Command::Window(a) => window(a).map(Into::into),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn configuration(input: &InputArgs) -> Result<Configuration, CliError> {
    if let Some(path) = &input.input {
        return Ok(load_configuration(&read(path)?)?);
    }
    if let Some(solid) = input.solid {
        return Ok(match solid {
            Solid::Tetrahedron => solids::tetrahedron(),
            Solid::Octahedron => solids::octahedron(),
            Solid::Cube => solids::cube(),
            Solid::Icosahedron => solids::icosahedron(),
        });
    }
    if let Some(n) = input.points {
        return Ok(sample_uniform(n, input.dim, input.seed)?);
    }
    Err(CliError::Usage("one of --input, --solid or --points is required".into()))
}

fn strain_mode(c: StrainChoice) -> StrainMode {
    match c {
        StrainChoice::Projected => StrainMode::Projected,
        StrainChoice::Raw => StrainMode::Raw,
    }
}

fn solver_options(s: &SolverArgs) -> MinimizeOptions {
    MinimizeOptions { s: s.s, max_iters: s.max_iters, grad_tol: s.grad_tol, ..Default::default() }
}

fn kind(r: &BoundReport) -> &'static str {
    match r.kind {
        sphere_bounds::frames::BoundKind::Lower => "lower",
        sphere_bounds::frames::BoundKind::Upper => "upper",
    }
}

fn fp(a: &FpArgs) -> Result<Output, CliError> {
    let config = configuration(&a.input)?;
    let weights = a.weights.as_deref().map(|p| read(p).and_then(|t| Ok(load_weights(&t)?))).transpose()?;
    let mut t = Table::new(&["ell", "kind", "value", "bound", "residual", "saturated", "spectral"]);
    for &l in &a.ell {
        let r = fp_bound_report(&config, weights.as_ref(), l)?;
        let spectral = if config.dim() == 3 { Some(weighted_frame_potential_spectral(&config, weights.as_ref(), l)?) } else { None };
        t.push(vec![l.into(), kind(&r).into(), r.value.into(), r.bound.into(), r.residual.into(), r.saturated.into(), spectral.into()]);
    }
    Ok(Output::Table(t))
}

fn afp(a: &AfpArgs) -> Result<Output, CliError> {
    let config = configuration(&a.input)?;
    let n = config.len() as f64;
    let mut t = Table::new(&["ell", "value", "uniform", "bound", "residual", "saturated", "spectral"]);
    for &l in &a.ell {
        let value = antisymmetric_fp(&config, l)?;
        let uniform = afp_uniform(l, n)?;
        if l == 2 {
            let r = afp_upper_bound_report(&config)?;
            let spectral = afp2_spectral(&config)?;
            t.push(vec![l.into(), value.into(), uniform.into(), r.bound.into(), r.residual.into(), r.saturated.into(), spectral.into()]);
        } else {
            t.push(vec![l.into(), value.into(), uniform.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
        }
    }
    Ok(Output::Table(t))
}

fn coeffs(a: &CoeffsArgs) -> Result<Output, CliError> {
    if a.kappa {
        let mut t = Table::new(&["l1", "m1", "l2", "m2", "l3", "m3", "kappa"]);
        for (k, v) in kappa_table().entries() {
            let mut row: Vec<Cell> = k.iter().map(|&x| Cell::Int(x as i64)).collect();
            row.push((*v).into());
            t.push(row);
        }
        return Ok(Output::Table(t));
    }
    let mut t = Table::new(&["ell", "k", "b", "uniform_fp_coeff", "gamma"]);
    for &l in &a.ell {
        let pe = power_expansion(l, a.dim)?;
        let coeff = uniform_fp_coeff(l, a.dim);
        for (k, b) in pe.b.iter().enumerate() {
            let degree = l - 2 * k;
            let gamma = if a.dim == 3 { Some(gamma_lk(l, degree)?) } else { None };
            t.push(vec![l.into(), degree.into(), (*b).into(), coeff.into(), gamma.into()]);
        }
    }
    Ok(Output::Table(t))
}

fn riesz(a: &RieszArgs) -> Result<Output, CliError> {
    let config = match (&a.input.input, a.input.solid, a.input.points, a.count) {
        (None, None, None, Some(_)) => None,
        _ => Some(configuration(&a.input)?),
    };
    let n = config.as_ref().map_or(a.count.unwrap_or(0), Configuration::len);
    if n < 2 {
        return Err(CliError::Usage("need at least 2 points".into()));
    }
    let nf = n as f64;
    let ds = delta_star(nf)?;
    let mut t = Table::new(&["quantity", "value"]);
    let mut row = |k: &str, v: Cell| t.push(vec![k.into(), v]);
    row("points", n.into());
    row("delta_star", ds.into());
    row("calibrated_bound", calibrated_bound(nf, ds)?.into());
    row("asymptotic_bound", asymptotic_bound(nf)?.into());
    if let Some(config) = &config {
        let r = coulomb_bound_report(config)?;
        row("energy", r.value.into());
        row("residual", r.residual.into());
        let sd = sum_distance_bound(config)?;
        row("sum_distance", (-sd.value).into());
        row("sum_distance_bound", (-sd.bound).into());
        let delta = a.delta.unwrap_or(ds);
        let series = energy_series(config, delta, a.lmax)?;
        row("delta", delta.into());
        row("regularized_energy", regularized_energy(config, delta)?.into());
        row("series_value", series.value.into());
        row("series_last_term", series.last_term.into());
    }
    Ok(Output::Table(t))
}

fn minimize(a: &MinimizeArgs) -> Result<CommandResult, CliError> {
    let config = configuration(&a.input)?;
    let r = local_minimize(&config, &solver_options(&a.solver))?;
    let mut extra = Vec::new();
    if let Some(p) = &a.config_out {
        write(p, &save_configuration(&r.config))?;
        extra.push(p.clone());
    }
    let output = if a.trace {
        let mut t = Table::new(&["step", "energy"]);
        for (k, e) in r.trace.iter().enumerate() {
            t.push(vec![k.into(), (*e).into()]);
        }
        Output::Table(t)
    } else {
        let mut t = Table::new(&["points", "energy", "iterations", "grad_norm", "converged", "message"]);
        t.push(vec![
            r.config.len().into(),
            r.energy.into(),
            r.iterations.into(),
            r.final_grad_norm.into(),
            r.converged.into(),
            r.message.clone().into(),
        ]);
        Output::Table(t)
    };
    Ok(CommandResult { output, extra_outputs: extra })
}

const ENSEMBLE_COLUMNS: [&str; 20] = [
    "rank",
    "member",
    "seed",
    "energy",
    "iterations",
    "converged",
    "grad_norm",
    "total_strain",
    "defects",
    "strain_fp",
    "strain_bound",
    "strain_residual",
    "energy_fp",
    "energy_bound",
    "energy_residual",
    "vector_fp",
    "vector_bound",
    "vector_residual",
    "total_charge",
    "error",
];

fn ensemble_row(
    rank: usize,
    member: Cell,
    seed: Cell,
    config: &Configuration,
    run: (f64, usize, bool, f64),
    l: usize,
    mode: StrainMode,
) -> Vec<Cell> {
    let (energy, iterations, converged, grad) = run;
    let head = vec![rank.into(), member, seed, energy.into(), iterations.into(), converged.into(), grad.into()];
    let tail = match strain_energy_summary(config, l, mode).and_then(|s| spherical_voronoi(config).map(|d| (s, d))) {
        Ok((s, d)) => vec![
            s.total_strain.into(),
            s.defects.into(),
            s.strain.value.into(),
            s.strain.bound.into(),
            s.strain.residual.into(),
            s.energy_weighted.value.into(),
            s.energy_weighted.bound.into(),
            s.energy_weighted.residual.into(),
            s.strain_vector.value.into(),
            s.strain_vector.bound.into(),
            s.strain_vector.residual.into(),
            d.total_charge().into(),
            Cell::Empty,
        ],
        Err(e) => {
            let mut v = vec![Cell::Empty; 12];
            v.push(e.to_string().into());
            v
        }
    };
    head.into_iter().chain(tail).collect()
}

fn run_ensemble(a: &EnsembleArgs) -> Result<CommandResult, CliError> {
    let opts = solver_options(&a.solver);
    let start = local_minimize(&configuration(&a.input)?, &opts)?;
    let members = ensemble(&start.config, a.count, a.sigma, a.input.seed, &opts)?;
    let mode = strain_mode(a.strain_mode);
    let mut t = Table::new(&ENSEMBLE_COLUMNS);
    let base = (start.energy, start.iterations, start.converged, start.final_grad_norm);
    t.push(ensemble_row(0, "start".into(), Cell::Empty, &start.config, base, a.ell, mode));
    let mut extra = Vec::new();
    if let Some(dir) = &a.config_out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let p = dir.join("start.txt");
        write(&p, &save_configuration(&start.config))?;
        extra.push(p);
    }
    for (rank, m) in members.iter().enumerate() {
        match &m.outcome {
            Ok(r) => {
                let run = (r.energy, r.iterations, r.converged, r.final_grad_norm);
                t.push(ensemble_row(rank + 1, m.index.into(), m.seed.to_string().into(), &r.config, run, a.ell, mode));
                if let Some(dir) = &a.config_out {
                    let p = dir.join(format!("member_{:04}.txt", m.index));
                    write(&p, &save_configuration(&r.config))?;
                    extra.push(p);
                }
            }
            Err(e) => {
                let mut row = vec![(rank + 1).into(), m.index.into(), m.seed.to_string().into()];
                row.extend(std::iter::repeat_n(Cell::Empty, ENSEMBLE_COLUMNS.len() - 4));
                row.push(e.to_string().into());
                t.push(row);
            }
        }
    }
    Ok(CommandResult { output: Output::Table(t), extra_outputs: extra })
}

fn voronoi(a: &VoronoiArgs) -> Result<CommandResult, CliError> {
    let config = configuration(&a.input)?;
    let d = spherical_voronoi(&config)?;
    let mode = strain_mode(a.strain_mode);
    let export = d.export(mode);
    let mut t = Table::new(&[
        "index", "x", "y", "z", "sides", "charge", "area", "strain", "sx", "sy", "sz", "radial_offset", "energy", "defect",
    ]);
    for c in &export.cells {
        t.push(vec![
            c.index.into(),
            c.generator[0].into(),
            c.generator[1].into(),
            c.generator[2].into(),
            c.sides.into(),
            c.charge.into(),
            c.area.into(),
            c.strain.into(),
            c.strain_vector[0].into(),
            c.strain_vector[1].into(),
            c.strain_vector[2].into(),
            c.radial_offset.into(),
            c.energy.into(),
            (c.sides != 6).into(),
        ]);
    }
    let mut extra = Vec::new();
    if let Some(p) = &a.weights_out {
        let weights = match a.weight_kind {
            WeightKind::Defect => d.defect_weights(),
            WeightKind::Strain => Weights::Scalar(export.cells.iter().map(|c| c.strain).collect()),
            WeightKind::Energy => Weights::Scalar(d.energies().to_vec()),
            WeightKind::StrainVector => Weights::vector(export.cells.iter().map(|c| c.strain_vector.to_vec()).collect())?,
        };
        write(p, &weights_text(&weights))?;
        extra.push(p.clone());
    }
    let json = serde_json::to_value(&export).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(CommandResult { output: Output::Structured { json, table: Some(t) }, extra_outputs: extra })
}

fn weights_text(w: &Weights) -> String {
    let mut out = String::new();
    match w {
        Weights::Scalar(v) => {
            for x in v {
                out.push_str(&format!("{x:.16e}\n"));
            }
        }
        Weights::Vector { values, .. } => {
            for row in values {
                let fields: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
                out.push_str(&fields.join(" "));
                out.push('\n');
            }
        }
    }
    out
}

fn window(a: &WindowArgs) -> Result<Output, CliError> {
    let lattice = match a.dim {
        2 => Lattice::hexagonal(a.spacing),
        3 => Lattice::cubic(a.spacing),
        d => return Err(CliError::Usage(format!("--dim must be 2 (hexagonal) or 3 (cubic), got {d}"))),
    };
    let r = a.radius.unwrap_or(4.0 * a.spacing);
    let gammas: Vec<f64> = if a.gamma.is_empty() { DEFAULT_GAMMAS.to_vec() } else { a.gamma.clone() };
    // Symmetric placement: on a lattice point in 2D, at the cell centre in 3D.
    let home = match a.dim {
        2 => vec![0.0, 0.0],
        _ => lattice.cell_center(),
    };
    if a.centers == 0 {
        let ws = lattice.window(r, &home)?;
        let mut t = Table::new(&["gamma", "ell", "points", "fp", "delta"]);
        for &g in &gammas {
            for &l in &a.ell {
                t.push(vec![g.into(), l.into(), ws.len().into(), window_fp(&ws, g, l)?.into(), window_delta(&ws, g, l)?.into()]);
            }
        }
        return Ok(Output::Table(t));
    }
    let centers = lattice.random_cell_points(a.centers, a.seed);
    let axes = ["x", "y", "z"];
    let mut columns = vec!["gamma", "ell"];
    columns.extend(&axes[..a.dim]);
    columns.extend(["delta", "error"]);
    let mut t = Table::new(&columns);
    let mut summaries = Vec::new();
    for &g in &gammas {
        for &l in &a.ell {
            let stats = window_scan(&lattice, r, g, l, &centers)?;
            eprintln!(
                "gamma={g} ell={l}: min={:.6e} max={:.6e} mean={:.6e} std={:.6e}",
                stats.min, stats.max, stats.mean, stats.std_dev
            );
            for e in &stats.entries {
                let mut row: Vec<Cell> = vec![g.into(), l.into()];
                row.extend(e.center.iter().map(|&c| Cell::Real(c)));
                row.push(e.delta.into());
                row.push(e.error.clone().into());
                t.push(row);
            }
            summaries.push(stats);
        }
    }
    Ok(Output::Structured { json: json!(summaries), table: Some(t) })
}
