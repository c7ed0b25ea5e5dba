//! The four subcommands.

use dgshock::legendre::traces;
use dgshock::profile::{check_trace_conditions, entropy_sign_changes};
use dgshock::scheme::run_to_steady;
use dgshock::stability::{
    assemble, composite_setup, eigen, rk_amplification, shock_profile_or_limit,
    unstable_mode_structure,
};
use dgshock::{
    DgScheme, EigenOptions, Error, KinkPolicy, ModalSolution, NumericalFluxKind, RunConfig,
    RunReport,
};
use serde_json::{json, Value};

use crate::args::{ExperimentSpec, Format, ShockPlacement};
use crate::error::CliError;
use crate::output::{emit, fmt, json_document, num, nums, sibling, Table};

/// Sample points per cell in solution dumps.
pub const SAMPLES_PER_CELL: usize = 33;

/// Entropy sign changes are counted on this many points of the shock cell.
const SIGN_SAMPLES: usize = 201;

pub fn dispatch(spec: &ExperimentSpec) -> Result<(), CliError> {
    match spec.command {
        "profile" => cmd_profile(spec),
        "run" => cmd_run(spec),
        "spectrum" => cmd_spectrum(spec),
        "decay-table" => cmd_decay_table(spec),
        other => Err(CliError::Spec(format!("unknown command {other}"))),
    }
}

fn coeff_names(prefix: &str, p: usize) -> impl Iterator<Item = String> + '_ {
    (0..=p).map(move |l| format!("{prefix}{l}"))
}

pub fn cmd_profile(spec: &ExperimentSpec) -> Result<(), CliError> {
    let p = spec.p;
    let points: Vec<f64> = match spec.s_c {
        Some(s) => vec![s],
        None => {
            let n = spec.samples;
            (1..=n)
                .map(|i| -1.0 + 2.0 * i as f64 / (n + 1) as f64)
                .collect()
        }
    };
    let mut table = Table::new(
        ["s_c", "branch"]
            .into_iter()
            .map(String::from)
            .chain(coeff_names("u", p))
            .chain(
                [
                    "left_trace",
                    "right_trace",
                    "left_margin",
                    "right_margin",
                    "trace_ok",
                    "sign_changes",
                ]
                .into_iter()
                .map(String::from),
            ),
    );
    let mut results = Vec::new();
    for s in points {
        let prof = match shock_profile_or_limit::<f64>(p, s) {
            Ok(prof) => prof,
            Err(Error::BranchBoundary { .. }) if spec.s_c.is_none() => {
                eprintln!("skipping branch boundary s_c = {}", fmt(s));
                continue;
            }
            Err(e) => return Err(CliError::Spec(e.to_string())),
        };
        let (right, left) = traces(&prof.u_coeffs);
        let check = check_trace_conditions(&prof);
        let changes = entropy_sign_changes(&prof, SIGN_SAMPLES);
        let mut row = vec![fmt(s), prof.branch.to_string()];
        row.extend(prof.u_coeffs.iter().map(|&u| fmt(u)));
        row.extend([
            fmt(left),
            fmt(right),
            fmt(check.left_margin),
            fmt(check.right_margin),
            check.ok().to_string(),
            changes.to_string(),
        ]);
        table.push(row);
        results.push(json!({
            "s_c": num(s),
            "branch": prof.branch.to_string(),
            "u": nums(&prof.u_coeffs),
            "left_trace": num(left),
            "right_trace": num(right),
            "left_margin": num(check.left_margin),
            "right_margin": num(check.right_margin),
            "trace_ok": check.ok(),
            "sign_changes": changes,
        }));
    }
    match spec.format {
        Format::Csv => emit(spec.out.as_deref(), &table.to_csv()?),
        Format::Json => emit(
            spec.out.as_deref(),
            &json_document(spec.to_json(), Value::Array(results)),
        ),
    }
}

fn run_config(spec: &ExperimentSpec, ubar: f64) -> RunConfig<f64> {
    let mut cfg = RunConfig::new(spec.p, spec.n_cells, spec.flux, ubar);
    cfg.rk = spec.rk;
    cfg.max_steps = spec.max_steps;
    cfg.tol = spec.tol;
    cfg.cfl_scale = spec.cfl_scale;
    cfg.svv = spec.svv;
    cfg
}

fn announce(pl: &ShockPlacement) {
    eprintln!(
        "ubar = {}: shock in cell {} (1-based {}), s_c = {}",
        fmt(pl.ubar),
        pl.cell,
        pl.cell + 1,
        fmt(pl.s_c)
    );
}

fn march(spec: &ExperimentSpec, pl: &ShockPlacement) -> Result<(DgScheme, RunReport), CliError> {
    let cfg = run_config(spec, pl.ubar);
    let report = run_to_steady(&cfg)?;
    eprintln!(
        "converged = {}, steps = {}, residual = {}",
        report.converged,
        report.steps,
        fmt(report.final_residual)
    );
    Ok((cfg.scheme()?, report))
}

pub fn cmd_run(spec: &ExperimentSpec) -> Result<(), CliError> {
    let pl = spec.placement()?;
    announce(&pl);
    let (_, report) = march(spec, &pl)?;
    let sol = &report.solution;
    let mesh = spec.mesh();
    let p = spec.p;

    let mut coeffs = Table::new(
        ["cell", "x_left", "x_right"]
            .into_iter()
            .map(String::from)
            .chain(coeff_names("U", p)),
    );
    for j in 0..sol.n_cells {
        let (a, b) = mesh.cell_bounds(j);
        let mut row = vec![j.to_string(), fmt(a), fmt(b)];
        row.extend(sol.cell(j).iter().map(|&u| fmt(u)));
        coeffs.push(row);
    }
    let samples = sol.sample(&mesh, SAMPLES_PER_CELL);
    let mut points = Table::new(["cell", "x", "u"]);
    for &(j, x, u) in &samples {
        points.push(vec![j.to_string(), fmt(x), fmt(u)]);
    }
    let mut history = Table::new(["step", "residual"]);
    for (i, &r) in report.residual_history.iter().enumerate() {
        history.push(vec![i.to_string(), fmt(r)]);
    }

    match spec.format {
        Format::Csv => match spec.out.as_deref() {
            Some(path) => {
                emit(Some(path), &coeffs.to_csv()?)?;
                emit(Some(&sibling(path, "samples")), &points.to_csv()?)?;
                emit(Some(&sibling(path, "history")), &history.to_csv()?)?;
            }
            None => emit(None, &coeffs.to_csv()?)?,
        },
        Format::Json => {
            let results = json!({
                "converged": report.converged,
                "steps": report.steps,
                "final_residual": num(report.final_residual),
                "shock_cell": pl.cell,
                "s_c": num(pl.s_c),
                "ubar": num(pl.ubar),
                "coefficients": (0..sol.n_cells).map(|j| nums(sol.cell(j))).collect::<Vec<_>>(),
                "samples": samples
                    .iter()
                    .map(|&(j, x, u)| json!({"cell": j, "x": num(x), "u": num(u)}))
                    .collect::<Vec<_>>(),
                "residual_history": nums(&report.residual_history),
            });
            emit(spec.out.as_deref(), &json_document(spec.to_json(), results))?;
        }
    }
    if spec.require_converged && !report.converged {
        return Err(CliError::Run(format!(
            "no convergence below {} in {} steps",
            fmt(spec.tol),
            report.steps
        )));
    }
    Ok(())
}

/// Base state of the linearization: the closed-form composite for Godunov
/// with `--sc`, a converged march otherwise.
fn base_state(
    spec: &ExperimentSpec,
    pl: &ShockPlacement,
) -> Result<(DgScheme, ModalSolution, &'static str), CliError> {
    if pl.analytic && spec.flux == NumericalFluxKind::Godunov && spec.svv.is_none() && spec.p <= 3 {
        let (scheme, sol) = composite_setup(spec.p, pl.s_c, spec.flux, spec.n_cells, pl.cell)
            .map_err(|e| CliError::Run(format!("base state unobtainable: {e}")))?;
        return Ok((scheme, sol, "analytic"));
    }
    let (scheme, report) = march(spec, pl)?;
    if !report.converged {
        return Err(CliError::Run(format!(
            "base state unobtainable: no convergence below {} in {} steps",
            fmt(spec.tol),
            report.steps
        )));
    }
    Ok((scheme, report.solution, "marched"))
}

pub fn cmd_spectrum(spec: &ExperimentSpec) -> Result<(), CliError> {
    let pl = spec.placement()?;
    announce(&pl);
    let (scheme, sol, base) = base_state(spec, &pl)?;
    let lambda = spec
        .lambda
        .unwrap_or(spec.cfl_scale / (2 * spec.p + 1) as f64);
    let op = assemble(&scheme, &sol, lambda, KinkPolicy::ShockCell(pl.cell))?;
    let amp = rk_amplification(&op.to_dense(), spec.rk.order())?;
    let spectrum = eigen(&amp, &EigenOptions::default().with_vectors())?;
    let modes = unstable_mode_structure(&spectrum, spec.p, pl.cell, 1e-10)?;
    eprintln!(
        "lambda = {}, spectral radius = {}, stable = {}, growing modes = {}",
        fmt(lambda),
        fmt(spectrum.spectral_radius),
        spectrum.stable,
        modes.len()
    );

    match spec.format {
        Format::Csv => {
            let mut table = Table::new(["re", "im", "modulus"]);
            for z in &spectrum.eigenvalues {
                table.push(vec![fmt(z.re), fmt(z.im), fmt(z.norm())]);
            }
            emit(spec.out.as_deref(), &table.to_csv()?)?;
            if let Some(path) = spec.out.as_deref() {
                let mut mt = Table::new(["mode", "eigen_re", "eigen_im", "dof", "shock_real"]);
                for (i, m) in modes.iter().enumerate() {
                    for (l, &r) in m.shock_real.iter().enumerate() {
                        mt.push(vec![
                            i.to_string(),
                            fmt(m.eigenvalue.re),
                            fmt(m.eigenvalue.im),
                            l.to_string(),
                            fmt(r),
                        ]);
                    }
                }
                emit(Some(&sibling(path, "modes")), &mt.to_csv()?)?;
            }
        }
        Format::Json => {
            let results = json!({
                "base": base,
                "shock_cell": pl.cell,
                "s_c": num(pl.s_c),
                "lambda": num(lambda),
                "rk": spec.rk.order(),
                "spectral_radius": num(spectrum.spectral_radius),
                "stable": spectrum.stable,
                "eigenvalues": spectrum
                    .eigenvalues
                    .iter()
                    .map(|z| json!({"re": num(z.re), "im": num(z.im)}))
                    .collect::<Vec<_>>(),
                "unstable_modes": modes
                    .iter()
                    .map(|m| json!({
                        "eigenvalue": {"re": num(m.eigenvalue.re), "im": num(m.eigenvalue.im)},
                        "shock_cell_real": nums(&m.shock_real),
                        "concentration": num(m.concentration),
                        "shock_cell_fraction": num(m.shock_cell_fraction),
                    }))
                    .collect::<Vec<_>>(),
                "defects": spectrum
                    .defect_report
                    .iter()
                    .map(|d| json!({
                        "re": num(d.eigenvalue.re),
                        "im": num(d.eigenvalue.im),
                        "algebraic": d.algebraic,
                        "geometric": d.geometric,
                    }))
                    .collect::<Vec<_>>(),
            });
            emit(spec.out.as_deref(), &json_document(spec.to_json(), results))?;
        }
    }
    Ok(())
}

/// Rows `(j, u⁻ - u_L, u⁺ - u_L, |U_j^l - u_L δ_l0| / |u⁺ - u_L|)` for the
/// three cells left of the shock, `j` 1-based and `u^±` at face `j+1/2`.
pub fn decay_rows(
    scheme: &DgScheme,
    sol: &ModalSolution,
    shock_cell: usize,
) -> Vec<(usize, f64, f64, Vec<f64>)> {
    let u_l = scheme.bc.left_state;
    (1..=3)
        .filter_map(|d| shock_cell.checked_sub(d))
        .map(|j| {
            let (um, up) = scheme.face_states(sol, j + 1);
            let jump = (up - u_l).abs();
            let scaled = sol
                .cell(j)
                .iter()
                .enumerate()
                .map(|(l, &u)| (u - if l == 0 { u_l } else { 0.0 }).abs() / jump)
                .collect();
            (j + 1, um - u_l, up - u_l, scaled)
        })
        .collect()
}

pub fn cmd_decay_table(spec: &ExperimentSpec) -> Result<(), CliError> {
    let pl = spec.placement()?;
    announce(&pl);
    let (scheme, report) = march(spec, &pl)?;
    if !report.converged {
        return Err(CliError::Run(format!(
            "no convergence below {} in {} steps",
            fmt(spec.tol),
            report.steps
        )));
    }
    let rows = decay_rows(&scheme, &report.solution, pl.cell);
    match spec.format {
        Format::Csv => {
            let mut table = Table::new(
                ["p", "j", "du_minus", "du_plus"]
                    .into_iter()
                    .map(String::from)
                    .chain(coeff_names("dof_", spec.p)),
            );
            for (j, dm, dp, scaled) in &rows {
                let mut row = vec![spec.p.to_string(), j.to_string(), fmt(*dm), fmt(*dp)];
                row.extend(scaled.iter().map(|&v| fmt(v)));
                table.push(row);
            }
            emit(spec.out.as_deref(), &table.to_csv()?)
        }
        Format::Json => {
            let results = json!({
                "shock_cell": pl.cell,
                "s_c": num(pl.s_c),
                "rows": rows
                    .iter()
                    .map(|(j, dm, dp, scaled)| json!({
                        "p": spec.p,
                        "j": j,
                        "du_minus": num(*dm),
                        "du_plus": num(*dp),
                        "scaled_dofs": nums(scaled),
                    }))
                    .collect::<Vec<_>>(),
            });
            emit(spec.out.as_deref(), &json_document(spec.to_json(), results))
        }
    }
}
