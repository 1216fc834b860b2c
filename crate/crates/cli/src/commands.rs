use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dimer_core::analysis::{
    entanglement_profile, estimate_te_for_dimer, fit_curve, model_chi, set_param_value, subtract_impurity,
    synthesize_curve, temperature_grid, theoretical_overlay, CompositeModel, FitConfig, FitParam,
};
use dimer_core::spin::DimerParams;
use serde::Serialize;

use crate::args::{resolve_out_dir, Cli, Command, ConfigFile, EntangleArgs, FitArgs, SimulateArgs, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::io::{
    read_curve, read_text, write_curve, write_json, write_text, Cell, Table, CHI_COLUMN, TEMPERATURE_COLUMN,
};
use crate::report::{FitReport, Manifest, ModelParameters, TeReport};
use crate::verify::{render_table, run_checks};

pub const CURVE_FILE: &str = "curve.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FIT_FILE: &str = "fit.json";
pub const RESIDUALS_FILE: &str = "residuals.csv";
pub const CORRECTED_FILE: &str = "corrected_curve.csv";
pub const PROFILE_FILE: &str = "profile.csv";
pub const TE_FILE: &str = "te.json";
pub const VERIFY_FILE: &str = "verify.json";

pub fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let out_dir = resolve_out_dir(cli.out_dir, file.out_dir);
    match cli.command {
        Command::Simulate(a) => simulate(a.merge(file.simulate), &out_dir),
        Command::Fit(a) => fit(a.merge(file.fit), &out_dir),
        Command::Entangle(a) => entangle(a.merge(file.entangle), &out_dir),
        Command::Verify(a) => verify(a.merge(file.verify), &out_dir),
    }
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Debug, Serialize)]
struct SimulateParams {
    j_over_kb: f64,
    g: f64,
    p: f64,
    theta: f64,
    tmin: f64,
    tmax: f64,
    step: f64,
    noise: f64,
    seed: u64,
    label: String,
    points: usize,
    out_dir: String,
}

pub fn simulate(args: SimulateArgs, out_dir: &Path) -> CliResult<()> {
    let j = args.j_over_kb.unwrap_or(-68.0);
    let g = args.g.unwrap_or(2.0);
    let p = args.p.unwrap_or(0.017);
    let theta = args.theta.unwrap_or(0.0);
    let (tmin, tmax, step) = (
        args.tmin.unwrap_or(5.0),
        args.tmax.unwrap_or(300.0),
        args.step.unwrap_or(2.5),
    );
    let noise = args.noise.unwrap_or(0.0);
    let seed = args.seed.unwrap_or(0);

    let model = CompositeModel::new(DimerParams::new(j, g)?, p)?.with_theta(theta);
    let grid = temperature_grid(tmin, tmax, step)?;
    let mut curve = synthesize_curve(&model, &grid, noise, seed)?;
    model.validate_for(&curve)?;
    if let Some(label) = args.label {
        curve.label = label;
    }

    write_curve(&out_dir.join(CURVE_FILE), &curve)?;
    let params = SimulateParams {
        j_over_kb: j,
        g,
        p,
        theta,
        tmin,
        tmax,
        step,
        noise,
        seed,
        label: curve.label.clone(),
        points: curve.len(),
        out_dir: path_string(out_dir),
    };
    write_json(
        &out_dir.join(MANIFEST_FILE),
        &Manifest::new("simulate", params, &[CURVE_FILE, MANIFEST_FILE]),
    )?;
    println!("wrote {} points to {}", curve.len(), out_dir.join(CURVE_FILE).display());
    Ok(())
}

fn parse_assignment(s: &str) -> CliResult<(FitParam, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::input(format!("expected NAME=VALUE, got {s:?}")))?;
    let param = name.parse::<FitParam>()?;
    let value = value
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::input(format!("bad value in {s:?}")))?;
    Ok((param, value))
}

fn require_input(input: Option<PathBuf>) -> CliResult<PathBuf> {
    input.ok_or_else(|| CliError::input("missing --input"))
}

#[derive(Debug, Serialize)]
struct FitParams {
    input: String,
    free: Vec<String>,
    frozen: BTreeMap<String, f64>,
    initial: ModelParameters,
    tol: f64,
    max_iter: usize,
    gradient_tol: f64,
    out_dir: String,
}

pub fn fit(args: FitArgs, out_dir: &Path) -> CliResult<()> {
    let input = require_input(args.input)?;
    let curve = read_curve(&input)?;

    let mut free = match args.free {
        Some(names) => names
            .iter()
            .filter(|n| !n.trim().is_empty())
            .map(|n| n.parse::<FitParam>())
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![FitParam::J, FitParam::G, FitParam::P],
    };
    let mut init = CompositeModel::initial_guess(&curve);
    for s in args.init.unwrap_or_default() {
        let (param, value) = parse_assignment(&s)?;
        set_param_value(&mut init, param, value);
    }
    let mut frozen = BTreeMap::new();
    for s in args.freeze.unwrap_or_default() {
        let (param, value) = parse_assignment(&s)?;
        set_param_value(&mut init, param, value);
        free.retain(|&p| p != param);
        frozen.insert(param.name().to_owned(), value);
    }
    free.sort();
    free.dedup();

    let config = FitConfig {
        tol: args.tol.unwrap_or(FitConfig::default().tol),
        max_iter: args.max_iter.unwrap_or(FitConfig::default().max_iter),
        ..FitConfig::default()
    };
    let result = fit_curve(&curve, &free, &init, &config)?;
    let report = FitReport::from_result(&result);
    write_json(&out_dir.join(FIT_FILE), &report)?;

    let mut residuals = Table::new([
        TEMPERATURE_COLUMN,
        CHI_COLUMN,
        "chi_model",
        "residual",
        "weighted_residual",
    ]);
    for p in curve.points() {
        let m = model_chi(&result.model, p.t)?;
        let r = p.chi - m;
        residuals.rows.push(vec![
            p.t.into(),
            p.chi.into(),
            m.into(),
            r.into(),
            Cell::Number(r / p.sigma.unwrap_or(1.0)),
        ]);
    }
    write_text(&out_dir.join(RESIDUALS_FILE), &residuals.to_csv_string())?;
    let corrected = subtract_impurity(&curve, &result.model)?;
    write_curve(&out_dir.join(CORRECTED_FILE), &corrected)?;

    let params = FitParams {
        input: path_string(&input),
        free: free.iter().map(|p| p.name().to_owned()).collect(),
        frozen,
        initial: ModelParameters {
            j_over_kb: init.dimer.j_over_kb,
            g: init.dimer.g,
            impurity_fraction: init.impurity_fraction,
            weiss_theta: init.weiss_theta,
        },
        tol: config.tol,
        max_iter: config.max_iter,
        gradient_tol: config.gradient_tol,
        out_dir: path_string(out_dir),
    };
    write_json(
        &out_dir.join(MANIFEST_FILE),
        &Manifest::new(
            "fit",
            params,
            &[FIT_FILE, RESIDUALS_FILE, CORRECTED_FILE, MANIFEST_FILE],
        ),
    )?;

    let fmt = |v: f64, se: Option<f64>| match se {
        Some(se) => format!("{v:.6} ± {se:.2e}"),
        None => format!("{v:.6} (fixed)"),
    };
    let pm = &report.parameters;
    let se = &report.std_errors;
    println!("J/k_B = {} K", fmt(pm.j_over_kb, se.j_over_kb));
    println!("g     = {}", fmt(pm.g, se.g));
    println!("p     = {}", fmt(pm.impurity_fraction, se.impurity_fraction));
    println!("theta = {} K", fmt(pm.weiss_theta, se.weiss_theta));
    match report.entanglement_temperature_k {
        Some(te) => println!("T_E   = {te:.3} K"),
        None => println!("T_E   = none (not antiferromagnetic)"),
    }
    if !result.converged {
        return Err(CliError::NotConverged {
            iterations: result.iterations,
            gradient_norm: result.gradient_norm,
        });
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct EntangleParams {
    input: String,
    fit: Option<String>,
    g: f64,
    points: usize,
    out_dir: String,
}

pub fn entangle(args: EntangleArgs, out_dir: &Path) -> CliResult<()> {
    let input = require_input(args.input)?;
    let curve = read_curve(&input)?;
    let fitted = match &args.fit {
        Some(path) => Some(FitReport::parse(&read_text(path)?)?.model()?),
        None => None,
    };
    let g = args.g.or(fitted.map(|m| m.dimer.g)).unwrap_or(2.0);

    let profile = entanglement_profile(&curve, g)?;
    let te = estimate_te_for_dimer(&curve, g, fitted.as_ref().map(|m| &m.dimer))?;
    let temps: Vec<f64> = curve.temperatures().collect();
    let overlay = match &fitted {
        Some(m) => Some(theoretical_overlay(&m.dimer, &temps)?),
        None => None,
    };

    let mut columns = vec!["t", "chi", "C", "E", "clamped"];
    if overlay.is_some() {
        columns.extend(["C_theory", "E_theory"]);
    }
    let mut table = Table::new(columns);
    for (i, row) in profile.rows.iter().enumerate() {
        let mut cells = vec![
            row.t.into(),
            row.chi.into(),
            row.concurrence.into(),
            row.entanglement.into(),
            row.clamped.into(),
        ];
        if let Some(ov) = &overlay {
            cells.push(ov[i].concurrence.into());
            cells.push(ov[i].entanglement.into());
        }
        table.rows.push(cells);
    }
    write_text(&out_dir.join(PROFILE_FILE), &table.to_csv_string())?;
    write_json(&out_dir.join(TE_FILE), &TeReport::from(te))?;
    let params = EntangleParams {
        input: path_string(&input),
        fit: args.fit.as_deref().map(path_string),
        g,
        points: curve.len(),
        out_dir: path_string(out_dir),
    };
    write_json(
        &out_dir.join(MANIFEST_FILE),
        &Manifest::new("entangle", params, &[PROFILE_FILE, TE_FILE, MANIFEST_FILE]),
    )?;

    let show = |v: Option<f64>| v.map_or("none".to_owned(), |t| format!("{t:.3} K"));
    println!("T_E from crossing: {}", show(te.from_crossing));
    println!("T_E from fit:      {}", show(te.from_fit));
    println!("T_E from peak:     {}", show(te.from_peak));
    Ok(())
}

#[derive(Debug, Serialize)]
struct VerifyParams {
    grid: crate::args::Grid,
    perturb_term: Option<usize>,
    out_dir: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    checks: &'a [crate::verify::Check],
}

pub fn verify(args: VerifyArgs, out_dir: &Path) -> CliResult<()> {
    let grid = args.grid.unwrap_or_default();
    let checks = run_checks(grid, args.perturb_term);
    print!("{}", render_table(&checks));
    let passed = checks.iter().all(|c| c.passed);
    write_json(
        &out_dir.join(VERIFY_FILE),
        &VerifyReport {
            passed,
            checks: &checks,
        },
    )?;
    let params = VerifyParams {
        grid,
        perturb_term: args.perturb_term,
        out_dir: path_string(out_dir),
    };
    write_json(
        &out_dir.join(MANIFEST_FILE),
        &Manifest::new("verify", params, &[VERIFY_FILE, MANIFEST_FILE]),
    )?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        Err(CliError::VerificationFailed(failed.join("; ")))
    }
}
