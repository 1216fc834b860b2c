//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p dimer-cli --test acceptance`.

use std::cell::Cell as Tally;
use std::f64::consts::E;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dimer_cli::io::{parse_curve, Cell, Table};
use dimer_cli::report::FitReport;
use dimer_cli::verify::{four_digits, random_x_state};
use dimer_core::analysis::{
    crossing_temperature, fit_curve, synthesize_curve, temperature_grid, CompositeModel, FitConfig, FitParam,
};
use dimer_core::entanglement::{
    concurrence_wootters, concurrence_x_form, dimer_concurrence, entanglement_of_formation, entanglement_temperature,
};
use dimer_core::magnetics::{bleaney_bowers_chi, curie_chi_dimer, lambert_w, te_from_tmax};
use dimer_core::separability::{canonical_decomposition, reconstruct, verify_decomposition, DecompositionKind};
use dimer_core::spin::{limit_state, susceptibility_numeric, thermal_state, DimerParams, LimitKind};
use dimer_core::units::{DEFAULT_FIELD_STEP, LN_3};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || format!("took {elapsed:?}, budget {budget:?}"))
}

fn dimer(j: f64) -> DimerParams {
    DimerParams::new(j, 2.0).expect("valid dimer")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn lambert_constants() -> Outcome {
    let start = Instant::now();
    let w = lambert_w(3.0 / E).map_err(|e| e.to_string())?;
    let ratios = [2.0 / (1.0 + w), w / 3.0, (1.0 + w) / LN_3];
    let elapsed = start.elapsed();
    let quoted = [1.2472, 0.2011, 1.4596];
    for (r, q) in ratios.iter().zip(quoted) {
        ensure((four_digits(*r) - q).abs() < 1e-12, || {
            format!("{r} does not show as {q}")
        })?;
    }
    within_budget(elapsed, Duration::from_millis(1))?;
    Ok(format!(
        "{:.4} / {:.4} / {:.4} in {elapsed:?}",
        four_digits(ratios[0]),
        four_digits(ratios[1]),
        four_digits(ratios[2])
    ))
}

fn complex_two_anchors() -> Outcome {
    let start = Instant::now();
    let te = entanglement_temperature(&dimer(-68.0)).ok_or("no T_E")?;
    let from_peak = te_from_tmax(83.0).map_err(|e| e.to_string())?;
    let c25 = dimer_concurrence(&dimer(-68.0), 25.0).map_err(|e| e.to_string())?;
    let e25 = entanglement_of_formation(c25).value();
    let elapsed = start.elapsed();
    ensure((te - 123.79).abs() < 5e-3, || format!("T_E = {te}"))?;
    ensure(from_peak.round() == 121.0, || format!("te_from_tmax(83) = {from_peak}"))?;
    ensure((e25 - 0.963).abs() < 5e-4 && (0.90..=1.0).contains(&e25), || {
        format!("E(25 K) = {e25}")
    })?;
    within_budget(elapsed, Duration::from_millis(1))?;
    Ok(format!(
        "T_E = {te:.2} K, te_from_tmax(83) = {from_peak:.1} K, E(25 K) = {e25:.3}"
    ))
}

fn complex_one_anchors() -> Outcome {
    let te = te_from_tmax(63.0).map_err(|e| e.to_string())?;
    ensure((te - 91.95).abs() < 0.01, || format!("te_from_tmax(63) = {te}"))?;
    ensure((te / 10.0).round() * 10.0 == 90.0, || {
        format!("{te} does not round to 90")
    })?;
    let text = std::fs::read_to_string(fixture("complex_i_like.csv")).map_err(|e| e.to_string())?;
    let curve = parse_curve(&text).map_err(|e| e.to_string())?;
    let crossing = crossing_temperature(&curve, 2.0)
        .map_err(|e| e.to_string())?
        .ok_or("no crossing")?;
    ensure((crossing - 92.0).abs() < 5.0, || format!("crossing at {crossing} K"))?;
    Ok(format!(
        "te_from_tmax(63) = {te:.2} K, crossing on fixture at {crossing:.1} K"
    ))
}

fn crossing_identity() -> Outcome {
    let config = Config {
        cases: 100,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(config, rng);
    let worst = Tally::new(0.0f64);
    let count = Tally::new(0usize);
    runner
        .run(&(-1000.0..-0.1f64, 1.5..2.5f64), |(j, g)| {
            let p = DimerParams::new(j, g).expect("valid dimer");
            let te = entanglement_temperature(&p).expect("antiferromagnet");
            let bb = bleaney_bowers_chi(&p, te).expect("positive temperature");
            let third = 2.0 / 3.0 * curie_chi_dimer(g, te).expect("positive temperature");
            let rel = (bb - third).abs() / third;
            worst.set(worst.get().max(rel));
            count.set(count.get() + 1);
            proptest::prop_assert!(rel <= 1e-10, "J={} g={} rel={}", j, g, rel);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(format!(
        "{} random (J, g), max relative deviation {:e}",
        count.get(),
        worst.get()
    ))
}

fn susceptibility_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut n = 0;
    for i in 0..=40 {
        let j = -200.0 + 10.0 * i as f64;
        for k in 0..30 {
            let t = 2.0 * 1.2f64.powi(k);
            let closed = bleaney_bowers_chi(&dimer(j), t).map_err(|e| e.to_string())?;
            let numeric = susceptibility_numeric(&dimer(j), t, DEFAULT_FIELD_STEP).map_err(|e| e.to_string())?;
            let rel = (closed - numeric).abs() / closed;
            ensure(rel <= 1e-6, || format!("J={j} t={t}: {closed} vs {numeric}"))?;
            worst = worst.max(rel);
            n += 1;
        }
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "{n} (J, T) points, max relative deviation {worst:e}, {elapsed:?}"
    ))
}

fn concurrence_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst = 0.0f64;
    let mut entangled = 0;
    for i in 0..10_000 {
        let rho = random_x_state(&mut rng);
        let a = concurrence_x_form(&rho).map_err(|e| format!("state {i}: {e}"))?.value();
        let b = concurrence_wootters(&rho)
            .map_err(|e| format!("state {i}: {e}"))?
            .value();
        ensure((a - b).abs() <= 1e-10, || format!("state {i}: {a} vs {b}"))?;
        worst = worst.max((a - b).abs());
        entangled += (a > 0.0) as usize;
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "10000 random X-states ({entangled} entangled), max difference {worst:e}, {elapsed:?}"
    ))
}

fn separability() -> Outcome {
    let mut parts = Vec::new();
    for (kind, target) in [
        (DecompositionKind::AtTe, LimitKind::AtTe),
        (DecompositionKind::TripletMixed, LimitKind::TripletMixed),
    ] {
        let decomp = canonical_decomposition(kind);
        let report = verify_decomposition(&decomp, &limit_state(target), 1e-14);
        ensure(report.ok, || format!("{kind:?}: {report:?}"))?;
        let rho = reconstruct(&decomp).map_err(|e| e.to_string())?;
        let c = concurrence_wootters(&rho).map_err(|e| e.to_string())?.value();
        ensure(c <= 1e-12, || format!("{kind:?}: concurrence {c}"))?;
        parts.push(format!("{kind:?} residual {:e}", report.max_abs_residual));
    }
    Ok(parts.join(", "))
}

fn limit_states() -> Outcome {
    let te = entanglement_temperature(&dimer(-68.0)).ok_or("no T_E")?;
    let cases = [
        (dimer(-68.0), 0.5, LimitKind::ZeroTempAfm, 1.0),
        (dimer(-68.0), 1e12, LimitKind::InfiniteTemp, 0.0),
        (dimer(-68.0), te, LimitKind::AtTe, 0.0),
        (dimer(68.0), 0.5, LimitKind::TripletMixed, 0.0),
    ];
    let mut worst = 0.0f64;
    for (params, t, kind, expected) in cases {
        let rho = thermal_state(&params, t).map_err(|e| e.to_string())?;
        let target = limit_state(kind);
        let diff = rho.max_abs_diff(&target);
        ensure(diff <= 1e-9, || format!("{kind:?}: deviation {diff}"))?;
        worst = worst.max(diff);
        let e = concurrence_x_form(&target)
            .map_err(|e| e.to_string())?
            .entanglement()
            .value();
        ensure(e == expected, || format!("{kind:?}: E = {e}, expected {expected}"))?;
    }
    Ok(format!(
        "four limits within {worst:e}; E = 1 for the singlet, 0 otherwise"
    ))
}

fn fit_round_trip() -> Outcome {
    let start = Instant::now();
    let truth = CompositeModel::new(dimer(-68.0), 0.017).map_err(|e| e.to_string())?;
    let grid = temperature_grid(5.0, 300.0, 2.5).map_err(|e| e.to_string())?;
    let free = [FitParam::J, FitParam::G, FitParam::P];
    let mut hits = 0;
    for seed in 0..100 {
        let curve = synthesize_curve(&truth, &grid, 1e-5, seed).map_err(|e| e.to_string())?;
        let fit = fit_curve(
            &curve,
            &free,
            &CompositeModel::initial_guess(&curve),
            &FitConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let m = fit.model;
        hits += (fit.converged
            && (m.dimer.j_over_kb + 68.0).abs() <= 1.0
            && (m.dimer.g - 2.0).abs() <= 0.02
            && (m.impurity_fraction - 0.017).abs() <= 0.003) as usize;
    }
    let elapsed = start.elapsed();
    ensure(hits >= 95, || format!("only {hits}/100 seeds recovered"))?;
    within_budget(elapsed, Duration::from_secs(30))?;
    Ok(format!("{hits}/100 seeds within tolerance, {elapsed:?}"))
}

fn run_dimer(args: &[&str], out_dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dimer"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "`dimer {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn number(cell: &Cell) -> Result<f64, String> {
    match cell {
        Cell::Number(v) => Ok(*v),
        other => Err(format!("expected a number, got {other:?}")),
    }
}

fn end_to_end() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let (sim, fit, ent, ver) = (
        root.join("sim"),
        root.join("fit"),
        root.join("ent"),
        root.join("verify"),
    );
    run_dimer(&["simulate"], &sim)?;
    let curve = sim.join("curve.csv");
    run_dimer(&["fit", "--input", curve.to_str().unwrap()], &fit)?;
    let corrected = fit.join("corrected_curve.csv");
    let fit_json = fit.join("fit.json");
    run_dimer(
        &[
            "entangle",
            "--input",
            corrected.to_str().unwrap(),
            "--fit",
            fit_json.to_str().unwrap(),
        ],
        &ent,
    )?;
    run_dimer(&["verify"], &ver)?;

    let report =
        FitReport::parse(&std::fs::read_to_string(&fit_json).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let te = report.entanglement_temperature_k.ok_or("fit gave no T_E")?;
    let text = std::fs::read_to_string(ent.join("profile.csv")).map_err(|e| e.to_string())?;
    let table = Table::parse(&text).map_err(|e| e.to_string())?;
    let col = |name: &str| table.column_index(name).ok_or(format!("missing column {name}"));
    let (ti, ci, ei) = (col("t")?, col("C_theory")?, col("E_theory")?);
    let mut prev: Option<(f64, f64)> = None;
    for row in &table.rows {
        let (t, c, e) = (number(&row[ti])?, number(&row[ci])?, number(&row[ei])?);
        if let Some((pc, pe)) = prev {
            ensure(c <= pc && e <= pe, || format!("overlay rises at t = {t}"))?;
        }
        ensure(e <= c, || format!("E > C at t = {t}"))?;
        ensure((c == 0.0) == (e == 0.0), || {
            format!("C and E vanish separately at t = {t}")
        })?;
        ensure((c == 0.0) == (t >= te), || {
            format!("zero set disagrees with T_E = {te} at t = {t}")
        })?;
        prev = Some((c, e));
    }
    Ok(format!(
        "all four commands exit 0; overlay monotone, E <= C, both vanish from T_E = {te:.2} K"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Lambert-W constants", lambert_constants),
        ("complex-II anchors", complex_two_anchors),
        ("complex-I anchors", complex_one_anchors),
        ("crossing identity", crossing_identity),
        ("susceptibility oracle", susceptibility_oracle),
        ("concurrence oracle", concurrence_oracle),
        ("separable decompositions", separability),
        ("limit states", limit_states),
        ("fit round trip", fit_round_trip),
        ("end to end", end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (status, detail) = match check() {
            Ok(detail) => ("PASS", detail),
            Err(detail) => {
                failed += 1;
                ("FAIL", detail)
            }
        };
        println!("criterion {:>2}  {status}  {name:<26} {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
