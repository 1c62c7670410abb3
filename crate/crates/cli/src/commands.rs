use std::fmt::Write as _;

use drawdown_control::model::{zeta, ModelParams};
use drawdown_control::simulator::{
    compare_with_solution, estimate_value, simulate_path, CompareRow, Execution, SimConfig,
    StrategySpec,
};
use drawdown_control::solver::{hjb_residual, solve, GridSpec, JointGap, SolvedValueFunction};
use serde::Serialize;

use crate::cli::{
    Command, CompareArgs, Format, ModelArgs, ResidualArgs, SimArgs, SimulateArgs, SolveArgs,
    SweepArgs, SweepParam,
};
use crate::report::{classify, sig, CliError, Run};

/// Residual level below which `residual` exits successfully.
const RESIDUAL_LIMIT: f64 = 1e-8;

pub fn run(command: Command, argv: Vec<String>) -> Result<(), CliError> {
    match command {
        Command::Solve(a) => cmd_solve(a, argv),
        Command::Residual(a) => cmd_residual(a, argv),
        Command::Sweep(a) => cmd_sweep(a, argv),
        Command::Simulate(a) => cmd_simulate(a, argv),
        Command::Compare(a) => cmd_compare(a, argv),
    }
}

fn required(value: Option<f64>, flag: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required flag --{flag}")))
}

fn params(m: &ModelArgs) -> Result<ModelParams, CliError> {
    let p = ModelParams::new(
        required(m.mu, "mu")?,
        required(m.sigma, "sigma")?,
        required(m.r, "r")?,
        required(m.d, "d")?,
        required(m.u0, "u0")?,
        required(m.beta, "beta")?,
    );
    p.map_err(|e| classify(e, CliError::Validation))
}

fn solved(p: &ModelParams) -> Result<SolvedValueFunction, CliError> {
    solve(p).map_err(|e| classify(e, CliError::Solver))
}

fn check_grid(z_max: f64, n: usize) -> Result<(), CliError> {
    if !(z_max.is_finite() && z_max > 0.0) {
        return Err(CliError::Validation(format!("--zmax: must be finite and > 0, got {z_max}")));
    }
    if n < 2 {
        return Err(CliError::Validation(format!("--n: need at least 2 points, got {n}")));
    }
    Ok(())
}

/// CSV `z,v,v_prime,v_second,u_star` on a uniform grid.
pub fn table_csv(svf: &SolvedValueFunction, z_max: f64, n: usize) -> String {
    let mut out = String::from("z,v,v_prime,v_second,u_star\n");
    for [z, v, dv, d2v, u] in svf.table(z_max, n) {
        writeln!(out, "{z},{v},{dv},{d2v},{u}").unwrap();
    }
    out
}

fn print_summary(svf: &SolvedValueFunction) {
    println!("regime={}", svf.regime.tag);
    println!("zeta={}", sig(svf.zeta, 9));
    println!("xi1={}", sig(svf.xi1, 9));
    println!("xi2={}", sig(svf.xi2, 9));
    println!("C={}", sig(svf.c, 9));
    println!("z_f={}", sig(svf.z_f, 9));
    println!("z_g={}", sig(svf.z_g, 9));
}

fn cmd_solve(a: SolveArgs, argv: Vec<String>) -> Result<(), CliError> {
    let mut run = Run::new("solve", argv, a.model.out.as_deref());
    let p = params(&a.model)?;
    run.params = Some(p);
    let svf = solved(&p)?;
    print_summary(&svf);
    let z_max = a.zmax.unwrap_or_else(|| svf.default_z_max());
    check_grid(z_max, a.n)?;
    if matches!(a.format, Format::Json | Format::Both) {
        run.write("solution.json", &svf.to_json())?;
    }
    if matches!(a.format, Format::Csv | Format::Both) {
        run.write("table.csv", &table_csv(&svf, z_max, a.n))?;
    }
    run.finish()
}

#[derive(Serialize)]
struct ResidualSummary {
    max_abs_residual: f64,
    argmax_z: f64,
    max_pointwise: f64,
    boundary_defect: f64,
    joint_gaps: Vec<JointGap>,
    grid_n: usize,
    z_max: f64,
    excluded_half_width: f64,
    perturb: Option<f64>,
}

fn cmd_residual(a: ResidualArgs, argv: Vec<String>) -> Result<(), CliError> {
    let mut run = Run::new("residual", argv, a.model.out.as_deref());
    let p = params(&a.model)?;
    run.params = Some(p);
    let mut svf = solved(&p)?;
    if let Some(f) = a.perturb {
        if !f.is_finite() {
            return Err(CliError::Validation(format!("--perturb: must be finite, got {f}")));
        }
        svf = svf.with_scaled_coef_a(0, 1.0 + f);
    }
    if a.grid_n < 2 {
        return Err(CliError::Validation(format!("--grid-n: need at least 2 points, got {}", a.grid_n)));
    }
    let grid = GridSpec {
        n: a.grid_n,
        ..GridSpec::default_for(&svf)
    };
    let report = hjb_residual(&svf, &grid);
    println!("max_abs_residual={}", sig(report.max_abs_residual, 9));
    println!("argmax_z={}", sig(report.argmax_z, 9));
    println!("max_pointwise={}", sig(report.max_pointwise, 9));
    println!("boundary_defect={}", sig(report.boundary_defect, 9));
    for g in &report.joint_gaps {
        println!(
            "joint z={} value_gap={} slope_gap={}",
            sig(g.z, 9),
            sig(g.value_gap, 3),
            sig(g.slope_gap, 3)
        );
    }
    let summary = ResidualSummary {
        max_abs_residual: report.max_abs_residual,
        argmax_z: report.argmax_z,
        max_pointwise: report.max_pointwise,
        boundary_defect: report.boundary_defect,
        joint_gaps: report.joint_gaps.clone(),
        grid_n: grid.n,
        z_max: grid.z_max,
        excluded_half_width: grid.exclude_half_width,
        perturb: a.perturb,
    };
    run.write("residual.json", &serde_json::to_string_pretty(&summary).unwrap())?;
    run.finish()?;
    if report.max_abs_residual <= RESIDUAL_LIMIT {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!(
            "max residual {:e} exceeds {RESIDUAL_LIMIT:e}",
            report.max_abs_residual
        )))
    }
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Validation(format!("--u0-range: expected a,b,n with a < b and n >= 2, got {s}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, n] = parts[..] else {
        return Err(bad());
    };
    let (a, b, n): (f64, f64, usize) = (
        a.parse().map_err(|_| bad())?,
        b.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
    );
    if !(a < b && n >= 2) {
        return Err(bad());
    }
    Ok((a, b, n))
}

fn zeta_curve(a: &SweepArgs, run: &mut Run) -> Result<(), CliError> {
    let range = a
        .u0_range
        .as_deref()
        .ok_or_else(|| CliError::Validation("--u0-range: required for --param zeta-curve".into()))?;
    let (lo, hi, n) = parse_range(range)?;
    // ζ does not involve β; any valid placeholder will do.
    let model = ModelArgs {
        u0: Some(lo),
        beta: Some(a.model.beta.unwrap_or(1.0)),
        ..a.model.clone()
    };
    let base = params(&model)?;
    run.params = Some(base);
    let mut csv = String::from("u0,zeta\n");
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in 0..n {
        let u0 = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let p = base.with_u0(u0).map_err(|e| classify(e, CliError::Validation))?;
        let z = zeta(&p);
        if z > best.1 {
            best = (u0, z);
        }
        writeln!(csv, "{u0},{z}").unwrap();
    }
    println!("argmax_u0={} max_zeta={}", sig(best.0, 9), sig(best.1, 9));
    run.write("zeta-curve.csv", &csv)?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs, argv: Vec<String>) -> Result<(), CliError> {
    let mut run = Run::new("sweep", argv, a.model.out.as_deref());
    if a.param == SweepParam::ZetaCurve {
        zeta_curve(&a, &mut run)?;
        return run.finish();
    }
    if a.values.is_empty() {
        return Err(CliError::Validation("--values: at least one value is required".into()));
    }
    let name = a.param.name();
    let mut solutions = Vec::new();
    for &value in &a.values {
        let mut m = a.model.clone();
        match a.param {
            SweepParam::Beta => m.beta = Some(value),
            SweepParam::Sigma => m.sigma = Some(value),
            SweepParam::U0 => m.u0 = Some(value),
            SweepParam::ZetaCurve => unreachable!(),
        }
        let p = params(&m)?;
        run.params.get_or_insert(p);
        solutions.push((value, solved(&p)?));
    }
    let z_max = a.zmax.unwrap_or_else(|| {
        solutions
            .iter()
            .map(|(_, s)| s.default_z_max())
            .fold(0.0, f64::max)
    });
    check_grid(z_max, a.n)?;

    let mut summary = String::from("value,zeta,regime,C,z_f,z_g\n");
    for (value, svf) in &solutions {
        run.write(&format!("sweep-{name}-{value}.csv"), &table_csv(svf, z_max, a.n))?;
        writeln!(
            summary,
            "{value},{},{},{},{},{}",
            svf.zeta, svf.regime.tag, svf.c, svf.z_f, svf.z_g
        )
        .unwrap();
        println!(
            "{name}={} regime={} zeta={} C={} z_f={} z_g={}",
            sig(*value, 9),
            svf.regime.tag,
            sig(svf.zeta, 9),
            sig(svf.c, 9),
            sig(svf.z_f, 9),
            sig(svf.z_g, 9)
        );
    }
    run.write(&format!("sweep-{name}-summary.csv"), &summary)?;
    run.finish()
}

fn sim_config(p: &ModelParams, s: &SimArgs, z0: f64) -> Result<SimConfig, CliError> {
    let cfg = SimConfig {
        z0,
        dt: s.dt,
        horizon: s.horizon.unwrap_or_else(|| SimConfig::horizon_for(p, 1e-4)),
        n_paths: s.paths,
        seed: s.seed,
        ..SimConfig::default()
    };
    cfg.validate().map_err(|e| classify(e, CliError::Validation))?;
    Ok(cfg)
}

fn parse_strategy(s: &str, p: &ModelParams) -> Result<StrategySpec, CliError> {
    let spec = match s {
        "optimal" => {
            let svf = solve(p).map_err(|e| classify(e, CliError::SimulationDependency))?;
            StrategySpec::optimal(&svf)
        }
        "zero" => StrategySpec::Zero,
        "max" => StrategySpec::Max,
        other => {
            let rate = other
                .strip_prefix("const:")
                .and_then(|u| u.parse::<f64>().ok())
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "--strategy: expected optimal, zero, max or const:<u>, got {other}"
                    ))
                })?;
            StrategySpec::Const(rate)
        }
    };
    spec.validate(p).map_err(|e| classify(e, CliError::Validation))?;
    Ok(spec)
}

fn cmd_simulate(a: SimulateArgs, argv: Vec<String>) -> Result<(), CliError> {
    let mut run = Run::new("simulate", argv, a.model.out.as_deref());
    let p = params(&a.model)?;
    run.params = Some(p);
    run.seed = Some(a.sim.seed);
    let cfg = sim_config(&p, &a.sim, a.z0)?;
    let strategy = parse_strategy(&a.strategy, &p)?;
    let est = estimate_value(&p, &strategy, &cfg).map_err(|e| classify(e, CliError::Validation))?;
    println!("strategy={strategy}");
    println!("mean={} std_error={}", sig(est.mean, 9), sig(est.std_error, 9));
    println!("truncation_bias_bound={}", sig(est.truncation_bias_bound, 9));
    run.write("estimate.json", &est.to_json())?;

    let record_cfg = SimConfig { record_paths: true, ..cfg };
    for i in 0..a.record_paths.min(cfg.n_paths) {
        let rec = simulate_path(&p, &strategy, &record_cfg, i as u64)
            .map_err(|e| classify(e, CliError::Validation))?;
        let mut buf = Vec::new();
        rec.write_csv(&mut buf)?;
        run.write(&format!("paths/path-{i}.csv"), std::str::from_utf8(&buf).unwrap())?;
    }
    run.finish()
}

fn cmd_compare(a: CompareArgs, argv: Vec<String>) -> Result<(), CliError> {
    let mut run = Run::new("compare", argv, a.model.out.as_deref());
    let p = params(&a.model)?;
    run.params = Some(p);
    run.seed = Some(a.sim.seed);
    let cfg = sim_config(&p, &a.sim, 0.0)?;
    if let Some(z) = a.z_grid.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
        return Err(CliError::Validation(format!("--z-grid: values must be finite and >= 0, got {z}")));
    }
    let svf = solve(&p).map_err(|e| classify(e, CliError::SimulationDependency))?;
    let rows = compare_with_solution(&svf, &cfg, &a.z_grid, Execution::default())
        .map_err(|e| classify(e, CliError::Validation))?;
    let mut csv = format!("{}\n", CompareRow::CSV_HEADER);
    for row in &rows {
        csv.push_str(&row.csv_line());
        csv.push('\n');
        println!(
            "z={} v={} optimal={}±{} zero={}±{} max={}±{}",
            sig(row.z, 6),
            sig(row.v_analytic, 6),
            sig(row.mc_optimal, 6),
            sig(row.se_optimal, 2),
            sig(row.mc_zero, 6),
            sig(row.se_zero, 2),
            sig(row.mc_max, 6),
            sig(row.se_max, 2)
        );
    }
    run.write("compare.csv", &csv)?;
    run.finish()
}
