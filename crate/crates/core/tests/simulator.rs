mod common;

use common::base;
use drawdown_control::model::exponents;
use drawdown_control::simulator::{
    compare_with_solution, estimate_common, estimate_value, simulate_path, CompareRow, Execution,
    PathRecord, SimConfig, StrategySpec,
};
use drawdown_control::solver::{constant_strategy_value, solve};

fn cfg(dt: f64, horizon: f64, n_paths: usize, seed: u64) -> SimConfig {
    SimConfig {
        dt,
        horizon,
        n_paths,
        seed,
        ..SimConfig::default()
    }
}

#[test]
fn identical_inputs_give_identical_estimates() {
    let p = base(0.5);
    let s = StrategySpec::optimal(&solve(&p).unwrap());
    let c = cfg(1e-2, 20.0, 500, 42).with_z0(3.0);
    let a = estimate_value(&p, &s, &c).unwrap();
    let b = estimate_value(&p, &s, &c).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    let other = estimate_value(&p, &s, &SimConfig { seed: 43, ..c }).unwrap();
    assert_ne!(a.mean, other.mean);
}

#[test]
fn drawdown_does_not_depend_on_initial_capital() {
    let p = base(0.5);
    let s = StrategySpec::optimal(&solve(&p).unwrap());
    let c = SimConfig { record_paths: true, ..cfg(1e-3, 10.0, 1, 7).with_z0(2.0) };
    for index in 0..5 {
        let at_zero = simulate_path(&p, &s, &c, index).unwrap();
        let shifted = simulate_path(&p, &s, &SimConfig { x0: 37.5, ..c }, index).unwrap();
        for (a, b) in at_zero.delta.iter().zip(&shifted.delta) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        assert_eq!(at_zero.u, shifted.u);
    }
}

#[test]
fn drawdown_never_sits_exactly_on_the_critical_level() {
    let p = base(0.5);
    let svf = solve(&p).unwrap();
    let c = SimConfig { record_paths: true, ..cfg(1e-3, 20.0, 1, 3).with_z0(p.d()) };
    let mut steps = 0usize;
    let mut hits = 0usize;
    for s in [StrategySpec::optimal(&svf), StrategySpec::Zero, StrategySpec::Max] {
        for index in 0..40 {
            let rec = simulate_path(&p, &s, &c, index).unwrap();
            // The starting point is placed on d by construction.
            steps += rec.delta.len() - 1;
            hits += rec.delta[1..].iter().filter(|&&x| x == p.d()).count();
        }
    }
    assert!(steps > 2_000_000);
    assert_eq!(hits, 0);
}

#[test]
fn path_records_are_consistent() {
    let p = base(0.5);
    let s = StrategySpec::optimal(&solve(&p).unwrap());
    let c = SimConfig { record_paths: true, ..cfg(1e-2, 10.0, 1, 11).with_z0(1.5) };
    let rec = simulate_path(&p, &s, &c, 0).unwrap();
    assert_eq!(rec.delta[0], 1.5);
    for i in 0..rec.times.len() {
        assert!(rec.m[i] >= rec.x[i]);
        assert!(rec.dividends[i] <= p.u0() * rec.times[i] + 1e-12);
        if i > 0 {
            assert!(rec.m[i] >= rec.m[i - 1]);
            assert!(rec.dividends[i] >= rec.dividends[i - 1]);
        }
    }
    assert_eq!(*rec.payoff_so_far.last().unwrap(), rec.payoff);

    let mut csv = Vec::new();
    rec.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(PathRecord::CSV_HEADER));
    assert_eq!(lines.count(), rec.times.len());
}

#[test]
fn halving_the_step_moves_the_estimate_less_than_its_noise() {
    let p = base(0.5);
    let s = StrategySpec::optimal(&solve(&p).unwrap());
    let coarse = estimate_value(&p, &s, &cfg(2e-3, 20.0, 50_000, 5).with_z0(p.d())).unwrap();
    let fine = estimate_value(&p, &s, &cfg(1e-3, 20.0, 50_000, 6).with_z0(p.d())).unwrap();
    let gap = (coarse.mean - fine.mean).abs();
    let allowed = 2.0 * (coarse.std_error + fine.std_error);
    assert!(gap < allowed, "{coarse:?} vs {fine:?}");
}

#[test]
fn zero_strategy_only_collects_penalty() {
    let p = base(0.5);
    let c = cfg(1e-2, 30.0, 1000, 9).with_z0(p.d());
    let est = estimate_value(&p, &StrategySpec::Zero, &c).unwrap();
    assert!((-1.0 / p.r()..=0.0).contains(&est.mean), "{est:?}");
    for i in 0..20 {
        let payoff = simulate_path(&p, &StrategySpec::Zero, &c, i).unwrap().payoff;
        assert!((-1.0 / p.r()..=0.0).contains(&payoff));
    }
}

#[test]
fn zero_strategy_far_out_pays_the_full_penalty() {
    let p = base(0.5);
    let theta2 = exponents(&p, 0.0).unwrap().theta2;
    let z0 = p.d() + 60.0 / theta2;
    let c = cfg(1e-2, 60.0, 200, 1).with_z0(z0);
    let est = estimate_value(&p, &StrategySpec::Zero, &c).unwrap();
    let exact = constant_strategy_value(&p, 0.0).unwrap().value(z0).unwrap();
    assert!((exact + 1.0 / p.r()).abs() < 1e-12);
    let tol = (3.0 * est.std_error).max(0.05) + est.truncation_bias_bound;
    assert!((est.mean - exact).abs() <= tol, "{} vs {exact}", est.mean);
}

#[test]
fn intermediate_constant_rate_matches_its_closed_form() {
    let p = base(0.5);
    let u = 0.5 * p.u0();
    let oracle = constant_strategy_value(&p, u).unwrap();
    let c = cfg(2e-3, 50.0, 4000, 21);
    for z0 in [0.0, p.d()] {
        let est = estimate_value(&p, &StrategySpec::Const(u), &c.with_z0(z0)).unwrap();
        let exact = oracle.value(z0).unwrap();
        let tol = (3.0 * est.std_error).max(0.05) + est.truncation_bias_bound;
        assert!((est.mean - exact).abs() <= tol, "z0 {z0}: {} vs {exact}", est.mean);
    }
}

#[test]
fn optimal_feedback_beats_alternatives() {
    let p = base(0.5);
    let svf = solve(&p).unwrap();
    let strategies = [
        StrategySpec::optimal(&svf),
        StrategySpec::Zero,
        StrategySpec::Max,
        StrategySpec::Const(0.5 * p.u0()),
    ];
    let c = cfg(2e-3, 40.0, 3000, 13);
    for z0 in [0.0, p.d(), 2.0 * p.d()] {
        let crn = estimate_common(&p, &strategies, &c.with_z0(z0), Execution::default()).unwrap();
        for (k, other) in strategies.iter().enumerate().skip(1) {
            let (diff, se) = crn.paired_difference(0, k);
            assert!(diff >= -3.0 * se, "z0 {z0}, vs {other}: {diff} ± {se}");
        }
    }
}

#[test]
fn comparison_table_agrees_with_solution() {
    let p = base(0.5);
    let svf = solve(&p).unwrap();
    let c = cfg(2e-3, 40.0, 2000, 17);
    let rows = compare_with_solution(&svf, &c, &[0.0, p.d(), 2.0 * p.d()], Execution::default())
        .unwrap();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        let tol = (3.0 * row.se_optimal).max(0.05) + c.truncation_bias_bound(&p);
        assert!((row.mc_optimal - row.v_analytic).abs() <= tol, "{row:?}");
        assert!(row.mc_optimal >= row.mc_zero - 3.0 * row.se_diff_zero, "{row:?}");
        assert!(row.mc_optimal >= row.mc_max - 3.0 * row.se_diff_max, "{row:?}");
        let fields = CompareRow::CSV_HEADER.split(',').count();
        assert_eq!(row.csv_line().split(',').count(), fields);
    }

    // With dominant dividends the feedback rule is the maximal rate itself.
    let dominated = solve(&base(1.0)).unwrap();
    let rows = compare_with_solution(&dominated, &cfg(1e-2, 20.0, 200, 1), &[2.0], Execution::default())
        .unwrap();
    assert_eq!(rows[0].mc_optimal, rows[0].mc_max);
    assert_eq!(rows[0].se_diff_max, 0.0);
}
