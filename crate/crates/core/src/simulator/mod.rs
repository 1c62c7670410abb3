//! Monte Carlo simulation of the controlled surplus and its drawdown.
//!
//! The surplus `X` and its running maximum `M` are stepped directly with
//! Euler–Maruyama; the drawdown is `Δ = M − X`. The dividend rate is chosen
//! at the start of each step from the current drawdown, and the discounted
//! payoff `β∫e^{−rt}U dt − ∫e^{−rt}1{Δ>d} dt` accumulates with the left-endpoint
//! rule up to the horizon `T`.
//!
//! Discrete monitoring of the maximum underestimates the true running
//! maximum by `O(σ√dt)`; no bridge correction is applied.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, path index)`,
//! so estimates are bitwise reproducible whatever the thread schedule.

mod exec;

pub use exec::Execution;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::solver::{solve, SolvedValueFunction};

use exec::{map_indices, mean_and_se};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Initial drawdown, i.e. the past maximum above the starting surplus.
    pub z0: f64,
    /// Initial surplus; the drawdown does not depend on it.
    pub x0: f64,
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub record_paths: bool,
    /// Multiplier on the Brownian increment. `1.0` for the model; `0.0`
    /// gives the deterministic drift-only dynamics.
    pub noise_scale: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            z0: 0.0,
            x0: 0.0,
            dt: 1e-3,
            horizon: 60.0,
            n_paths: 20_000,
            seed: 0,
            record_paths: false,
            noise_scale: 1.0,
        }
    }
}

fn bad_config(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidConfig { name, value, reason }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.z0.is_finite() && self.z0 >= 0.0) {
            return Err(bad_config("z0", self.z0, "must be finite and >= 0"));
        }
        if !self.x0.is_finite() {
            return Err(bad_config("x0", self.x0, "must be finite"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(bad_config("dt", self.dt, "must be finite and > 0"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(bad_config("horizon", self.horizon, "must be finite and > 0"));
        }
        if self.dt > self.horizon {
            return Err(bad_config("dt", self.dt, "must not exceed the horizon"));
        }
        if self.n_paths == 0 {
            return Err(bad_config("n_paths", 0.0, "must be at least 1"));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale >= 0.0) {
            return Err(bad_config("noise_scale", self.noise_scale, "must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }

    pub fn with_z0(self, z0: f64) -> Self {
        Self { z0, ..self }
    }

    /// Bound on the payoff discarded by stopping at the horizon:
    /// `e^{−rT}·max(βu0, 1)/r`.
    pub fn truncation_bias_bound(&self, p: &ModelParams) -> f64 {
        (-p.r() * self.horizon).exp() * (p.beta() * p.u0()).max(1.0) / p.r()
    }

    /// Smallest horizon whose truncation bound is below `tol`.
    pub fn horizon_for(p: &ModelParams, tol: f64) -> f64 {
        ((p.beta() * p.u0()).max(1.0) / (p.r() * tol)).ln().max(0.0) / p.r()
    }
}

/// Dividend policy as a function of the current drawdown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StrategySpec {
    Zero,
    Max,
    Const(f64),
    /// Pay `u0` when `Δ ≤ z_f` or `Δ ≥ z_g`, nothing in between.
    Feedback { z_f: f64, z_g: f64 },
}

impl StrategySpec {
    /// The optimal feedback policy read off a solved value function.
    pub fn optimal(svf: &SolvedValueFunction) -> Self {
        StrategySpec::Feedback {
            z_f: svf.z_f,
            z_g: svf.z_g,
        }
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        match *self {
            StrategySpec::Const(u) if !(0.0..=p.u0()).contains(&u) => Err(bad_config(
                "const rate",
                u,
                "must lie in [0, u0]",
            )),
            StrategySpec::Feedback { z_f, z_g } => {
                if !(z_f > 0.0 && z_f <= p.d()) {
                    Err(bad_config("z_f", z_f, "must lie in (0, d]"))
                } else if !(z_g >= p.d() && !z_g.is_nan()) {
                    Err(bad_config("z_g", z_g, "must lie in [d, inf)"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn rate(&self, u0: f64, delta: f64) -> f64 {
        match *self {
            StrategySpec::Zero => 0.0,
            StrategySpec::Max => u0,
            StrategySpec::Const(u) => u,
            StrategySpec::Feedback { z_f, z_g } => {
                if delta <= z_f || delta >= z_g {
                    u0
                } else {
                    0.0
                }
            }
        }
    }
}

impl std::fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StrategySpec::Zero => f.write_str("zero"),
            StrategySpec::Max => f.write_str("max"),
            StrategySpec::Const(u) => write!(f, "const:{u}"),
            StrategySpec::Feedback { z_f, z_g } => write!(f, "feedback:{z_f}:{z_g}"),
        }
    }
}

/// A single simulated trajectory sampled at every grid time `t_n = n·dt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub delta: Vec<f64>,
    /// Rate chosen at `t_n` for the step `[t_n, t_{n+1})`.
    pub u: Vec<f64>,
    /// Accumulated dividends `∫_0^{t_n} U ds`.
    pub dividends: Vec<f64>,
    pub payoff_so_far: Vec<f64>,
    /// Discounted objective over `[0, T]`.
    pub payoff: f64,
}

impl PathRecord {
    pub const CSV_HEADER: &'static str = "t,X,M,Delta,U,D,discounted_payoff_so_far";

    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.times[i],
                self.x[i],
                self.m[i],
                self.delta[i],
                self.u[i],
                self.dividends[i],
                self.payoff_so_far[i]
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct PathState {
    x: f64,
    m: f64,
    dividends: f64,
    payoff: f64,
}

/// Steps one path for several strategies driven by the same noise. The
/// observer sees the states before each step and once more at the horizon.
fn run_path<O>(
    p: &ModelParams,
    strategies: &[StrategySpec],
    cfg: &SimConfig,
    index: u64,
    discount: &[f64],
    mut observe: O,
) -> Vec<PathState>
where
    O: FnMut(usize, &[PathState], &[f64]),
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);

    let (mu, beta, u0, d, dt) = (p.mu(), p.beta(), p.u0(), p.d(), cfg.dt);
    let shock_scale = cfg.noise_scale * p.sigma() * dt.sqrt();
    let init = PathState {
        x: cfg.x0,
        m: cfg.x0 + cfg.z0,
        dividends: 0.0,
        payoff: 0.0,
    };
    let mut states = vec![init; strategies.len()];
    let mut rates = vec![0.0; strategies.len()];

    for (n, &disc) in discount.iter().enumerate() {
        for (k, s) in strategies.iter().enumerate() {
            rates[k] = s.rate(u0, states[k].m - states[k].x);
        }
        observe(n, &states, &rates);
        let shock = shock_scale * rng.sample::<f64, _>(StandardNormal);
        let weight = disc * dt;
        for (st, &u) in states.iter_mut().zip(&rates) {
            let penalty = if st.m - st.x > d { 1.0 } else { 0.0 };
            st.payoff += weight * (beta * u - penalty);
            st.dividends += u * dt;
            st.x += (mu - u) * dt + shock;
            if st.x > st.m {
                st.m = st.x;
            }
        }
    }
    for (k, s) in strategies.iter().enumerate() {
        rates[k] = s.rate(u0, states[k].m - states[k].x);
    }
    observe(discount.len(), &states, &rates);
    states
}

fn discount_table(p: &ModelParams, cfg: &SimConfig) -> Vec<f64> {
    (0..cfg.n_steps())
        .map(|n| (-p.r() * n as f64 * cfg.dt).exp())
        .collect()
}

/// Simulates path `path_index`. The full trajectory is stored only when
/// `cfg.record_paths` is set; the payoff is always filled in.
pub fn simulate_path(
    p: &ModelParams,
    s: &StrategySpec,
    cfg: &SimConfig,
    path_index: u64,
) -> Result<PathRecord> {
    cfg.validate()?;
    s.validate(p)?;
    let discount = discount_table(p, cfg);
    let mut rec = PathRecord::default();
    let record = cfg.record_paths;
    let dt = cfg.dt;
    let end = run_path(p, std::slice::from_ref(s), cfg, path_index, &discount, |n, st, u| {
        if record {
            let st = st[0];
            rec.times.push(n as f64 * dt);
            rec.x.push(st.x);
            rec.m.push(st.m);
            rec.delta.push(st.m - st.x);
            rec.u.push(u[0]);
            rec.dividends.push(st.dividends);
            rec.payoff_so_far.push(st.payoff);
        }
    });
    rec.payoff = end[0].payoff;
    Ok(rec)
}

/// Monte Carlo estimate of a strategy's value at `cfg.z0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub truncation_bias_bound: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl McEstimate {
    fn from_payoffs(p: &ModelParams, cfg: &SimConfig, payoffs: &[f64]) -> Self {
        let (mean, std_error) = mean_and_se(payoffs);
        Self {
            mean,
            std_error,
            n_paths: payoffs.len(),
            truncation_bias_bound: cfg.truncation_bias_bound(p),
            dt: cfg.dt,
            horizon: cfg.horizon,
            seed: cfg.seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("estimate serializes")
    }
}

pub fn estimate_value(p: &ModelParams, s: &StrategySpec, cfg: &SimConfig) -> Result<McEstimate> {
    estimate_value_with(p, s, cfg, Execution::default())
}

pub fn estimate_value_with(
    p: &ModelParams,
    s: &StrategySpec,
    cfg: &SimConfig,
    exec: Execution,
) -> Result<McEstimate> {
    let crn = estimate_common(p, std::slice::from_ref(s), cfg, exec)?;
    Ok(crn.estimates[0])
}

/// Several strategies evaluated on identical noise (common random numbers).
#[derive(Debug, Clone, PartialEq)]
pub struct CrnEstimate {
    pub estimates: Vec<McEstimate>,
    /// `payoffs[k][i]`: payoff of strategy `k` on path `i`.
    pub payoffs: Vec<Vec<f64>>,
}

impl CrnEstimate {
    /// Mean and standard error of the per-path difference `k − j`.
    pub fn paired_difference(&self, k: usize, j: usize) -> (f64, f64) {
        let diffs: Vec<f64> = self.payoffs[k]
            .iter()
            .zip(&self.payoffs[j])
            .map(|(a, b)| a - b)
            .collect();
        mean_and_se(&diffs)
    }
}

pub fn estimate_common(
    p: &ModelParams,
    strategies: &[StrategySpec],
    cfg: &SimConfig,
    exec: Execution,
) -> Result<CrnEstimate> {
    cfg.validate()?;
    for s in strategies {
        s.validate(p)?;
    }
    let discount = discount_table(p, cfg);
    let per_path: Vec<Vec<f64>> = map_indices(cfg.n_paths, exec, |i| {
        run_path(p, strategies, cfg, i as u64, &discount, |_, _, _| {})
            .into_iter()
            .map(|st| st.payoff)
            .collect()
    });
    let payoffs: Vec<Vec<f64>> = (0..strategies.len())
        .map(|k| per_path.iter().map(|row| row[k]).collect())
        .collect();
    let estimates = payoffs
        .iter()
        .map(|pk| McEstimate::from_payoffs(p, cfg, pk))
        .collect();
    Ok(CrnEstimate { estimates, payoffs })
}

/// One row of the strategy comparison at initial drawdown `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub z: f64,
    pub v_analytic: f64,
    pub mc_optimal: f64,
    pub se_optimal: f64,
    pub mc_zero: f64,
    pub se_zero: f64,
    pub mc_max: f64,
    pub se_max: f64,
    /// Standard error of the paired difference optimal − zero.
    pub se_diff_zero: f64,
    /// Standard error of the paired difference optimal − max.
    pub se_diff_max: f64,
}

impl CompareRow {
    pub const CSV_HEADER: &'static str =
        "z,v_analytic,mc_optimal,se_optimal,mc_zero,se_zero,mc_max,se_max";

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.z,
            self.v_analytic,
            self.mc_optimal,
            self.se_optimal,
            self.mc_zero,
            self.se_zero,
            self.mc_max,
            self.se_max
        )
    }
}

/// Analytic value against Monte Carlo estimates of the optimal, zero and
/// maximal strategies, all on common random numbers.
pub fn compare_strategies(
    p: &ModelParams,
    cfg: &SimConfig,
    z_grid: &[f64],
) -> Result<Vec<CompareRow>> {
    let svf = solve(p)?;
    compare_with_solution(&svf, cfg, z_grid, Execution::default())
}

pub fn compare_with_solution(
    svf: &SolvedValueFunction,
    cfg: &SimConfig,
    z_grid: &[f64],
    exec: Execution,
) -> Result<Vec<CompareRow>> {
    let p = &svf.params;
    let strategies = [StrategySpec::optimal(svf), StrategySpec::Zero, StrategySpec::Max];
    z_grid
        .iter()
        .map(|&z| {
            let crn = estimate_common(p, &strategies, &cfg.with_z0(z), exec)?;
            let [opt, zero, max] = [crn.estimates[0], crn.estimates[1], crn.estimates[2]];
            Ok(CompareRow {
                z,
                v_analytic: svf.value(z)?,
                mc_optimal: opt.mean,
                se_optimal: opt.std_error,
                mc_zero: zero.mean,
                se_zero: zero.std_error,
                mc_max: max.mean,
                se_max: max.std_error,
                se_diff_zero: crn.paired_difference(0, 1).1,
                se_diff_max: crn.paired_difference(0, 2).1,
            })
        })
        .collect()
}
