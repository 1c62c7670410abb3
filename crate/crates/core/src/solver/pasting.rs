//! Drawdown-sensitive regime: thresholds `z_f^C`, `z_g^C` and the pasting
//! constant `C`.
//!
//! For a trial value `C = v(d)` the `[0, d]` problem has a unique switch
//! point `z_f^C` where the maximal-rate piece hands over to the zero-rate
//! piece, and likewise `z_g^C` on `(d, ∞)`. Both are zeros of strictly
//! increasing right-hand sides. The true `C` is the one at which the two
//! zero-rate pieces leave `d` with the same slope.
//!
//! All formulas below are the closed forms rescaled so that no exponential
//! grows with the absolute position `z`; only distances between thresholds
//! appear in exponents.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::model::{classify, exponents_unchecked, xi_thresholds, ModelParams, RegimeTag};
use crate::roots::Bisection;

use super::segment::Condition::{Slope, Value};
use super::{Segment, SegmentKind, SolvedValueFunction};

/// Smooth-pasting tolerance on `|f̲′_C(d) − g̲′_C(d)|`, scaled by `max(1, β)`.
pub const PASTING_TOL: f64 = 1e-10;

const MAX_EXPANSIONS: usize = 200;
const MAX_HALVINGS: usize = 1100;

/// Exponents at rate 0 (`p1`, `p2`) and at the maximal rate (`q1`, `q2`).
#[derive(Debug, Clone, Copy)]
struct Rates {
    p1: f64,
    p2: f64,
    q1: f64,
    q2: f64,
}

impl Rates {
    fn new(p: &ModelParams) -> Self {
        let zero = exponents_unchecked(p, 0.0);
        let full = exponents_unchecked(p, p.u0());
        Self {
            p1: zero.theta1,
            p2: zero.theta2,
            q1: full.theta1,
            q2: full.theta2,
        }
    }
}

fn endpoint_slack(x: f64) -> f64 {
    1e-12 * x.abs().max(1.0)
}

/// Right-hand side of the `z_f` equation: the pasting value `C` for which
/// the lower switch sits at `z ∈ (0, d]`. Strictly increasing, `−∞` at
/// `0⁺`, and equal to `ξ1` at `z = d`.
pub fn zf_rhs(p: &ModelParams, z: f64) -> f64 {
    let Rates { p1, p2, q1, q2 } = Rates::new(p);
    let d = p.d();
    let den = -(-(q1 + q2) * z).exp_m1();
    let tail = (-(q1 + q2) * z).exp();
    let near = (-p2 * (d - z)).exp();
    let far = (p1 * (d - z)).exp();
    let t1 = ((p1 - q1) * near - (p1 + q2) * near * tail) / (p2 * den);
    let t2 = ((p2 - q2) * far * tail - (p2 + q1) * far) / (p1 * den);
    p.beta() / (p1 + p2) * (t1 + t2)
}

/// Right-hand side of the `z_g` equation for `z ≥ d`: strictly increasing,
/// equal to `ξ2` at `z = d`.
pub fn zg_rhs(p: &ModelParams, z: f64) -> f64 {
    let Rates { p1, p2, q2, .. } = Rates::new(p);
    let s = z - p.d();
    let beta = p.beta();
    let grow = (p2 * s).exp();
    beta * (q2 - p2) / (p1 * (p1 + p2)) * ((-p1 * s).exp() + (p1 / p2) * grow) - 1.0 / p.r()
        + (beta / p2) * grow
}

/// Lower switch point `z_f^C ∈ (0, d]` for `C ≤ ξ1`; `C = ξ1` gives `d`.
pub fn zf_of_c(p: &ModelParams, c: f64) -> Result<f64> {
    let xi1 = xi_thresholds(p).xi1;
    if !(c <= xi1 + endpoint_slack(xi1)) {
        return Err(Error::NotBracketed {
            what: "z_f: C must not exceed xi1",
            lo: 0.0,
            hi: p.d(),
            f_lo: f64::NEG_INFINITY,
            f_hi: xi1 - c,
        });
    }
    let d = p.d();
    if c >= zf_rhs(p, d) {
        return Ok(d);
    }
    let mut lo = 0.5 * d;
    let mut halvings = 0;
    while zf_rhs(p, lo) >= c {
        lo *= 0.5;
        halvings += 1;
        if halvings > MAX_HALVINGS || lo == 0.0 {
            return Err(Error::NotBracketed {
                what: "z_f lower bracket",
                lo,
                hi: d,
                f_lo: zf_rhs(p, lo) - c,
                f_hi: zf_rhs(p, d) - c,
            });
        }
    }
    Bisection::default()
        .solve_increasing("z_f", |z| zf_rhs(p, z) - c, lo, d)
        .map(|root| root.x)
}

/// Upper switch point `z_g^C ∈ [d, ∞)` for `C ≥ ξ2`; `C = ξ2` gives `d`.
pub fn zg_of_c(p: &ModelParams, c: f64) -> Result<f64> {
    let xi2 = xi_thresholds(p).xi2;
    if !(c >= xi2 - endpoint_slack(xi2)) {
        return Err(Error::NotBracketed {
            what: "z_g: C must not fall below xi2",
            lo: p.d(),
            hi: f64::INFINITY,
            f_lo: xi2 - c,
            f_hi: f64::INFINITY,
        });
    }
    let d = p.d();
    if c <= zg_rhs(p, d) {
        return Ok(d);
    }
    let mut lo = d;
    let mut step = d.max(1.0);
    let mut hi = d + step;
    let mut expansions = 0;
    while zg_rhs(p, hi) < c {
        lo = hi;
        step *= 2.0;
        hi = d + step;
        expansions += 1;
        if expansions >= MAX_EXPANSIONS {
            return Err(Error::NoConvergence {
                what: "z_g upper bracket expansion",
                iterations: expansions,
                residual: zg_rhs(p, hi) - c,
            });
        }
    }
    Bisection::default()
        .solve_increasing("z_g", |z| zg_rhs(p, z) - c, lo, hi)
        .map(|root| root.x)
}

/// `f̲′_C(d)` expressed through `z_f` alone, with `e^{θ1(0) z_f + θ1(u0) z_f}`
/// divided out of the numerator and denominator.
fn f_slope_at_d(p: &ModelParams, zf: f64) -> f64 {
    let Rates { p1, p2, q1, q2 } = Rates::new(p);
    let w = p.d() - zf;
    let tail = (-(q1 + q2) * zf).exp();
    let den = (p1 + p2) * -(-(q1 + q2) * zf).exp_m1();
    let num = (p1 * w).exp() * ((q1 + p2) - (p2 - q2) * tail)
        + (-p2 * w).exp() * ((p1 - q1) - (p1 + q2) * tail);
    -p.beta() * num / den
}

fn g_slope_at_d(p: &ModelParams, zg: f64) -> f64 {
    let Rates { p1, p2, q2, .. } = Rates::new(p);
    let s = zg - p.d();
    let beta = p.beta();
    let grow = (p2 * s).exp();
    beta * (q2 - p2) / (p1 + p2) * ((-p1 * s).exp() - grow) - beta * grow
}

/// Left slope at `d` of the `[0, d]` solution with `v(d) = C`. Always `≤ −β`.
pub fn f_derivative_at_d(p: &ModelParams, c: f64) -> Result<f64> {
    Ok(f_slope_at_d(p, zf_of_c(p, c)?))
}

/// Right slope at `d` of the `(d, ∞)` solution with `v(d) = C`. Always `≤ −β`.
pub fn g_derivative_at_d(p: &ModelParams, c: f64) -> Result<f64> {
    Ok(g_slope_at_d(p, zg_of_c(p, c)?))
}

/// `f̲′_C(d) − g̲′_C(d)`; strictly increasing in `C` on `[ξ2, ξ1]` when `β < ζ`.
pub fn pasting_objective(p: &ModelParams, c: f64) -> Result<f64> {
    Ok(f_derivative_at_d(p, c)? - g_derivative_at_d(p, c)?)
}

/// Optimal value function for `β < ζ`: four segments with switch points
/// `0 < z_f < d < z_g`.
pub fn drawdown_sensitive_solution(p: &ModelParams) -> Result<SolvedValueFunction> {
    let regime = classify(p);
    if regime.tag != RegimeTag::DrawdownSensitive {
        return Err(Error::RegimeMismatch(format!(
            "beta = {} is at or above zeta; use the dividend-dominated closed form",
            p.beta()
        )));
    }
    let t = xi_thresholds(p);

    let failure: Cell<Option<Error>> = Cell::new(None);
    let objective = |c: f64| match pasting_objective(p, c) {
        Ok(v) => v,
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let opts = Bisection {
        f_tol: PASTING_TOL * p.beta().max(1.0),
        x_rel_tol: 0.0,
        ..Bisection::default()
    };
    let root = opts.solve_increasing("pasting constant C", objective, t.xi2, t.xi1);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let c = root?.x;
    let z_f = zf_of_c(p, c)?;
    let z_g = zg_of_c(p, c)?;
    let segments = build_segments(p, c, z_f, z_g);
    SolvedValueFunction::assemble(*p, regime, c, z_f, z_g, segments)
}

fn build_segments(p: &ModelParams, c: f64, zf: f64, zg: f64) -> Vec<Segment> {
    let (beta, r, d, u0) = (p.beta(), p.r(), p.d(), p.u0());
    let (zero, full) = (exponents_unchecked(p, 0.0), exponents_unchecked(p, u0));
    let f_bar = Segment::fit(
        SegmentKind::FBar,
        (0.0, zf),
        &full,
        p.upper_bound(),
        [Slope { z: 0.0, target: 0.0 }, Slope { z: zf, target: -beta }],
    );
    let f_under = Segment::fit(
        SegmentKind::FUnder,
        (zf, d),
        &zero,
        0.0,
        [Slope { z: zf, target: -beta }, Value { z: d, target: c }],
    );
    let g_under = Segment::fit(
        SegmentKind::GUnder,
        (d, zg),
        &zero,
        -1.0 / r,
        [Value { z: d, target: c }, Slope { z: zg, target: -beta }],
    );

    let g_bar = Segment {
        kind: SegmentKind::GBar,
        lo: zg,
        hi: f64::INFINITY,
        rate: u0,
        offset: p.lower_bound(),
        coef_a: 0.0,
        coef_b: beta / full.theta2,
        anchor: zg,
    };

    vec![f_bar, f_under, g_under, g_bar]
}
