use crate::error::{Error, Result};
use crate::model::{classify, exponents, ModelParams, RegimeTag};

use super::segment::Condition::{Slope, Value};
use super::{Segment, SegmentKind, SolvedValueFunction};

/// Value of paying at the constant rate `u` forever.
///
/// For `u = u0` and `β ≥ ζ` this is the optimal value function. For other
/// rates it is only the value of that (generally suboptimal) strategy, kept as
/// an exact oracle for Monte Carlo checks. The segments keep the `FBar`/`GBar`
/// labels; their `rate` field carries `u`.
pub fn constant_strategy_value(p: &ModelParams, u: f64) -> Result<SolvedValueFunction> {
    let e = exponents(p, u)?;
    let (a, b, r, d) = (e.theta1, e.theta2, p.r(), p.d());
    let sum = a + b;
    let one_minus = -(-sum * d).exp_m1();
    let top = p.beta() * u / r;
    let c = top - (b + a * (-sum * d).exp()) / (r * sum);

    let f_bar = Segment::fit(
        SegmentKind::FBar,
        (0.0, d),
        &e,
        top,
        [Slope { z: 0.0, target: 0.0 }, Value { z: d, target: c }],
    );
    let g_bar = Segment {
        kind: SegmentKind::GBar,
        lo: d,
        hi: f64::INFINITY,
        rate: u,
        offset: (p.beta() * u - 1.0) / r,
        coef_a: 0.0,
        coef_b: a * one_minus / (r * sum),
        anchor: d,
    };
    SolvedValueFunction::assemble(*p, classify(p), c, d, d, vec![f_bar, g_bar])
}

/// Optimal value function when `β ≥ ζ` (within the classification band):
/// pay `u0` everywhere.
pub fn dividend_dominated_solution(p: &ModelParams) -> Result<SolvedValueFunction> {
    let regime = classify(p);
    if regime.tag != RegimeTag::DividendDominated {
        return Err(Error::RegimeMismatch(format!(
            "beta = {} is below zeta; the constant maximal strategy is not optimal",
            p.beta()
        )));
    }
    constant_strategy_value(p, p.u0())
}
