//! Problem parameters, characteristic exponents and regime thresholds.
//!
//! The surplus is `X(t) = μt + σW(t) − ∫U ds` with dividend rate `U ∈ [0, u0]`.
//! The payoff rewards discounted dividends with weight `β` and penalises the
//! discounted time the drawdown spends above the critical level `d`.
//!
//! On any stretch where the rate is a constant `u`, the value function solves
//! a linear second-order ODE whose characteristic roots are `θ1(u) > 0` and
//! `−θ2(u) < 0`. Everything the solver builds is a sum of these exponentials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative band around `β = ζ` treated as the regime boundary.
pub const CLASSIFY_REL_TOL: f64 = 1e-9;

/// The six scalar parameters of the control problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    mu: f64,
    sigma: f64,
    r: f64,
    d: f64,
    u0: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    mu: f64,
    sigma: f64,
    r: f64,
    d: f64,
    u0: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.mu, raw.sigma, raw.r, raw.d, raw.u0, raw.beta)
    }
}

fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be strictly positive",
        })
    }
}

impl ModelParams {
    /// Validates and builds a parameter set. `mu` may have either sign; every
    /// other parameter must be finite and strictly positive.
    pub fn new(mu: f64, sigma: f64, r: f64, d: f64, u0: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            mu: finite("mu", mu)?,
            sigma: positive("sigma", sigma)?,
            r: positive("r", r)?,
            d: positive("d", d)?,
            u0: positive("u0", u0)?,
            beta: positive("beta", beta)?,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn u0(&self) -> f64 {
        self.u0
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.mu, self.sigma, self.r, self.d, self.u0, beta)
    }
    pub fn with_sigma(self, sigma: f64) -> Result<Self> {
        Self::new(self.mu, sigma, self.r, self.d, self.u0, self.beta)
    }
    pub fn with_u0(self, u0: f64) -> Result<Self> {
        Self::new(self.mu, self.sigma, self.r, self.d, u0, self.beta)
    }
    pub fn with_d(self, d: f64) -> Result<Self> {
        Self::new(self.mu, self.sigma, self.r, d, self.u0, self.beta)
    }

    /// Upper bound `βu0/r` of the value function (no penalty ever paid).
    pub fn upper_bound(&self) -> f64 {
        self.beta * self.u0 / self.r
    }

    /// Lower bound `(βu0 − 1)/r`, the limit of the value function as `z → ∞`.
    pub fn lower_bound(&self) -> f64 {
        (self.beta * self.u0 - 1.0) / self.r
    }
}

/// Characteristic exponents at dividend rate `u`: `θ1` and `−θ2` solve
/// `−r − (μ−u)κ + (σ²/2)κ² = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub u: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl Exponents {
    pub fn sum(&self) -> f64 {
        self.theta1 + self.theta2
    }
}

/// Exponents for rate `u ∈ [0, u0]`.
pub fn exponents(p: &ModelParams, u: f64) -> Result<Exponents> {
    if !u.is_finite() || u < 0.0 || u > p.u0 {
        return Err(Error::InvalidParameter {
            name: "u",
            value: u,
            reason: "dividend rate must lie in [0, u0]",
        });
    }
    Ok(exponents_unchecked(p, u))
}

/// Shares a single square root between both roots and takes the
/// cancellation-free branch for the smaller one, so `θ1·θ2 = 2r/σ²` holds to
/// rounding.
pub(crate) fn exponents_unchecked(p: &ModelParams, u: f64) -> Exponents {
    let m = p.mu - u;
    let s2 = p.sigma * p.sigma;
    let root = (m * m + 2.0 * p.r * s2).sqrt();
    let (theta1, theta2) = if m >= 0.0 {
        let big = root + m;
        (big / s2, 2.0 * p.r / big)
    } else {
        let big = root - m;
        (2.0 * p.r / big, big / s2)
    };
    Exponents { u, theta1, theta2 }
}

/// Critical dividend weight separating the regimes:
/// `ζ = θ1θ2(1 − e^{−(θ1+θ2)d}) / (r(θ1+θ2))` at rate `u0`.
pub fn zeta(p: &ModelParams) -> f64 {
    let e = exponents_unchecked(p, p.u0);
    let sum = e.sum();
    e.theta1 * e.theta2 * (-(-sum * p.d).exp_m1()) / (p.r * sum)
}

/// Bracket endpoints for the pasting constant `C = v(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    pub zeta: f64,
    pub xi1: f64,
    pub xi2: f64,
}

pub fn xi_thresholds(p: &ModelParams) -> RegimeThresholds {
    let e = exponents_unchecked(p, p.u0);
    let (a, b) = (e.theta1, e.theta2);
    // e^{θ1 d} divided out of numerator and denominator.
    let decay = (-(a + b) * p.d).exp();
    let one_minus = -(-(a + b) * p.d).exp_m1();
    let xi1 = p.upper_bound() - p.beta * (1.0 + (a / b) * decay) / (a * one_minus);
    let xi2 = p.lower_bound() + p.beta / b;
    RegimeThresholds {
        zeta: zeta(p),
        xi1,
        xi2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegimeTag {
    /// `β ≥ ζ`: pay at the maximal rate everywhere.
    DividendDominated,
    /// `β < ζ`: withhold dividends on `(z_f, z_g)` around the critical level.
    DrawdownSensitive,
}

impl std::fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeTag::DividendDominated => f.write_str("DividendDominated"),
            RegimeTag::DrawdownSensitive => f.write_str("DrawdownSensitive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// Set when `|β − ζ|` lies within the classification band.
    pub boundary: bool,
}

pub fn classify(p: &ModelParams) -> Regime {
    let z = zeta(p);
    let tol = CLASSIFY_REL_TOL * z;
    let tag = if p.beta >= z - tol {
        RegimeTag::DividendDominated
    } else {
        RegimeTag::DrawdownSensitive
    };
    Regime {
        tag,
        boundary: (p.beta - z).abs() <= tol,
    }
}
