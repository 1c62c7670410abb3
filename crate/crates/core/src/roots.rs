//! Bracketed bisection for strictly increasing scalar maps.
//!
//! Every root the solver needs is the zero of a function already known to be
//! strictly monotone on its bracket, so plain bisection is enough and never
//! fails to converge once a sign change is established.

use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const X_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy)]
pub struct Bisection {
    pub max_iterations: usize,
    /// Width criterion `hi − lo ≤ x_rel_tol · max(1, |mid|)`, used when
    /// `f_tol` is zero.
    pub x_rel_tol: f64,
    /// Value criterion `|f(mid)| ≤ f_tol`; when positive it is the only
    /// accepted stopping rule.
    pub f_tol: f64,
}

impl Default for Bisection {
    fn default() -> Self {
        Self {
            max_iterations: MAX_ITERATIONS,
            x_rel_tol: X_REL_TOL,
            f_tol: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

impl Bisection {
    /// Finds `x ∈ [lo, hi]` with `f(x) = 0` for increasing `f` with
    /// `f(lo) ≤ 0 ≤ f(hi)`.
    pub fn solve_increasing<F>(&self, what: &'static str, mut f: F, lo: f64, hi: f64) -> Result<Root>
    where
        F: FnMut(f64) -> f64,
    {
        let (mut lo, mut hi) = (lo, hi);
        let (f_lo, f_hi) = (f(lo), f(hi));
        if f_lo.is_nan() || f_hi.is_nan() || f_lo > 0.0 || f_hi < 0.0 {
            return Err(Error::NotBracketed {
                what,
                lo,
                hi,
                f_lo,
                f_hi,
            });
        }
        if f_lo == 0.0 {
            return Ok(Root { x: lo, fx: 0.0, iterations: 0 });
        }
        if f_hi == 0.0 {
            return Ok(Root { x: hi, fx: 0.0, iterations: 0 });
        }

        let mut last = f64::NAN;
        for it in 1..=self.max_iterations {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // No representable midpoint left.
                if self.f_tol == 0.0 {
                    return Ok(Root { x: mid, fx: f(mid), iterations: it });
                }
                break;
            }
            let fm = f(mid);
            if fm.is_nan() {
                return Err(Error::NonFinite { what });
            }
            last = fm;
            if fm == 0.0 || fm.abs() <= self.f_tol {
                return Ok(Root { x: mid, fx: fm, iterations: it });
            }
            if fm < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if self.f_tol == 0.0 && hi - lo <= self.x_rel_tol * mid.abs().max(1.0) {
                return Ok(Root { x: 0.5 * (lo + hi), fx: fm, iterations: it });
            }
        }
        Err(Error::NoConvergence {
            what,
            iterations: self.max_iterations,
            residual: last,
        })
    }
}
