//! Exact value function and optimal feedback thresholds.
//!
//! The value function is glued from at most four exponential segments:
//!
//! ```text
//!   [0, z_f]   pay u0   (FBar)
//!   (z_f, d]   pay 0    (FUnder)
//!   (d, z_g]   pay 0    (GUnder)
//!   (z_g, ∞)   pay u0   (GBar)
//! ```
//!
//! When `β ≥ ζ` the middle two collapse and `z_f = z_g = d`. Otherwise the
//! pasting value `C = v(d)` is the unique zero of the strictly increasing map
//! `C ↦ f̲′_C(d) − g̲′_C(d)` on `(ξ2, ξ1)`, and `z_f`, `z_g` follow from `C` by
//! two inner monotone root finds.

mod closed_form;
mod hjb;
mod pasting;
mod segment;

pub use closed_form::{constant_strategy_value, dividend_dominated_solution};
pub use hjb::{hjb_residual, GridSpec, HjbResidualReport, JointGap};
pub use pasting::{
    drawdown_sensitive_solution, f_derivative_at_d, g_derivative_at_d, pasting_objective,
    zf_of_c, zf_rhs, zg_of_c, zg_rhs, PASTING_TOL,
};
pub use segment::{Segment, SegmentKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, classify, exponents_unchecked, ModelParams, Regime, RegimeTag};

/// A fully assembled value function together with its regime data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedValueFunction {
    pub params: ModelParams,
    pub regime: Regime,
    pub zeta: f64,
    pub xi1: f64,
    pub xi2: f64,
    /// Pasting value `v(d)`.
    #[serde(rename = "C")]
    pub c: f64,
    pub z_f: f64,
    pub z_g: f64,
    pub segments: Vec<Segment>,
}

/// Solves the control problem, dispatching on the regime of `p`.
pub fn solve(p: &ModelParams) -> Result<SolvedValueFunction> {
    match classify(p).tag {
        RegimeTag::DividendDominated => dividend_dominated_solution(p),
        RegimeTag::DrawdownSensitive => drawdown_sensitive_solution(p),
    }
}

impl SolvedValueFunction {
    pub(crate) fn assemble(
        params: ModelParams,
        regime: Regime,
        c: f64,
        z_f: f64,
        z_g: f64,
        segments: Vec<Segment>,
    ) -> Result<Self> {
        if !c.is_finite() || segments.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite {
                what: "segment coefficient",
            });
        }
        let t = model::xi_thresholds(&params);
        Ok(Self {
            params,
            regime,
            zeta: t.zeta,
            xi1: t.xi1,
            xi2: t.xi2,
            c,
            z_f,
            z_g,
            segments,
        })
    }

    /// Index of the segment owning `z`; `d` belongs to the `f` side.
    pub fn segment_index(&self, z: f64) -> usize {
        self.segments
            .iter()
            .position(|s| s.contains(z))
            .unwrap_or(self.segments.len() - 1)
    }

    /// `v(z)`, `v′(z)` or `v″(z)` for `order` 0, 1 or 2. At `z = d` the second
    /// derivative is the left limit.
    pub fn evaluate(&self, z: f64, order: u8) -> Result<f64> {
        if !(z >= 0.0) {
            return Err(Error::Domain(z));
        }
        Ok(self.eval_segment(self.segment_index(z), z, order))
    }

    pub fn value(&self, z: f64) -> Result<f64> {
        self.evaluate(z, 0)
    }

    /// Evaluates a specific segment's closed form, ignoring ownership. Used
    /// for one-sided limits at joints.
    pub fn eval_segment(&self, index: usize, z: f64, order: u8) -> f64 {
        let seg = &self.segments[index];
        let exps = exponents_unchecked(&self.params, seg.rate);
        seg.eval(&exps, z, order)
    }

    /// Optimal feedback rate: the maximal rate on `[0, z_f] ∪ [z_g, ∞)` and
    /// nothing in between. For a constant-strategy value function this is
    /// the constant rate everywhere.
    pub fn optimal_rate(&self, z: f64) -> f64 {
        if z <= self.z_f {
            self.segments[0].rate
        } else if z >= self.z_g {
            self.segments[self.segments.len() - 1].rate
        } else {
            0.0
        }
    }

    /// Value and slope mismatch between neighbouring segments at each joint.
    pub fn pasting_gaps(&self) -> Vec<JointGap> {
        self.segments
            .windows(2)
            .enumerate()
            .map(|(i, _)| {
                let z = self.segments[i].hi;
                JointGap {
                    z,
                    value_gap: (self.eval_segment(i, z, 0) - self.eval_segment(i + 1, z, 0)).abs(),
                    slope_gap: (self.eval_segment(i, z, 1) - self.eval_segment(i + 1, z, 1)).abs(),
                }
            })
            .collect()
    }

    /// Rows `(z, v, v′, v″, u*)` on a uniform grid of `n ≥ 2` points over
    /// `[0, z_max]`.
    pub fn table(&self, z_max: f64, n: usize) -> Vec<[f64; 5]> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let z = z_max * i as f64 / (n - 1) as f64;
                let k = self.segment_index(z);
                [
                    z,
                    self.eval_segment(k, z, 0),
                    self.eval_segment(k, z, 1),
                    self.eval_segment(k, z, 2),
                    self.optimal_rate(z),
                ]
            })
            .collect()
    }

    /// Default plotting range `z_g + 10/θ2(u0)`.
    pub fn default_z_max(&self) -> f64 {
        let e = exponents_unchecked(&self.params, self.params.u0());
        self.z_g + 10.0 / e.theta2
    }

    /// Copy with one growing-exponential coefficient scaled. Diagnostic hook
    /// for checking that residual reports notice a wrong solution.
    pub fn with_scaled_coef_a(&self, index: usize, factor: f64) -> Self {
        let mut out = self.clone();
        out.segments[index].coef_a *= factor;
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solved value function serializes")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(beta: f64) -> ModelParams {
        ModelParams::new(3.0, 2.0, 0.2, 5.0, 3.0, beta).unwrap()
    }

    #[test]
    fn dispatch_follows_regime() {
        let dd = solve(&base(1.0)).unwrap();
        assert_eq!(dd.regime.tag, RegimeTag::DividendDominated);
        assert_eq!((dd.z_f, dd.z_g), (5.0, 5.0));
        assert_eq!(dd.segments.len(), 2);

        let ds = solve(&base(0.5)).unwrap();
        assert_eq!(ds.regime.tag, RegimeTag::DrawdownSensitive);
        assert!(0.0 < ds.z_f && ds.z_f < 5.0 && 5.0 < ds.z_g);
        let kinds: Vec<_> = ds.segments.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            [SegmentKind::FBar, SegmentKind::FUnder, SegmentKind::GUnder, SegmentKind::GBar]
        );
    }

    #[test]
    fn evaluate_boundary_values() {
        for beta in [1.0, 0.5] {
            let v = solve(&base(beta)).unwrap();
            assert!(v.evaluate(0.0, 1).unwrap().abs() < 1e-12);
            assert!((v.evaluate(5.0, 0).unwrap() - v.c).abs() < 1e-12 * v.c.abs().max(1.0));
            assert!(matches!(v.evaluate(-1e-3, 0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn second_derivative_at_d_is_left_limit() {
        let v = solve(&base(1.0)).unwrap();
        let left = v.eval_segment(0, 5.0, 2);
        let right = v.eval_segment(1, 5.0, 2);
        assert_eq!(v.evaluate(5.0, 2).unwrap(), left);
        // The penalty switches on at d, so v″ jumps by 2/σ².
        assert!(((right - left) - 2.0 / 4.0).abs() < 1e-10);
    }

    #[test]
    fn first_derivative_matches_central_difference() {
        let h = 1e-6;
        for beta in [1.0, 0.5] {
            let v = solve(&base(beta)).unwrap();
            for i in 1..200 {
                let z = 0.1 * i as f64;
                let fd = (v.value(z + h).unwrap() - v.value(z - h).unwrap()) / (2.0 * h);
                assert!((fd - v.evaluate(z, 1).unwrap()).abs() < 1e-6, "z = {z}");
            }
        }
    }

    #[test]
    fn optimal_rate_examples() {
        let dd = solve(&base(1.0)).unwrap();
        for z in [0.0, 2.0, 5.0, 7.0, 100.0] {
            assert_eq!(dd.optimal_rate(z), 3.0);
        }
        let ds = solve(&base(0.5)).unwrap();
        assert_eq!(ds.optimal_rate(0.0), 3.0);
        assert_eq!(ds.optimal_rate(0.5 * (ds.z_f + 5.0)), 0.0);
        assert_eq!(ds.optimal_rate(ds.z_g), 3.0);
        assert_eq!(ds.optimal_rate(ds.z_g + 1.0), 3.0);
    }

    #[test]
    fn optimal_rate_agrees_with_derivative_sign() {
        let ds = solve(&base(0.5)).unwrap();
        for i in 0..3000 {
            let z = 0.01 * i as f64;
            if (z - ds.z_f).abs() < 1e-6 || (z - ds.z_g).abs() < 1e-6 {
                continue;
            }
            let slope = ds.evaluate(z, 1).unwrap();
            let by_sign = if slope >= -0.5 - 1e-9 { 3.0 } else { 0.0 };
            assert_eq!(ds.optimal_rate(z), by_sign, "z = {z}");
        }
    }

    #[test]
    fn json_layout_and_round_trip() {
        let v = solve(&base(0.5)).unwrap();
        let json = v.to_json();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["params", "regime", "zeta", "xi1", "xi2", "C", "z_f", "z_g", "segments"] {
            assert!(doc.get(key).is_some(), "missing {key}");
        }
        for key in ["kind", "lo", "hi", "rate", "offset", "coefA", "coefB", "anchor"] {
            assert!(doc["segments"][0].get(key).is_some(), "missing segment field {key}");
        }
        assert!(doc["segments"][3]["hi"].is_null());
        let back = SolvedValueFunction::from_json(&json).unwrap();
        assert_eq!(back, v);
    }
}
