use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::Exponents;

/// Which of the four ODE solution families a segment belongs to.
///
/// `FBar`/`GBar` pay at the maximal rate, `FUnder`/`GUnder` pay nothing.
/// The `F*` kinds live on `[0, d]` (no penalty), the `G*` kinds on `(d, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentKind {
    FBar,
    FUnder,
    GUnder,
    GBar,
}

/// One exponential piece of the value function:
/// `v(z) = offset + coefA·e^{θ1(rate)(z − anchor)} + coefB·e^{−θ2(rate)(z − anchor)}`
/// on `(lo, hi]` (the first segment also owns `lo = 0`).
///
/// The anchor is one end of the segment: the left end when `θ1 ≤ θ2`, else
/// the right end. Inside the segment no exponential then exceeds
/// `e^{min(θ1, θ2)·(hi − lo)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub lo: f64,
    #[serde(serialize_with = "ser_upper", deserialize_with = "de_upper")]
    pub hi: f64,
    pub rate: f64,
    pub offset: f64,
    #[serde(rename = "coefA")]
    pub coef_a: f64,
    #[serde(rename = "coefB")]
    pub coef_b: f64,
    pub anchor: f64,
}

// JSON has no infinity; the unbounded last segment stores `hi` as null.
fn ser_upper<S: Serializer>(hi: &f64, s: S) -> Result<S::Ok, S::Error> {
    if hi.is_finite() {
        s.serialize_f64(*hi)
    } else {
        s.serialize_none()
    }
}

fn de_upper<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// A linear condition on a segment at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Condition {
    Value { z: f64, target: f64 },
    Slope { z: f64, target: f64 },
}

impl Segment {
    /// Segment on `(lo, hi]` with the coefficients fixed by two conditions.
    pub(crate) fn fit(
        kind: SegmentKind,
        (lo, hi): (f64, f64),
        exps: &Exponents,
        offset: f64,
        conditions: [Condition; 2],
    ) -> Self {
        let (t1, t2) = (exps.theta1, exps.theta2);
        let anchor = if t1 <= t2 { lo } else { hi };
        let row = |c: Condition| match c {
            Condition::Value { z, target } => {
                let t = z - anchor;
                ((t1 * t).exp(), (-t2 * t).exp(), target - offset)
            }
            Condition::Slope { z, target } => {
                let t = z - anchor;
                (t1 * (t1 * t).exp(), -t2 * (-t2 * t).exp(), target)
            }
        };
        let (a1, b1, y1) = row(conditions[0]);
        let (a2, b2, y2) = row(conditions[1]);
        let det = a1 * b2 - a2 * b1;
        Segment {
            kind,
            lo,
            hi,
            rate: exps.u,
            offset,
            coef_a: (y1 * b2 - y2 * b1) / det,
            coef_b: (a1 * y2 - a2 * y1) / det,
            anchor,
        }
    }

    /// `v`, `v′` or `v″` at `z` for the exponents matching `self.rate`.
    pub fn eval(&self, exps: &Exponents, z: f64, order: u8) -> f64 {
        let t = z - self.anchor;
        let grow = if self.coef_a == 0.0 {
            0.0
        } else {
            self.coef_a * (exps.theta1 * t).exp()
        };
        let decay = if self.coef_b == 0.0 {
            0.0
        } else {
            self.coef_b * (-exps.theta2 * t).exp()
        };
        match order {
            0 => self.offset + grow + decay,
            1 => exps.theta1 * grow - exps.theta2 * decay,
            _ => exps.theta1 * exps.theta1 * grow + exps.theta2 * exps.theta2 * decay,
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        z <= self.hi
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.offset.is_finite() && self.coef_a.is_finite() && self.coef_b.is_finite()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbounded_segment_round_trips_through_null() {
        let seg = Segment {
            kind: SegmentKind::GBar,
            lo: 5.0,
            hi: f64::INFINITY,
            rate: 3.0,
            offset: 10.0,
            coef_a: 0.0,
            coef_b: 1.5,
            anchor: 5.0,
        };
        let json = serde_json::to_string(&seg).unwrap();
        assert!(json.contains(r#""hi":null"#));
        assert!(json.contains(r#""coefA":0.0"#));
        let back: Segment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seg);
    }

    #[test]
    fn fit_meets_both_conditions_at_either_anchor() {
        for (t1, t2) in [(0.5, 3.0), (3.0, 0.5)] {
            let e = Exponents { u: 1.0, theta1: t1, theta2: t2 };
            let seg = Segment::fit(
                SegmentKind::GUnder,
                (1.0, 40.0),
                &e,
                -2.0,
                [
                    Condition::Value { z: 1.0, target: 0.7 },
                    Condition::Slope { z: 40.0, target: -0.3 },
                ],
            );
            assert_eq!(seg.anchor, if t1 < t2 { 1.0 } else { 40.0 });
            assert!((seg.eval(&e, 1.0, 0) - 0.7).abs() < 1e-14);
            assert!((seg.eval(&e, 40.0, 1) + 0.3).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_follow_exponents() {
        let seg = Segment {
            kind: SegmentKind::FBar,
            lo: 0.0,
            hi: 1.0,
            rate: 0.0,
            offset: 2.0,
            coef_a: 0.5,
            coef_b: -0.25,
            anchor: 0.0,
        };
        let e = Exponents { u: 0.0, theta1: 2.0, theta2: 3.0 };
        let z = 0.4f64;
        let ga = 0.5 * (2.0 * z).exp();
        let gb = -0.25 * (-3.0 * z).exp();
        assert!((seg.eval(&e, z, 0) - (2.0 + ga + gb)).abs() < 1e-15);
        assert!((seg.eval(&e, z, 1) - (2.0 * ga - 3.0 * gb)).abs() < 1e-15);
        assert!((seg.eval(&e, z, 2) - (4.0 * ga + 9.0 * gb)).abs() < 1e-15);
    }
}
