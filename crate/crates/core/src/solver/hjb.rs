use serde::{Deserialize, Serialize};

use super::SolvedValueFunction;

/// Uniform grid on `[0, z_max]` with the band `(d − ε, d + ε)` removed, since
/// `v″` jumps at `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_max: f64,
    pub n: usize,
    pub exclude_half_width: f64,
}

impl GridSpec {
    pub const DEFAULT_N: usize = 10_000;
    pub const DEFAULT_EXCLUDE: f64 = 1e-9;

    /// `n = 10⁴` points on `[0, z_g + 20]`.
    pub fn default_for(svf: &SolvedValueFunction) -> Self {
        Self {
            z_max: svf.z_g + 20.0,
            n: Self::DEFAULT_N,
            exclude_half_width: Self::DEFAULT_EXCLUDE,
        }
    }

    pub fn points(&self, d: f64) -> Vec<f64> {
        let n = self.n.max(2);
        (0..n)
            .map(|i| self.z_max * i as f64 / (n - 1) as f64)
            .filter(|z| (z - d).abs() >= self.exclude_half_width)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointGap {
    pub z: f64,
    pub value_gap: f64,
    pub slope_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjbResidualReport {
    pub grid: Vec<f64>,
    /// Pointwise `sup_u A^u v(z) − 1{z>d}` on the grid.
    pub residuals: Vec<f64>,
    /// Largest of the pointwise residuals, the joint gaps and `|v′(0)|`.
    pub max_abs_residual: f64,
    /// Location of `max_abs_residual`.
    pub argmax_z: f64,
    pub max_pointwise: f64,
    pub joint_gaps: Vec<JointGap>,
    /// `|v′(0)|`, which must vanish for the reflected drawdown.
    pub boundary_defect: f64,
    pub excluded: f64,
}

/// Checks the solved function against the HJB equation.
///
/// Each exponential segment solves its own linear ODE exactly whatever its
/// coefficients, so the pointwise residual only catches a wrong rate choice.
/// A wrong coefficient shows up instead as a value or slope jump at a joint,
/// or as a nonzero slope at the reflecting boundary; those are folded into
/// `max_abs_residual` alongside the pointwise maximum.
pub fn hjb_residual(svf: &SolvedValueFunction, grid: &GridSpec) -> HjbResidualReport {
    let p = &svf.params;
    let (r, mu, s2, beta, u0, d) = (
        p.r(),
        p.mu(),
        p.sigma() * p.sigma(),
        p.beta(),
        p.u0(),
        p.d(),
    );
    let points = grid.points(d);
    let residuals: Vec<f64> = points
        .iter()
        .map(|&z| {
            let k = svf.segment_index(z);
            let v = svf.eval_segment(k, z, 0);
            let v1 = svf.eval_segment(k, z, 1);
            let v2 = svf.eval_segment(k, z, 2);
            // Affine in u, so the supremum over [0, u0] sits at an endpoint.
            let control = ((beta + v1) * u0).max(0.0);
            let penalty = if z > d { 1.0 } else { 0.0 };
            -r * v - mu * v1 + 0.5 * s2 * v2 + control - penalty
        })
        .collect();

    let mut max_abs = 0.0;
    let mut argmax = 0.0;
    for (&z, &res) in points.iter().zip(&residuals) {
        if res.abs() > max_abs || res.is_nan() {
            max_abs = res.abs();
            argmax = z;
        }
    }
    let max_pointwise = max_abs;

    let joint_gaps = svf.pasting_gaps();
    for j in &joint_gaps {
        let worst = j.value_gap.max(j.slope_gap);
        if worst > max_abs {
            max_abs = worst;
            argmax = j.z;
        }
    }
    let boundary_defect = svf.eval_segment(0, 0.0, 1).abs();
    if boundary_defect > max_abs {
        max_abs = boundary_defect;
        argmax = 0.0;
    }

    HjbResidualReport {
        grid: points,
        residuals,
        max_abs_residual: max_abs,
        argmax_z: argmax,
        max_pointwise,
        joint_gaps,
        boundary_defect,
        excluded: grid.exclude_half_width,
    }
}
