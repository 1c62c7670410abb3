//! Finite-difference policy iteration for the same HJB equation. Shares no
//! code with the solver.

use drawdown_control::model::ModelParams;

pub struct FdSolution {
    pub h: f64,
    pub values: Vec<f64>,
    pub pays: Vec<bool>,
}

/// Thomas algorithm for a tridiagonal system.
fn tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Central differences, reflecting boundary at 0 and the limiting value at
/// `z_max`; the policy is improved until it stops changing.
pub fn policy_iteration(p: &ModelParams, z_max: f64, h: f64) -> FdSolution {
    let n = (z_max / h).round() as usize + 1;
    let (mu, s2, r, beta, u0, d) = (p.mu(), p.sigma().powi(2), p.r(), p.beta(), p.u0(), p.d());
    let mut pays = vec![true; n];
    let mut values = vec![0.0; n];
    for _ in 0..100 {
        let mut lo = vec![0.0; n];
        let mut di = vec![0.0; n];
        let mut up = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let z = i as f64 * h;
            let u = if pays[i] { u0 } else { 0.0 };
            // Cell-averaged indicator keeps the scheme second order across d.
            let pen = ((z + 0.5 * h - d) / h).clamp(0.0, 1.0);
            if i == 0 {
                di[0] = -s2 / (h * h) - r;
                up[0] = s2 / (h * h);
                rhs[0] = pen - beta * u;
            } else if i == n - 1 {
                di[i] = 1.0;
                rhs[i] = p.lower_bound();
            } else {
                let diff = 0.5 * s2 / (h * h);
                let adv = (mu - u) / (2.0 * h);
                lo[i] = diff + adv;
                di[i] = -2.0 * diff - r;
                up[i] = diff - adv;
                rhs[i] = pen - beta * u;
            }
        }
        values = tridiagonal(&lo, &di, &up, &rhs);
        let next: Vec<bool> = (0..n)
            .map(|i| {
                if i == 0 || i == n - 1 {
                    return true;
                }
                let slope = (values[i + 1] - values[i - 1]) / (2.0 * h);
                beta + slope >= 0.0
            })
            .collect();
        if next == pays {
            break;
        }
        pays = next;
    }
    FdSolution { h, values, pays }
}
