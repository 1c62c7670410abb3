#![allow(dead_code)]

pub mod fd;

use drawdown_control::model::{zeta, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn base(beta: f64) -> ModelParams {
    ModelParams::new(3.0, 2.0, 0.2, 5.0, 3.0, beta).unwrap()
}

/// Random parameters with `β = ratio·ζ`.
pub fn params_with_ratio(mu: f64, sigma: f64, r: f64, d: f64, u0: f64, ratio: f64) -> ModelParams {
    let p = ModelParams::new(mu, sigma, r, d, u0, 1.0).unwrap();
    let z = zeta(&p);
    p.with_beta(ratio * z).unwrap()
}

pub enum Side {
    BelowZeta,
    AboveZeta,
}

/// Deterministic randomized parameter sets for one regime.
pub fn random_params(seed: u64, count: usize, side: Side) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mu = rng.random_range(-1.0..4.0);
            let sigma = rng.random_range(0.5..3.0);
            let r = rng.random_range(0.05..0.5);
            let d = rng.random_range(0.5..6.0);
            let u0 = rng.random_range(0.3..6.0);
            let ratio = match side {
                Side::BelowZeta => rng.random_range(0.05..0.98),
                Side::AboveZeta => rng.random_range(1.0..3.0),
            };
            params_with_ratio(mu, sigma, r, d, u0, ratio)
        })
        .collect()
}

/// Grid on `[0, z_g + 20]` shared by the structural checks.
pub fn dense_grid(z_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| z_max * i as f64 / (n - 1) as f64).collect()
}
