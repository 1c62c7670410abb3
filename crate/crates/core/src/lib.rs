//! Optimal dividend payout under a drawdown penalty.
//!
//! A company's surplus follows a drifted Brownian motion and pays dividends
//! at a bounded rate `U(t) ∈ [0, u0]`. The objective trades off discounted
//! dividends against the discounted time the drawdown (distance below the
//! running maximum) spends beyond a critical level `d`.
//!
//! * [`model`] validates parameters and computes the characteristic exponents
//!   and the regime thresholds `ζ`, `ξ1`, `ξ2`.
//! * [`solver`] builds the exact value function and the optimal thresholds
//!   `z_f ≤ d ≤ z_g`, and checks it against the HJB equation.
//! * [`simulator`] runs Monte Carlo on the controlled drawdown to validate the
//!   solver, with rayon parallelism behind the `parallel` feature.
//!
//! ```
//! use drawdown_control::{model::ModelParams, solver::solve};
//!
//! let p = ModelParams::new(3.0, 2.0, 0.2, 5.0, 3.0, 0.5).unwrap();
//! let v = solve(&p).unwrap();
//! assert!(v.z_f < p.d() && p.d() < v.z_g);
//! ```

pub mod error;
pub mod model;
pub mod roots;
pub mod simulator;
pub mod solver;

pub use error::{Error, Result};
pub use model::{ModelParams, Regime, RegimeTag};
pub use simulator::{McEstimate, SimConfig, StrategySpec};
pub use solver::{solve, SolvedValueFunction};
