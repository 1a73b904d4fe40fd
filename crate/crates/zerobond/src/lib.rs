//! One-factor affine short-rate models for zero-coupon bond and European
//! bond-option pricing.
//!
//! The short rate follows `dr = (α₁ − α₂·r) dt + √(β₁ + β₂·r) dW` under the
//! risk-neutral measure, which makes bond prices exponential-affine in the
//! current rate: `B = exp(−a(τ) − r·b(τ))`. Two named models have closed
//! forms — Merton (arithmetic Brownian short rate) and Vasicek
//! (Ornstein-Uhlenbeck) — and every closed-form number here can be
//! cross-checked against three independent routes:
//!
//! * [`affine`] — numeric Riccati/quadrature solution of the `(a, b)` ODE
//!   system, which also covers generic affine models with `β₂ ≠ 0`;
//! * [`mc`] — Monte Carlo on the discounted payoff, with an exact Gaussian
//!   scheme for the two named models and Euler fallback otherwise;
//! * [`pde`] — a Crank-Nicolson finite-difference solver for the
//!   Feynman-Kac equation `V_t + (α₁−α₂r)V_r + ½(β₁+β₂r)V_rr − rV = 0`.
//!
//! Closed forms live in [`closed_form`]; domain types and parameter
//! validation in [`model`].
//!
//! ```
//! use zerobond::model::{MarketState, ModelParams};
//! use zerobond::closed_form;
//!
//! let model = ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 };
//! let state = MarketState { t: 0.0, r: 0.03 };
//! let price = closed_form::bond_price(&model, &state, 5.0).unwrap();
//! assert!((price - 0.8176).abs() < 1e-4);
//! ```

// Validation guards are written `!(x <= y)` on purpose: the negated form
// also rejects NaN, which the un-negated comparison would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine;
pub mod closed_form;
// The erf/erfc coefficients are kept digit-for-digit as published.
#[allow(clippy::excessive_precision)]
pub mod math;
pub mod mc;
pub mod model;
pub mod pde;

#[cfg(doctest)]
mod book;

use model::ValidationReport;

/// Errors produced by pricing and solver operations.
///
/// Parameter validation is reported, not panicked: constructors and the
/// [`model::validate`] entry point collect every violated invariant into a
/// [`ValidationReport`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid inputs: {0}")]
    Invalid(ValidationReport),
    /// Requested tenor lies outside the solved coefficient grid; the engine
    /// never extrapolates.
    #[error("tenor {tau} outside solved horizon [0, {horizon}]")]
    OutsideHorizon { tau: f64, horizon: f64 },
    #[error("ODE blow-up: non-finite value at tau = {tau}")]
    OdeBlowUp { tau: f64 },
    #[error("coefficient grid too coarse: {points} points, need at least 3")]
    GridTooCoarse { points: usize },
    #[error("zero tenor: use the short rate limit instead of a spot rate")]
    ZeroTenor,
    #[error("bond price must be positive, got {price}")]
    NonPositivePrice { price: f64 },
    #[error("diffusion radicand beta1 + beta2*r = {radicand} is negative")]
    NegativeRadicand { radicand: f64 },
    #[error("no closed form for this model: {0}")]
    UnsupportedModel(String),
    #[error("exact sampling requires beta2 = 0: use the euler scheme")]
    ExactSchemeUnavailable,
    #[error("rate {r} outside PDE grid [{r_min}, {r_max}]")]
    RateOutsideGrid { r: f64, r_min: f64, r_max: f64 },
    #[error("tridiagonal solve failed: {0}")]
    TridiagonalFailure(String),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(ValidationReport::single(msg))
    }
}
