//! Analytic bond and European option prices for the Merton and Vasicek
//! models.
//!
//! Both models admit `B = exp(-a(tau) - r b(tau))` with explicit `(a, b)`,
//! and the forward price of the S-bond is a driftless geometric Brownian
//! motion under the T-forward measure, so calls price by a Black-style
//! formula `C = B_S N(d1) - K B_T N(d2)` with an integrated forward
//! volatility `v(t, T, S)`. Puts come from put-call parity.
//!
//! # The two Vasicek `v` variants
//!
//! The Vasicek forward-price volatility is
//! `sigma_fwd(u) = -sigma [b(S-u) - b(T-u)]`, and integrating its square over
//! `[t, T]` gives
//!
//! ```text
//! v^2 = sigma^2 / (2 kappa^3) * (1 - e^{-kappa (S-T)})^2 * (1 - e^{-2 kappa (T-t)})
//! ```
//!
//! A widely circulated variant instead reads
//! `v = sigma / kappa^{3/2} * (1 - e^{-kappa (S-t)}) * sqrt(1 - e^{-2 kappa (T-t)})`,
//! which disagrees with the defining integral (a factor of sqrt 2 and `S-t`
//! in place of `S-T`). The integral-derived value is the default and is the
//! one the Monte Carlo and PDE oracles confirm; the other is available as
//! [`VolFormula::Printed`] for comparison only.

use crate::math::norm_cdf;
use crate::model::{MarketState, ModelParams, OptionKind, OptionSpec};
use crate::{Error, Result};

/// Merton `(a, b)`: `a(tau) = phi tau^2 / 2 - sigma^2 tau^3 / 6`, `b(tau) = tau`.
pub fn merton_ab(phi: f64, sigma: f64, tau: f64) -> (f64, f64) {
    let a = 0.5 * phi * tau * tau - sigma * sigma * tau * tau * tau / 6.0;
    (a, tau)
}

/// Vasicek `(a, b)`: `b(tau) = (1 - e^{-kappa tau}) / kappa` and
/// `a(tau) = (theta - sigma^2/(2 kappa^2)) (tau - b) + sigma^2/(4 kappa) b^2`.
pub fn vasicek_ab(kappa: f64, theta: f64, sigma: f64, tau: f64) -> (f64, f64) {
    let b = (1.0 - (-kappa * tau).exp()) / kappa;
    let s2 = sigma * sigma;
    let a = (theta - s2 / (2.0 * kappa * kappa)) * (tau - b) + s2 / (4.0 * kappa) * b * b;
    (a, b)
}

/// Closed-form `(a, b)` for the model, or an error for generic affine
/// parameters.
pub fn model_ab(params: &ModelParams, tau: f64) -> Result<(f64, f64)> {
    match *params {
        ModelParams::Merton { phi, sigma } => Ok(merton_ab(phi, sigma, tau)),
        ModelParams::Vasicek { kappa, theta, sigma } => {
            if !(kappa > 0.0) {
                return Err(Error::invalid("kappa must be positive"));
            }
            Ok(vasicek_ab(kappa, theta, sigma, tau))
        }
        ModelParams::Affine(_) => Err(Error::UnsupportedModel(
            "generic affine has no closed form; use the affine engine".into(),
        )),
    }
}

/// Closed-form zero-coupon bond price `exp(-a(T-t) - r b(T-t))`.
pub fn bond_price(params: &ModelParams, state: &MarketState, maturity: f64) -> Result<f64> {
    Ok(log_bond_price(params, state, maturity)?.exp())
}

/// `ln B` computed directly from the affine exponent, which keeps the Black
/// d1/d2 inputs free of cancellation for deep in/out-of-the-money strikes.
fn log_bond_price(params: &ModelParams, state: &MarketState, maturity: f64) -> Result<f64> {
    if maturity < state.t {
        return Err(Error::invalid(format!(
            "maturity {maturity} before valuation time {}",
            state.t
        )));
    }
    let (a, b) = model_ab(params, maturity - state.t)?;
    Ok(-a - state.r * b)
}

/// Which Vasicek `v(t, T, S)` to use; see the module docs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolFormula {
    /// Integral of the squared forward-price volatility (the default; the
    /// Monte Carlo and PDE oracles confirm this one).
    #[default]
    Derived,
    /// The circulated closed-form variant; reproduced for comparison, known
    /// to be inconsistent with the defining integral.
    Printed,
}

/// Integrated forward-price volatility `v(t, T, S)` with the default
/// (integral-derived) formula.
pub fn integrated_vol(params: &ModelParams, t: f64, expiry: f64, bond_maturity: f64) -> Result<f64> {
    integrated_vol_with(params, t, expiry, bond_maturity, VolFormula::Derived)
}

pub fn integrated_vol_with(
    params: &ModelParams,
    t: f64,
    expiry: f64,
    bond_maturity: f64,
    formula: VolFormula,
) -> Result<f64> {
    if !(t <= expiry && expiry <= bond_maturity) {
        return Err(Error::invalid(format!(
            "need t <= T <= S, got t={t}, T={expiry}, S={bond_maturity}"
        )));
    }
    match *params {
        ModelParams::Merton { sigma, .. } => {
            Ok(sigma * (bond_maturity - expiry) * (expiry - t).sqrt())
        }
        ModelParams::Vasicek { kappa, sigma, .. } => {
            let decay_t = 1.0 - (-2.0 * kappa * (expiry - t)).exp();
            match formula {
                VolFormula::Derived => {
                    let gap = 1.0 - (-kappa * (bond_maturity - expiry)).exp();
                    Ok(sigma / kappa * gap * (decay_t / (2.0 * kappa)).sqrt())
                }
                VolFormula::Printed => {
                    let gap = 1.0 - (-kappa * (bond_maturity - t)).exp();
                    Ok(sigma / kappa.powf(1.5) * gap * decay_t.sqrt())
                }
            }
        }
        ModelParams::Affine(_) => Err(Error::UnsupportedModel(
            "integrated volatility needs a Merton or Vasicek model".into(),
        )),
    }
}

/// Inputs of the Black-style bond-option formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlackInputs {
    /// Price of the underlying bond `B_t^S`.
    pub bond_s: f64,
    /// Price of the expiry-maturity bond `B_t^T`.
    pub bond_t: f64,
    /// Strike `K > 0`.
    pub strike: f64,
    /// Integrated forward volatility `v(t, T, S) >= 0`.
    pub v: f64,
}

/// `C = B_S N(d1) - K B_T N(d2)`; the `v = 0` degenerate case returns the
/// intrinsic forward value `max(B_S - K B_T, 0)`.
pub fn black_call(inputs: &BlackInputs) -> Result<f64> {
    let mut report = crate::model::ValidationReport::default();
    if !(inputs.bond_s > 0.0) {
        report.push("bond_s must be positive");
    }
    if !(inputs.bond_t > 0.0) {
        report.push("bond_t must be positive");
    }
    if !(inputs.strike > 0.0) {
        report.push("strike must be positive");
    }
    if !(inputs.v >= 0.0) {
        report.push("v must be non-negative");
    }
    report.into_result()?;
    let log_m = inputs.bond_s.ln() - inputs.bond_t.ln() - inputs.strike.ln();
    Ok(black_call_from_logs(
        log_m,
        inputs.bond_s,
        inputs.bond_t,
        inputs.strike,
        inputs.v,
    ))
}

fn black_call_from_logs(log_m: f64, bond_s: f64, bond_t: f64, strike: f64, v: f64) -> f64 {
    if v == 0.0 {
        return (bond_s - strike * bond_t).max(0.0);
    }
    let d1 = log_m / v + 0.5 * v;
    let d2 = d1 - v;
    bond_s * norm_cdf(d1) - strike * bond_t * norm_cdf(d2)
}

/// Expectation `E[max(e^X - K, 0)]` for `X ~ N(m, s^2)`:
/// `e^{m + s^2/2} N((m - ln K)/s + s) - K N((m - ln K)/s)`, degenerating to
/// `max(e^m - K, 0)` at `s = 0`.
pub fn lognormal_call_expectation(m: f64, s: f64, strike: f64) -> Result<f64> {
    if !(strike > 0.0) {
        return Err(Error::invalid("strike must be positive"));
    }
    if !(s >= 0.0) {
        return Err(Error::invalid("s must be non-negative"));
    }
    if s == 0.0 {
        return Ok((m.exp() - strike).max(0.0));
    }
    let d = (m - strike.ln()) / s;
    Ok((m + 0.5 * s * s).exp() * norm_cdf(d + s) - strike * norm_cdf(d))
}

/// European call on the zero-coupon bond with the integral-derived `v`.
pub fn call_price(params: &ModelParams, state: &MarketState, spec: &OptionSpec) -> Result<f64> {
    call_price_with(params, state, spec, VolFormula::Derived)
}

pub fn call_price_with(
    params: &ModelParams,
    state: &MarketState,
    spec: &OptionSpec,
    formula: VolFormula,
) -> Result<f64> {
    let mut report = params.check();
    report.extend(spec.check(state.t));
    report.into_result()?;
    let log_bt = log_bond_price(params, state, spec.expiry)?;
    let log_bs = log_bond_price(params, state, spec.bond_maturity)?;
    let v = integrated_vol_with(params, state.t, spec.expiry, spec.bond_maturity, formula)?;
    let log_m = log_bs - log_bt - spec.strike.ln();
    Ok(black_call_from_logs(
        log_m,
        log_bs.exp(),
        log_bt.exp(),
        spec.strike,
        v,
    ))
}

/// European put via put-call parity `pi = C + K B_T - B_S`.
pub fn put_price(params: &ModelParams, state: &MarketState, spec: &OptionSpec) -> Result<f64> {
    put_price_with(params, state, spec, VolFormula::Derived)
}

pub fn put_price_with(
    params: &ModelParams,
    state: &MarketState,
    spec: &OptionSpec,
    formula: VolFormula,
) -> Result<f64> {
    let call = call_price_with(params, state, spec, formula)?;
    let bond_t = bond_price(params, state, spec.expiry)?;
    let bond_s = bond_price(params, state, spec.bond_maturity)?;
    Ok(call + spec.strike * bond_t - bond_s)
}

/// Price of the option as specified (call or put).
pub fn option_price(params: &ModelParams, state: &MarketState, spec: &OptionSpec) -> Result<f64> {
    option_price_with(params, state, spec, VolFormula::Derived)
}

pub fn option_price_with(
    params: &ModelParams,
    state: &MarketState,
    spec: &OptionSpec,
    formula: VolFormula,
) -> Result<f64> {
    match spec.kind {
        OptionKind::Call => call_price_with(params, state, spec, formula),
        OptionKind::Put => put_price_with(params, state, spec, formula),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OptionKind;

    fn merton() -> ModelParams {
        ModelParams::Merton { phi: 0.02, sigma: 0.03 }
    }

    fn vasicek() -> ModelParams {
        ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 }
    }

    #[test]
    fn merton_ab_examples() {
        assert_eq!(merton_ab(0.02, 0.03, 0.0), (0.0, 0.0));
        let (a, b) = merton_ab(0.02, 0.03, 5.0);
        assert!((a - 0.231250).abs() < 1e-12);
        assert_eq!(b, 5.0);
        let (a, b) = merton_ab(0.07, 0.0, 2.0);
        assert!((a - 2.0 * 0.07).abs() < 1e-15);
        assert_eq!(b, 2.0);
    }

    #[test]
    fn vasicek_ab_examples() {
        assert_eq!(vasicek_ab(0.4, 0.05, 0.03, 0.0), (0.0, 0.0));
        let (a, b) = vasicek_ab(0.4, 0.05, 0.03, 5.0);
        assert!((b - 2.161662).abs() < 1e-6);
        assert!((a - 0.136563).abs() < 1e-6);
        // large kappa: b -> 1/kappa -> 0 and a -> theta * tau
        let (a, b) = vasicek_ab(100.0, 0.05, 0.03, 2.0);
        assert!(b < 1e-2 + 1e-9);
        assert!((a - 0.05 * 2.0).abs() < 1e-2);
    }

    #[test]
    fn bond_price_examples() {
        let state = MarketState { t: 0.0, r: 0.05 };
        assert_eq!(bond_price(&merton(), &state, 0.0).unwrap(), 1.0);
        let p = bond_price(&merton(), &state, 5.0).unwrap();
        assert!((p - (-0.48125f64).exp()).abs() < 1e-15);
        assert!((p - 0.6180).abs() < 1e-4);

        let v = ModelParams::Vasicek { kappa: 0.4, theta: 0.0, sigma: 0.03 };
        let p = bond_price(&v, &MarketState { t: 0.0, r: 0.0 }, 5.0).unwrap();
        // convexity pushes the theta = 0 bond above par
        assert!((p - 1.00537).abs() < 1e-5);
        assert!(p > 1.0);
    }

    #[test]
    fn integrated_vol_examples() {
        assert_eq!(integrated_vol(&merton(), 0.0, 5.0, 5.0).unwrap(), 0.0);
        let v = integrated_vol(&merton(), 0.0, 3.0, 5.0).unwrap();
        assert!((v - 0.03 * 2.0 * 3.0f64.sqrt()).abs() < 1e-15);
        assert!((v - 0.103923).abs() < 1e-6);

        let v = integrated_vol(&vasicek(), 0.0, 3.0, 5.0).unwrap();
        assert!((v - 0.044031).abs() < 1e-6);

        let err = integrated_vol(&vasicek(), 0.0, 5.0, 3.0).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    /// Independent Simpson quadrature of the defining integral
    /// `v^2 = int_t^T sigma^2 (b(S-u) - b(T-u))^2 du`.
    #[test]
    fn vasicek_vol_matches_quadrature_oracle() {
        let (kappa, sigma) = (0.4, 0.03);
        let (t, expiry, s) = (0.0, 3.0, 5.0);
        let b = |tau: f64| (1.0 - (-kappa * tau).exp()) / kappa;
        let f = |u: f64| {
            let d = sigma * (b(s - u) - b(expiry - u));
            d * d
        };
        let n = 10_000;
        let h = (expiry - t) / n as f64;
        let mut acc = f(t) + f(expiry);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(t + i as f64 * h);
        }
        let v_oracle = (acc * h / 3.0).sqrt();
        let v = integrated_vol(&vasicek(), t, expiry, s).unwrap();
        assert!((v - v_oracle).abs() < 1e-9, "{v} vs {v_oracle}");
        // and the printed variant genuinely differs
        let printed =
            integrated_vol_with(&vasicek(), t, expiry, s, VolFormula::Printed).unwrap();
        assert!((printed - v_oracle).abs() > 0.01);
    }

    #[test]
    fn lognormal_expectation_examples() {
        // K -> 0: the whole expectation E[Y] = e^{m + s^2/2}
        let e = lognormal_call_expectation(0.0, 0.2, 1e-12).unwrap();
        assert!((e - 0.02f64.exp()).abs() < 1e-9);
        // s = 0: deterministic Y = 1
        assert_eq!(lognormal_call_expectation(0.0, 0.0, 0.5).unwrap(), 0.5);
    }

    /// Frozen from Simpson quadrature of the lognormal payoff density:
    /// int max(e^x - 1, 0) phi((x - m)/s)/s dx at m=0, s=0.2.
    #[test]
    fn lognormal_expectation_against_quadrature() {
        let (m, s, k) = (0.0, 0.2, 1.0f64);
        let f = |x: f64| (x.exp() - k).max(0.0) * crate::math::norm_pdf((x - m) / s) / s;
        let (lo, hi) = (k.ln(), m + 12.0 * s);
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
        }
        let oracle = acc * h / 3.0;
        let got = lognormal_call_expectation(m, s, k).unwrap();
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
        assert!((got - 0.090962).abs() < 1e-6);
    }

    #[test]
    fn call_tends_to_underlying_bond_for_vanishing_strike() {
        let state = MarketState { t: 0.0, r: 0.02 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 1e-12,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        let c = call_price(&vasicek(), &state, &spec).unwrap();
        let bs = bond_price(&vasicek(), &state, 5.0).unwrap();
        assert!((c - bs).abs() < 1e-10);
        let p = put_price(&vasicek(), &state, &spec).unwrap();
        assert!(p.abs() < 1e-10);
    }

    #[test]
    fn degenerate_v_returns_intrinsic_forward_value() {
        let theta0 = ModelParams::Vasicek { kappa: 0.4, theta: 0.0, sigma: 0.03 };
        let state = MarketState { t: 0.0, r: 0.0 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 0.8,
            expiry: 5.0,
            bond_maturity: 5.0,
        };
        let c = call_price(&theta0, &state, &spec).unwrap();
        let b5 = bond_price(&theta0, &state, 5.0).unwrap();
        assert!((c - 0.2 * b5).abs() < 1e-15);
        assert!((c - 0.2 * 1.00537).abs() < 1e-5);
    }

    #[test]
    fn parity_holds_to_round_off() {
        let state = MarketState { t: 0.0, r: 0.03 };
        for model in [merton(), vasicek()] {
            for strike in [0.5, 0.8, 0.95, 1.1] {
                let spec = OptionSpec {
                    kind: OptionKind::Call,
                    strike,
                    expiry: 3.0,
                    bond_maturity: 5.0,
                };
                let c = call_price(&model, &state, &spec).unwrap();
                let p = put_price(&model, &state, &spec).unwrap();
                let bt = bond_price(&model, &state, 3.0).unwrap();
                let bs = bond_price(&model, &state, 5.0).unwrap();
                assert!((c - p - (bs - strike * bt)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn call_bounds_and_monotonicity_in_strike() {
        let state = MarketState { t: 0.0, r: 0.01 };
        let mut last_call = f64::INFINITY;
        let mut last_put = 0.0;
        for i in 1..=40 {
            let strike = 0.05 * i as f64;
            let spec = OptionSpec {
                kind: OptionKind::Call,
                strike,
                expiry: 3.0,
                bond_maturity: 5.0,
            };
            let c = call_price(&vasicek(), &state, &spec).unwrap();
            let p = put_price(&vasicek(), &state, &spec).unwrap();
            let bt = bond_price(&vasicek(), &state, 3.0).unwrap();
            let bs = bond_price(&vasicek(), &state, 5.0).unwrap();
            assert!(c >= -1e-15 && c <= bs + 1e-15);
            assert!(p >= -1e-12 && p <= strike * bt + 1e-12);
            assert!(c <= last_call + 1e-15);
            assert!(p >= last_put - 1e-15);
            last_call = c;
            last_put = p;
        }
    }

    #[test]
    fn merton_vasicek_agree_as_mean_reversion_vanishes() {
        // kappa -> 0 with phi = kappa * theta fixed at 0
        let kappa = 1e-4;
        let v = ModelParams::Vasicek { kappa, theta: 0.0, sigma: 0.03 };
        let m = ModelParams::Merton { phi: 0.0, sigma: 0.03 };
        let state = MarketState { t: 0.0, r: 0.0 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 0.8,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        let cv = call_price(&v, &state, &spec).unwrap();
        let cm = call_price(&m, &state, &spec).unwrap();
        assert!((cv - cm).abs() < 1e-4, "{cv} vs {cm}");
    }

    #[test]
    fn generic_affine_rejected() {
        let g = ModelParams::Affine(crate::model::GenericAffine {
            alpha1: 0.02,
            alpha2: 0.4,
            beta1: 0.0009,
            beta2: 0.05,
        });
        let state = MarketState { t: 0.0, r: 0.03 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 0.8,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        assert!(matches!(
            call_price(&g, &state, &spec),
            Err(Error::UnsupportedModel(_))
        ));
    }
}
