//! Numeric solution of the affine ODE system for any generic affine model.
//!
//! The bond price is `exp(-a(tau) - r b(tau))` where `b` solves the Riccati
//! equation `b' = 1 - alpha2*b - 0.5*beta2*b^2`, `b(0) = 0`, and
//! `a(tau) = alpha1 * int_0^tau b - 0.5*beta1 * int_0^tau b^2`. The solver
//! tabulates `b` with fixed-step classical RK4 and accumulates `a` by
//! cumulative Simpson quadrature over the same grid; off-grid tenors are
//! interpolated with a local cubic. No closed form is assumed, so the engine
//! doubles as an internal oracle for the Merton/Vasicek formulas and as the
//! only pricing route when `beta2 != 0`.
//!
//! The solver refuses to extrapolate beyond its horizon.

use crate::math::{integrate_parabola, interp_cubic};
use crate::model::{GenericAffine, MarketState, PriceEstimate};
use crate::{Error, Result};

/// Default ODE step in years. Tenors are short and the right-hand side is
/// smooth, so a fixed step keeps the solve deterministic and testable.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Tabulated `(a, b)` coefficient curves for one generic affine model.
#[derive(Debug, Clone)]
pub struct AffineCoefficients {
    params: GenericAffine,
    step: f64,
    grid: Vec<f64>,
    b_values: Vec<f64>,
    a_values: Vec<f64>,
    // Richardson (step-halving) estimates of the max-norm tabulation error.
    err_b: f64,
    err_a: f64,
}

fn riccati_rhs(params: &GenericAffine, b: f64) -> f64 {
    1.0 - params.alpha2 * b - 0.5 * params.beta2 * b * b
}

fn rk4_step(params: &GenericAffine, b: f64, h: f64) -> f64 {
    let k1 = riccati_rhs(params, b);
    let k2 = riccati_rhs(params, b + 0.5 * h * k1);
    let k3 = riccati_rhs(params, b + 0.5 * h * k2);
    let k4 = riccati_rhs(params, b + h * k3);
    b + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// RK4 tabulation of `b` on `0 = tau_0 < ... <= horizon`; the final step is
/// shortened when the horizon is not a step multiple.
fn solve_b_grid(params: &GenericAffine, horizon: f64, step: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n_full = (horizon / step + 1e-9).floor() as usize;
    let mut grid = Vec::with_capacity(n_full + 2);
    let mut b = Vec::with_capacity(n_full + 2);
    grid.push(0.0);
    b.push(0.0);
    for i in 1..=n_full {
        let tau = i as f64 * step;
        let next = rk4_step(params, b[i - 1], step);
        if !next.is_finite() {
            return Err(Error::OdeBlowUp { tau });
        }
        grid.push(tau);
        b.push(next);
    }
    let last = *grid.last().unwrap();
    if horizon - last > 1e-12 * horizon.max(1.0) {
        let next = rk4_step(params, *b.last().unwrap(), horizon - last);
        if !next.is_finite() {
            return Err(Error::OdeBlowUp { tau: horizon });
        }
        grid.push(horizon);
        b.push(next);
    }
    Ok((grid, b))
}

/// Cumulative integral of the tabulated values, fourth-order accurate:
/// composite Simpson on even nodes, with half-parabola increments filling in
/// the odd nodes and the (possibly shortened) final interval.
fn cumulative_simpson(xs: &[f64], fs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::GridTooCoarse { points: n });
    }
    let nodes = |a: usize, b: usize, c: usize| ([xs[a], xs[b], xs[c]], [fs[a], fs[b], fs[c]]);
    let mut acc = vec![0.0; n];
    for i in 1..n {
        acc[i] = if i % 2 == 0 {
            let (x, f) = nodes(i - 2, i - 1, i);
            acc[i - 2] + integrate_parabola(x, f, xs[i - 2], xs[i])
        } else if i + 1 < n {
            let (x, f) = nodes(i - 1, i, i + 1);
            acc[i - 1] + integrate_parabola(x, f, xs[i - 1], xs[i])
        } else {
            let (x, f) = nodes(i - 2, i - 1, i);
            acc[i - 1] + integrate_parabola(x, f, xs[i - 1], xs[i])
        };
    }
    Ok(acc)
}

impl AffineCoefficients {
    /// Solves the Riccati equation for `b` on `[0, horizon]` at fixed step.
    /// The `a` curve is left empty; fill it with [`compute_a`].
    ///
    /// [`compute_a`]: AffineCoefficients::compute_a
    pub fn solve_b(params: &GenericAffine, horizon: f64, step: f64) -> Result<Self> {
        let mut report = crate::model::ModelParams::Affine(*params).check();
        if !(horizon > 0.0) || !horizon.is_finite() {
            report.push("horizon must be positive");
        }
        if !(step > 0.0) || (horizon.is_finite() && step > horizon) {
            report.push("step must satisfy 0 < step <= horizon");
        }
        report.into_result()?;

        let (grid, b_values) = solve_b_grid(params, horizon, step)?;
        if grid.len() < 3 {
            return Err(Error::GridTooCoarse { points: grid.len() });
        }

        // step-halving reference on the shared nodes
        let (_, b_ref) = solve_b_grid(params, horizon, step * 0.5)?;
        let mut err_b: f64 = 0.0;
        for i in 0..grid.len().saturating_sub(1) {
            err_b = err_b.max((b_values[i] - b_ref[2 * i]).abs() / 15.0);
        }

        let coeffs = AffineCoefficients {
            params: *params,
            step,
            grid,
            b_values,
            a_values: Vec::new(),
            err_b,
            err_a: 0.0,
        };
        coeffs.check_b_invariants()?;
        Ok(coeffs)
    }

    /// Fills the `a` curve by cumulative Simpson quadrature of the solved
    /// `b` grid.
    pub fn compute_a(&mut self) -> Result<()> {
        let int_b = cumulative_simpson(&self.grid, &self.b_values)?;
        let sq: Vec<f64> = self.b_values.iter().map(|&b| b * b).collect();
        let int_b2 = cumulative_simpson(&self.grid, &sq)?;
        self.a_values = int_b
            .iter()
            .zip(&int_b2)
            .map(|(&i1, &i2)| self.params.alpha1 * i1 - 0.5 * self.params.beta1 * i2)
            .collect();

        // quadrature error estimate: redo on every other node and compare
        let coarse_idx: Vec<usize> = (0..self.grid.len()).step_by(2).collect();
        if coarse_idx.len() >= 3 {
            let cx: Vec<f64> = coarse_idx.iter().map(|&i| self.grid[i]).collect();
            let cb: Vec<f64> = coarse_idx.iter().map(|&i| self.b_values[i]).collect();
            let cb2: Vec<f64> = cb.iter().map(|&b| b * b).collect();
            let c1 = cumulative_simpson(&cx, &cb)?;
            let c2 = cumulative_simpson(&cx, &cb2)?;
            let mut err_a: f64 = 0.0;
            for (k, &i) in coarse_idx.iter().enumerate() {
                let coarse = self.params.alpha1 * c1[k] - 0.5 * self.params.beta1 * c2[k];
                err_a = err_a.max((self.a_values[i] - coarse).abs() / 15.0);
            }
            self.err_a = err_a;
        }
        Ok(())
    }

    /// Solves both coefficient curves.
    pub fn solve(params: &GenericAffine, horizon: f64, step: f64) -> Result<Self> {
        let mut coeffs = Self::solve_b(params, horizon, step)?;
        coeffs.compute_a()?;
        Ok(coeffs)
    }

    /// `b(t) > 0` for `t > 0`, and the model-dependent upper bound: `1/alpha2`
    /// when `alpha2 > 0, beta2 = 0`, else the positive root of
    /// `0.5*beta2*y^2 + alpha2*y - 1 = 0` when `beta2 > 0`.
    fn check_b_invariants(&self) -> Result<()> {
        for (i, (&tau, &b)) in self.grid.iter().zip(&self.b_values).enumerate() {
            if i > 0 && b <= 0.0 {
                return Err(Error::Domain(format!(
                    "solved b({tau}) = {b} violates positivity"
                )));
            }
        }
        let g = &self.params;
        let bound = if g.beta2 > 0.0 {
            let y0 = (-g.alpha2 + (g.alpha2 * g.alpha2 + 2.0 * g.beta2).sqrt()) / g.beta2;
            Some(y0)
        } else if g.alpha2 > 0.0 {
            Some(1.0 / g.alpha2)
        } else {
            None
        };
        if let Some(y0) = bound {
            for (&tau, &b) in self.grid.iter().zip(&self.b_values) {
                if b > y0 + 1e-12 {
                    return Err(Error::Domain(format!(
                        "solved b({tau}) = {b} exceeds bound {y0}"
                    )));
                }
            }
        }
        if g.alpha2 > 0.0 && g.beta2 == 0.0 {
            // b saturates at its bound, so ties at machine precision are fine
            for w in self.b_values.windows(2) {
                if w[1] < w[0] {
                    return Err(Error::Domain("solved b is not monotone".into()));
                }
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &GenericAffine {
        &self.params
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn horizon(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn check_tenor(&self, tau: f64) -> Result<f64> {
        let horizon = self.horizon();
        let tol = 1e-12 * horizon.max(1.0);
        if tau < -tol || tau > horizon + tol {
            return Err(Error::OutsideHorizon { tau, horizon });
        }
        Ok(tau.clamp(0.0, horizon))
    }

    /// `b(tau)` by cubic interpolation; no extrapolation.
    pub fn b(&self, tau: f64) -> Result<f64> {
        let tau = self.check_tenor(tau)?;
        Ok(interp_cubic(&self.grid, &self.b_values, tau))
    }

    /// `a(tau)`; requires [`compute_a`](AffineCoefficients::compute_a).
    pub fn a(&self, tau: f64) -> Result<f64> {
        if self.a_values.is_empty() {
            return Err(Error::Domain("a curve not computed yet".into()));
        }
        let tau = self.check_tenor(tau)?;
        Ok(interp_cubic(&self.grid, &self.a_values, tau))
    }

    /// Bond price `exp(-a(T-t) - r b(T-t))` with a propagated tabulation
    /// error bound as the uncertainty.
    pub fn bond_price(&self, state: &MarketState, maturity: f64) -> Result<PriceEstimate> {
        if maturity < state.t {
            return Err(Error::invalid(format!(
                "maturity {maturity} before valuation time {}",
                state.t
            )));
        }
        let tau = maturity - state.t;
        let value = (-self.a(tau)? - state.r * self.b(tau)?).exp();
        let uncertainty = value * (self.err_a + state.r.abs() * self.err_b);
        Ok(PriceEstimate { value, uncertainty })
    }

    /// Relative bond volatility `-b(T-t) * sqrt(beta1 + beta2*r)`.
    /// Non-positive by the sign convention of the forward-measure dynamics.
    pub fn bond_volatility(&self, state: &MarketState, maturity: f64) -> Result<f64> {
        let radicand = self.params.beta1 + self.params.beta2 * state.r;
        if radicand < 0.0 {
            return Err(Error::NegativeRadicand { radicand });
        }
        Ok(-self.b(maturity - state.t)? * radicand.sqrt())
    }

    /// Spot-rate curve as `(tenor, yield)` pairs. Tenors must be sorted and
    /// strictly positive.
    pub fn yield_curve(&self, state: &MarketState, tenors: &[f64]) -> Result<Vec<(f64, f64)>> {
        if tenors.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("tenors must be sorted"));
        }
        tenors
            .iter()
            .map(|&tau| {
                let price = self.bond_price(state, state.t + tau)?.value;
                Ok((tau, spot_rate(price, tau)?))
            })
            .collect()
    }
}

/// Affine exponent `(a(tenor), b(tenor))` for any model: closed forms for
/// Merton and Vasicek, a fresh ODE solve for generic affine parameters.
pub fn bond_exponent(params: &crate::model::ModelParams, tenor: f64) -> Result<(f64, f64)> {
    use crate::model::ModelParams;
    match params {
        ModelParams::Merton { .. } | ModelParams::Vasicek { .. } => {
            crate::closed_form::model_ab(params, tenor)
        }
        ModelParams::Affine(g) => {
            if tenor == 0.0 {
                return Ok((0.0, 0.0));
            }
            let step = DEFAULT_STEP.min(tenor / 8.0);
            let coeffs = AffineCoefficients::solve(g, tenor, step)?;
            Ok((coeffs.a(tenor)?, coeffs.b(tenor)?))
        }
    }
}

/// Continuously compounded spot rate `-ln(price) / tenor`.
///
/// A zero tenor is an error: the zero-tenor limit of the yield is the short
/// rate itself, which callers already hold.
pub fn spot_rate(price: f64, tenor: f64) -> Result<f64> {
    if !(price > 0.0) {
        return Err(Error::NonPositivePrice { price });
    }
    if tenor == 0.0 {
        return Err(Error::ZeroTenor);
    }
    Ok(-price.ln() / tenor)
}

/// Forward price `F = B_S / B_T` of the S-bond for delivery at T.
pub fn forward_price(bond_s: f64, bond_t: f64) -> Result<f64> {
    if bond_t == 0.0 {
        return Err(Error::NonPositivePrice { price: bond_t });
    }
    Ok(bond_s / bond_t)
}

/// Value `B_S - K * B_T` of a forward contract at delivery price `K`.
pub fn forward_value(bond_s: f64, bond_t: f64, strike: f64) -> f64 {
    bond_s - strike * bond_t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn merton() -> GenericAffine {
        ModelParams::Merton { phi: 0.02, sigma: 0.03 }.to_generic()
    }

    fn vasicek() -> GenericAffine {
        ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 }.to_generic()
    }

    #[test]
    fn b_is_linear_without_mean_reversion() {
        let coeffs = AffineCoefficients::solve_b(&merton(), 5.0, 1e-3).unwrap();
        assert!((coeffs.b(5.0).unwrap() - 5.0).abs() < 1e-12);
        assert!((coeffs.b(2.5).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn b_matches_vasicek_closed_form() {
        let coeffs = AffineCoefficients::solve_b(&vasicek(), 5.0, 1e-3).unwrap();
        let expected = (1.0 - (-0.4f64 * 5.0).exp()) / 0.4; // 2.161661935...
        assert!((expected - 2.161662).abs() < 1e-6);
        assert!((coeffs.b(5.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn b_square_root_diffusion_against_step_halved_reference() {
        let g = GenericAffine { alpha1: 0.02, alpha2: 0.4, beta1: 0.0009, beta2: 0.05 };
        let coarse = AffineCoefficients::solve_b(&g, 5.0, 1e-3).unwrap();
        let fine = AffineCoefficients::solve_b(&g, 5.0, 5e-4).unwrap();
        assert!((coarse.b(5.0).unwrap() - fine.b(5.0).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn a_matches_merton_closed_form() {
        let coeffs = AffineCoefficients::solve(&merton(), 5.0, 1e-3).unwrap();
        // 0.5*phi*t^2 - sigma^2 t^3 / 6 at t = 5
        assert!((coeffs.a(5.0).unwrap() - 0.231250).abs() < 1e-9);
        assert_eq!(coeffs.a(0.0).unwrap(), 0.0);
    }

    #[test]
    fn a_matches_vasicek_closed_form() {
        let coeffs = AffineCoefficients::solve(&vasicek(), 5.0, 1e-3).unwrap();
        let b = (1.0 - (-0.4f64 * 5.0).exp()) / 0.4;
        let expected = (0.05 - 0.0009 / (2.0 * 0.16)) * (5.0 - b) + 0.0009 / 1.6 * b * b;
        assert!((expected - 0.136563).abs() < 1e-6);
        assert!((coeffs.a(5.0).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn bond_price_at_own_maturity_is_one() {
        let coeffs = AffineCoefficients::solve(&vasicek(), 5.0, 1e-3).unwrap();
        let state = MarketState { t: 1.0, r: 0.03 };
        assert_eq!(coeffs.bond_price(&state, 1.0).unwrap().value, 1.0);
    }

    #[test]
    fn merton_bond_price_example() {
        let coeffs = AffineCoefficients::solve(&merton(), 5.0, 1e-3).unwrap();
        let state = MarketState { t: 0.0, r: 0.05 };
        let price = coeffs.bond_price(&state, 5.0).unwrap();
        let expected = (-0.25f64 + 0.01875 - 0.25).exp(); // 0.61805...
        assert!((price.value - expected).abs() < 1e-9);
        assert!((price.value - 0.6180).abs() < 1e-4);
        assert!(price.uncertainty >= 0.0);
    }

    #[test]
    fn no_extrapolation_beyond_horizon() {
        let coeffs = AffineCoefficients::solve(&vasicek(), 5.0, 1e-3).unwrap();
        let err = coeffs.b(5.5).unwrap_err();
        assert!(matches!(err, Error::OutsideHorizon { .. }));
    }

    #[test]
    fn spot_rate_examples() {
        assert!((spot_rate((-0.25f64).exp(), 5.0).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(spot_rate(1.0, 3.0).unwrap(), 0.0);
        assert!((spot_rate(0.6180, 5.0).unwrap() - 0.09625).abs() < 1e-4);
        assert!(matches!(spot_rate(1.0, 0.0), Err(Error::ZeroTenor)));
        assert!(matches!(spot_rate(-0.5, 1.0), Err(Error::NonPositivePrice { .. })));
    }

    #[test]
    fn vasicek_yield_converges_to_long_rate() {
        // y(tau) -> theta - sigma^2 / (2 kappa^2) as tau -> inf
        let coeffs = AffineCoefficients::solve(&vasicek(), 200.0, 1e-2).unwrap();
        let state = MarketState { t: 0.0, r: 0.03 };
        let curve = coeffs.yield_curve(&state, &[200.0]).unwrap();
        let limit = 0.05 - 0.0009 / (2.0 * 0.16);
        assert!((curve[0].1 - limit).abs() < 1e-3);
    }

    #[test]
    fn merton_curve_eventually_decreases() {
        let coeffs = AffineCoefficients::solve(&merton(), 120.0, 1e-2).unwrap();
        let state = MarketState { t: 0.0, r: 0.05 };
        let curve = coeffs.yield_curve(&state, &[60.0, 90.0, 120.0]).unwrap();
        assert!(curve[1].1 < curve[0].1);
        assert!(curve[2].1 < curve[1].1);
        assert!(curve[2].1 < 0.0); // dominated by the -sigma^2 t^2 term
    }

    #[test]
    fn bond_volatility_examples() {
        let coeffs = AffineCoefficients::solve(&merton(), 5.0, 1e-3).unwrap();
        let state = MarketState { t: 0.0, r: 0.05 };
        assert_eq!(coeffs.bond_volatility(&state, 0.0).unwrap(), 0.0);
        assert!((coeffs.bond_volatility(&state, 2.0).unwrap() + 0.06).abs() < 1e-10);

        let vcoeffs = AffineCoefficients::solve(&vasicek(), 5.0, 1e-3).unwrap();
        let vol = vcoeffs.bond_volatility(&state, 5.0).unwrap();
        assert!((vol + 0.03 * 2.161662).abs() < 1e-6);
    }

    #[test]
    fn forward_contract_identities() {
        assert_eq!(forward_price(0.9, 0.9).unwrap(), 1.0);
        assert!((forward_price(0.8, 0.9).unwrap() - 0.888889).abs() < 1e-6);
        let f = forward_price(0.8, 0.9).unwrap();
        assert!(forward_value(0.8, 0.9, f).abs() < 1e-15);
        assert_eq!(forward_value(0.8, 0.9, 0.0), 0.8);
        assert!((forward_value(0.8, 0.9, 0.85) - 0.035).abs() < 1e-15);
    }

    #[test]
    fn b_stays_below_riccati_root_with_beta2() {
        let g = GenericAffine { alpha1: 0.02, alpha2: 0.4, beta1: 0.0, beta2: 0.05 };
        let coeffs = AffineCoefficients::solve_b(&g, 60.0, 1e-3).unwrap();
        let y0 = (-0.4 + (0.16f64 + 0.1).sqrt()) / 0.05;
        assert!(coeffs.b(60.0).unwrap() < y0 + 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        let err = AffineCoefficients::solve(&merton(), 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::GridTooCoarse { .. }));
    }

    #[test]
    fn bond_price_decreasing_in_rate() {
        let coeffs = AffineCoefficients::solve(&vasicek(), 10.0, 1e-3).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..20 {
            let r = -0.05 + 0.01 * i as f64;
            let p = coeffs
                .bond_price(&MarketState { t: 0.0, r }, 7.0)
                .unwrap()
                .value;
            assert!(p < last);
            last = p;
        }
    }
}
