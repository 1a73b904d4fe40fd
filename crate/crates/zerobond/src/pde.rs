//! Feynman-Kac finite-difference oracle.
//!
//! Prices are conditional expectations of discounted terminal payoffs, so
//! they also solve the backward parabolic equation
//! `V_t + (alpha1 - alpha2 r) V_r + 0.5 (beta1 + beta2 r) V_rr - r V = 0`
//! with `V(r, T) = H(r)`. This module discretizes that equation with
//! centered space differences and Crank-Nicolson time stepping (two
//! fully-implicit Rannacher start-up steps damp kinked payoffs back to
//! second-order convergence) and re-prices bonds and options on a rate
//! grid, entirely independent of the closed forms and the Monte Carlo
//! route.
//!
//! The rate domain is truncated at eight standard deviations of the
//! terminal rate distribution, where Gaussian tails contribute less than
//! 1e-15; the boundary condition is zero second derivative (linearity),
//! which needs no model-specific formula.

use crate::affine::bond_exponent;
use crate::math::interp_cubic;
use crate::model::{GenericAffine, MarketState, ModelParams, OptionKind, OptionSpec, PriceEstimate};
use crate::{Error, Result};

/// Spatial/temporal resolution and domain of one PDE solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeGrid {
    pub r_min: f64,
    pub r_max: f64,
    /// Spatial nodes; must be odd and at least 3.
    pub n_r: usize,
    pub n_t: usize,
    /// Implicitness weight: 0.5 is Crank-Nicolson, 1.0 fully implicit.
    pub weight: f64,
}

impl PdeGrid {
    /// Default-resolution grid whose rate domain covers the terminal rate
    /// distribution out to eight standard deviations.
    pub fn auto(params: &ModelParams, state: &MarketState, horizon: f64) -> Self {
        let g = params.to_generic();
        let tau = (horizon - state.t).max(1e-6);
        let (mean_t, var) = if g.alpha2 > 1e-12 {
            let kappa = g.alpha2;
            let theta = g.alpha1 / kappa;
            let mean_t = theta + (state.r - theta) * (-kappa * tau).exp();
            let level = state.r.max(theta).max(mean_t);
            let s2 = (g.beta1 + g.beta2 * level).max(g.beta1).max(0.0);
            (mean_t, s2 * (1.0 - (-2.0 * kappa * tau).exp()) / (2.0 * kappa))
        } else {
            let mean_t = state.r + g.alpha1 * tau;
            let s2 = (g.beta1 + g.beta2 * state.r.max(mean_t)).max(g.beta1).max(0.0);
            (mean_t, s2 * tau)
        };
        let band = (8.0 * var.sqrt()).max(0.01);
        PdeGrid {
            r_min: state.r.min(mean_t) - band,
            r_max: state.r.max(mean_t) + band,
            n_r: 801,
            n_t: 2000,
            weight: 0.5,
        }
    }

    /// Same domain at a different resolution; `n_r` is rounded up to odd.
    pub fn with_resolution(mut self, n_r: usize, n_t: usize) -> Self {
        self.n_r = if n_r.is_multiple_of(2) { n_r + 1 } else { n_r };
        self.n_t = n_t;
        self
    }

    fn check(&self) -> Result<()> {
        let mut report = crate::model::ValidationReport::default();
        if !(self.r_min < self.r_max) {
            report.push("r_min must be below r_max");
        }
        if self.n_r < 3 || self.n_r.is_multiple_of(2) {
            report.push("n_r must be odd and at least 3");
        }
        if self.n_t < 1 {
            report.push("n_t must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.weight) {
            report.push("scheme weight must lie in [0, 1]");
        }
        report.into_result()
    }
}

/// Time-sampled value surface; `values[j]` is the solution at `times[j]` on
/// the `rates` grid.
#[derive(Debug, Clone)]
pub struct Surface {
    pub times: Vec<f64>,
    pub rates: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Tridiagonal rows of the spatial operator `L`.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

fn build_operator(g: &GenericAffine, rates: &[f64], dr: f64) -> Operator {
    let n = rates.len();
    let mut op = Operator {
        lower: vec![0.0; n],
        diag: vec![0.0; n],
        upper: vec![0.0; n],
    };
    for (i, &r) in rates.iter().enumerate() {
        let mu = g.alpha1 - g.alpha2 * r;
        let s2 = (g.beta1 + g.beta2 * r).max(0.0);
        if i == 0 {
            // linearity boundary: V_rr = 0, one-sided V_r
            op.diag[0] = -mu / dr - r;
            op.upper[0] = mu / dr;
        } else if i == n - 1 {
            op.diag[n - 1] = mu / dr - r;
            op.lower[n - 1] = -mu / dr;
        } else {
            let diff = 0.5 * s2 / (dr * dr);
            let conv = 0.5 * mu / dr;
            op.lower[i] = diff - conv;
            op.diag[i] = -2.0 * diff - r;
            op.upper[i] = diff + conv;
        }
    }
    op
}

/// Thomas algorithm; the matrices here are diagonally dominant on the
/// default grids, but the pivot is still guarded.
fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(Error::TridiagonalFailure(format!("pivot {pivot} at row 0")));
    }
    rhs[0] /= pivot;
    for i in 1..n {
        scratch[i] = upper[i - 1] / pivot;
        pivot = diag[i] - lower[i] * scratch[i];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(Error::TridiagonalFailure(format!("pivot {pivot} at row {i}")));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

/// One backward step with implicitness `w`: `(I - w dt L) V = (I + (1-w) dt L) V_next`.
fn step_back(
    op: &Operator,
    v_next: &[f64],
    dt: f64,
    w: f64,
    v: &mut [f64],
    scratch: &mut [f64],
    lhs: &mut (Vec<f64>, Vec<f64>, Vec<f64>),
) -> Result<()> {
    let n = v_next.len();
    let explicit = (1.0 - w) * dt;
    for i in 0..n {
        let mut rhs = (1.0 + explicit * op.diag[i]) * v_next[i];
        if i > 0 {
            rhs += explicit * op.lower[i] * v_next[i - 1];
        }
        if i + 1 < n {
            rhs += explicit * op.upper[i] * v_next[i + 1];
        }
        v[i] = rhs;
        lhs.0[i] = -w * dt * op.lower[i];
        lhs.1[i] = 1.0 - w * dt * op.diag[i];
        lhs.2[i] = -w * dt * op.upper[i];
    }
    solve_tridiagonal(&lhs.0, &lhs.1, &lhs.2, v, scratch)
}

/// Backward solve from `T` to `t`; returns the solution at every snapshot
/// stride (at most ~200 time levels) with `times` ascending, so
/// `values[0]` is the time-`t` level.
pub fn solve_fk(
    params: &GenericAffine,
    payoff: &dyn Fn(f64) -> f64,
    t: f64,
    expiry: f64,
    grid: &PdeGrid,
) -> Result<Surface> {
    crate::model::ModelParams::Affine(*params).check().into_result()?;
    grid.check()?;
    if !(expiry >= t) {
        return Err(Error::invalid("expiry must be >= t"));
    }
    let n = grid.n_r;
    let dr = (grid.r_max - grid.r_min) / (n - 1) as f64;
    let rates: Vec<f64> = (0..n).map(|i| grid.r_min + i as f64 * dr).collect();
    let dt = (expiry - t) / grid.n_t as f64;
    let op = build_operator(params, &rates, dr);

    let mut v: Vec<f64> = rates.iter().map(|&r| payoff(r)).collect();
    let stride = grid.n_t.div_ceil(200).max(1);
    let mut times = vec![expiry];
    let mut values = vec![v.clone()];

    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut lhs = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for step in 1..=grid.n_t {
        // Rannacher start: two fully-implicit steps before Crank-Nicolson
        let w = if step <= 2 { 1.0 } else { grid.weight };
        step_back(&op, &v, dt, w, &mut next, &mut scratch, &mut lhs)?;
        std::mem::swap(&mut v, &mut next);
        if step.is_multiple_of(stride) || step == grid.n_t {
            times.push(expiry - step as f64 * dt);
            values.push(v.clone());
        }
    }
    times.reverse();
    values.reverse();
    Ok(Surface { times, rates, values })
}

fn value_at(surface: &Surface, r: f64) -> Result<f64> {
    let (lo, hi) = (surface.rates[0], *surface.rates.last().unwrap());
    if r < lo || r > hi {
        return Err(Error::RateOutsideGrid { r, r_min: lo, r_max: hi });
    }
    Ok(interp_cubic(&surface.rates, &surface.values[0], r))
}

fn price_with_richardson(
    params: &GenericAffine,
    payoff: &dyn Fn(f64) -> f64,
    state: &MarketState,
    expiry: f64,
    grid: &PdeGrid,
) -> Result<PriceEstimate> {
    let fine = solve_fk(params, payoff, state.t, expiry, grid)?;
    let value = value_at(&fine, state.r)?;
    // second-order scheme: halving both resolutions scales the error by ~4
    let coarse_grid = grid.with_resolution((grid.n_r - 1) / 2 + 1, (grid.n_t / 2).max(1));
    let coarse = solve_fk(params, payoff, state.t, expiry, &coarse_grid)?;
    let uncertainty = (value - value_at(&coarse, state.r)?).abs() / 3.0;
    Ok(PriceEstimate { value, uncertainty })
}

/// Bond price by solving the pricing PDE with terminal payoff `H = 1`.
pub fn pde_bond_price(
    params: &ModelParams,
    state: &MarketState,
    maturity: f64,
    grid: &PdeGrid,
) -> Result<PriceEstimate> {
    params.check().into_result()?;
    if maturity < state.t {
        return Err(Error::invalid("maturity before valuation time"));
    }
    if maturity == state.t {
        return Ok(PriceEstimate::exact(1.0));
    }
    price_with_richardson(&params.to_generic(), &|_| 1.0, state, maturity, grid)
}

/// Option price by a single risk-neutral solve with terminal payoff
/// `max(+/-(B(r, T; S) - K), 0)`.
pub fn pde_option_price(
    params: &ModelParams,
    state: &MarketState,
    spec: &OptionSpec,
    grid: &PdeGrid,
) -> Result<PriceEstimate> {
    let mut report = params.check();
    report.extend(spec.check(state.t));
    report.into_result()?;
    let (a, b) = bond_exponent(params, spec.bond_maturity - spec.expiry)?;
    let (strike, kind) = (spec.strike, spec.kind);
    let payoff = move |r: f64| {
        let bond = (-a - r * b).exp();
        match kind {
            OptionKind::Call => (bond - strike).max(0.0),
            OptionKind::Put => (strike - bond).max(0.0),
        }
    };
    price_with_richardson(&params.to_generic(), &payoff, state, spec.expiry, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form;
    use crate::model::GenericAffine;

    fn merton() -> ModelParams {
        ModelParams::Merton { phi: 0.02, sigma: 0.03 }
    }

    fn vasicek() -> ModelParams {
        ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 }
    }

    #[test]
    fn undiscounted_constant_payoff_stays_one() {
        // near-zero rates and volatility: discounting is negligible
        let g = GenericAffine { alpha1: 0.0, alpha2: 0.0, beta1: 1e-12, beta2: 0.0 };
        let grid = PdeGrid {
            r_min: -0.01,
            r_max: 0.01,
            n_r: 201,
            n_t: 200,
            weight: 0.5,
        };
        let surface = solve_fk(&g, &|_| 1.0, 0.0, 5.0, &grid).unwrap();
        let v = value_at(&surface, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn vasicek_bond_matches_closed_form() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let grid = PdeGrid::auto(&vasicek(), &state, 5.0);
        let price = pde_bond_price(&vasicek(), &state, 5.0, &grid).unwrap();
        let closed = closed_form::bond_price(&vasicek(), &state, 5.0).unwrap();
        assert!((price.value - closed).abs() < 1e-4, "{} vs {closed}", price.value);
        assert!((price.value - 0.8176).abs() < 2e-4);
    }

    #[test]
    fn merton_bond_matches_closed_form() {
        let state = MarketState { t: 0.0, r: 0.05 };
        let grid = PdeGrid::auto(&merton(), &state, 5.0);
        let price = pde_bond_price(&merton(), &state, 5.0, &grid).unwrap();
        let closed = closed_form::bond_price(&merton(), &state, 5.0).unwrap();
        assert!((price.value - closed).abs() < 1e-4);
    }

    #[test]
    fn square_root_diffusion_agrees_with_ode_engine() {
        let g = GenericAffine { alpha1: 0.02, alpha2: 0.4, beta1: 0.0, beta2: 0.05 };
        let model = ModelParams::Affine(g);
        let state = MarketState { t: 0.0, r: 0.04 };
        let grid = PdeGrid::auto(&model, &state, 5.0);
        let pde = pde_bond_price(&model, &state, 5.0, &grid).unwrap();
        let coeffs = crate::affine::AffineCoefficients::solve(&g, 5.0, 1e-3).unwrap();
        let engine = coeffs.bond_price(&state, 5.0).unwrap();
        assert!(
            (pde.value - engine.value).abs() < 1e-4,
            "{} vs {}",
            pde.value,
            engine.value
        );
    }

    #[test]
    fn option_collapses_to_bond_for_vanishing_strike() {
        let state = MarketState { t: 0.0, r: 0.0 };
        let model = ModelParams::Vasicek { kappa: 0.4, theta: 0.02, sigma: 0.03 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 1e-10,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        let grid = PdeGrid::auto(&model, &state, 3.0);
        let opt = pde_option_price(&model, &state, &spec, &grid).unwrap();
        let bond_s = closed_form::bond_price(&model, &state, 5.0).unwrap();
        assert!((opt.value - bond_s).abs() < 1e-4);
    }

    #[test]
    fn figure_point_option_matches_closed_form() {
        let model = ModelParams::Vasicek { kappa: 0.4, theta: 0.02, sigma: 0.03 };
        let state = MarketState { t: 0.0, r: 0.0 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 0.8,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        let grid = PdeGrid::auto(&model, &state, 3.0);
        let pde = pde_option_price(&model, &state, &spec, &grid).unwrap();
        let closed = closed_form::call_price(&model, &state, &spec).unwrap();
        assert!((pde.value - closed).abs() < 1e-4, "{} vs {closed}", pde.value);
    }

    #[test]
    fn pde_put_call_parity() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let call_spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 0.8,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        let put_spec = OptionSpec { kind: OptionKind::Put, ..call_spec };
        let grid = PdeGrid::auto(&vasicek(), &state, 3.0);
        let call = pde_option_price(&vasicek(), &state, &call_spec, &grid).unwrap();
        let put = pde_option_price(&vasicek(), &state, &put_spec, &grid).unwrap();
        let bond_grid = PdeGrid::auto(&vasicek(), &state, 5.0);
        let bond_t = pde_bond_price(&vasicek(), &state, 3.0, &bond_grid).unwrap();
        let bond_s = pde_bond_price(&vasicek(), &state, 5.0, &bond_grid).unwrap();
        let residual = call.value - put.value - (bond_s.value - 0.8 * bond_t.value);
        assert!(residual.abs() < 1e-4, "parity residual {residual}");
    }

    #[test]
    fn nonnegative_payoff_stays_nonnegative() {
        let model = ModelParams::Vasicek { kappa: 0.4, theta: 0.02, sigma: 0.03 };
        let (a, b) = bond_exponent(&model, 2.0).unwrap();
        let payoff = move |r: f64| ((-a - r * b).exp() - 0.8f64).max(0.0);
        let grid = PdeGrid::auto(&model, &MarketState { t: 0.0, r: 0.0 }, 3.0);
        let surface = solve_fk(&model.to_generic(), &payoff, 0.0, 3.0, &grid).unwrap();
        let min = surface
            .values
            .iter()
            .flatten()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-12, "minimum {min}");
    }

    #[test]
    fn maturity_at_valuation_time_is_par() {
        let state = MarketState { t: 2.0, r: 0.03 };
        let grid = PdeGrid::auto(&vasicek(), &state, 2.0);
        let price = pde_bond_price(&vasicek(), &state, 2.0, &grid).unwrap();
        assert_eq!(price.value, 1.0);
        assert_eq!(price.uncertainty, 0.0);
    }

    #[test]
    fn rate_outside_grid_rejected() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let mut grid = PdeGrid::auto(&vasicek(), &state, 5.0);
        grid.r_min = 0.1;
        grid.r_max = 0.2;
        let err = pde_bond_price(&vasicek(), &state, 5.0, &grid).unwrap_err();
        assert!(matches!(err, Error::RateOutsideGrid { .. }));
    }

    #[test]
    fn grid_validation() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let grid = PdeGrid::auto(&vasicek(), &state, 5.0).with_resolution(10, 100);
        assert_eq!(grid.n_r, 11); // rounded up to odd
        let bad = PdeGrid { r_min: 0.1, r_max: 0.0, n_r: 11, n_t: 10, weight: 0.5 };
        assert!(bad.check().is_err());
    }
}
