//! Oracle validation suite: every closed-form price must be confirmed by
//! the generic affine engine, by Monte Carlo within three standard errors,
//! and by the Feynman-Kac PDE solver within its grid tolerance.

use std::fmt::Write as _;

use clap::ValueEnum;
use zerobond::affine::AffineCoefficients;
use zerobond::closed_form::{self, VolFormula};
use zerobond::mc::{mc_bond_price, mc_option_price, McConfig};
use zerobond::model::{MarketState, ModelParams, OptionKind, OptionSpec};
use zerobond::pde::{pde_bond_price, pde_option_price, PdeGrid};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Budget {
    /// 1e5 Monte Carlo paths, coarse PDE grids.
    Quick,
    /// 1e6 paths and the default fine grids.
    Full,
}

pub struct Report {
    pub text: String,
    pub total: usize,
    pub failed: usize,
    pub all_passed: bool,
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn mc_config(budget: Budget, seed: u64) -> McConfig {
    McConfig {
        paths: match budget {
            Budget::Quick => 100_000,
            Budget::Full => 1_000_000,
        },
        seed,
        ..McConfig::default()
    }
}

fn pde_grid(budget: Budget, params: &ModelParams, state: &MarketState, horizon: f64) -> PdeGrid {
    let grid = PdeGrid::auto(params, state, horizon);
    match budget {
        Budget::Quick => grid.with_resolution(401, 1000),
        Budget::Full => grid,
    }
}

fn merton_point() -> (ModelParams, MarketState) {
    (
        ModelParams::Merton { phi: 0.02, sigma: 0.03 },
        MarketState { t: 0.0, r: 0.05 },
    )
}

fn vasicek_point() -> (ModelParams, MarketState) {
    (
        ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 },
        MarketState { t: 0.0, r: 0.03 },
    )
}

/// The figure comparison point with `phi = kappa * theta`.
fn option_points() -> Vec<(&'static str, ModelParams)> {
    vec![
        ("merton", ModelParams::Merton { phi: 0.4 * 0.02, sigma: 0.03 }),
        ("vasicek", ModelParams::Vasicek { kappa: 0.4, theta: 0.02, sigma: 0.03 }),
    ]
}

fn figure_option_spec() -> (MarketState, OptionSpec) {
    (
        MarketState { t: 0.0, r: 0.0 },
        OptionSpec {
            kind: OptionKind::Call,
            strike: 0.8,
            expiry: 3.0,
            bond_maturity: 5.0,
        },
    )
}

fn check_engine_equivalence() -> Check {
    let mut worst: f64 = 0.0;
    let mut detail = String::new();
    for (params, state) in [merton_point(), vasicek_point()] {
        match AffineCoefficients::solve(&params.to_generic(), 30.0, 1e-3) {
            Ok(coeffs) => {
                for tau in [0.5, 1.0, 2.0, 5.0, 10.0, 30.0] {
                    let closed = closed_form::bond_price(&params, &state, state.t + tau).unwrap();
                    let engine = coeffs.bond_price(&state, state.t + tau).unwrap().value;
                    worst = worst.max((closed - engine).abs());
                }
            }
            Err(e) => detail = format!("engine solve failed: {e}"),
        }
    }
    if detail.is_empty() {
        detail = format!("max |closed - engine| = {worst:.2e} (tolerance 1e-8)");
    }
    Check {
        name: "closed form vs affine engine",
        passed: detail.starts_with("max") && worst < 1e-8,
        detail,
    }
}

fn check_bond_mc(budget: Budget, seed: u64) -> Check {
    let config = mc_config(budget, seed);
    let mut detail = String::new();
    let mut passed = true;
    for (label, (params, state)) in [("merton", merton_point()), ("vasicek", vasicek_point())] {
        let closed = closed_form::bond_price(&params, &state, 5.0).unwrap();
        match mc_bond_price(&params, &state, 5.0, &config) {
            Ok(mc) => {
                let z = (mc.estimate - closed).abs() / mc.std_error;
                passed &= z < 3.0;
                let _ = write!(detail, "{label} z={z:.2} ");
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "{label} failed: {e} ");
            }
        }
    }
    Check { name: "bond prices vs Monte Carlo (3 sigma)", passed, detail }
}

fn check_bond_pde(budget: Budget) -> Check {
    let mut detail = String::new();
    let mut passed = true;
    for (label, (params, state)) in [("merton", merton_point()), ("vasicek", vasicek_point())] {
        let closed = closed_form::bond_price(&params, &state, 5.0).unwrap();
        let grid = pde_grid(budget, &params, &state, 5.0);
        match pde_bond_price(&params, &state, 5.0, &grid) {
            Ok(pde) => {
                let diff = (pde.value - closed).abs();
                passed &= diff < 1e-4;
                let _ = write!(detail, "{label} |diff|={diff:.2e} ");
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "{label} failed: {e} ");
            }
        }
    }
    Check { name: "bond prices vs PDE (1e-4)", passed, detail }
}

fn check_option_mc(budget: Budget, seed: u64, formula: VolFormula) -> Check {
    let config = mc_config(budget, seed);
    let (state, spec) = figure_option_spec();
    let mut detail = String::new();
    let mut passed = true;
    for (label, params) in option_points() {
        let closed = closed_form::call_price_with(&params, &state, &spec, formula).unwrap();
        match mc_option_price(&params, &state, &spec, &config) {
            Ok(mc) => {
                let z = (mc.estimate - closed).abs() / mc.std_error;
                passed &= z < 3.0;
                let _ = write!(detail, "{label} z={z:.2} ");
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "{label} failed: {e} ");
            }
        }
    }
    Check { name: "option prices vs Monte Carlo (3 sigma)", passed, detail }
}

fn check_option_pde(budget: Budget, formula: VolFormula) -> Check {
    let (state, spec) = figure_option_spec();
    let mut detail = String::new();
    let mut passed = true;
    for (label, params) in option_points() {
        let closed = closed_form::call_price_with(&params, &state, &spec, formula).unwrap();
        let grid = pde_grid(budget, &params, &state, spec.expiry);
        match pde_option_price(&params, &state, &spec, &grid) {
            Ok(pde) => {
                let diff = (pde.value - closed).abs();
                passed &= diff < 1e-4;
                let _ = write!(detail, "{label} |diff|={diff:.2e} ");
            }
            Err(e) => {
                passed = false;
                let _ = write!(detail, "{label} failed: {e} ");
            }
        }
    }
    Check { name: "option prices vs PDE (1e-4)", passed, detail }
}

fn check_parity(formula: VolFormula) -> Check {
    let state = MarketState { t: 0.0, r: 0.02 };
    let models: Vec<ModelParams> = vec![
        ModelParams::Merton { phi: 0.008, sigma: 0.03 },
        ModelParams::Merton { phi: 0.02, sigma: 0.05 },
        ModelParams::Vasicek { kappa: 0.4, theta: 0.02, sigma: 0.03 },
        ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 },
        ModelParams::Vasicek { kappa: 1.0, theta: 0.03, sigma: 0.05 },
    ];
    let mut worst: f64 = 0.0;
    for params in &models {
        for k in [0.6, 0.7, 0.8, 0.9, 1.0] {
            for expiry in [0.5, 1.0, 2.0, 3.0, 4.0] {
                let spec = OptionSpec {
                    kind: OptionKind::Call,
                    strike: k,
                    expiry,
                    bond_maturity: 5.0,
                };
                let put_spec = OptionSpec { kind: OptionKind::Put, ..spec };
                let call = closed_form::call_price_with(params, &state, &spec, formula).unwrap();
                let put = closed_form::put_price_with(params, &state, &put_spec, formula).unwrap();
                let bond_t = closed_form::bond_price(params, &state, expiry).unwrap();
                let bond_s = closed_form::bond_price(params, &state, 5.0).unwrap();
                worst = worst.max((call - put - (bond_s - k * bond_t)).abs());
            }
        }
    }
    Check {
        name: "put-call parity (5x5x5 sweep, 1e-12)",
        passed: worst < 1e-12,
        detail: format!("max residual = {worst:.2e}"),
    }
}

pub fn run(budget: Budget, seed: u64, formula: VolFormula) -> Report {
    if formula == VolFormula::Printed {
        eprintln!(
            "warning: validating against the printed volatility formula; \
             the option checks are expected to fail"
        );
    }
    let checks = vec![
        check_engine_equivalence(),
        check_bond_mc(budget, seed),
        check_bond_pde(budget),
        check_option_mc(budget, seed, formula),
        check_option_pde(budget, formula),
        check_parity(formula),
    ];
    let mut text = String::new();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{status}  {}: {}", check.name, check.detail.trim_end());
    }
    Report {
        text,
        total: checks.len(),
        failed,
        all_passed: failed == 0,
    }
}
