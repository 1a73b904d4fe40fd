//! Model-comparison figure data: call prices of the Merton and Vasicek
//! models over a (theta, expiry) grid, with the two models aligned through
//! `phi = kappa * theta` so both short rates share the same initial drift.

use std::fmt::Write as _;

use clap::Args;
use zerobond::closed_form::{call_price_with, VolFormula};
use zerobond::model::{MarketState, ModelParams, OptionKind, OptionSpec};

use crate::{parse_list, CliError, CliResult};

/// Comparison point fixed by the figure captions.
pub const KAPPA: f64 = 0.4;
pub const SIGMA: f64 = 0.03;
pub const SHORT_RATE: f64 = 0.0;
pub const STRIKE: f64 = 0.8;
pub const BOND_MATURITY: f64 = 5.0;

#[derive(Args)]
pub struct GridArgs {
    /// Comma-separated long-rate levels theta.
    #[arg(long)]
    thetas: Option<String>,
    /// Comma-separated option expiries, each in (0, 5].
    #[arg(long)]
    expiries: Option<String>,
}

pub struct FigureSpec {
    pub theta_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
}

impl GridArgs {
    pub fn build(&self) -> CliResult<FigureSpec> {
        let theta_grid = match &self.thetas {
            Some(text) => parse_list(text)?,
            None => (0..=10).map(|i| i as f64 * 0.005).collect(),
        };
        let t_grid = match &self.expiries {
            Some(text) => parse_list(text)?,
            None => (1..=20).map(|i| i as f64 * 0.25).collect(),
        };
        let spec = FigureSpec { theta_grid, t_grid };
        spec.check()?;
        Ok(spec)
    }
}

impl FigureSpec {
    fn check(&self) -> CliResult<()> {
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if self.theta_grid.is_empty() || !sorted(&self.theta_grid) {
            return Err(CliError::Usage("theta grid must be non-empty and sorted".into()));
        }
        if self.t_grid.is_empty() || !sorted(&self.t_grid) {
            return Err(CliError::Usage("expiry grid must be non-empty and sorted".into()));
        }
        if self.t_grid[0] <= 0.0 || *self.t_grid.last().unwrap() > BOND_MATURITY {
            return Err(CliError::Usage(format!(
                "expiries must lie in (0, {BOND_MATURITY}]"
            )));
        }
        Ok(())
    }
}

/// Call prices at one grid point: `(C_merton, C_vasicek)`.
pub fn price_pair(theta: f64, expiry: f64, formula: VolFormula) -> CliResult<(f64, f64)> {
    let state = MarketState { t: 0.0, r: SHORT_RATE };
    let spec = OptionSpec {
        kind: OptionKind::Call,
        strike: STRIKE,
        expiry,
        bond_maturity: BOND_MATURITY,
    };
    let merton = ModelParams::Merton { phi: KAPPA * theta, sigma: SIGMA };
    let vasicek = ModelParams::Vasicek { kappa: KAPPA, theta, sigma: SIGMA };
    Ok((
        call_price_with(&merton, &state, &spec, formula)?,
        call_price_with(&vasicek, &state, &spec, formula)?,
    ))
}

pub fn figure1(spec: &FigureSpec, formula: VolFormula) -> CliResult<String> {
    let mut csv = String::from("theta,T,C_merton,C_vasicek\n");
    for &theta in &spec.theta_grid {
        for &expiry in &spec.t_grid {
            let (c_m, c_v) = price_pair(theta, expiry, formula)?;
            let _ = writeln!(csv, "{theta},{expiry},{c_m:.10},{c_v:.10}");
        }
    }
    Ok(csv)
}

pub fn figure2(spec: &FigureSpec, formula: VolFormula) -> CliResult<String> {
    let mut csv = String::from("theta,T,ln_CV_minus_ln_CM\n");
    let mut skipped = 0usize;
    for &theta in &spec.theta_grid {
        for &expiry in &spec.t_grid {
            let (c_m, c_v) = price_pair(theta, expiry, formula)?;
            if c_m > 0.0 && c_v > 0.0 {
                let _ = writeln!(csv, "{theta},{expiry},{:.10}", c_v.ln() - c_m.ln());
            } else {
                // the log difference is undefined; leave the cell empty
                let _ = writeln!(csv, "{theta},{expiry},");
                skipped += 1;
            }
        }
    }
    if skipped > 0 {
        eprintln!("note: {skipped} grid points had a non-positive price; cells left empty");
    }
    Ok(csv)
}
