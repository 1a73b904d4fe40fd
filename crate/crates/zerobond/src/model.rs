//! Domain types: model parameters, market state, option contracts, and the
//! embedding of the named models into the generic affine form.
//!
//! All types are plain immutable values and may be shared freely between
//! threads. Times are absolute calendar years; tenors are always computed
//! from `(t, T)` pairs, never stored redundantly.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Drift and squared-volatility coefficients of the generic affine short
/// rate `dr = (alpha1 - alpha2*r) dt + sqrt(beta1 + beta2*r) dW`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenericAffine {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// Short-rate model parameters.
///
/// The JSON form is tagged by a `"model"` field:
///
/// ```json
/// {"model": "vasicek", "kappa": 0.4, "theta": 0.05, "sigma": 0.03}
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelParams {
    /// Arithmetic Brownian short rate `dr = phi dt + sigma dW`.
    Merton { phi: f64, sigma: f64 },
    /// Ornstein-Uhlenbeck short rate `dr = kappa (theta - r) dt + sigma dW`.
    Vasicek { kappa: f64, theta: f64, sigma: f64 },
    /// Generic affine coefficients, including `beta2 != 0` square-root
    /// diffusions for which no closed form exists.
    #[serde(rename = "affine")]
    Affine(GenericAffine),
}

impl ModelParams {
    /// Embeds the model into the generic affine coefficient form.
    ///
    /// Merton `{phi, sigma}` maps to `{alpha1: phi, alpha2: 0, beta1: sigma^2,
    /// beta2: 0}`; Vasicek `{kappa, theta, sigma}` to `{alpha1: kappa*theta,
    /// alpha2: kappa, beta1: sigma^2, beta2: 0}`; generic coefficients pass
    /// through unchanged.
    pub fn to_generic(&self) -> GenericAffine {
        match *self {
            ModelParams::Merton { phi, sigma } => GenericAffine {
                alpha1: phi,
                alpha2: 0.0,
                beta1: sigma * sigma,
                beta2: 0.0,
            },
            ModelParams::Vasicek { kappa, theta, sigma } => GenericAffine {
                alpha1: kappa * theta,
                alpha2: kappa,
                beta1: sigma * sigma,
                beta2: 0.0,
            },
            ModelParams::Affine(g) => g,
        }
    }

    /// True when the diffusion does not depend on the rate (`beta2 = 0`),
    /// i.e. the rate is Gaussian and may go negative.
    pub fn is_gaussian(&self) -> bool {
        self.to_generic().beta2 == 0.0
    }

    /// Collects every violated parameter invariant.
    pub fn check(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        match *self {
            ModelParams::Merton { phi, sigma } => {
                if !phi.is_finite() {
                    report.push("phi must be finite");
                }
                if !(sigma > 0.0) || !sigma.is_finite() {
                    report.push("sigma must be positive");
                }
            }
            ModelParams::Vasicek { kappa, theta, sigma } => {
                if !(kappa > 0.0) || !kappa.is_finite() {
                    report.push("kappa must be positive");
                }
                // theta = 0 is admitted: the model comparison is evaluated
                // there even though the mean level is nominally positive.
                if !theta.is_finite() {
                    report.push("theta must be finite");
                }
                if !(sigma > 0.0) || !sigma.is_finite() {
                    report.push("sigma must be positive");
                }
            }
            ModelParams::Affine(g) => {
                if !(g.alpha1.is_finite() && g.alpha2.is_finite()) {
                    report.push("alpha1 and alpha2 must be finite");
                }
                if !(g.beta1 >= 0.0) || !g.beta1.is_finite() {
                    report.push("beta1 must be non-negative");
                }
                if !(g.beta2 >= 0.0) || !g.beta2.is_finite() {
                    report.push("beta2 must be non-negative");
                }
                if g.beta1 == 0.0 && g.beta2 == 0.0 {
                    report.push("degenerate diffusion: beta1 and beta2 both zero");
                }
            }
        }
        report
    }

    /// Validated parameters, or the full list of violations.
    pub fn validated(self) -> Result<Self> {
        let report = self.check();
        if report.is_ok() {
            Ok(self)
        } else {
            Err(Error::Invalid(report))
        }
    }
}

/// Valuation time and current short rate.
///
/// The rate may be negative for Gaussian (`beta2 = 0`) models; for `beta2 > 0`
/// the diffusion radicand `beta1 + beta2*r` must be non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    /// Valuation time in years.
    pub t: f64,
    /// Current short rate (per year).
    pub r: f64,
}

impl MarketState {
    pub fn check(&self, params: &ModelParams) -> ValidationReport {
        let mut report = ValidationReport::default();
        if !(self.t >= 0.0) || !self.t.is_finite() {
            report.push("t must be non-negative");
        }
        if !self.r.is_finite() {
            report.push("r must be finite");
        }
        let g = params.to_generic();
        if g.beta2 > 0.0 && g.beta1 + g.beta2 * self.r < 0.0 {
            report.push("beta1 + beta2*r must be non-negative");
        }
        report
    }
}

/// Collects parameter and state violations into a single report.
///
/// `ok` iff the list is empty; this reports, it never aborts.
pub fn validate(params: &ModelParams, state: &MarketState) -> ValidationReport {
    let mut report = params.check();
    report.extend(state.check(params));
    report
}

/// A `(t, T)` valuation-time/maturity pair with `T >= t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tenor {
    t: f64,
    maturity: f64,
}

impl Tenor {
    pub fn new(t: f64, maturity: f64) -> Result<Self> {
        if !(maturity >= t) || !t.is_finite() || !maturity.is_finite() {
            return Err(Error::invalid(format!(
                "maturity T = {maturity} must be >= valuation time t = {t}"
            )));
        }
        Ok(Tenor { t, maturity })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    /// Time to maturity `T - t`.
    pub fn years(&self) -> f64 {
        self.maturity - self.t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

/// A European option on a zero-coupon bond: exercise at `expiry` into the
/// bond maturing at `bond_maturity`, at strike `strike`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionSpec {
    pub kind: OptionKind,
    pub strike: f64,
    pub expiry: f64,
    pub bond_maturity: f64,
}

impl OptionSpec {
    /// Checks `t <= expiry <= bond_maturity` and `strike > 0` (the pricing
    /// lemma requires a strictly positive strike).
    pub fn check(&self, t: f64) -> ValidationReport {
        let mut report = ValidationReport::default();
        if !(self.strike > 0.0) || !self.strike.is_finite() {
            report.push("strike must be positive");
        }
        if !(t <= self.expiry) {
            report.push("expiry must be >= valuation time");
        }
        if !(self.expiry <= self.bond_maturity) {
            report.push("bond maturity must be >= option expiry");
        }
        report
    }
}

/// A price together with a one-sigma error estimate: zero for analytic
/// values, a standard error for Monte Carlo, a grid estimate for the PDE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

impl PriceEstimate {
    pub fn exact(value: f64) -> Self {
        PriceEstimate { value, uncertainty: 0.0 }
    }
}

/// List of violated invariants; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub(crate) fn single(msg: impl Into<String>) -> Self {
        ValidationReport { violations: vec![msg.into()] }
    }

    pub fn push(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.violations.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merton_embedding() {
        let g = ModelParams::Merton { phi: 0.02, sigma: 0.03 }.to_generic();
        assert_eq!(g.alpha1, 0.02);
        assert_eq!(g.alpha2, 0.0);
        assert!((g.beta1 - 0.0009).abs() < 1e-18);
        assert_eq!(g.beta2, 0.0);
    }

    #[test]
    fn vasicek_embedding() {
        let g = ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 }.to_generic();
        assert!((g.alpha1 - 0.02).abs() < 1e-15);
        assert_eq!(g.alpha2, 0.4);
        assert!((g.beta1 - 0.0009).abs() < 1e-18);
        assert_eq!(g.beta2, 0.0);
    }

    #[test]
    fn vasicek_zero_theta_is_valid() {
        let m = ModelParams::Vasicek { kappa: 0.4, theta: 0.0, sigma: 0.03 };
        assert!(m.check().is_ok());
        let g = m.to_generic();
        assert_eq!(g.alpha1, 0.0);
        assert_eq!(g.alpha2, 0.4);
    }

    #[test]
    fn negative_kappa_reported() {
        let m = ModelParams::Vasicek { kappa: -0.1, theta: 0.05, sigma: 0.03 };
        let report = m.check();
        assert!(!report.is_ok());
        assert!(report.violations[0].contains("kappa must be positive"));
    }

    #[test]
    fn negative_rate_ok_for_gaussian_models() {
        let m = ModelParams::Merton { phi: 0.02, sigma: 0.03 };
        let s = MarketState { t: 0.0, r: -0.01 };
        assert!(validate(&m, &s).is_ok());
    }

    #[test]
    fn degenerate_diffusion_reported() {
        let m = ModelParams::Affine(GenericAffine {
            alpha1: 0.01,
            alpha2: 0.1,
            beta1: 0.0,
            beta2: 0.0,
        });
        let report = m.check();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].contains("degenerate diffusion"));
    }

    #[test]
    fn sqrt_diffusion_state_constraint() {
        let m = ModelParams::Affine(GenericAffine {
            alpha1: 0.01,
            alpha2: 0.1,
            beta1: 0.0001,
            beta2: 0.01,
        });
        let bad = MarketState { t: 0.0, r: -0.5 };
        assert!(!validate(&m, &bad).is_ok());
        let good = MarketState { t: 0.0, r: 0.05 };
        assert!(validate(&m, &good).is_ok());
    }

    #[test]
    fn tenor_rejects_inverted_order() {
        assert!(Tenor::new(2.0, 1.0).is_err());
        assert_eq!(Tenor::new(1.0, 3.5).unwrap().years(), 2.5);
    }

    #[test]
    fn json_round_trip_uses_model_discriminator() {
        let m = ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 };
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"model\":\"vasicek\""));
        assert!(json.contains("\"kappa\":0.4"));
        assert_eq!(serde_json::from_str::<ModelParams>(&json).unwrap(), m);

        let affine: ModelParams = serde_json::from_str(
            r#"{"model":"affine","alpha1":0.02,"alpha2":0.4,"beta1":0.0009,"beta2":0.05}"#,
        )
        .unwrap();
        assert!(matches!(affine, ModelParams::Affine(g) if g.beta2 == 0.05));

        let state = MarketState { t: 0.0, r: 0.03 };
        let json = serde_json::to_string(&state).unwrap();
        assert_eq!(json, r#"{"t":0.0,"r":0.03}"#);
    }
}
