//! Monte Carlo verification of bond and option prices from first
//! principles: the bond is `E[e^{-int r}]` and the option is the discounted
//! terminal payoff, so neither estimator shares any code with the closed
//! forms or the ODE engine it checks.
//!
//! For `beta2 = 0` the pair `(r_T, int_t^T r_u du)` is jointly Gaussian and
//! is drawn exactly; generic affine models fall back to Euler-Maruyama with
//! full truncation of the diffusion radicand. Randomness is keyed by
//! `(seed, path index)` through independent ChaCha streams, so estimates
//! are bit-identical regardless of how paths are scheduled across worker
//! threads; the cross-path reduction is a fixed-shape pairwise sum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::affine::bond_exponent;
use crate::closed_form;
use crate::model::{GenericAffine, MarketState, ModelParams, OptionKind, OptionSpec};
use crate::{Error, Result};

/// Paths handled per parallel work unit. The per-chunk partial sums are
/// combined in a fixed order, independent of thread count.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Joint-Gaussian draw of `(r_T, I)`; only for `beta2 = 0` models.
    Exact,
    /// Euler-Maruyama with full truncation; works for any affine model.
    Euler,
}

#[derive(Debug, Clone)]
pub struct McConfig {
    pub paths: usize,
    /// Time steps per path for the Euler scheme.
    pub steps: usize,
    pub seed: u64,
    pub scheme: Scheme,
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            paths: 1_000_000,
            steps: 500,
            seed: 42,
            scheme: Scheme::Exact,
            antithetic: true,
        }
    }
}

impl McConfig {
    fn check(&self) -> Result<()> {
        let mut report = crate::model::ValidationReport::default();
        if self.paths < 100 {
            report.push("paths must be at least 100");
        }
        if self.steps < 1 {
            report.push("steps must be at least 1");
        }
        report.into_result()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub estimate: f64,
    /// One-sigma standard error of the estimate.
    pub std_error: f64,
    pub paths_used: usize,
}

/// Weighted forward-measure sample moments of the log forward-price ratio
/// `X = ln(F_T / F_t)` and of the terminal forward price itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardMoments {
    pub mean_log: f64,
    pub mean_log_se: f64,
    pub var_log: f64,
    pub var_log_se: f64,
    /// Importance-weighted `E[F_T]`; equals `F_t` by the martingale property.
    pub forward_mean: f64,
    pub forward_mean_se: f64,
    pub paths_used: usize,
}

fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact joint law of `(r_T, I = int r)` for a Gaussian (`beta2 = 0`) model.
#[derive(Debug, Clone, Copy)]
struct JointMoments {
    mean_r: f64,
    sd_r: f64,
    mean_i: f64,
    sd_i: f64,
    rho: f64,
}

fn exact_moments(g: &GenericAffine, r0: f64, tau: f64) -> Result<JointMoments> {
    if g.beta2 != 0.0 {
        return Err(Error::ExactSchemeUnavailable);
    }
    let sigma2 = g.beta1;
    if g.alpha2 == 0.0 {
        // arithmetic Brownian motion: r_T = r + phi*tau + sigma*W_tau,
        // I Gaussian with var sigma^2 tau^3 / 3 and correlation sqrt(3)/2
        let phi = g.alpha1;
        let var_r = sigma2 * tau;
        let var_i = sigma2 * tau * tau * tau / 3.0;
        Ok(JointMoments {
            mean_r: r0 + phi * tau,
            sd_r: var_r.sqrt(),
            mean_i: r0 * tau + 0.5 * phi * tau * tau,
            sd_i: var_i.sqrt(),
            rho: if var_r > 0.0 { 3.0f64.sqrt() / 2.0 } else { 0.0 },
        })
    } else {
        // Ornstein-Uhlenbeck transition plus integrated-OU moments. These are
        // standard but rederived here; the unit tests validate them against a
        // step-refined Euler simulation before the scheme is trusted.
        let kappa = g.alpha2;
        let theta = g.alpha1 / g.alpha2;
        let b = (1.0 - (-kappa * tau).exp()) / kappa;
        let b2 = (1.0 - (-2.0 * kappa * tau).exp()) / (2.0 * kappa);
        let var_r = sigma2 * b2;
        let var_i = sigma2 / (kappa * kappa) * (tau - b) - sigma2 * b * b / (2.0 * kappa);
        let cov = sigma2 * b * b / 2.0;
        let (sd_r, sd_i) = (var_r.sqrt(), var_i.max(0.0).sqrt());
        let rho = if sd_r > 0.0 && sd_i > 0.0 {
            (cov / (sd_r * sd_i)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        Ok(JointMoments {
            mean_r: theta + (r0 - theta) * (-kappa * tau).exp(),
            sd_r,
            mean_i: r0 * b + theta * (tau - b),
            sd_i,
            rho,
        })
    }
}

impl JointMoments {
    fn draw(&self, z1: f64, z2: f64) -> (f64, f64) {
        let r_t = self.mean_r + self.sd_r * z1;
        let i = self.mean_i + self.sd_i * (self.rho * z1 + (1.0 - self.rho * self.rho).sqrt() * z2);
        (r_t, i)
    }
}

fn euler_path(g: &GenericAffine, r0: f64, tau: f64, steps: usize, rng: &mut ChaCha8Rng, sign: f64) -> (f64, f64) {
    let dt = tau / steps as f64;
    let sqrt_dt = dt.sqrt();
    let mut r = r0;
    let mut integral = 0.0;
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(rng);
        let drift = g.alpha1 - g.alpha2 * r;
        let diffusion = (g.beta1 + g.beta2 * r).max(0.0).sqrt();
        let next = r + drift * dt + diffusion * sqrt_dt * sign * z;
        integral += 0.5 * (r + next) * dt;
        r = next;
    }
    (r, integral)
}

enum Sampler<'a> {
    Exact(JointMoments),
    Euler { g: &'a GenericAffine, r0: f64, tau: f64, steps: usize },
}

impl Sampler<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng, sign: f64) -> (f64, f64) {
        match self {
            Sampler::Exact(m) => {
                let z1: f64 = StandardNormal.sample(rng);
                let z2: f64 = StandardNormal.sample(rng);
                m.draw(sign * z1, sign * z2)
            }
            Sampler::Euler { g, r0, tau, steps } => euler_path(g, *r0, *tau, *steps, rng, sign),
        }
    }
}

fn make_sampler<'a>(
    g: &'a GenericAffine,
    state: &MarketState,
    horizon: f64,
    config: &McConfig,
) -> Result<Sampler<'a>> {
    let tau = horizon - state.t;
    if tau < 0.0 {
        return Err(Error::invalid("horizon before valuation time"));
    }
    match config.scheme {
        Scheme::Exact => Ok(Sampler::Exact(exact_moments(g, state.r, tau)?)),
        Scheme::Euler => Ok(Sampler::Euler { g, r0: state.r, tau, steps: config.steps }),
    }
}

/// One exact draw of `(r_T, int_t^T r_u du)` keyed by `(seed, path_index)`.
///
/// The estimand of the bond price is `E[e^{-I}]`; this exposes the inner
/// variables of that expectation. Requires `beta2 = 0`.
pub fn sample_rate_and_integral(
    params: &ModelParams,
    state: &MarketState,
    horizon: f64,
    seed: u64,
    path_index: u64,
) -> Result<(f64, f64)> {
    params.check().into_result()?;
    let moments = exact_moments(&params.to_generic(), state.r, horizon - state.t)?;
    let mut rng = path_rng(seed, path_index);
    let z1: f64 = StandardNormal.sample(&mut rng);
    let z2: f64 = StandardNormal.sample(&mut rng);
    Ok(moments.draw(z1, z2))
}

/// Euler-Maruyama ensemble of `(r_T, I)` pairs; full truncation keeps the
/// diffusion radicand non-negative.
pub fn euler_paths(
    params: &GenericAffine,
    state: &MarketState,
    horizon: f64,
    config: &McConfig,
) -> Result<Vec<(f64, f64)>> {
    config.check()?;
    crate::model::ModelParams::Affine(*params).check().into_result()?;
    let tau = horizon - state.t;
    if tau < 0.0 {
        return Err(Error::invalid("horizon before valuation time"));
    }
    let (r0, steps) = (state.r, config.steps);
    Ok((0..config.paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(config.seed, i);
            euler_path(params, r0, tau, steps, &mut rng, 1.0)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, Default)]
struct MeanAcc {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl MeanAcc {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(self, other: Self) -> Self {
        MeanAcc {
            n: self.n + other.n,
            sum: self.sum + other.sum,
            sum_sq: self.sum_sq + other.sum_sq,
        }
    }
}

fn pairwise_merge(stats: &[MeanAcc]) -> MeanAcc {
    match stats.len() {
        0 => MeanAcc::default(),
        1 => stats[0],
        n => pairwise_merge(&stats[..n / 2]).merge(pairwise_merge(&stats[n / 2..])),
    }
}

/// Shared estimator driver: evaluates `payoff(r_T, I)` on every path (or
/// averaged antithetic pair) and reduces deterministically.
fn run_mc<F>(
    g: &GenericAffine,
    state: &MarketState,
    horizon: f64,
    config: &McConfig,
    payoff: F,
) -> Result<McResult>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    config.check()?;
    let sampler = make_sampler(g, state, horizon, config)?;
    let units = if config.antithetic {
        config.paths.div_ceil(2)
    } else {
        config.paths
    };
    let n_chunks = units.div_ceil(CHUNK);
    let chunks: Vec<MeanAcc> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = MeanAcc::default();
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(units);
            for u in lo..hi {
                let value = if config.antithetic {
                    let mut rng = path_rng(config.seed, u as u64);
                    let (r1, i1) = sampler.draw(&mut rng, 1.0);
                    let mut rng = path_rng(config.seed, u as u64);
                    let (r2, i2) = sampler.draw(&mut rng, -1.0);
                    0.5 * (payoff(r1, i1) + payoff(r2, i2))
                } else {
                    let mut rng = path_rng(config.seed, u as u64);
                    let (r, i) = sampler.draw(&mut rng, 1.0);
                    payoff(r, i)
                };
                acc.push(value);
            }
            acc
        })
        .collect();
    let total = pairwise_merge(&chunks);
    let mean = total.sum / total.n;
    let var = ((total.sum_sq - total.n * mean * mean) / (total.n - 1.0)).max(0.0);
    Ok(McResult {
        estimate: mean,
        std_error: (var / total.n).sqrt(),
        paths_used: if config.antithetic { 2 * units } else { units },
    })
}

/// Bond price as the sample mean of `e^{-I}`.
pub fn mc_bond_price(
    params: &ModelParams,
    state: &MarketState,
    maturity: f64,
    config: &McConfig,
) -> Result<McResult> {
    params.check().into_result()?;
    run_mc(&params.to_generic(), state, maturity, config, |_, i| (-i).exp())
}

/// Option price as the sample mean of `e^{-I} max(+/-(B(r_T, T; S) - K), 0)`.
pub fn mc_option_price(
    params: &ModelParams,
    state: &MarketState,
    spec: &OptionSpec,
    config: &McConfig,
) -> Result<McResult> {
    let mut report = params.check();
    report.extend(spec.check(state.t));
    report.into_result()?;
    let (a, b) = bond_exponent(params, spec.bond_maturity - spec.expiry)?;
    let strike = spec.strike;
    let kind = spec.kind;
    run_mc(&params.to_generic(), state, spec.expiry, config, move |r_t, i| {
        let bond = (-a - r_t * b).exp();
        let intrinsic = match kind {
            OptionKind::Call => (bond - strike).max(0.0),
            OptionKind::Put => (strike - bond).max(0.0),
        };
        (-i).exp() * intrinsic
    })
}

/// Forward-measure moments of `X = ln(F_T / F_t)` by likelihood weighting:
/// risk-neutral paths are reweighted with `w = e^{-I} / B_t^T`, the exact
/// measure-change density of the T-forward measure.
///
/// Standard errors come from fixed-size batch means, so they are as
/// reproducible as the estimates themselves.
pub fn mc_forward_moments(
    params: &ModelParams,
    state: &MarketState,
    expiry: f64,
    bond_maturity: f64,
    config: &McConfig,
) -> Result<ForwardMoments> {
    params.check().into_result()?;
    config.check()?;
    if matches!(params, ModelParams::Affine(_)) {
        return Err(Error::UnsupportedModel(
            "forward moments need closed-form bond prices (Merton or Vasicek)".into(),
        ));
    }
    let bond_t = closed_form::bond_price(params, state, expiry)?;
    let bond_s = closed_form::bond_price(params, state, bond_maturity)?;
    let log_fwd = bond_s.ln() - bond_t.ln();
    let (a, b) = bond_exponent(params, bond_maturity - expiry)?;

    let g = params.to_generic();
    let sampler = make_sampler(&g, state, expiry, config)?;
    let n_chunks = config.paths.div_ceil(CHUNK);
    // per-chunk ratio estimates of (mean, var, E[F_T])
    let chunk_est: Vec<(f64, f64, f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(config.paths);
            let (mut sw, mut swx, mut swx2, mut swf) = (0.0, 0.0, 0.0, 0.0);
            for u in lo..hi {
                let mut rng = path_rng(config.seed, u as u64);
                let (r_t, i) = sampler.draw(&mut rng, 1.0);
                let w = (-i).exp() / bond_t;
                let log_bond = -a - r_t * b;
                let x = log_bond - log_fwd;
                sw += w;
                swx += w * x;
                swx2 += w * x * x;
                swf += w * log_bond.exp();
            }
            (sw, swx, swx2, swf)
        })
        .collect();

    let sw: f64 = chunk_est.iter().map(|e| e.0).sum();
    let swx: f64 = chunk_est.iter().map(|e| e.1).sum();
    let swx2: f64 = chunk_est.iter().map(|e| e.2).sum();
    let swf: f64 = chunk_est.iter().map(|e| e.3).sum();
    let mean_log = swx / sw;
    let var_log = (swx2 / sw - mean_log * mean_log).max(0.0);
    let forward_mean = swf / sw;

    let batch: Vec<(f64, f64, f64)> = chunk_est
        .iter()
        .filter(|e| e.0 > 0.0)
        .map(|&(w, wx, wx2, wf)| {
            let m = wx / w;
            ((m), (wx2 / w - m * m).max(0.0), wf / w)
        })
        .collect();
    let k = batch.len() as f64;
    let se = |f: &dyn Fn(&(f64, f64, f64)) -> f64, center: f64| -> f64 {
        if batch.len() < 2 {
            return f64::INFINITY;
        }
        let var = batch.iter().map(|b| (f(b) - center).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    };
    Ok(ForwardMoments {
        mean_log,
        mean_log_se: se(&|b| b.0, mean_log),
        var_log,
        var_log_se: se(&|b| b.1, var_log),
        forward_mean,
        forward_mean_se: se(&|b| b.2, forward_mean),
        paths_used: config.paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn merton() -> ModelParams {
        ModelParams::Merton { phi: 0.02, sigma: 0.03 }
    }

    fn vasicek() -> ModelParams {
        ModelParams::Vasicek { kappa: 0.4, theta: 0.05, sigma: 0.03 }
    }

    fn quick(paths: usize) -> McConfig {
        McConfig { paths, ..McConfig::default() }
    }

    #[test]
    fn degenerate_merton_integral_is_deterministic() {
        let m = ModelParams::Affine(GenericAffine {
            alpha1: 0.02,
            alpha2: 0.0,
            beta1: 0.0,
            beta2: 0.0,
        });
        // sigma = 0 is rejected as a degenerate diffusion at the model level,
        // so probe the moments directly
        let moments = exact_moments(&m.to_generic(), 0.05, 5.0).unwrap();
        assert_eq!(moments.sd_r, 0.0);
        assert_eq!(moments.sd_i, 0.0);
        assert!((moments.mean_i - (0.05 * 5.0 + 0.5 * 0.02 * 25.0)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_vasicek_rate_is_ou_mean() {
        let g = GenericAffine { alpha1: 0.4 * 0.05, alpha2: 0.4, beta1: 0.0, beta2: 0.0 };
        let moments = exact_moments(&g, 0.03, 5.0).unwrap();
        let expected = 0.05 + (0.03 - 0.05) * (-0.4f64 * 5.0).exp();
        assert!((moments.mean_r - expected).abs() < 1e-15);
        assert_eq!(moments.sd_r, 0.0);
    }

    /// The integrated-OU moments are implementer-derived; validate them
    /// against a step-refined Euler simulation before trusting the scheme.
    #[test]
    fn exact_vasicek_moments_match_fine_euler() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let g = vasicek().to_generic();
        let config = McConfig {
            paths: 200_000,
            steps: 2000,
            scheme: Scheme::Euler,
            antithetic: false,
            ..McConfig::default()
        };
        let paths = euler_paths(&g, &state, 5.0, &config).unwrap();
        let n = paths.len() as f64;
        let (mut mr, mut mi) = (0.0, 0.0);
        for &(r, i) in &paths {
            mr += r / n;
            mi += i / n;
        }
        let (mut vr, mut vi, mut cov) = (0.0, 0.0, 0.0);
        for &(r, i) in &paths {
            vr += (r - mr) * (r - mr) / n;
            vi += (i - mi) * (i - mi) / n;
            cov += (r - mr) * (i - mi) / n;
        }
        let m = exact_moments(&g, 0.03, 5.0).unwrap();
        assert!((m.mean_r - mr).abs() < 4.0 * m.sd_r / n.sqrt() + 1e-4);
        assert!((m.mean_i - mi).abs() < 4.0 * m.sd_i / n.sqrt() + 1e-4);
        assert!((m.sd_r * m.sd_r - vr).abs() / (m.sd_r * m.sd_r) < 0.02);
        assert!((m.sd_i * m.sd_i - vi).abs() / (m.sd_i * m.sd_i) < 0.02);
        assert!((m.rho * m.sd_r * m.sd_i - cov).abs() / cov.abs() < 0.02);
    }

    #[test]
    fn bond_price_within_three_sigma_of_closed_form() {
        let state = MarketState { t: 0.0, r: 0.05 };
        let result = mc_bond_price(&merton(), &state, 5.0, &quick(200_000)).unwrap();
        let closed = closed_form::bond_price(&merton(), &state, 5.0).unwrap();
        assert!((result.estimate - closed).abs() < 3.0 * result.std_error);

        let state = MarketState { t: 0.0, r: 0.03 };
        let result = mc_bond_price(&vasicek(), &state, 5.0, &quick(200_000)).unwrap();
        let closed = closed_form::bond_price(&vasicek(), &state, 5.0).unwrap();
        assert!((closed - 0.8176).abs() < 1e-4);
        assert!((result.estimate - closed).abs() < 3.0 * result.std_error);
    }

    #[test]
    fn above_par_theta_zero_bond_confirmed() {
        let theta0 = ModelParams::Vasicek { kappa: 0.4, theta: 0.0, sigma: 0.03 };
        let state = MarketState { t: 0.0, r: 0.0 };
        let result = mc_bond_price(&theta0, &state, 5.0, &quick(400_000)).unwrap();
        assert!((result.estimate - 1.00537).abs() < 3.0 * result.std_error.max(1e-5));
        assert!(result.estimate > 1.0);
    }

    #[test]
    fn estimates_are_thread_count_invariant() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let config = quick(50_000);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| mc_bond_price(&vasicek(), &state, 5.0, &config).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn antithetic_reduces_standard_error() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let (mut se_anti, mut se_plain) = (0.0, 0.0);
        for seed in 0..20 {
            let anti = McConfig { paths: 20_000, seed, ..McConfig::default() };
            let plain = McConfig { antithetic: false, ..anti.clone() };
            se_anti += mc_bond_price(&vasicek(), &state, 5.0, &anti).unwrap().std_error;
            se_plain += mc_bond_price(&vasicek(), &state, 5.0, &plain).unwrap().std_error;
        }
        assert!(se_anti < se_plain, "{se_anti} vs {se_plain}");
    }

    #[test]
    fn euler_converges_to_exact_scheme() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let exact = mc_bond_price(&vasicek(), &state, 5.0, &quick(200_000)).unwrap();
        for steps in [50, 500] {
            let config = McConfig {
                paths: 200_000,
                steps,
                scheme: Scheme::Euler,
                ..McConfig::default()
            };
            let euler = mc_bond_price(&vasicek(), &state, 5.0, &config).unwrap();
            let combined = (exact.std_error.powi(2) + euler.std_error.powi(2)).sqrt();
            // weak order 1: coarse steps still land within the stated band
            let bias_budget = if steps == 50 { 1e-3 } else { 1e-4 };
            assert!(
                (exact.estimate - euler.estimate).abs() < 4.0 * combined + bias_budget,
                "steps={steps}"
            );
        }
    }

    #[test]
    fn full_truncation_keeps_square_root_paths_finite() {
        let g = GenericAffine { alpha1: 0.02, alpha2: 0.4, beta1: 0.0, beta2: 0.05 };
        let state = MarketState { t: 0.0, r: 0.04 };
        let config = McConfig {
            paths: 100_000,
            steps: 100,
            scheme: Scheme::Euler,
            antithetic: false,
            ..McConfig::default()
        };
        let paths = euler_paths(&g, &state, 5.0, &config).unwrap();
        assert!(paths.iter().all(|&(r, i)| r.is_finite() && i.is_finite()));
    }

    #[test]
    fn exact_scheme_rejects_square_root_diffusion() {
        let g = ModelParams::Affine(GenericAffine {
            alpha1: 0.02,
            alpha2: 0.4,
            beta1: 0.0009,
            beta2: 0.05,
        });
        let state = MarketState { t: 0.0, r: 0.03 };
        let err = mc_bond_price(&g, &state, 5.0, &quick(1000)).unwrap_err();
        assert!(matches!(err, Error::ExactSchemeUnavailable));
    }

    #[test]
    fn option_with_vanishing_strike_prices_the_bond() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let spec = OptionSpec {
            kind: OptionKind::Call,
            strike: 1e-10,
            expiry: 3.0,
            bond_maturity: 5.0,
        };
        let result = mc_option_price(&vasicek(), &state, &spec, &quick(100_000)).unwrap();
        let bond_s = closed_form::bond_price(&vasicek(), &state, 5.0).unwrap();
        assert!((result.estimate - bond_s).abs() < 3.0 * result.std_error);
    }

    #[test]
    fn forward_moments_match_gbm_theory() {
        // figure point: kappa=0.4, theta=0.02, sigma=0.03, r=0, T=3, S=5
        let model = ModelParams::Vasicek { kappa: 0.4, theta: 0.02, sigma: 0.03 };
        let state = MarketState { t: 0.0, r: 0.0 };
        let moments = mc_forward_moments(&model, &state, 3.0, 5.0, &quick(200_000)).unwrap();
        let v = closed_form::integrated_vol(&model, 0.0, 3.0, 5.0).unwrap();
        let v2 = v * v;
        assert!((moments.var_log - v2).abs() < 3.0 * moments.var_log_se);
        assert!((moments.mean_log + 0.5 * v2).abs() < 3.0 * moments.mean_log_se);
        // martingale property of the forward price under the T-forward measure
        let bond_t = closed_form::bond_price(&model, &state, 3.0).unwrap();
        let bond_s = closed_form::bond_price(&model, &state, 5.0).unwrap();
        let fwd = bond_s / bond_t;
        assert!((moments.forward_mean - fwd).abs() < 3.0 * moments.forward_mean_se);
    }

    #[test]
    fn sample_is_reproducible_per_path_index() {
        let state = MarketState { t: 0.0, r: 0.03 };
        let a = sample_rate_and_integral(&vasicek(), &state, 5.0, 7, 123).unwrap();
        let b = sample_rate_and_integral(&vasicek(), &state, 5.0, 7, 123).unwrap();
        assert_eq!(a, b);
        let c = sample_rate_and_integral(&vasicek(), &state, 5.0, 7, 124).unwrap();
        assert_ne!(a, c);
    }
}
