//! Property-based invariants over randomized valid parameters.

use proptest::prelude::*;
use zerobond::affine::AffineCoefficients;
use zerobond::closed_form;
use zerobond::model::{GenericAffine, MarketState, ModelParams, OptionKind, OptionSpec};

fn vasicek_params() -> impl Strategy<Value = ModelParams> {
    (0.05f64..2.0, 0.0f64..0.1, 0.005f64..0.08)
        .prop_map(|(kappa, theta, sigma)| ModelParams::Vasicek { kappa, theta, sigma })
}

fn merton_params() -> impl Strategy<Value = ModelParams> {
    (-0.02f64..0.05, 0.005f64..0.08)
        .prop_map(|(phi, sigma)| ModelParams::Merton { phi, sigma })
}

fn gaussian_params() -> impl Strategy<Value = ModelParams> {
    prop_oneof![vasicek_params(), merton_params()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The Riccati solution stays positive and within its analytic bound;
    /// `solve_b` checks both internally, so success is the assertion.
    #[test]
    fn riccati_b_positive_and_bounded(
        alpha1 in -0.05f64..0.05,
        alpha2 in 0.0f64..2.0,
        beta1 in 1e-6f64..0.01,
        beta2 in 0.0f64..0.5,
    ) {
        let g = GenericAffine { alpha1, alpha2, beta1, beta2 };
        let coeffs = AffineCoefficients::solve_b(&g, 5.0, 5e-3).unwrap();
        prop_assert!(coeffs.b(2.5).unwrap() > 0.0);
        prop_assert!(coeffs.b(5.0).unwrap() > 0.0);
    }

    /// Parity must hold to floating-point roundoff for every valid input,
    /// not just the acceptance sweep.
    #[test]
    fn put_call_parity_everywhere(
        params in gaussian_params(),
        r in -0.05f64..0.15,
        strike in 0.3f64..1.5,
        expiry in 0.1f64..4.9,
    ) {
        let state = MarketState { t: 0.0, r };
        let call_spec = OptionSpec {
            kind: OptionKind::Call, strike, expiry, bond_maturity: 5.0,
        };
        let put_spec = OptionSpec { kind: OptionKind::Put, ..call_spec };
        let call = closed_form::call_price(&params, &state, &call_spec).unwrap();
        let put = closed_form::put_price(&params, &state, &put_spec).unwrap();
        let bond_t = closed_form::bond_price(&params, &state, expiry).unwrap();
        let bond_s = closed_form::bond_price(&params, &state, 5.0).unwrap();
        let residual = call - put - (bond_s - strike * bond_t);
        prop_assert!(residual.abs() < 1e-12 * bond_s.max(strike * bond_t));
    }

    /// `exp(-a - r b)` with `b > 0` is strictly decreasing in `r`.
    #[test]
    fn bond_price_decreasing_in_rate(
        params in gaussian_params(),
        r in -0.05f64..0.15,
        tau in 0.1f64..10.0,
    ) {
        let lo = closed_form::bond_price(&params, &MarketState { t: 0.0, r }, tau).unwrap();
        let hi_state = MarketState { t: 0.0, r: r + 0.01 };
        let hi = closed_form::bond_price(&params, &hi_state, tau).unwrap();
        prop_assert!(hi < lo);
    }

    /// Call prices are non-increasing in the strike and bounded by the
    /// underlying bond price.
    #[test]
    fn call_monotone_and_bounded_in_strike(
        params in gaussian_params(),
        r in -0.02f64..0.1,
        strike in 0.3f64..1.4,
        expiry in 0.1f64..4.9,
    ) {
        let state = MarketState { t: 0.0, r };
        let spec = |k| OptionSpec {
            kind: OptionKind::Call, strike: k, expiry, bond_maturity: 5.0,
        };
        let c1 = closed_form::call_price(&params, &state, &spec(strike)).unwrap();
        let c2 = closed_form::call_price(&params, &state, &spec(strike + 0.1)).unwrap();
        let bond_s = closed_form::bond_price(&params, &state, 5.0).unwrap();
        prop_assert!(c2 <= c1 + 1e-15);
        prop_assert!(c1 <= bond_s + 1e-12);
        prop_assert!(c1 >= 0.0);
    }
}
