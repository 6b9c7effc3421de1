use erp_core::math::{bs_call_price, bs_put_price};
use erp_core::{
    buyer_exposure_call, buyer_exposure_put, erp_call, erp_put, seller_exposure_call, seller_exposure_put,
    MarketParams, RiskFunction,
};
use proptest::prelude::*;

fn risk() -> impl Strategy<Value = RiskFunction> {
    prop_oneof![Just(RiskFunction::PositivePart), Just(RiskFunction::ExpMinusOne)]
}

fn market() -> impl Strategy<Value = MarketParams> {
    (0.0..0.1f64, 0.1..0.6f64, 0.1..2.0f64).prop_map(|(r, sigma, t)| MarketParams::new(r, r, sigma, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exposures_are_monotone_in_price(
        mp in market(),
        risk in risk(),
        s in 0.5..10.0f64,
        k in 1.0..10.0f64,
        v in -3.0..6.0f64,
        dv in 0.0..2.0f64,
    ) {
        let w = v + dv;
        let tol = 1e-10;
        prop_assert!(seller_exposure_call(&mp, risk, k, s, w)?.value <= seller_exposure_call(&mp, risk, k, s, v)?.value + tol);
        prop_assert!(seller_exposure_put(&mp, risk, k, s, w)?.value <= seller_exposure_put(&mp, risk, k, s, v)?.value + tol);
        prop_assert!(buyer_exposure_call(&mp, risk, k, s, w)?.value >= buyer_exposure_call(&mp, risk, k, s, v)?.value - tol);
        prop_assert!(buyer_exposure_put(&mp, risk, k, s, w)?.value >= buyer_exposure_put(&mp, risk, k, s, v)?.value - tol);
    }

    #[test]
    fn prices_sit_inside_their_brackets(mp in market(), risk in risk(), s in 0.5..10.0f64, k in 1.0..10.0f64) {
        let call = bs_call_price(s, k, mp.r, mp.sigma, mp.t)?;
        let put = bs_put_price(s, k, mp.r, mp.sigma, mp.t)?;
        let c = erp_call(&mp, risk, k, s)?;
        let p = erp_put(&mp, risk, k, s)?;
        prop_assert!((0.0..=call + 1e-9).contains(&c), "call {c} outside [0, {call}]");
        prop_assert!((put - 1e-9..=put + k).contains(&p), "put {p} outside [{put}, {}]", put + k);
    }

    #[test]
    fn both_sides_carry_equal_risk_at_the_price(mp in market(), risk in risk(), s in 2.0..8.0f64, k in 2.0..8.0f64) {
        let c = erp_call(&mp, risk, k, s)?;
        let gap = seller_exposure_call(&mp, risk, k, s, c)?.value - buyer_exposure_call(&mp, risk, k, s, c)?.value;
        prop_assert!(gap.abs() < 1e-6, "call balance {gap}");
        let p = erp_put(&mp, risk, k, s)?;
        let gap = seller_exposure_put(&mp, risk, k, s, p)?.value - buyer_exposure_put(&mp, risk, k, s, p)?.value;
        prop_assert!(gap.abs() < 1e-6, "put balance {gap}");
    }

    #[test]
    fn put_call_parity(mp in market(), s in 0.1..50.0f64, k in 0.1..50.0f64) {
        let c = bs_call_price(s, k, mp.r, mp.sigma, mp.t)?;
        let p = bs_put_price(s, k, mp.r, mp.sigma, mp.t)?;
        prop_assert!((c - p - (s - k * (-mp.r * mp.t).exp())).abs() <= 1e-10 * (1.0 + s + k));
    }
}

#[test]
fn exposure_limits_in_price() {
    let mp = MarketParams::new(0.05, 0.05, 0.3, 0.5).unwrap();
    let k = 5.0;
    for risk in [RiskFunction::PositivePart, RiskFunction::ExpMinusOne] {
        for s in [1.0, 5.0, 9.0] {
            let far = 10.0 * k;
            assert!((seller_exposure_call(&mp, risk, k, s, far).unwrap().value - risk.lower_bound()).abs() < 1e-3);
            assert!((seller_exposure_put(&mp, risk, k, s, far).unwrap().value - risk.lower_bound()).abs() < 1e-3);
            let half = 5.0 * k;
            assert!(
                buyer_exposure_put(&mp, risk, k, s, far).unwrap().value
                    > buyer_exposure_put(&mp, risk, k, s, half).unwrap().value
            );
            assert!(
                buyer_exposure_call(&mp, risk, k, s, far).unwrap().value
                    > buyer_exposure_call(&mp, risk, k, s, half).unwrap().value
            );
        }
    }
}
