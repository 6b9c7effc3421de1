use erp_core::extract::{extract_curve, report_values};
use erp_core::hjb::{
    boundary_values, solve, terminal_condition, AdiMode, BoundaryStyle, GridSpec, HjbProblem, SolverOptions,
};
use erp_core::{MarketParams, Payoff, RiskFunction, Side};
use proptest::prelude::*;

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Seller), Just(Side::Buyer)]
}

fn risk() -> impl Strategy<Value = RiskFunction> {
    prop_oneof![Just(RiskFunction::PositivePart), Just(RiskFunction::ExpMinusOne)]
}

fn payoff() -> impl Strategy<Value = Payoff> {
    prop_oneof![
        (2.0..8.0f64).prop_map(|k| Payoff::call(k).unwrap()),
        (1.0..5.0f64, 0.5..4.0f64).prop_map(|(k, w)| Payoff::butterfly(k, k + w).unwrap()),
    ]
}

fn market() -> impl Strategy<Value = MarketParams> {
    (0.0..0.1f64, 0.0..0.1f64, 0.15..0.5f64, 0.25..1.0f64)
        .prop_map(|(mu, r, sigma, t)| MarketParams::new(mu, r, sigma, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn edges_match_the_terminal_condition(
        side in side(),
        risk in risk(),
        z in payoff(),
        mp in market(),
        n_s in 3usize..30,
        n_v in 3usize..30,
    ) {
        let problem = HjbProblem::new(side, z, mp, risk)?;
        let grid = GridSpec::new(10.0, 3.0, n_s, n_v, 2)?;
        let terminal = terminal_condition(&problem, &grid).f;
        let edges = boundary_values(&problem, &grid, 0.0, BoundaryStyle::TerminalConsistent);
        for j in 0..n_v {
            prop_assert_eq!(edges.s_low[j], terminal[[0, j]]);
            prop_assert_eq!(edges.s_high[j], terminal[[n_s - 1, j]]);
        }
        for i in 0..n_s {
            prop_assert_eq!(edges.v_low[i], terminal[[i, 0]]);
            prop_assert_eq!(edges.v_high[i], terminal[[i, n_v - 1]]);
        }
    }

    #[test]
    fn control_is_admissible_and_surfaces_finite(
        side in side(),
        risk in risk(),
        z in payoff(),
        mp in market(),
        adi in prop_oneof![Just(AdiMode::HalfStep), Just(AdiMode::AsWritten)],
    ) {
        let problem = HjbProblem::new(side, z, mp, risk)?;
        let grid = GridSpec::new(10.0, 3.0, 15, 15, 30)?;
        let opts = SolverOptions { adi, keep_history: true, ..Default::default() };
        let sol = solve(&problem, &grid, &opts)?;
        for level in sol.history.as_deref().unwrap_or_default() {
            prop_assert!(level.phi.iter().all(|&p| (0.0..=opts.phi_cap).contains(&p)));
            prop_assert!(level.f.iter().all(|x| x.is_finite()));
        }
    }

    // Next to the price edges the Dirichlet data carry the intrinsic payoff
    // while the interior has smoothed, and the control spikes there; the
    // check covers the central window.
    #[test]
    fn central_window_is_monotone_in_price(side in side(), z in payoff(), mp in market()) {
        let problem = HjbProblem::new(side, z, mp, RiskFunction::ExpMinusOne)?;
        let grid = GridSpec::new(10.0, 3.0, 21, 21, 40)?;
        let f = solve(&problem, &grid, &SolverOptions::default())?.surface.f;
        for i in 1..grid.n_s - 1 {
            for j in (1..grid.n_v).filter(|&j| grid.v(j - 1).abs() <= 0.5 * grid.v_max && grid.v(j).abs() <= 0.5 * grid.v_max) {
                let step = f[[i, j]] - f[[i, j - 1]];
                match side {
                    Side::Seller => prop_assert!(step <= 1e-6, "i={i} j={j} step={step}"),
                    Side::Buyer => prop_assert!(step >= -1e-6, "i={i} j={j} step={step}"),
                }
            }
        }
    }
}

fn base_market() -> MarketParams {
    MarketParams::new(0.05, 0.05, 0.3, 0.5).unwrap()
}

#[test]
fn coarse_call_rows_match_known_values() {
    let grid = GridSpec::new(10.0, 5.0, 21, 21, 160).unwrap();
    let call = Payoff::call(5.0).unwrap();
    let risk = RiskFunction::ExpMinusOne;
    let seller = solve(
        &HjbProblem::new(Side::Seller, call.clone(), base_market(), risk).unwrap(),
        &grid,
        &SolverOptions::default(),
    )
    .unwrap();
    let buyer =
        solve(&HjbProblem::new(Side::Buyer, call, base_market(), risk).unwrap(), &grid, &SolverOptions::default())
            .unwrap();
    let s = report_values(&seller.surface, &grid, 2.0).unwrap();
    let b = report_values(&buyer.surface, &grid, 2.0).unwrap();
    let want_s = [-0.8604, -0.8399, -0.7981, -0.7216, -0.5889];
    let want_b = [6.3860, 5.7689, 4.8250, 3.7099, 2.6162];
    for k in 0..5 {
        assert!((s[k] - want_s[k]).abs() < 2e-4, "{s:?}");
        assert!((b[k] - want_b[k]).abs() < 2e-4, "{b:?}");
    }
}

#[test]
fn single_step_stays_in_the_coarse_range() {
    let grid = GridSpec::new(10.0, 5.0, 21, 21, 2).unwrap();
    let problem =
        HjbProblem::new(Side::Seller, Payoff::call(5.0).unwrap(), base_market(), RiskFunction::ExpMinusOne).unwrap();
    let values =
        report_values(&solve(&problem, &grid, &SolverOptions::default()).unwrap().surface, &grid, 2.0).unwrap();
    assert!(values.iter().all(|v| (-0.87..-0.58).contains(v)), "{values:?}");
}

#[test]
fn extracted_call_curve_tracks_the_frictionless_bound() {
    let grid = GridSpec::new(10.0, 5.0, 41, 41, 320).unwrap();
    let mp = base_market();
    let risk = RiskFunction::ExpMinusOne;
    let call = Payoff::call(5.0).unwrap();
    let seller =
        solve(&HjbProblem::new(Side::Seller, call.clone(), mp, risk).unwrap(), &grid, &SolverOptions::default())
            .unwrap();
    let buyer =
        solve(&HjbProblem::new(Side::Buyer, call, mp, risk).unwrap(), &grid, &SolverOptions::default()).unwrap();
    let spots: Vec<f64> = (4..=32).map(|k| 0.25 * k as f64).collect();
    let curve = extract_curve(&seller.surface, &buyer.surface, &grid, &spots, "call").unwrap();
    for p in &curve.entries {
        let bs = erp_core::math::bs_call_price(p.s, 5.0, mp.r, mp.sigma, mp.t).unwrap();
        let exact = erp_core::erp_call(&mp, risk, 5.0, p.s).unwrap();
        assert!(!p.saturated);
        assert!(p.v <= bs + grid.dv(), "S={} v={} bs={bs}", p.s, p.v);
        assert!((p.v - exact).abs() <= 0.5 * grid.ds() + grid.dv(), "S={} v={} exact={exact}", p.s, p.v);
    }
}
