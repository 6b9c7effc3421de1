//! Fixtures shared by the pricer benchmarks.

use erp_core::hjb::{GridSpec, HjbProblem};
use erp_core::{MarketParams, Payoff, RiskFunction, Side, SimConfig};

pub fn market() -> MarketParams {
    MarketParams::new(0.05, 0.05, 0.3, 0.5).expect("valid market")
}

pub fn call() -> Payoff {
    Payoff::call(5.0).expect("valid strike")
}

pub fn butterfly() -> Payoff {
    Payoff::butterfly(4.0, 6.0).expect("valid strikes")
}

pub fn sim_config(n_paths: usize, n_steps: usize) -> SimConfig {
    SimConfig { n_paths, n_steps, ..Default::default() }
}

pub fn seller_problem(z: Payoff) -> HjbProblem {
    HjbProblem::new(Side::Seller, z, market(), RiskFunction::ExpMinusOne).expect("valid problem")
}

pub fn grid(n: usize, m: usize) -> GridSpec {
    GridSpec::new(10.0, 5.0, n, n, m).expect("valid grid")
}
