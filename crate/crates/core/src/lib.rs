//! Equal-risk pricing of European claims when the stock cannot be sold
//! short.
//!
//! Three pricers share the types defined here: closed forms for calls and
//! puts ([`analytical`]), Monte Carlo under the martingale measure
//! ([`montecarlo`]), and a finite-difference solver for the value functions
//! under an arbitrary drift ([`hjb`]). [`extract`] turns solved surfaces
//! into price curves and convergence tables.

pub mod analytical;
pub mod error;
pub mod extract;
pub mod format;
pub mod hjb;
pub mod market;
pub mod math;
pub mod montecarlo;
pub mod payoff;
pub mod risk;

pub use analytical::{
    buyer_exposure_call, buyer_exposure_put, erp_call, erp_put, seller_exposure_call, seller_exposure_put,
    ExposureQuote,
};
pub use error::{ErpError, Result};
pub use market::{MarketParams, Side};
pub use montecarlo::{erp_q, replication_delta, simulate_exposure, HedgePolicy, McEstimate, SimConfig};
pub use payoff::{ComboLeg, Payoff};
pub use risk::RiskFunction;
