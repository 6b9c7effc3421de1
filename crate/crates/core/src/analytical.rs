//! Closed-form risk exposures and equal-risk prices for single calls and
//! puts, with hedging priced under the martingale measure.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ErpError, Result};
use crate::market::{MarketParams, Side};
use crate::math::black_scholes::{call_unchecked, put_unchecked};
use crate::math::quadrature::{gauss_weighted_integral_split, DEFAULT_NODES};
use crate::math::root::bracketed_root;
use crate::risk::RiskFunction;

/// Bisection tolerance on the price for the implicit equations.
pub const PRICE_TOL: f64 = 1e-10;

/// Minimum expected risk of one side at a given contract price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureQuote {
    pub side: Side,
    pub spot: f64,
    pub price: f64,
    pub value: f64,
}

fn check(k: f64, s: f64, v: f64) -> Result<()> {
    ensure_non_negative("K", k)?;
    ensure_non_negative("S", s)?;
    ensure_finite("v", v)
}

fn apply(risk: RiskFunction, x: f64) -> Result<f64> {
    if risk.overflows(x) {
        return Err(ErpError::Unstable(format!("exponential risk at argument {x}")));
    }
    Ok(risk.eval(x))
}

/// Preimages of the terminal prices where the integrand has a kink: the
/// strike, and for the positive-part risk the price where the loss turns.
fn kinks(q: &MarketParams, s: f64, levels: &[f64]) -> Vec<f64> {
    levels.iter().filter(|l| **l > 0.0).map(|l| q.kink_preimage(s, *l)).collect()
}

fn quote(side: Side, spot: f64, price: f64, value: f64) -> ExposureQuote {
    ExposureQuote { side, spot, price, value }
}

/// Seller of a call hedging with the Black–Scholes delta:
/// `R(e^{rT} (C - v))`.
pub fn seller_exposure_call(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64, v: f64) -> Result<ExposureQuote> {
    check(k, s, v)?;
    let c = call_unchecked(s, k, mp.r, mp.sigma, mp.t);
    let value = apply(risk, mp.growth(mp.t) * (c - v))?;
    Ok(quote(Side::Seller, s, v, value))
}

/// Buyer of a call, who holds no stock: `E_Q[R(v e^{rT} - (S_T - K)^+)]`.
pub fn buyer_exposure_call(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64, v: f64) -> Result<ExposureQuote> {
    buyer_exposure_call_with(mp, risk, k, s, v, DEFAULT_NODES)
}

pub fn buyer_exposure_call_with(
    mp: &MarketParams,
    risk: RiskFunction,
    k: f64,
    s: f64,
    v: f64,
    nodes: usize,
) -> Result<ExposureQuote> {
    check(k, s, v)?;
    let funded = v * mp.growth(mp.t);
    if risk.overflows(funded) {
        return Err(ErpError::Unstable(format!("exponential risk at argument {funded}")));
    }
    let value = if s == 0.0 {
        risk.eval(funded)
    } else {
        let q = mp.risk_neutral();
        gauss_weighted_integral_split(
            |x| risk.eval(funded - (q.terminal_spot(s, x) - k).max(0.0)),
            &kinks(&q, s, &[k, k + funded]),
            nodes,
        )?
    };
    Ok(quote(Side::Buyer, s, v, value))
}

/// Buyer of a put hedging with the (non-positive) put delta, i.e. holding
/// nothing in the projected sense: `R(e^{rT} (v - P))`.
pub fn buyer_exposure_put(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64, v: f64) -> Result<ExposureQuote> {
    check(k, s, v)?;
    let p = put_unchecked(s, k, mp.r, mp.sigma, mp.t);
    let value = apply(risk, mp.growth(mp.t) * (v - p))?;
    Ok(quote(Side::Buyer, s, v, value))
}

/// Seller of a put, who holds no stock: `E_Q[R((K - S_T)^+ - v e^{rT})]`.
pub fn seller_exposure_put(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64, v: f64) -> Result<ExposureQuote> {
    seller_exposure_put_with(mp, risk, k, s, v, DEFAULT_NODES)
}

pub fn seller_exposure_put_with(
    mp: &MarketParams,
    risk: RiskFunction,
    k: f64,
    s: f64,
    v: f64,
    nodes: usize,
) -> Result<ExposureQuote> {
    check(k, s, v)?;
    let funded = v * mp.growth(mp.t);
    if risk.overflows(k - funded) {
        return Err(ErpError::Unstable(format!("exponential risk at argument {}", k - funded)));
    }
    let value = if s == 0.0 {
        risk.eval(k - funded)
    } else {
        let q = mp.risk_neutral();
        gauss_weighted_integral_split(
            |x| risk.eval((k - q.terminal_spot(s, x)).max(0.0) - funded),
            &kinks(&q, s, &[k, k - funded]),
            nodes,
        )?
    };
    Ok(quote(Side::Seller, s, v, value))
}

/// Equal-risk price of a call.
///
/// The exponential risk has an explicit solution. The positive part leads
/// to `C - v = P(S, K + v e^{rT}) - P(S, K)`, solved by bisection on
/// `[0, C]`.
pub fn erp_call(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64) -> Result<f64> {
    erp_call_with(mp, risk, k, s, DEFAULT_NODES)
}

pub fn erp_call_with(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64, nodes: usize) -> Result<f64> {
    check(k, s, 0.0)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let (r, sigma, t) = (mp.r, mp.sigma, mp.t);
    let c = call_unchecked(s, k, r, sigma, t);
    match risk {
        RiskFunction::ExpMinusOne => {
            let q = mp.risk_neutral();
            let m = gauss_weighted_integral_split(
                |x| (-(q.terminal_spot(s, x) - k).max(0.0)).exp(),
                &[q.kink_preimage(s, k)],
                nodes,
            )?;
            Ok(0.5 * (c - (-r * t).exp() * m.ln()))
        }
        RiskFunction::PositivePart => {
            let g = mp.growth(t);
            let p_k = put_unchecked(s, k, r, sigma, t);
            bracketed_root(|v| Ok((c - v) - (put_unchecked(s, k + v * g, r, sigma, t) - p_k)), 0.0, c, PRICE_TOL)
        }
    }
}

/// Equal-risk price of a put.
///
/// The exponential risk has an explicit solution. The positive part leads
/// to `v - P = P(S, K - v e^{rT})`, solved by bisection on `[P, P + K]`.
pub fn erp_put(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64) -> Result<f64> {
    erp_put_with(mp, risk, k, s, DEFAULT_NODES)
}

pub fn erp_put_with(mp: &MarketParams, risk: RiskFunction, k: f64, s: f64, nodes: usize) -> Result<f64> {
    check(k, s, 0.0)?;
    let (r, sigma, t) = (mp.r, mp.sigma, mp.t);
    let p = put_unchecked(s, k, r, sigma, t);
    if s == 0.0 {
        // The stock stays at zero and the payoff K is certain.
        return Ok(p);
    }
    match risk {
        RiskFunction::ExpMinusOne => {
            let q = mp.risk_neutral();
            let m = gauss_weighted_integral_split(
                |x| (k - q.terminal_spot(s, x)).max(0.0).exp(),
                &[q.kink_preimage(s, k)],
                nodes,
            )?;
            Ok(0.5 * (p + (-r * t).exp() * m.ln()))
        }
        RiskFunction::PositivePart => {
            let g = mp.growth(t);
            bracketed_root(|v| Ok((v - p) - put_unchecked(s, (k - v * g).max(0.0), r, sigma, t)), p, p + k, PRICE_TOL)
        }
    }
}
