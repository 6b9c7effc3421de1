//! Closed-form Black–Scholes prices and deltas.

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, ErpError, Result};
use crate::math::normal::std_normal_cdf;
use crate::payoff::Payoff;

fn check(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> Result<()> {
    ensure_non_negative("S", s)?;
    ensure_non_negative("K", k)?;
    ensure_finite("r", r)?;
    ensure_positive("sigma", sigma)?;
    ensure_non_negative("tau", tau)
}

/// `(d1, d2)`; only meaningful for `s, k, tau > 0`.
#[inline]
fn d1_d2(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> (f64, f64) {
    let vol = sigma * tau.sqrt();
    let d1 = ((s / k).ln() + (r + 0.5 * sigma * sigma) * tau) / vol;
    (d1, d1 - vol)
}

/// European call price. Returns the intrinsic value at `tau = 0`.
pub fn bs_call_price(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> Result<f64> {
    check(s, k, r, sigma, tau)?;
    Ok(call_unchecked(s, k, r, sigma, tau))
}

/// European put price. Returns the intrinsic value at `tau = 0`.
pub fn bs_put_price(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> Result<f64> {
    check(s, k, r, sigma, tau)?;
    Ok(put_unchecked(s, k, r, sigma, tau))
}

/// Call delta `N(d1)`; a step function at `tau = 0`.
pub fn bs_call_delta(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> Result<f64> {
    check(s, k, r, sigma, tau)?;
    Ok(call_delta_unchecked(s, k, r, sigma, tau))
}

pub(crate) fn call_unchecked(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if k == 0.0 {
        return s;
    }
    if tau == 0.0 {
        return (s - k).max(0.0);
    }
    let (d1, d2) = d1_d2(s, k, r, sigma, tau);
    let price = s * std_normal_cdf(d1) - k * (-r * tau).exp() * std_normal_cdf(d2);
    price.clamp(0.0, s)
}

pub(crate) fn put_unchecked(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    let df = (-r * tau).exp();
    if s == 0.0 {
        return k * df;
    }
    if k == 0.0 {
        return 0.0;
    }
    if tau == 0.0 {
        return (k - s).max(0.0);
    }
    let (d1, d2) = d1_d2(s, k, r, sigma, tau);
    let price = k * df * std_normal_cdf(-d2) - s * std_normal_cdf(-d1);
    price.max(0.0)
}

pub(crate) fn call_delta_unchecked(s: f64, k: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    if k == 0.0 {
        return 1.0;
    }
    if tau == 0.0 {
        return if s > k { 1.0 } else { 0.0 };
    }
    std_normal_cdf(d1_d2(s, k, r, sigma, tau).0)
}

/// Frictionless price and delta of any payoff in the call/put family.
pub fn bs_combo_price_delta(payoff: &Payoff, s: f64, r: f64, sigma: f64, tau: f64) -> Result<(f64, f64)> {
    check(s, 0.0, r, sigma, tau)?;
    match payoff {
        Payoff::Put { strike } => {
            ensure_non_negative("K", *strike)?;
            let delta = if *strike == 0.0 { 0.0 } else { call_delta_unchecked(s, *strike, r, sigma, tau) - 1.0 };
            Ok((put_unchecked(s, *strike, r, sigma, tau), delta))
        }
        other => {
            let legs = other
                .call_legs()
                .ok_or_else(|| ErpError::Unsupported(format!("no closed form for {}", other.name())))?;
            let mut price = 0.0;
            let mut delta = 0.0;
            for leg in legs {
                ensure_non_negative("K", leg.strike)?;
                price += leg.weight * call_unchecked(s, leg.strike, r, sigma, tau);
                delta += leg.weight * call_delta_unchecked(s, leg.strike, r, sigma, tau);
            }
            Ok((price, delta))
        }
    }
}
