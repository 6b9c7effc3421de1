//! Market coefficients and the two sides of a contract.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Result};

/// Black–Scholes market with a risk-free bond and one stock.
///
/// `mu` is the physical drift; pricing under the martingale measure uses
/// [`MarketParams::risk_neutral`], which replaces it by `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub mu: f64,
    pub r: f64,
    pub sigma: f64,
    /// Horizon (years).
    pub t: f64,
}

impl MarketParams {
    pub fn new(mu: f64, r: f64, sigma: f64, t: f64) -> Result<Self> {
        ensure_finite("mu", mu)?;
        ensure_finite("r", r)?;
        ensure_positive("sigma", sigma)?;
        ensure_positive("T", t)?;
        Ok(Self { mu, r, sigma, t })
    }

    /// Same market with the drift set to the risk-free rate.
    pub fn risk_neutral(&self) -> Self {
        Self { mu: self.r, ..*self }
    }

    /// Bond growth factor `e^{r tau}`.
    #[inline]
    pub fn growth(&self, tau: f64) -> f64 {
        (self.r * tau).exp()
    }

    /// Position of `strike` in standard-normal units of the terminal
    /// log-price under the martingale measure, started from `spot`.
    ///
    /// `S_T = spot * exp((r - sigma^2/2) T + sigma sqrt(T) x)` crosses
    /// `strike` at the returned `x`.
    pub fn kink_preimage(&self, spot: f64, strike: f64) -> f64 {
        let vol = self.sigma * self.t.sqrt();
        ((strike / spot).ln() - (self.r - 0.5 * self.sigma * self.sigma) * self.t) / vol
    }

    /// Terminal stock price under the martingale measure for a standard
    /// normal draw `x`.
    #[inline]
    pub fn terminal_spot(&self, spot: f64, x: f64) -> f64 {
        spot * ((self.r - 0.5 * self.sigma * self.sigma) * self.t + self.sigma * self.t.sqrt() * x).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Seller,
    Buyer,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Seller => "seller",
            Side::Buyer => "buyer",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(MarketParams::new(0.05, 0.05, 0.0, 0.5).is_err());
        assert!(MarketParams::new(0.05, 0.05, 0.3, 0.0).is_err());
        assert!(MarketParams::new(f64::NAN, 0.05, 0.3, 0.5).is_err());
        assert!(MarketParams::new(0.05, 0.05, 0.3, 0.5).is_ok());
    }

    #[test]
    fn kink_preimage_maps_back_to_strike() {
        let mp = MarketParams::new(0.1, 0.05, 0.3, 0.5).unwrap();
        let x = mp.kink_preimage(4.0, 5.0);
        assert!((mp.terminal_spot(4.0, x) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn risk_neutral_replaces_drift() {
        let mp = MarketParams::new(0.12, 0.05, 0.3, 0.5).unwrap();
        assert_eq!(mp.risk_neutral().mu, 0.05);
    }
}
