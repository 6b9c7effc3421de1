use serde::{Deserialize, Serialize};

use crate::error::{ErpError, Result};
use crate::market::{MarketParams, Side};
use crate::payoff::Payoff;
use crate::risk::RiskFunction;

/// Family of boundary data: unbounded call-like payoffs or payoffs that
/// vanish at both ends of the price axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPreset {
    Call,
    BoundedPayoff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HjbProblem {
    pub side: Side,
    pub payoff: Payoff,
    pub market: MarketParams,
    pub risk: RiskFunction,
    pub preset: BoundaryPreset,
}

impl HjbProblem {
    /// Picks the preset from the payoff: calls use [`BoundaryPreset::Call`],
    /// bounded payoffs [`BoundaryPreset::BoundedPayoff`].
    pub fn new(side: Side, payoff: Payoff, market: MarketParams, risk: RiskFunction) -> Result<Self> {
        let preset = match &payoff {
            Payoff::Call { .. } => BoundaryPreset::Call,
            p if p.is_bounded() && !matches!(p, Payoff::Put { .. }) => BoundaryPreset::BoundedPayoff,
            p => {
                return Err(ErpError::Unsupported(format!("no boundary data for a {} payoff in the solver", p.name())))
            }
        };
        Self::with_preset(side, payoff, market, risk, preset)
    }

    pub fn with_preset(
        side: Side,
        payoff: Payoff,
        market: MarketParams,
        risk: RiskFunction,
        preset: BoundaryPreset,
    ) -> Result<Self> {
        let ok = match preset {
            BoundaryPreset::Call => matches!(payoff, Payoff::Call { .. }),
            BoundaryPreset::BoundedPayoff => payoff.is_bounded() && !matches!(payoff, Payoff::Put { .. }),
        };
        if !ok {
            return Err(ErpError::Unsupported(format!(
                "boundary preset {preset:?} does not fit a {} payoff",
                payoff.name()
            )));
        }
        Ok(Self { side, payoff, market, risk, preset })
    }

    /// Terminal risk of a position of value `v` against payoff `z`.
    #[inline]
    pub fn terminal(&self, z: f64, v: f64) -> f64 {
        match self.side {
            Side::Seller => self.risk.eval(z - v),
            Side::Buyer => self.risk.eval(v - z),
        }
    }
}
