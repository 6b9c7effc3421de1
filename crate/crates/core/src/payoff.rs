//! European payoffs built from calls and puts.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ErpError, Result};

/// One `weight * (S - strike)^+` term of a call combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComboLeg {
    pub weight: f64,
    pub strike: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Payoff {
    Call {
        strike: f64,
    },
    Put {
        strike: f64,
    },
    /// `(S-K1)^+ - 2 (S-(K1+K2)/2)^+ + (S-K2)^+`.
    Butterfly {
        k1: f64,
        k2: f64,
    },
    /// `sum_i w_i (S-K_i)^+`. Weights may be negative, so the payoff can be.
    Combo {
        legs: Vec<ComboLeg>,
    },
}

impl Payoff {
    pub fn call(strike: f64) -> Result<Self> {
        ensure_non_negative("strike", strike)?;
        Ok(Payoff::Call { strike })
    }

    pub fn put(strike: f64) -> Result<Self> {
        ensure_non_negative("strike", strike)?;
        Ok(Payoff::Put { strike })
    }

    pub fn butterfly(k1: f64, k2: f64) -> Result<Self> {
        ensure_non_negative("K1", k1)?;
        ensure_non_negative("K2", k2)?;
        if k1 >= k2 {
            return Err(ErpError::Domain(format!("butterfly needs K1 < K2, got {k1} >= {k2}")));
        }
        Ok(Payoff::Butterfly { k1, k2 })
    }

    pub fn combo(legs: Vec<ComboLeg>) -> Result<Self> {
        if legs.is_empty() {
            return Err(ErpError::Domain("call combination needs at least one leg".into()));
        }
        for leg in &legs {
            ensure_non_negative("strike", leg.strike)?;
            if !leg.weight.is_finite() {
                return Err(ErpError::Domain(format!("non-finite weight {}", leg.weight)));
            }
        }
        Ok(Payoff::Combo { legs })
    }

    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Payoff::Call { strike } => (s - strike).max(0.0),
            Payoff::Put { strike } => (strike - s).max(0.0),
            Payoff::Butterfly { k1, k2 } => {
                let mid = 0.5 * (k1 + k2);
                (s - k1).max(0.0) - 2.0 * (s - mid).max(0.0) + (s - k2).max(0.0)
            }
            Payoff::Combo { legs } => legs.iter().map(|l| l.weight * (s - l.strike).max(0.0)).sum(),
        }
    }

    /// The payoff written as calls, when it is one.
    pub fn call_legs(&self) -> Option<Vec<ComboLeg>> {
        match self {
            Payoff::Call { strike } => Some(vec![ComboLeg { weight: 1.0, strike: *strike }]),
            Payoff::Put { .. } => None,
            Payoff::Butterfly { k1, k2 } => Some(vec![
                ComboLeg { weight: 1.0, strike: *k1 },
                ComboLeg { weight: -2.0, strike: 0.5 * (k1 + k2) },
                ComboLeg { weight: 1.0, strike: *k2 },
            ]),
            Payoff::Combo { legs } => Some(legs.clone()),
        }
    }

    /// `-Z` as a call combination. Puts have no such representation.
    pub fn negated(&self) -> Result<Payoff> {
        let legs = self
            .call_legs()
            .ok_or_else(|| ErpError::Unsupported("a put cannot be negated into a call combination".into()))?;
        Ok(Payoff::Combo { legs: legs.into_iter().map(|l| ComboLeg { weight: -l.weight, ..l }).collect() })
    }

    /// Strikes where the payoff has a kink, ascending and deduplicated.
    pub fn kinks(&self) -> Vec<f64> {
        let mut ks: Vec<f64> = match self {
            Payoff::Call { strike } | Payoff::Put { strike } => vec![*strike],
            _ => self.call_legs().unwrap_or_default().iter().map(|l| l.strike).collect(),
        };
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        ks
    }

    pub fn max_strike(&self) -> f64 {
        self.kinks().last().copied().unwrap_or(0.0)
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Payoff::Call { .. } => false,
            Payoff::Put { .. } | Payoff::Butterfly { .. } => true,
            Payoff::Combo { legs } => legs.iter().map(|l| l.weight).sum::<f64>().abs() < 1e-12,
        }
    }

    /// `sup |Z(S)|` over `S >= 0` for bounded payoffs.
    pub fn sup_bound(&self) -> Option<f64> {
        if !self.is_bounded() {
            return None;
        }
        // Piecewise linear with flat tails: the extremum sits at 0 or a kink.
        let sup = std::iter::once(0.0).chain(self.kinks()).map(|s| self.eval(s).abs()).fold(0.0, f64::max);
        Some(sup)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Payoff::Call { .. } => "call",
            Payoff::Put { .. } => "put",
            Payoff::Butterfly { .. } => "butterfly",
            Payoff::Combo { .. } => "combo",
        }
    }
}
