//! Convex, nondecreasing penalties applied to terminal hedging shortfall.

use serde::{Deserialize, Serialize};

/// Largest argument accepted by the exponential risk before it is treated
/// as an overflow.
pub const EXP_OVERFLOW_GUARD: f64 = 700.0;

/// A risk function `R` with `R(0) = 0`, nondecreasing, convex, and bounded
/// below.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskFunction {
    /// `R(x) = max(x, 0)`.
    PositivePart,
    /// `R(x) = e^x - 1`.
    ExpMinusOne,
}

impl RiskFunction {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RiskFunction::PositivePart => x.max(0.0),
            RiskFunction::ExpMinusOne => x.exp_m1(),
        }
    }

    /// Right derivative `D+R(x)`.
    #[inline]
    pub fn right_derivative(&self, x: f64) -> f64 {
        match self {
            RiskFunction::PositivePart => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            RiskFunction::ExpMinusOne => x.exp(),
        }
    }

    pub fn lower_bound(&self) -> f64 {
        match self {
            RiskFunction::PositivePart => 0.0,
            RiskFunction::ExpMinusOne => -1.0,
        }
    }

    /// True when `eval(x)` would overflow to infinity.
    #[inline]
    pub fn overflows(&self, x: f64) -> bool {
        matches!(self, RiskFunction::ExpMinusOne) && x > EXP_OVERFLOW_GUARD
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RiskFunction::PositivePart => "plus",
            RiskFunction::ExpMinusOne => "exp",
        }
    }
}

impl std::str::FromStr for RiskFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" | "positive-part" => Ok(RiskFunction::PositivePart),
            "exp" | "exp-minus-one" => Ok(RiskFunction::ExpMinusOne),
            other => Err(format!("unknown risk function '{other}' (expected plus or exp)")),
        }
    }
}
