use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::problem::{BoundaryPreset, HjbProblem};
use crate::market::Side;

/// Dirichlet data on the four edges of the truncated domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryStyle {
    /// The terminal risk with the contract value grown at the bond rate,
    /// `R(Z(S) - v e^{r tau})` for the seller, on every edge.
    #[default]
    TerminalConsistent,
    /// As above, except the edges where the position is hopelessly over-
    /// or under-funded, which are pinned to the risk's lower bound: the
    /// seller at `+v_max`, the buyer at `-v_max`, and the call buyer at
    /// `S_max`.
    Asymptotic,
}

/// Edge values at one time level. `s_low`/`s_high` run over `j`, `v_low`/
/// `v_high` over `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySlices {
    pub s_low: Vec<f64>,
    pub s_high: Vec<f64>,
    pub v_low: Vec<f64>,
    pub v_high: Vec<f64>,
}

impl BoundarySlices {
    /// Writes the edges into `f`. The v-edges are written last and own the
    /// corners.
    pub fn apply(&self, f: &mut Array2<f64>) {
        let (n_s, n_v) = f.dim();
        for j in 0..n_v {
            f[[0, j]] = self.s_low[j];
            f[[n_s - 1, j]] = self.s_high[j];
        }
        for i in 0..n_s {
            f[[i, 0]] = self.v_low[i];
            f[[i, n_v - 1]] = self.v_high[i];
        }
    }
}

pub fn boundary_values(problem: &HjbProblem, grid: &GridSpec, tau: f64, style: BoundaryStyle) -> BoundarySlices {
    let growth = problem.market.growth(tau);
    let lb = problem.risk.lower_bound();
    let z = |s: f64| problem.payoff.eval(s);
    let edge = |s: f64, v: f64| problem.terminal(z(s), v * growth);
    let s_max = grid.s_max;
    let asymptotic = style == BoundaryStyle::Asymptotic;

    let s_low = grid.v_nodes().iter().map(|&v| edge(0.0, v)).collect();
    let s_high = grid
        .v_nodes()
        .iter()
        .map(|&v| {
            if asymptotic && problem.side == Side::Buyer && problem.preset == BoundaryPreset::Call {
                lb
            } else {
                edge(s_max, v)
            }
        })
        .collect();
    let far = |side: Side| asymptotic && problem.side == side;
    let v_low = grid.s_nodes().iter().map(|&s| if far(Side::Buyer) { lb } else { edge(s, -grid.v_max) }).collect();
    let v_high = grid.s_nodes().iter().map(|&s| if far(Side::Seller) { lb } else { edge(s, grid.v_max) }).collect();
    BoundarySlices { s_low, s_high, v_low, v_high }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketParams;
    use crate::payoff::Payoff;
    use crate::risk::RiskFunction;

    fn problem(side: Side, payoff: Payoff) -> HjbProblem {
        let mp = MarketParams::new(0.05, 0.05, 0.3, 0.5).unwrap();
        HjbProblem::new(side, payoff, mp, RiskFunction::ExpMinusOne).unwrap()
    }

    #[test]
    fn call_seller_corner_and_far_edge() {
        let grid = GridSpec::new(10.0, 5.0, 21, 21, 160).unwrap();
        let p = problem(Side::Seller, Payoff::call(5.0).unwrap());
        let b = boundary_values(&p, &grid, 0.0, BoundaryStyle::TerminalConsistent);
        assert_eq!(b.s_low[10], 0.0);
        let b = boundary_values(&p, &grid, 0.5, BoundaryStyle::TerminalConsistent);
        let g = 0.025f64.exp();
        for j in 0..21 {
            assert_eq!(b.s_high[j], RiskFunction::ExpMinusOne.eval(5.0 - grid.v(j) * g));
        }
        let a = boundary_values(&p, &grid, 0.5, BoundaryStyle::Asymptotic);
        assert!(a.v_high.iter().all(|&x| x == -1.0));
        assert_eq!(a.v_low, b.v_low);
    }

    #[test]
    fn call_buyer_asymptotic_edges() {
        let grid = GridSpec::new(10.0, 5.0, 21, 21, 160).unwrap();
        let p = problem(Side::Buyer, Payoff::call(5.0).unwrap());
        let a = boundary_values(&p, &grid, 0.3, BoundaryStyle::Asymptotic);
        assert!(a.s_high.iter().all(|&x| x == -1.0));
        assert!(a.v_low.iter().all(|&x| x == -1.0));
        let g = (0.05f64 * 0.3).exp();
        assert_eq!(a.s_low[20], (5.0 * g).exp_m1());
    }

    #[test]
    fn bounded_payoff_is_worthless_at_both_price_ends() {
        let grid = GridSpec::new(10.0, 3.0, 41, 41, 160).unwrap();
        for side in [Side::Seller, Side::Buyer] {
            let p = problem(side, Payoff::butterfly(4.0, 6.0).unwrap());
            for style in [BoundaryStyle::TerminalConsistent, BoundaryStyle::Asymptotic] {
                for tau in [0.0, 0.2, 0.5] {
                    let b = boundary_values(&p, &grid, tau, style);
                    assert_eq!(b.s_low, b.s_high);
                }
            }
        }
    }
}
