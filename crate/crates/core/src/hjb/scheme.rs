use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{boundary_values, BoundaryStyle};
use super::grid::GridSpec;
use super::problem::HjbProblem;
use super::surface::ValueSurface;
use super::tridiag::{solve_tridiagonal, TridiagonalReport};
use crate::error::{ErpError, Result};
use crate::market::Side;

/// How far each of the two sweeps of a step advances in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdiMode {
    /// Peaceman–Rachford: `M - 1` steps, each sweep covering half a level.
    #[default]
    HalfStep,
    /// Each sweep covers a whole level, so a step spans two levels. An odd
    /// number of intervals ends with one half-step pair.
    AsWritten,
}

impl std::str::FromStr for AdiMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "half-step" => Ok(AdiMode::HalfStep),
            "as-written" => Ok(AdiMode::AsWritten),
            other => Err(format!("unknown ADI mode '{other}' (expected half-step or as-written)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub adi: AdiMode,
    pub boundary: BoundaryStyle,
    pub phi_cap: f64,
    /// Keep every time level, not just the last one.
    pub keep_history: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { adi: AdiMode::HalfStep, boundary: BoundaryStyle::TerminalConsistent, phi_cap: 4.0, keep_history: false }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Surface at `tau = T`, with the control computed from it.
    pub surface: ValueSurface,
    /// All levels from `tau = 0`, when requested.
    pub history: Option<Vec<ValueSurface>>,
    pub steps: usize,
    /// Tridiagonal rows that were not diagonally dominant, summed over the
    /// run.
    pub non_dominant_rows: usize,
}

/// `F(0, S_i, v_j)`, the terminal risk; control zero.
pub fn terminal_condition(problem: &HjbProblem, grid: &GridSpec) -> ValueSurface {
    let f = Array2::from_shape_fn((grid.n_s, grid.n_v), |(i, j)| {
        problem.terminal(problem.payoff.eval(grid.s(i)), grid.v(j))
    });
    ValueSurface { tau: 0.0, phi: Array2::zeros(f.dim()), f }
}

/// Undivided mixed difference; exactly zero when `f` does not vary in `S`.
#[inline]
fn cross(f: &Array2<f64>, i: usize, j: usize) -> f64 {
    (f[[i + 1, j + 1]] - f[[i - 1, j + 1]]) - (f[[i + 1, j - 1]] - f[[i - 1, j - 1]])
}

/// Pointwise minimiser of the generator over `phi >= 0`, from centred
/// differences of `f`.
///
/// The seller's minimiser is `-(F_Sv + (mu - r) F_v / (sigma^2 S)) / F_vv`,
/// the buyer's has the opposite sign. Where `F_vv` is not clearly positive
/// the control is zero. Edge nodes copy their nearest interior neighbour.
pub fn control_update(f: &Array2<f64>, grid: &GridSpec, problem: &HjbProblem, phi_cap: f64) -> Array2<f64> {
    let (n_s, n_v) = f.dim();
    let (ds, dv) = (grid.ds(), grid.dv());
    let mp = &problem.market;
    let sign = match problem.side {
        Side::Seller => 1.0,
        Side::Buyer => -1.0,
    };
    let excess = mp.mu - mp.r;
    let scale = f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let eps = 1e-12 * scale;
    let mut phi = Array2::zeros((n_s, n_v));
    for i in 1..n_s - 1 {
        let s = grid.s(i);
        for j in 1..n_v - 1 {
            let second = f[[i, j + 1]] - 2.0 * f[[i, j]] + f[[i, j - 1]];
            if second <= eps {
                continue;
            }
            let mut num = dv / (4.0 * ds) * cross(f, i, j);
            if excess != 0.0 {
                num += excess * dv * (f[[i, j + 1]] - f[[i, j - 1]]) / (2.0 * mp.sigma * mp.sigma * s);
            }
            phi[[i, j]] = (-sign * num / second).clamp(0.0, phi_cap);
        }
    }
    for i in 0..n_s {
        let ii = i.clamp(1, n_s - 2);
        for j in 0..n_v {
            let jj = j.clamp(1, n_v - 2);
            if ii != i || jj != j {
                phi[[i, j]] = phi[[ii, jj]];
            }
        }
    }
    phi
}

/// Per-node coefficients of the generator for a frozen control.
struct Coefficients {
    /// `sigma^2 S^2 / 2`, by `i`.
    a: Vec<f64>,
    /// `mu S`, by `i`.
    c: Vec<f64>,
    /// `phi^2 sigma^2 S^2 / 2`.
    b: Array2<f64>,
    /// `+-phi sigma^2 S^2`.
    rho: Array2<f64>,
    /// `r v +- (mu - r) phi S`.
    d: Array2<f64>,
}

impl Coefficients {
    fn new(problem: &HjbProblem, grid: &GridSpec, phi: &Array2<f64>) -> Self {
        let mp = &problem.market;
        let sign = match problem.side {
            Side::Seller => 1.0,
            Side::Buyer => -1.0,
        };
        let var = mp.sigma * mp.sigma;
        let a = (0..grid.n_s).map(|i| 0.5 * var * grid.s(i).powi(2)).collect();
        let c = (0..grid.n_s).map(|i| mp.mu * grid.s(i)).collect();
        let dim = phi.dim();
        let b = Array2::from_shape_fn(dim, |(i, j)| 0.5 * phi[[i, j]].powi(2) * var * grid.s(i).powi(2));
        let rho = Array2::from_shape_fn(dim, |(i, j)| sign * phi[[i, j]] * var * grid.s(i).powi(2));
        let d = Array2::from_shape_fn(dim, |(i, j)| mp.r * grid.v(j) + sign * (mp.mu - mp.r) * phi[[i, j]] * grid.s(i));
        Self { a, c, b, rho, d }
    }
}

/// One ADI step of size `2h` from `prev`, with the control `phi` frozen.
///
/// The first sweep is implicit in `S` with the `v` and mixed terms taken
/// from `prev`; the second is implicit in `v` with the `S` and mixed terms
/// taken from the intermediate level. Boundary data are imposed at both
/// levels.
pub fn adi_step(
    problem: &HjbProblem,
    grid: &GridSpec,
    prev: &ValueSurface,
    phi: &Array2<f64>,
    h: f64,
    style: BoundaryStyle,
) -> (ValueSurface, TridiagonalReport) {
    let (n_s, n_v) = (grid.n_s, grid.n_v);
    let (ds, dv) = (grid.ds(), grid.dv());
    let k = Coefficients::new(problem, grid, phi);
    let f = &prev.f;
    let tau_mid = prev.tau + h;
    let tau_end = prev.tau + 2.0 * h;
    let mid_edges = boundary_values(problem, grid, tau_mid, style);
    let end_edges = boundary_values(problem, grid, tau_end, style);
    let inner_s = n_s - 2;
    let inner_v = n_v - 2;

    // Sweep 1: one system per interior v-index.
    let columns: Vec<(Vec<f64>, TridiagonalReport)> = (1..n_v - 1)
        .into_par_iter()
        .map(|j| {
            let mut lower = vec![0.0; inner_s];
            let mut diag = vec![0.0; inner_s];
            let mut upper = vec![0.0; inner_s];
            let mut rhs = vec![0.0; inner_s];
            for (m, i) in (1..n_s - 1).enumerate() {
                let (a, c) = (k.a[i], k.c[i]);
                lower[m] = -h * (a / (ds * ds) - c / (2.0 * ds));
                upper[m] = -h * (a / (ds * ds) + c / (2.0 * ds));
                diag[m] = 1.0 + 2.0 * h * a / (ds * ds);
                let explicit = k.b[[i, j]] * (f[[i, j + 1]] - 2.0 * f[[i, j]] + f[[i, j - 1]]) / (dv * dv)
                    + k.d[[i, j]] * (f[[i, j + 1]] - f[[i, j - 1]]) / (2.0 * dv)
                    + k.rho[[i, j]] * cross(f, i, j) / (4.0 * ds * dv);
                rhs[m] = f[[i, j]] + h * explicit;
            }
            rhs[0] -= lower[0] * mid_edges.s_low[j];
            rhs[inner_s - 1] -= upper[inner_s - 1] * mid_edges.s_high[j];
            let mut scratch = vec![0.0; inner_s];
            let report = solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch);
            (rhs, report)
        })
        .collect();
    let mut star = Array2::zeros((n_s, n_v));
    let mut report = TridiagonalReport::default();
    for (jm, (col, r)) in columns.iter().enumerate() {
        report.non_dominant_rows += r.non_dominant_rows;
        for (m, x) in col.iter().enumerate() {
            star[[m + 1, jm + 1]] = *x;
        }
    }
    mid_edges.apply(&mut star);

    // Sweep 2: one system per interior S-index.
    let rows: Vec<(Vec<f64>, TridiagonalReport)> = (1..n_s - 1)
        .into_par_iter()
        .map(|i| {
            let (a, c) = (k.a[i], k.c[i]);
            let mut lower = vec![0.0; inner_v];
            let mut diag = vec![0.0; inner_v];
            let mut upper = vec![0.0; inner_v];
            let mut rhs = vec![0.0; inner_v];
            for (m, j) in (1..n_v - 1).enumerate() {
                let (b, d) = (k.b[[i, j]], k.d[[i, j]]);
                lower[m] = -h * (b / (dv * dv) - d / (2.0 * dv));
                upper[m] = -h * (b / (dv * dv) + d / (2.0 * dv));
                diag[m] = 1.0 + 2.0 * h * b / (dv * dv);
                let explicit = a * (star[[i + 1, j]] - 2.0 * star[[i, j]] + star[[i - 1, j]]) / (ds * ds)
                    + c * (star[[i + 1, j]] - star[[i - 1, j]]) / (2.0 * ds)
                    + k.rho[[i, j]] * cross(&star, i, j) / (4.0 * ds * dv);
                rhs[m] = star[[i, j]] + h * explicit;
            }
            rhs[0] -= lower[0] * end_edges.v_low[i];
            rhs[inner_v - 1] -= upper[inner_v - 1] * end_edges.v_high[i];
            let mut scratch = vec![0.0; inner_v];
            let report = solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch);
            (rhs, report)
        })
        .collect();
    let mut next = Array2::zeros((n_s, n_v));
    for (im, (row, r)) in rows.iter().enumerate() {
        report.non_dominant_rows += r.non_dominant_rows;
        for (m, x) in row.iter().enumerate() {
            next[[im + 1, m + 1]] = *x;
        }
    }
    end_edges.apply(&mut next);
    (ValueSurface { tau: tau_end, f: next, phi: phi.clone() }, report)
}

fn half_widths(mode: AdiMode, intervals: usize, dtau: f64) -> Vec<f64> {
    match mode {
        AdiMode::HalfStep => vec![0.5 * dtau; intervals],
        AdiMode::AsWritten => {
            let mut hs = vec![dtau; intervals / 2];
            if intervals % 2 == 1 {
                hs.push(0.5 * dtau);
            }
            hs
        }
    }
}

/// Marches from the terminal condition at `tau = 0` to `tau = T`,
/// refreshing the control from the current level before every step.
pub fn solve(problem: &HjbProblem, grid: &GridSpec, opts: &SolverOptions) -> Result<Solution> {
    grid.validate()?;
    if opts.phi_cap.is_nan() || opts.phi_cap < 0.0 {
        return Err(ErpError::Domain(format!("control cap must be non-negative, got {}", opts.phi_cap)));
    }
    let mp = &problem.market;
    let dtau = grid.dtau(mp.t);
    let mut current = terminal_condition(problem, grid);
    let mut history = opts.keep_history.then(Vec::new);
    let mut non_dominant_rows = 0;
    let widths = half_widths(opts.adi, grid.n_tau - 1, dtau);
    for (step, &h) in widths.iter().enumerate() {
        let phi = control_update(&current.f, grid, problem, opts.phi_cap);
        let (next, report) = adi_step(problem, grid, &current, &phi, h, opts.boundary);
        non_dominant_rows += report.non_dominant_rows;
        if let Some(((i, j), &value)) = next.f.indexed_iter().find(|(_, x)| !x.is_finite()) {
            return Err(ErpError::SurfaceBlowUp { i, j, step, value });
        }
        if let Some(levels) = history.as_mut() {
            current.phi = phi;
            levels.push(current);
        }
        current = next;
    }
    current.phi = control_update(&current.f, grid, problem, opts.phi_cap);
    if let Some(levels) = history.as_mut() {
        levels.push(current.clone());
    }
    Ok(Solution { surface: current, history, steps: widths.len(), non_dominant_rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketParams;
    use crate::math::{bs_call_delta, bs_call_price};
    use crate::payoff::Payoff;
    use crate::risk::RiskFunction;

    fn call_problem(side: Side) -> HjbProblem {
        let mp = MarketParams::new(0.05, 0.05, 0.3, 0.5).unwrap();
        HjbProblem::new(side, Payoff::call(5.0).unwrap(), mp, RiskFunction::ExpMinusOne).unwrap()
    }

    #[test]
    fn schedules_reach_the_horizon() {
        for mode in [AdiMode::HalfStep, AdiMode::AsWritten] {
            for intervals in [1, 2, 7, 159] {
                let total: f64 = half_widths(mode, intervals, 0.01).iter().map(|h| 2.0 * h).sum();
                assert!((total - intervals as f64 * 0.01).abs() < 1e-12);
            }
        }
        assert_eq!(half_widths(AdiMode::AsWritten, 7, 0.1).len(), 4);
    }

    #[test]
    fn terminal_values() {
        let grid = GridSpec::new(10.0, 5.0, 21, 21, 10).unwrap();
        let seller = terminal_condition(&call_problem(Side::Seller), &grid);
        assert_eq!(seller.f[[10, 10]], 0.0);
        let buyer = terminal_condition(&call_problem(Side::Buyer), &grid);
        for j in 0..21 {
            assert_eq!(buyer.f[[0, j]], grid.v(j).exp_m1());
        }
        let mp = MarketParams::new(0.05, 0.05, 0.3, 0.5).unwrap();
        let fly =
            HjbProblem::new(Side::Seller, Payoff::butterfly(4.0, 6.0).unwrap(), mp, RiskFunction::ExpMinusOne).unwrap();
        let grid = GridSpec::new(10.0, 3.0, 11, 7, 10).unwrap();
        assert_eq!(terminal_condition(&fly, &grid).f[[5, 4]], 0.0);
    }

    #[test]
    fn control_vanishes_without_price_dependence() {
        let grid = GridSpec::new(10.0, 5.0, 21, 21, 10).unwrap();
        let f = Array2::from_shape_fn((21, 21), |(_, j)| (-grid.v(j)).exp_m1());
        let phi = control_update(&f, &grid, &call_problem(Side::Seller), 4.0);
        assert!(phi.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn control_recovers_call_delta_from_the_exact_surface() {
        let grid = GridSpec::new(10.0, 5.0, 161, 161, 10).unwrap();
        let f = Array2::from_shape_fn((161, 161), |(i, j)| {
            let c = bs_call_price(grid.s(i), 5.0, 0.05, 0.3, 0.5).unwrap();
            (0.025f64.exp() * (c - grid.v(j))).exp_m1()
        });
        let phi = control_update(&f, &grid, &call_problem(Side::Seller), 4.0);
        for i in (40..=120).step_by(10) {
            for j in (50..=110).step_by(10) {
                let delta = bs_call_delta(grid.s(i), 5.0, 0.05, 0.3, 0.5).unwrap();
                assert!((phi[[i, j]] - delta).abs() < 5e-3, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn negative_cross_term_gives_positive_control() {
        let grid = GridSpec::new(2.0, 2.0, 5, 5, 2).unwrap();
        let f = Array2::from_shape_fn((5, 5), |(i, j)| {
            let (s, v) = (grid.s(i), grid.v(j));
            v * v - s * v
        });
        let phi = control_update(&f, &grid, &call_problem(Side::Seller), 4.0);
        assert!(phi[[2, 2]] > 0.0);
        let phi_b = control_update(&f, &grid, &call_problem(Side::Buyer), 4.0);
        assert_eq!(phi_b[[2, 2]], 0.0);
    }

    #[test]
    fn price_independent_surface_is_a_fixed_point() {
        // Z = 0 with no discounting: F = R(-v) is piecewise linear in v and
        // flat in S, so every difference term vanishes.
        let mp = MarketParams::new(0.0, 0.0, 0.3, 0.5).unwrap();
        let nothing = Payoff::combo(vec![crate::payoff::ComboLeg { weight: 0.0, strike: 5.0 }]).unwrap();
        let p = HjbProblem::new(Side::Seller, nothing, mp, RiskFunction::PositivePart).unwrap();
        let grid = GridSpec::new(10.0, 5.0, 11, 11, 5).unwrap();
        let surf = terminal_condition(&p, &grid);
        let (next, _) = adi_step(&p, &grid, &surf, &Array2::zeros((11, 11)), 0.01, BoundaryStyle::TerminalConsistent);
        for ((i, j), x) in next.f.indexed_iter() {
            assert!((x - surf.f[[i, j]]).abs() < 1e-13);
        }
    }

    #[test]
    fn single_step_stays_in_the_coarse_range() {
        let grid = GridSpec::new(10.0, 5.0, 21, 21, 2).unwrap();
        let sol = solve(&call_problem(Side::Seller), &grid, &SolverOptions::default()).unwrap();
        for s in [4.0, 4.5, 5.0, 5.5, 6.0] {
            let x = sol.surface.value_at(&grid, s, 2.0).unwrap();
            assert!(x > -0.87 && x < -0.58, "S={s}: {x}");
        }
    }

    #[test]
    fn history_has_every_level() {
        let grid = GridSpec::new(10.0, 5.0, 11, 11, 6).unwrap();
        let opts = SolverOptions { keep_history: true, ..SolverOptions::default() };
        let sol = solve(&call_problem(Side::Buyer), &grid, &opts).unwrap();
        let levels = sol.history.unwrap();
        assert_eq!(levels.len(), 6);
        assert!((levels[5].tau - 0.5).abs() < 1e-12);
        assert_eq!(levels[5].f, sol.surface.f);
    }
}
