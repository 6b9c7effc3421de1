//! Equal-risk prices read off solved seller and buyer surfaces, and the
//! tables built from them.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ErpError, Result};
use crate::format::sig6;
use crate::hjb::{solve, GridSpec, HjbProblem, SolverOptions, ValueSurface};
use crate::market::{MarketParams, Side};
use crate::math::{bracketed_root, bs_combo_price_delta};
use crate::payoff::Payoff;

/// Spots at which convergence tables report values.
pub const REPORT_SPOTS: [f64; 5] = [4.0, 4.5, 5.0, 5.5, 6.0];

/// Price extracted on one grid row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodePrice {
    pub v: f64,
    /// The crossing sits at the top of the price axis; `v_max` is too small
    /// to resolve it.
    pub saturated: bool,
}

/// Largest grid price on row `i` at which the seller's risk strictly exceeds
/// the buyer's. Ties count for the buyer.
pub fn extract_at_node(seller: &ValueSurface, buyer: &ValueSurface, i: usize, grid: &GridSpec) -> Result<NodePrice> {
    if i >= grid.n_s {
        return Err(ErpError::Domain(format!("row {i} is outside a grid of {} rows", grid.n_s)));
    }
    let j = (0..grid.n_v).rev().find(|&j| seller.f[[i, j]] > buyer.f[[i, j]]).ok_or(ErpError::EmptyCrossing { i })?;
    Ok(NodePrice { v: grid.v(j), saturated: j == grid.n_v - 1 })
}

/// Price where the bilinear seller and buyer surfaces cross at spot `s`.
/// Resolves prices between grid levels, unlike [`extract_at_node`].
pub fn crossing_at(seller: &ValueSurface, buyer: &ValueSurface, grid: &GridSpec, s: f64) -> Result<NodePrice> {
    let gap = |v: f64| -> Result<f64> { Ok(seller.value_at(grid, s, v)? - buyer.value_at(grid, s, v)?) };
    if gap(grid.v_max)? > 0.0 {
        return Ok(NodePrice { v: grid.v_max, saturated: true });
    }
    if gap(-grid.v_max)? <= 0.0 {
        let i = (s / grid.ds()).round() as usize;
        return Err(ErpError::EmptyCrossing { i: i.min(grid.n_s - 1) });
    }
    let v = bracketed_root(gap, -grid.v_max, grid.v_max, CROSSING_TOL)?;
    Ok(NodePrice { v, saturated: false })
}

const CROSSING_TOL: f64 = 1e-10;

/// How prices are read off a pair of surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractRule {
    /// [`extract_at_node`] on grid rows, averaged between rows.
    #[default]
    Nodal,
    /// [`crossing_at`] at each spot.
    Interpolated,
}

impl std::str::FromStr for ExtractRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "nodal" => Ok(ExtractRule::Nodal),
            "interpolated" => Ok(ExtractRule::Interpolated),
            other => Err(format!("unknown extraction rule '{other}' (expected nodal or interpolated)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub s: f64,
    pub v: f64,
    pub saturated: bool,
}

/// Equal-risk price as a function of the spot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErpCurve {
    pub entries: Vec<CurvePoint>,
    pub grid: GridSpec,
    pub label: String,
}

/// Prices at the query spots. A spot on a node takes that node's price;
/// between nodes the two neighbouring prices are averaged.
pub fn extract_curve(
    seller: &ValueSurface,
    buyer: &ValueSurface,
    grid: &GridSpec,
    spots: &[f64],
    label: &str,
) -> Result<ErpCurve> {
    extract_curve_with(seller, buyer, grid, spots, label, ExtractRule::Nodal)
}

pub fn extract_curve_with(
    seller: &ValueSurface,
    buyer: &ValueSurface,
    grid: &GridSpec,
    spots: &[f64],
    label: &str,
    rule: ExtractRule,
) -> Result<ErpCurve> {
    for w in spots.windows(2) {
        if w[1] <= w[0] {
            return Err(ErpError::Domain("query spots must be strictly increasing".into()));
        }
    }
    let entries = spots
        .par_iter()
        .map(|&s| {
            if !(0.0..=grid.s_max).contains(&s) {
                return Err(ErpError::Domain(format!("spot {s} lies outside [0, {}]", grid.s_max)));
            }
            if rule == ExtractRule::Interpolated {
                let p = crossing_at(seller, buyer, grid, s)?;
                return Ok(CurvePoint { s, v: p.v, saturated: p.saturated });
            }
            if let Some(i) = grid.s_index(s) {
                let p = extract_at_node(seller, buyer, i, grid)?;
                return Ok(CurvePoint { s, v: p.v, saturated: p.saturated });
            }
            let i = ((s / grid.ds()).floor() as usize).min(grid.n_s - 2);
            let a = extract_at_node(seller, buyer, i, grid)?;
            let b = extract_at_node(seller, buyer, i + 1, grid)?;
            Ok(CurvePoint { s, v: 0.5 * (a.v + b.v), saturated: a.saturated || b.saturated })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErpCurve { entries, grid: *grid, label: label.to_string() })
}

/// `n` evenly spaced spots strictly inside `(0, s_max)`.
pub fn interior_spots(s_max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| s_max * k as f64 / (n + 1) as f64).collect()
}

/// Values of a solved surface at the reporting spots and price `v0`.
pub fn report_values(surface: &ValueSurface, grid: &GridSpec, v0: f64) -> Result<[f64; 5]> {
    let mut out = [0.0; 5];
    for (o, s) in out.iter_mut().zip(REPORT_SPOTS) {
        *o = surface.value_at(grid, s, v0)?;
    }
    Ok(out)
}

/// Euclidean norm of the differences at the reporting spots.
pub fn l2_error(values: &[f64; 5], reference: &[f64; 5]) -> f64 {
    values.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Reference for a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub enum Benchmark {
    /// Known values at the reporting spots.
    Values([f64; 5]),
    /// A solve on a finer grid.
    Solve(GridSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub grid: GridSpec,
    pub values: [f64; 5],
    pub l2: f64,
    /// Previous row's error over this row's.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub side: Side,
    pub v0: f64,
    pub rows: Vec<ConvergenceRow>,
    pub benchmark: [f64; 5],
    /// Grid of the benchmark solve, if it was one.
    pub benchmark_grid: Option<GridSpec>,
}

/// Solves on each grid (coarse to fine) and compares with the benchmark.
pub fn convergence_table(
    problem: &HjbProblem,
    grids: &[GridSpec],
    benchmark: &Benchmark,
    v0: f64,
    opts: &SolverOptions,
) -> Result<ConvergenceTable> {
    let (reference, benchmark_grid) = match benchmark {
        Benchmark::Values(v) => (*v, None),
        Benchmark::Solve(g) => {
            let sol = solve(problem, g, opts)?;
            (report_values(&sol.surface, g, v0)?, Some(*g))
        }
    };
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(grids.len());
    for g in grids {
        let sol = solve(problem, g, opts)?;
        let values = report_values(&sol.surface, g, v0)?;
        let l2 = l2_error(&values, &reference);
        let ratio = rows.last().map(|prev| prev.l2 / l2);
        rows.push(ConvergenceRow { grid: *g, values, l2, ratio });
    }
    Ok(ConvergenceTable { side: problem.side, v0, rows, benchmark: reference, benchmark_grid })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub s: f64,
    pub erp: f64,
    pub frictionless: f64,
    pub abs_diff: f64,
    /// Omitted where the frictionless price is zero.
    pub rel_diff_pct: Option<f64>,
}

/// Equal-risk curve against the frictionless price of the same claim.
pub fn compare_vs_frictionless(curve: &ErpCurve, payoff: &Payoff, mp: &MarketParams) -> Result<Vec<CompareRow>> {
    curve
        .entries
        .iter()
        .map(|p| {
            let (bs, _) = bs_combo_price_delta(payoff, p.s, mp.r, mp.sigma, mp.t)?;
            let abs_diff = p.v - bs;
            let rel_diff_pct = (bs.abs() > 1e-12).then(|| abs_diff / bs * 100.0);
            Ok(CompareRow { s: p.s, erp: p.v, frictionless: bs, abs_diff, rel_diff_pct })
        })
        .collect()
}

pub fn write_curve_csv<W: Write>(out: &mut W, curve: &ErpCurve) -> std::io::Result<()> {
    writeln!(out, "S,v_erp")?;
    for p in &curve.entries {
        writeln!(out, "{},{}", sig6(p.s), sig6(p.v))?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write>(out: &mut W, table: &ConvergenceTable) -> std::io::Result<()> {
    writeln!(out, "grid,S4,S45,S5,S55,S6,l2,ratio")?;
    for row in &table.rows {
        let values: Vec<String> = row.values.iter().map(|x| sig6(*x)).collect();
        let ratio = row.ratio.map(sig6).unwrap_or_default();
        writeln!(
            out,
            "{}x{}x{},{},{},{}",
            row.grid.n_s,
            row.grid.n_v,
            row.grid.n_tau,
            values.join(","),
            sig6(row.l2),
            ratio
        )?;
    }
    Ok(())
}

pub fn write_compare_csv<W: Write>(out: &mut W, rows: &[CompareRow]) -> std::io::Result<()> {
    writeln!(out, "S,erp,bs,abs_diff,rel_diff_pct")?;
    for r in rows {
        let rel = r.rel_diff_pct.map(sig6).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", sig6(r.s), sig6(r.erp), sig6(r.frictionless), sig6(r.abs_diff), rel)?;
    }
    Ok(())
}
