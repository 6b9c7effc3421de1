//! One function per subcommand. Each writes its files under the output
//! directory and prints a short summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use erp_core::analytical::{buyer_exposure_call_with, erp_call_with, erp_put_with};
use erp_core::extract::{
    compare_vs_frictionless, convergence_table, extract_curve_with, report_values, write_compare_csv,
    write_convergence_csv, write_curve_csv, Benchmark, ConvergenceTable, ErpCurve, REPORT_SPOTS,
};
use erp_core::format::sig6;
use erp_core::hjb::{solve, write_surface_csv, GridSpec, HjbProblem, Solution, SolverOptions};
use erp_core::math::bs_combo_price_delta;
use erp_core::{erp_q, seller_exposure_call, ErpError, Payoff, Side};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Measure, RunConfig};
use crate::error::CliError;

const CALL_LADDER: [(usize, usize, usize); 4] = [(21, 21, 160), (41, 41, 320), (81, 81, 640), (161, 161, 1280)];
const BOUNDED_LADDER: [(usize, usize, usize); 4] = [(11, 11, 40), (21, 21, 80), (41, 41, 160), (81, 81, 320)];
const BOUNDED_BENCHMARK: (usize, usize, usize) = (321, 321, 2560);

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|source| CliError::Io { path, source })?;
    Ok(BufWriter::new(file))
}

fn write_file(
    dir: &Path,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let mut w = create(dir, name)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|source| CliError::Io { path: dir.join(name), source })
}

/// JSON record with the resolved config, so the run can be replayed.
fn write_record(cfg: &RunConfig, result: impl Serialize) -> Result<(), CliError> {
    let record = json!({ "config": cfg, "result": result });
    let name = format!("{}.json", cfg.command);
    write_file(&cfg.out, &name, |w| {
        serde_json::to_writer_pretty(&mut *w, &record).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}

fn prepare(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io { path: cfg.out.clone(), source })
}

fn require_q(cfg: &RunConfig, what: &str) -> Result<(), CliError> {
    if cfg.measure == Measure::P {
        return Err(CliError::Usage(format!(
            "{what} prices under the martingale measure only; use `erp hjb` for --measure p"
        )));
    }
    Ok(())
}

fn frictionless(cfg: &RunConfig) -> Result<f64, CliError> {
    let q = cfg.market.risk_neutral();
    Ok(bs_combo_price_delta(&cfg.payoff, cfg.spot, q.r, q.sigma, q.t)?.0)
}

#[derive(Serialize)]
struct Quote {
    erp: f64,
    bs: f64,
    abs_diff: f64,
    rel_diff_pct: Option<f64>,
}

impl Quote {
    fn new(erp: f64, bs: f64) -> Self {
        let abs_diff = erp - bs;
        Self { erp, bs, abs_diff, rel_diff_pct: (bs.abs() > 1e-12).then(|| abs_diff / bs * 100.0) }
    }

    fn print(&self) {
        println!("erp           {}", sig6(self.erp));
        println!("bs            {}", sig6(self.bs));
        println!("abs_diff      {}", sig6(self.abs_diff));
        if let Some(rel) = self.rel_diff_pct {
            println!("rel_diff_pct  {}", sig6(rel));
        }
    }
}

pub fn price(cfg: &RunConfig) -> Result<(), CliError> {
    require_q(cfg, "price")?;
    let q = cfg.market.risk_neutral();
    let erp = match cfg.payoff {
        Payoff::Call { strike } => erp_call_with(&q, cfg.risk, strike, cfg.spot, cfg.nodes)?,
        Payoff::Put { strike } => erp_put_with(&q, cfg.risk, strike, cfg.spot, cfg.nodes)?,
        _ => {
            return Err(CliError::Usage(format!(
                "closed forms cover calls and puts only; price a {} with `erp mc` or `erp hjb`",
                cfg.payoff.name()
            )))
        }
    };
    prepare(cfg)?;
    let quote = Quote::new(erp, frictionless(cfg)?);
    quote.print();
    write_record(cfg, &quote)
}

pub fn mc(cfg: &RunConfig) -> Result<(), CliError> {
    require_q(cfg, "mc")?;
    prepare(cfg)?;
    let est = erp_q(&cfg.payoff, &cfg.market, cfg.risk, cfg.spot, &cfg.sim)?;
    let quote = Quote::new(est.value, frictionless(cfg)?);
    quote.print();
    println!("std_error     {}", sig6(est.std_error));
    write_record(cfg, json!({ "quote": quote, "std_error": est.std_error, "seed": cfg.sim.seed }))
}

fn solver_options(cfg: &RunConfig) -> SolverOptions {
    SolverOptions { adi: cfg.adi, phi_cap: cfg.phi_cap, ..Default::default() }
}

fn problem(cfg: &RunConfig, side: Side) -> Result<HjbProblem, CliError> {
    Ok(HjbProblem::new(side, cfg.payoff.clone(), cfg.solver_market(), cfg.risk)?)
}

fn solve_both(cfg: &RunConfig, grid: &GridSpec) -> Result<(Solution, Solution), CliError> {
    let opts = solver_options(cfg);
    let seller = solve(&problem(cfg, Side::Seller)?, grid, &opts)?;
    let buyer = solve(&problem(cfg, Side::Buyer)?, grid, &opts)?;
    for (side, sol) in [("seller", &seller), ("buyer", &buyer)] {
        if sol.non_dominant_rows > 0 {
            eprintln!(
                "warning: {side} solve had {} tridiagonal rows without diagonal dominance",
                sol.non_dominant_rows
            );
        }
    }
    Ok((seller, buyer))
}

fn print_row(label: &str, values: &[f64; 5]) {
    let cells: Vec<String> = values.iter().map(|x| format!("{x:>10.4}")).collect();
    println!("{label:<8}{}", cells.join(""));
}

pub fn hjb(cfg: &RunConfig) -> Result<(), CliError> {
    prepare(cfg)?;
    let (seller, buyer) = solve_both(cfg, &cfg.grid)?;
    for (name, sol) in [("surface_seller.csv", &seller), ("surface_buyer.csv", &buyer)] {
        write_file(&cfg.out, name, |w| write_surface_csv(w, &cfg.grid, std::slice::from_ref(&sol.surface)))?;
    }
    let seller_row = report_values(&seller.surface, &cfg.grid, cfg.v0)?;
    let buyer_row = report_values(&buyer.surface, &cfg.grid, cfg.v0)?;
    println!("grid {} at v = {}", cfg.grid.label(), cfg.v0);
    print_row("S", &REPORT_SPOTS);
    print_row("seller", &seller_row);
    print_row("buyer", &buyer_row);
    write_record(
        cfg,
        json!({
            "spots": REPORT_SPOTS,
            "seller": seller_row,
            "buyer": buyer_row,
            "steps": seller.steps,
            "non_dominant_rows": { "seller": seller.non_dominant_rows, "buyer": buyer.non_dominant_rows },
        }),
    )
}

fn solved_curve(cfg: &RunConfig) -> Result<ErpCurve, CliError> {
    let (seller, buyer) = solve_both(cfg, &cfg.grid)?;
    let spots = cfg.grid.s_nodes();
    Ok(extract_curve_with(&seller.surface, &buyer.surface, &cfg.grid, &spots, &cfg.grid.label(), cfg.rule)?)
}

fn curve_summary(curve: &ErpCurve) -> Value {
    let saturated = curve.entries.iter().filter(|p| p.saturated).count();
    if saturated > 0 {
        eprintln!("warning: {saturated} spots sit at the top of the price axis; raise --vmax");
    }
    json!({ "spots": curve.entries.len(), "saturated": saturated, "grid": curve.label })
}

pub fn extract(cfg: &RunConfig) -> Result<(), CliError> {
    prepare(cfg)?;
    let curve = solved_curve(cfg)?;
    write_file(&cfg.out, "erp_curve.csv", |w| write_curve_csv(w, &curve))?;
    if let Some(p) = curve.entries.iter().find(|p| (p.s - cfg.spot).abs() < 1e-12) {
        println!("erp at S = {}: {}", sig6(p.s), sig6(p.v));
    }
    println!("{} prices written to erp_curve.csv", curve.entries.len());
    write_record(cfg, curve_summary(&curve))
}

pub fn compare(cfg: &RunConfig) -> Result<(), CliError> {
    prepare(cfg)?;
    let curve = solved_curve(cfg)?;
    let rows = compare_vs_frictionless(&curve, &cfg.payoff, &cfg.market.risk_neutral())?;
    write_file(&cfg.out, "compare.csv", |w| write_compare_csv(w, &rows))?;
    let sign_changes: Vec<f64> = rows
        .windows(2)
        .filter(|w| w[0].abs_diff != 0.0 && w[1].abs_diff != 0.0 && w[0].abs_diff.signum() != w[1].abs_diff.signum())
        .map(|w| 0.5 * (w[0].s + w[1].s))
        .collect();
    println!("{} rows written to compare.csv", rows.len());
    println!("erp - bs changes sign near S = {}", sign_changes.iter().map(|s| sig6(*s)).collect::<Vec<_>>().join(", "));
    write_record(cfg, json!({ "curve": curve_summary(&curve), "sign_changes": sign_changes }))
}

fn analytic_benchmark(cfg: &RunConfig, side: Side) -> Result<Option<Benchmark>, ErpError> {
    let (Payoff::Call { strike }, Measure::Q) = (&cfg.payoff, cfg.measure) else {
        return Ok(None);
    };
    let q = cfg.market.risk_neutral();
    let mut values = [0.0; 5];
    for (v, s) in values.iter_mut().zip(REPORT_SPOTS) {
        *v = match side {
            Side::Seller => seller_exposure_call(&q, cfg.risk, *strike, s, cfg.v0)?.value,
            Side::Buyer => buyer_exposure_call_with(&q, cfg.risk, *strike, s, cfg.v0, cfg.nodes)?.value,
        };
    }
    Ok(Some(Benchmark::Values(values)))
}

fn print_table(table: &ConvergenceTable) {
    println!("{}", table.side);
    for row in &table.rows {
        let values: Vec<String> = row.values.iter().map(|x| format!("{x:>9.4}")).collect();
        let ratio = row.ratio.map(|r| format!("{r:.2}")).unwrap_or_default();
        println!("  {:<16}{}  l2 {:.4}  {ratio}", row.grid.label(), values.join(""), row.l2);
    }
    let bench: Vec<String> = table.benchmark.iter().map(|x| format!("{x:>9.4}")).collect();
    println!("  {:<16}{}", "benchmark", bench.join(""));
}

pub fn convergence(cfg: &RunConfig) -> Result<(), CliError> {
    prepare(cfg)?;
    let ladder = if cfg.payoff.is_bounded() { BOUNDED_LADDER } else { CALL_LADDER };
    let (s_max, v_max) = (cfg.grid.s_max, cfg.grid.v_max);
    let grids = ladder[..cfg.levels]
        .iter()
        .map(|&(a, b, m)| GridSpec::new(s_max, v_max, a, b, m))
        .collect::<Result<Vec<_>, _>>()?;
    let opts = solver_options(cfg);
    let mut tables = Vec::new();
    for side in [Side::Seller, Side::Buyer] {
        let benchmark = match analytic_benchmark(cfg, side)? {
            Some(b) => b,
            None => {
                let (a, b, m) = BOUNDED_BENCHMARK;
                Benchmark::Solve(GridSpec::new(s_max, v_max, a, b, m)?)
            }
        };
        let table = convergence_table(&problem(cfg, side)?, &grids, &benchmark, cfg.v0, &opts)?;
        print_table(&table);
        write_file(&cfg.out, &format!("convergence_{side}.csv"), |w| write_convergence_csv(w, &table))?;
        tables.push(table);
    }
    write_record(cfg, &tables)
}
