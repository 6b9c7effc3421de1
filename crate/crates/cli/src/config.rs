//! Command-line flags, the key=value config file, and the resolved run
//! configuration echoed into every JSON record.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use erp_core::extract::ExtractRule;
use erp_core::hjb::{AdiMode, GridSpec};
use erp_core::{ComboLeg, MarketParams, Payoff, RiskFunction, SimConfig};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "erp", version, about = "Equal-risk prices of European claims when short selling is banned")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Closed-form equal-risk price of a call or put.
    #[command(args_override_self = true)]
    Price(Opts),
    /// Monte Carlo equal-risk price under the martingale measure.
    #[command(args_override_self = true)]
    Mc(Opts),
    /// Seller and buyer value surfaces from the finite-difference solver.
    #[command(args_override_self = true)]
    Hjb(Opts),
    /// Equal-risk price curve read off solved surfaces.
    #[command(args_override_self = true)]
    Extract(Opts),
    /// Mesh-refinement table against a benchmark.
    #[command(args_override_self = true)]
    Convergence(Opts),
    /// Extracted price curve against the frictionless price.
    #[command(args_override_self = true)]
    Compare(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Price(_) => "price",
            Command::Mc(_) => "mc",
            Command::Hjb(_) => "hjb",
            Command::Extract(_) => "extract",
            Command::Convergence(_) => "convergence",
            Command::Compare(_) => "compare",
        }
    }

    pub fn opts(&self) -> &Opts {
        match self {
            Command::Price(o)
            | Command::Mc(o)
            | Command::Hjb(o)
            | Command::Extract(o)
            | Command::Convergence(o)
            | Command::Compare(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PayoffKind {
    Call,
    Put,
    Butterfly,
    Combo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RiskKind {
    Plus,
    Exp,
}

impl From<RiskKind> for RiskFunction {
    fn from(k: RiskKind) -> Self {
        match k {
            RiskKind::Plus => RiskFunction::PositivePart,
            RiskKind::Exp => RiskFunction::ExpMinusOne,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Drift replaced by the risk-free rate.
    Q,
    /// Drift `mu` as given.
    P,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// key=value file; flags on the command line take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Claim to price [default: call].
    #[arg(long)]
    pub payoff: Option<PayoffKind>,
    /// Strike of a call or put [default: 5].
    #[arg(long = "K")]
    pub k: Option<f64>,
    /// Lower butterfly strike [default: 4].
    #[arg(long = "K1")]
    pub k1: Option<f64>,
    /// Upper butterfly strike [default: 6].
    #[arg(long = "K2")]
    pub k2: Option<f64>,
    /// Combo legs as weight@strike, comma separated, e.g. 1@4,-2@5,1@6.
    #[arg(long)]
    pub weights: Option<String>,
    /// Spot price [default: 5].
    #[arg(long = "S")]
    pub s: Option<f64>,
    /// Physical drift [default: 0.05].
    #[arg(long)]
    pub mu: Option<f64>,
    /// Risk-free rate [default: 0.05].
    #[arg(long)]
    pub r: Option<f64>,
    /// Volatility [default: 0.3].
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Maturity in years [default: 0.5].
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Risk function: positive part or exp(x) - 1 [default: exp].
    #[arg(long)]
    pub risk: Option<RiskKind>,
    /// Measure of the solver dynamics [default: q].
    #[arg(long)]
    pub measure: Option<Measure>,
    /// Solver grid N1xN2xM [default: 81x81x320 bounded, 81x81x640 otherwise].
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize, usize)>,
    /// Upper end of the spot grid [default: 10].
    #[arg(long = "Smax")]
    pub s_max: Option<f64>,
    /// Half-width of the symmetric price grid [default: 3 bounded, 5 otherwise].
    #[arg(long)]
    pub vmax: Option<f64>,
    /// Price at which solved surfaces are reported [default: 1 bounded, 2 otherwise].
    #[arg(long)]
    pub v0: Option<f64>,
    /// Monte Carlo paths [default: 200000].
    #[arg(long)]
    pub paths: Option<usize>,
    /// Monte Carlo time steps [default: 250].
    #[arg(long)]
    pub steps: Option<usize>,
    /// Monte Carlo seed [default: 20240531].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Antithetic paths [default: true].
    #[arg(long)]
    pub antithetic: Option<bool>,
    /// ADI splitting: half-step or as-written [default: half-step].
    #[arg(long)]
    pub adi: Option<AdiMode>,
    /// Upper bound on the hedge control [default: 4].
    #[arg(long = "phi-cap")]
    pub phi_cap: Option<f64>,
    /// Quadrature nodes for the closed forms [default: 200].
    #[arg(long)]
    pub nodes: Option<usize>,
    /// How prices are read off the surfaces: nodal or interpolated [default: nodal].
    #[arg(long)]
    pub rule: Option<ExtractRule>,
    /// Grids of the refinement ladder to run, coarsest first [default: 4].
    #[arg(long)]
    pub levels: Option<usize>,
    /// Output directory [default: .].
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<(usize, usize, usize), String> {
    let parts: Vec<&str> = s.split('x').collect();
    let bad = || format!("grid '{s}' is not of the form N1xN2xM");
    if parts.len() != 3 {
        return Err(bad());
    }
    let n = parts.iter().map(|p| p.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
    Ok((n[0], n[1], n[2]))
}

fn parse_legs(s: &str) -> Result<Vec<ComboLeg>, CliError> {
    s.split(',')
        .map(|leg| {
            let (w, k) = leg
                .split_once('@')
                .ok_or_else(|| CliError::Usage(format!("combo leg '{leg}' is not of the form weight@strike")))?;
            let weight = w.trim().parse().map_err(|_| CliError::Usage(format!("bad weight in '{leg}'")))?;
            let strike = k.trim().parse().map_err(|_| CliError::Usage(format!("bad strike in '{leg}'")))?;
            Ok(ComboLeg { weight, strike })
        })
        .collect()
}

/// Flag names accepted as config-file keys.
fn known_keys(command: &str) -> BTreeSet<String> {
    let cli = Cli::command();
    let sub = cli.find_subcommand(command).expect("subcommand exists");
    sub.get_arguments()
        .filter_map(|a| a.get_long())
        .filter(|l| *l != "config" && *l != "help")
        .map(str::to_string)
        .collect()
}

/// Turns the config file into flags. Comments start with `#`.
fn file_flags(path: &Path, command: &str) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let keys = known_keys(command);
    let mut flags = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{}:{}: expected key=value", path.display(), n + 1)))?;
        let key = key.trim();
        if !keys.contains(key) {
            return Err(CliError::Usage(format!("{}:{}: unknown key '{key}'", path.display(), n + 1)));
        }
        flags.push(format!("--{key}"));
        flags.push(value.trim().to_string());
    }
    Ok(flags)
}

/// Parses the command line, splicing in the config file's entries ahead of
/// the explicit flags so the flags win.
pub fn parse_args(argv: Vec<String>) -> Result<Cli, CliError> {
    let first = Cli::try_parse_from(&argv)?;
    let Some(path) = first.command.opts().config.clone() else {
        return Ok(first);
    };
    let command = first.command.name();
    let at = argv.iter().position(|a| a == command).expect("subcommand present in argv") + 1;
    let mut merged = argv[..at].to_vec();
    merged.extend(file_flags(&path, command)?);
    merged.extend_from_slice(&argv[at..]);
    Ok(Cli::try_parse_from(merged)?)
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub payoff: Payoff,
    pub spot: f64,
    pub market: MarketParams,
    pub risk: RiskFunction,
    pub measure: Measure,
    pub grid: GridSpec,
    pub v0: f64,
    pub sim: SimConfig,
    pub adi: AdiMode,
    pub phi_cap: f64,
    pub nodes: usize,
    pub rule: ExtractRule,
    pub levels: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn resolve(command: &Command) -> Result<Self, CliError> {
        let o = command.opts();
        let kind = o.payoff.unwrap_or(PayoffKind::Call);
        let payoff = match kind {
            PayoffKind::Call => Payoff::call(o.k.unwrap_or(5.0))?,
            PayoffKind::Put => Payoff::put(o.k.unwrap_or(5.0))?,
            PayoffKind::Butterfly => Payoff::butterfly(o.k1.unwrap_or(4.0), o.k2.unwrap_or(6.0))?,
            PayoffKind::Combo => {
                let legs =
                    o.weights.as_deref().ok_or_else(|| CliError::Usage("--payoff combo needs --weights".into()))?;
                Payoff::combo(parse_legs(legs)?)?
            }
        };
        let bounded = payoff.is_bounded();
        let (grid_default, vmax_default, v0_default) =
            if bounded { ((81, 81, 320), 3.0, 1.0) } else { ((81, 81, 640), 5.0, 2.0) };
        let (n_s, n_v, n_tau) = o.grid.unwrap_or(grid_default);
        let grid = GridSpec::new(o.s_max.unwrap_or(10.0), o.vmax.unwrap_or(vmax_default), n_s, n_v, n_tau)?;
        let market =
            MarketParams::new(o.mu.unwrap_or(0.05), o.r.unwrap_or(0.05), o.sigma.unwrap_or(0.3), o.t.unwrap_or(0.5))?;
        let defaults = SimConfig::default();
        let sim = SimConfig {
            n_paths: o.paths.unwrap_or(defaults.n_paths),
            n_steps: o.steps.unwrap_or(defaults.n_steps),
            seed: o.seed.unwrap_or(defaults.seed),
            antithetic: o.antithetic.unwrap_or(defaults.antithetic),
        };
        sim.validate()?;
        let spot = o.s.unwrap_or(5.0);
        if !(spot.is_finite() && spot >= 0.0) {
            return Err(CliError::Usage(format!("--S must be a non-negative number, got {spot}")));
        }
        let phi_cap = o.phi_cap.unwrap_or(4.0);
        if !(phi_cap.is_finite() && phi_cap >= 0.0) {
            return Err(CliError::Usage(format!("--phi-cap must be a non-negative number, got {phi_cap}")));
        }
        let nodes = o.nodes.unwrap_or(erp_core::math::quadrature::DEFAULT_NODES);
        if nodes < 2 {
            return Err(CliError::Usage(format!("--nodes must be at least 2, got {nodes}")));
        }
        let levels = o.levels.unwrap_or(4);
        if !(1..=4).contains(&levels) {
            return Err(CliError::Usage(format!("--levels must be between 1 and 4, got {levels}")));
        }
        Ok(Self {
            command: command.name().to_string(),
            payoff,
            spot,
            market,
            risk: o.risk.unwrap_or(RiskKind::Exp).into(),
            measure: o.measure.unwrap_or(Measure::Q),
            grid,
            v0: o.v0.unwrap_or(v0_default),
            sim,
            adi: o.adi.unwrap_or_default(),
            phi_cap,
            nodes,
            rule: o.rule.unwrap_or_default(),
            levels,
            out: o.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    /// Market the solver runs in.
    pub fn solver_market(&self) -> MarketParams {
        match self.measure {
            Measure::Q => self.market.risk_neutral(),
            Measure::P => self.market,
        }
    }
}
