//! Equal-risk pricing of general payoffs by simulating projected
//! Black–Scholes hedges under the martingale measure.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ErpError, Result};
use crate::market::{MarketParams, Side};
use crate::math::black_scholes::{call_delta_unchecked, call_unchecked, put_unchecked};
use crate::math::root::bracketed_root;
use crate::payoff::Payoff;
use crate::risk::RiskFunction;

/// Samples per random-number substream.
const BATCH: usize = 2048;

const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Simulated paths. With antithetic sampling each mirrored pair is one
    /// sample, so `n_paths / 2` (rounded up) samples are drawn.
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { n_paths: 200_000, n_steps: 250, seed: 20_240_531, antithetic: true }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_steps == 0 {
            return Err(ErpError::Domain(format!(
                "need at least one path and one step, got {} paths and {} steps",
                self.n_paths, self.n_steps
            )));
        }
        Ok(())
    }

    pub fn n_samples(&self) -> usize {
        if self.antithetic {
            self.n_paths.div_ceil(2)
        } else {
            self.n_paths
        }
    }
}

/// How far below the frictionless delta a hedger stays. `Projected` is the
/// optimal rule; `Shifted` exists to test that claim.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HedgeRule {
    Projected,
    Shifted(f64),
}

/// Stock holding of one side: the seller holds `max(pi, 0)` shares and the
/// buyer `max(-pi, 0)` shares against its short replicating position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgePolicy {
    pub side: Side,
    pub rule: HedgeRule,
}

impl HedgePolicy {
    pub fn projected(side: Side) -> Self {
        Self { side, rule: HedgeRule::Projected }
    }

    /// Shares held given the frictionless delta `pi`. Never negative.
    #[inline]
    pub fn holding(&self, pi: f64) -> f64 {
        let shift = match self.rule {
            HedgeRule::Projected => 0.0,
            HedgeRule::Shifted(d) => d,
        };
        let signed = match self.side {
            Side::Seller => pi,
            Side::Buyer => -pi,
        };
        (signed - shift).max(0.0)
    }
}

/// Estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Frictionless replication delta `pi(t, S)`.
pub fn replication_delta(payoff: &Payoff, s: f64, tau: f64, mp: &MarketParams) -> Result<f64> {
    Ok(crate::math::bs_combo_price_delta(payoff, s, mp.r, mp.sigma, tau)?.1)
}

/// Delta without argument checks, also defined for zero volatility where
/// the claim is priced off the deterministic forward.
fn delta_unchecked(payoff: &Payoff, s: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    let leg = |k: f64| {
        if sigma == 0.0 && tau > 0.0 {
            if s * (r * tau).exp() > k {
                1.0
            } else {
                0.0
            }
        } else {
            call_delta_unchecked(s, k, r, sigma, tau)
        }
    };
    match payoff {
        Payoff::Put { strike } => {
            if *strike == 0.0 {
                0.0
            } else {
                leg(*strike) - 1.0
            }
        }
        other => other.call_legs().unwrap_or_default().iter().map(|l| l.weight * leg(l.strike)).sum(),
    }
}

fn frictionless_price(payoff: &Payoff, s: f64, mp: &MarketParams) -> f64 {
    match payoff {
        Payoff::Put { strike } => put_unchecked(s, *strike, mp.r, mp.sigma, mp.t),
        other => other
            .call_legs()
            .unwrap_or_default()
            .iter()
            .map(|l| l.weight * call_unchecked(s, l.strike, mp.r, mp.sigma, mp.t))
            .sum(),
    }
}

/// Terminal quantities of one path that do not depend on the price `v`.
#[derive(Debug, Clone, Copy)]
struct PathOutcome {
    payoff: f64,
    /// Self-financed gain of holding the seller's shares from zero wealth.
    seller_gain: f64,
    /// Same for the buyer's shares.
    buyer_gain: f64,
}

fn check_inputs(mp: &MarketParams, s: f64, cfg: &SimConfig) -> Result<()> {
    cfg.validate()?;
    ensure_non_negative("S", s)?;
    ensure_finite("r", mp.r)?;
    ensure_non_negative("sigma", mp.sigma)?;
    if !(mp.t > 0.0 && mp.t.is_finite()) {
        return Err(ErpError::Domain(format!("T must be positive, got {}", mp.t)));
    }
    Ok(())
}

/// Simulates all paths under the martingale measure. The result depends only
/// on the seed and the configuration, never on the thread count.
fn simulate_paths(payoff: &Payoff, mp: &MarketParams, s0: f64, cfg: &SimConfig, rule: HedgeRule) -> Vec<PathOutcome> {
    let (r, sigma) = (mp.r, mp.sigma);
    let dt = mp.t / cfg.n_steps as f64;
    let drift = (r - 0.5 * sigma * sigma) * dt;
    let diffusion = sigma * dt.sqrt();
    let accrual = (r * dt).exp();
    let seller = HedgePolicy { side: Side::Seller, rule };
    let buyer = HedgePolicy { side: Side::Buyer, rule };
    let n_samples = cfg.n_samples();
    let per_sample = if cfg.antithetic { 2 } else { 1 };

    let run_path = |normals: &[f64], mirror: f64| -> PathOutcome {
        let mut s = s0;
        let (mut gain_s, mut gain_b) = (0.0, 0.0);
        for (k, z) in normals.iter().enumerate() {
            let tau = mp.t - k as f64 * dt;
            let pi = delta_unchecked(payoff, s, r, sigma, tau);
            let (hs, hb) = (seller.holding(pi), buyer.holding(pi));
            debug_assert!(hs >= 0.0 && hb >= 0.0);
            let next = s * (drift + diffusion * mirror * z).exp();
            gain_s = (gain_s - hs * s) * accrual + hs * next;
            gain_b = (gain_b - hb * s) * accrual + hb * next;
            s = next;
        }
        PathOutcome { payoff: payoff.eval(s), seller_gain: gain_s, buyer_gain: gain_b }
    };

    let n_batches = n_samples.div_ceil(BATCH);
    (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b as u64);
            let count = BATCH.min(n_samples - b * BATCH);
            let mut normals = vec![0.0; cfg.n_steps];
            let mut out = Vec::with_capacity(count * per_sample);
            for _ in 0..count {
                for z in normals.iter_mut() {
                    *z = StandardNormal.sample(&mut rng);
                }
                out.push(run_path(&normals, 1.0));
                if cfg.antithetic {
                    out.push(run_path(&normals, -1.0));
                }
            }
            out
        })
        .collect::<Vec<_>>()
        .concat()
}

/// Loss argument of one side at price `v`, arranged so that the buyer of
/// `Z` at `v` and the seller of `-Z` at `-v` perform identical floating-point
/// operations.
#[inline]
fn loss_argument(side: Side, o: &PathOutcome, funded: f64) -> f64 {
    match side {
        Side::Seller => (o.payoff - funded) - o.seller_gain,
        Side::Buyer => -((o.payoff - funded) + o.buyer_gain),
    }
}

struct Sampled {
    outcomes: Vec<PathOutcome>,
    per_sample: usize,
    growth: f64,
}

impl Sampled {
    fn sample_loss(&self, side: Side, v: f64, risk: RiskFunction, chunk: &[PathOutcome]) -> Result<f64> {
        let funded = v * self.growth;
        let mut acc = 0.0;
        for o in chunk {
            let x = loss_argument(side, o, funded);
            if risk.overflows(x) {
                return Err(ErpError::Unstable(format!("exponential risk at argument {x}")));
            }
            acc += risk.eval(x);
        }
        Ok(acc / chunk.len() as f64)
    }

    /// Sample mean and standard error of `f(sample)`.
    fn moments<F: Fn(&[PathOutcome]) -> Result<f64>>(&self, f: F) -> Result<McEstimate> {
        let n = self.outcomes.len() / self.per_sample;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for chunk in self.outcomes.chunks(self.per_sample) {
            let x = f(chunk)?;
            sum += x;
            sum_sq += x * x;
        }
        let mean = sum / n as f64;
        let var = if n > 1 { ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0) } else { 0.0 };
        Ok(McEstimate { value: mean, std_error: (var / n as f64).sqrt() })
    }

    fn exposure(&self, side: Side, v: f64, risk: RiskFunction) -> Result<McEstimate> {
        self.moments(|c| self.sample_loss(side, v, risk, c))
    }

    fn balance(&self, v: f64, risk: RiskFunction) -> Result<McEstimate> {
        self.moments(|c| Ok(self.sample_loss(Side::Seller, v, risk, c)? - self.sample_loss(Side::Buyer, v, risk, c)?))
    }
}

fn sample(payoff: &Payoff, mp: &MarketParams, s: f64, cfg: &SimConfig, rule: HedgeRule) -> Result<Sampled> {
    check_inputs(mp, s, cfg)?;
    let q = mp.risk_neutral();
    Ok(Sampled {
        outcomes: simulate_paths(payoff, &q, s, cfg, rule),
        per_sample: if cfg.antithetic { 2 } else { 1 },
        growth: q.growth(q.t),
    })
}

/// Expected risk of one side at price `v`, hedging with the projected
/// frictionless delta. The drift is replaced by `r`.
pub fn simulate_exposure(
    payoff: &Payoff,
    side: Side,
    v: f64,
    s: f64,
    mp: &MarketParams,
    risk: RiskFunction,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    simulate_exposure_with_policy(payoff, HedgePolicy::projected(side), v, s, mp, risk, cfg)
}

pub fn simulate_exposure_with_policy(
    payoff: &Payoff,
    policy: HedgePolicy,
    v: f64,
    s: f64,
    mp: &MarketParams,
    risk: RiskFunction,
    cfg: &SimConfig,
) -> Result<McEstimate> {
    ensure_finite("v", v)?;
    sample(payoff, mp, s, cfg, policy.rule)?.exposure(policy.side, v, risk)
}

/// Equal-risk price under the martingale measure, with common random
/// numbers on both sides and for every trial price.
pub fn erp_q(payoff: &Payoff, mp: &MarketParams, risk: RiskFunction, s: f64, cfg: &SimConfig) -> Result<McEstimate> {
    let sampled = sample(payoff, mp, s, cfg, HedgeRule::Projected)?;
    let q = mp.risk_neutral();
    let (lo, hi) = match payoff.sup_bound() {
        Some(sup) => {
            let edge = sup * (-q.r * q.t).exp() + 1.0;
            (-edge, edge)
        }
        None => (0.0, frictionless_price(payoff, s, &q) + payoff.max_strike()),
    };
    let root = bracketed_root(|v| Ok(sampled.balance(v, risk)?.value), lo, hi, ROOT_TOL)?;

    // Delta method: the balance has slope -(seller' + |buyer'|) in v.
    let at_root = sampled.balance(root, risk)?;
    let h = 1e-3 * root.abs().max(1.0);
    let slope = (sampled.balance(root + h, risk)?.value - sampled.balance(root - h, risk)?.value) / (2.0 * h);
    let std_error = if slope != 0.0 { at_root.std_error / slope.abs() } else { f64::INFINITY };
    Ok(McEstimate { value: root, std_error })
}
