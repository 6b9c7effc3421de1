//! Gaussian rules for expectations against the standard normal density.
//!
//! Smooth integrands use Gauss–Hermite directly. Integrands with kinks
//! (payoffs of the form `(...)^+`) lose spectral accuracy under a global
//! rule, so the split variant integrates each smooth piece separately with
//! Gauss–Legendre on a truncated line.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{ErpError, Result};
use crate::math::normal::std_normal_pdf;

pub const DEFAULT_NODES: usize = 200;

/// Half-width of the truncated line used by the split rule. The normal
/// tail beyond it is below 1e-32.
pub const TRUNCATION: f64 = 12.0;

/// Probabilists' Gauss–Hermite rule: `sum w_i f(x_i) ~ E[f(X)]`, `X ~ N(0,1)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite needs at least one node");
        // Orthonormal Hermite recurrence, returning (h_n(z), h_{n-1}(z)).
        // Without the Gaussian factor the values stay finite for n in the
        // hundreds.
        let eval = |z: f64| {
            let mut p1 = PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            (p1, p2)
        };
        // Roots are at least pi / sqrt(2n + 1) apart and all below
        // sqrt(2n + 1); a scan ten times finer than the spacing brackets
        // every positive root once.
        let top = (2.0 * n as f64 + 1.0).sqrt();
        let step = 0.1 * PI / top;
        let mut positive = Vec::with_capacity(n / 2);
        let mut a = step * 0.5;
        let mut fa = eval(a).0;
        while positive.len() < n / 2 && a < top + 1.0 {
            let b = a + step;
            let fb = eval(b).0;
            if fa.signum() != fb.signum() {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let fm = eval(mid).0;
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                positive.push(0.5 * (lo + hi));
            }
            a = b;
            fa = fb;
        }
        assert_eq!(positive.len(), n / 2, "Gauss-Hermite root scan missed a root");
        let mut roots: Vec<f64> = positive.iter().rev().map(|z| -z).collect();
        if n % 2 == 1 {
            roots.push(0.0);
        }
        roots.extend(positive.iter().copied());
        // Weight 1 / (n h_{n-1}(z)^2) in the e^{-z^2} measure, normalised
        // to the standard normal.
        let nf = n as f64;
        let weights = roots
            .iter()
            .map(|&z| {
                let p = eval(z).1;
                1.0 / (nf * p * p * PI.sqrt())
            })
            .collect::<Vec<_>>();
        let nodes = roots.iter().map(|z| z * std::f64::consts::SQRT_2).collect();
        Self { nodes, weights }
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let fx = f(x);
            if !fx.is_finite() {
                return Err(ErpError::NonFinite(format!("integrand is {fx} at x = {x}")));
            }
            acc += w * fx;
        }
        Ok(acc)
    }
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = nf * (z * p1 - p2) / (z * z - 1.0);
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Self { nodes, weights }
    }

    /// `int_a^b f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> Result<f64> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let x = mid + half * t;
            let fx = f(x);
            if !fx.is_finite() {
                return Err(ErpError::NonFinite(format!("integrand is {fx} at x = {x}")));
            }
            acc += w * fx;
        }
        Ok(half * acc)
    }
}

fn cached<T, B>(cache: &'static OnceLock<Mutex<HashMap<usize, Arc<T>>>>, n: usize, build: B) -> Arc<T>
where
    B: FnOnce(usize) -> T,
{
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Arc::new(build(n))).clone()
}

pub(crate) fn hermite_rule(n: usize) -> Arc<GaussHermite> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    cached(&CACHE, n, GaussHermite::new)
}

pub(crate) fn legendre_rule(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    cached(&CACHE, n, GaussLegendre::new)
}

/// `(1/sqrt(2 pi)) int f(x) e^{-x^2/2} dx` by an `n_nodes` Gauss–Hermite rule.
pub fn gauss_weighted_integral<F: Fn(f64) -> f64>(f: F, n_nodes: usize) -> Result<f64> {
    hermite_rule(n_nodes).expect(f)
}

/// Same expectation, with the line cut at `kinks` and each piece of
/// `[-TRUNCATION, TRUNCATION]` integrated by its own `n_nodes`-point
/// Gauss–Legendre rule.
pub fn gauss_weighted_integral_split<F: Fn(f64) -> f64>(f: F, kinks: &[f64], n_nodes: usize) -> Result<f64> {
    let rule = legendre_rule(n_nodes);
    let mut cuts: Vec<f64> = kinks.iter().copied().filter(|k| k.is_finite() && k.abs() < TRUNCATION).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(-TRUNCATION);
    edges.extend(cuts);
    edges.push(TRUNCATION);
    let mut total = 0.0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            total += rule.integrate(w[0], w[1], |x| f(x) * std_normal_pdf(x))?;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_moments() {
        for n in [5, 20, 200] {
            let g = GaussHermite::new(n);
            assert!((g.expect(|_| 1.0).unwrap() - 1.0).abs() < 1e-13);
            assert!(g.expect(|x| x).unwrap().abs() < 1e-13);
            assert!((g.expect(|x| x * x).unwrap() - 1.0).abs() < 1e-12);
        }
        // E[x^4] = 3 is exact once 2n - 1 >= 4.
        assert!((GaussHermite::new(3).expect(|x| x.powi(4)).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_lognormal_moment() {
        // E[e^{aX}] = e^{a^2/2}
        let v = gauss_weighted_integral(|x| (0.3 * x).exp(), DEFAULT_NODES).unwrap();
        assert!((v - (0.045f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn legendre_polynomials_exact() {
        let g = GaussLegendre::new(6);
        let v = g.integrate(-1.0, 2.0, |x| x.powi(11) + x * x).unwrap();
        let exact = (2f64.powi(12) - 1.0) / 12.0 + (8.0 + 1.0) / 3.0;
        assert!((v - exact).abs() < 1e-10);
    }

    #[test]
    fn split_moments() {
        for kinks in [vec![], vec![0.3], vec![-1.0, 0.5, 2.0]] {
            let one = gauss_weighted_integral_split(|_| 1.0, &kinks, DEFAULT_NODES).unwrap();
            let x = gauss_weighted_integral_split(|x| x, &kinks, DEFAULT_NODES).unwrap();
            let x2 = gauss_weighted_integral_split(|x| x * x, &kinks, DEFAULT_NODES).unwrap();
            assert!((one - 1.0).abs() < 1e-14);
            assert!(x.abs() < 1e-14);
            assert!((x2 - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn split_recovers_kinked_expectation() {
        // E[(X - a)^+] = pdf(a) - a (1 - Phi(a))
        let a = 0.37;
        let exact = std_normal_pdf(a) - a * (1.0 - crate::math::std_normal_cdf(a));
        let v = gauss_weighted_integral_split(|x| (x - a).max(0.0), &[a], DEFAULT_NODES).unwrap();
        assert!((v - exact).abs() < 1e-14);
        // The global rule is much worse on the kink.
        let global = gauss_weighted_integral(|x| (x - a).max(0.0), 40).unwrap();
        assert!((global - exact).abs() > 1e-8);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        assert!(matches!(gauss_weighted_integral(|_| f64::NAN, 10), Err(ErpError::NonFinite(_))));
        assert!(gauss_weighted_integral_split(|x| 1.0 / x.signum().max(0.0), &[0.0], 8).is_err());
    }
}
