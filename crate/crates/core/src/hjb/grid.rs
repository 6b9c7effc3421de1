use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, ErpError, Result};

/// Uniform grid on `[0, s_max] x [-v_max, v_max]` with `n_tau` time levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub s_max: f64,
    pub v_max: f64,
    pub n_s: usize,
    pub n_v: usize,
    pub n_tau: usize,
}

impl GridSpec {
    pub fn new(s_max: f64, v_max: f64, n_s: usize, n_v: usize, n_tau: usize) -> Result<Self> {
        let g = Self { s_max, v_max, n_s, n_v, n_tau };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("S_max", self.s_max)?;
        ensure_positive("v_max", self.v_max)?;
        if self.n_s < 3 || self.n_v < 3 || self.n_tau < 2 {
            return Err(ErpError::Domain(format!(
                "grid needs N1, N2 >= 3 and M >= 2, got ({}, {}, {})",
                self.n_s, self.n_v, self.n_tau
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn ds(&self) -> f64 {
        self.s_max / (self.n_s - 1) as f64
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / (self.n_v - 1) as f64
    }

    #[inline]
    pub fn dtau(&self, horizon: f64) -> f64 {
        horizon / (self.n_tau - 1) as f64
    }

    #[inline]
    pub fn s(&self, i: usize) -> f64 {
        i as f64 * self.ds()
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        -self.v_max + j as f64 * self.dv()
    }

    pub fn s_nodes(&self) -> Vec<f64> {
        (0..self.n_s).map(|i| self.s(i)).collect()
    }

    pub fn v_nodes(&self) -> Vec<f64> {
        (0..self.n_v).map(|j| self.v(j)).collect()
    }

    /// Index of the node equal to `s` up to rounding, if any.
    pub fn s_index(&self, s: f64) -> Option<usize> {
        let x = s / self.ds();
        let i = x.round();
        ((x - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < self.n_s).then_some(i as usize)
    }

    /// `(N1, N2, M)` label used in tables.
    pub fn label(&self) -> String {
        format!("({},{},{})", self.n_s, self.n_v, self.n_tau)
    }
}
