use std::io::Write;

use ndarray::Array2;

use super::grid::GridSpec;
use crate::error::{ErpError, Result};
use crate::format::sig6;

/// Value function and control on the grid at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSurface {
    /// Time to expiry.
    pub tau: f64,
    /// `f[[i, j]] = F(tau, S_i, v_j)`.
    pub f: Array2<f64>,
    pub phi: Array2<f64>,
}

impl ValueSurface {
    /// Bilinear interpolation of `F` at `(s, v)`.
    pub fn value_at(&self, grid: &GridSpec, s: f64, v: f64) -> Result<f64> {
        bilinear(&self.f, grid, s, v)
    }

    /// Bilinear interpolation of the control at `(s, v)`.
    pub fn control_at(&self, grid: &GridSpec, s: f64, v: f64) -> Result<f64> {
        bilinear(&self.phi, grid, s, v)
    }

    pub fn min_value(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn locate(x: f64, lo: f64, step: f64, n: usize) -> (usize, f64) {
    let t = (x - lo) / step;
    let k = (t.floor().max(0.0) as usize).min(n - 2);
    (k, (t - k as f64).clamp(0.0, 1.0))
}

fn bilinear(a: &Array2<f64>, grid: &GridSpec, s: f64, v: f64) -> Result<f64> {
    let eps = 1e-9;
    if !(s >= -eps && s <= grid.s_max + eps && v >= -grid.v_max - eps && v <= grid.v_max + eps) {
        return Err(ErpError::Domain(format!("point (S = {s}, v = {v}) lies outside the grid")));
    }
    let (i, ws) = locate(s, 0.0, grid.ds(), grid.n_s);
    let (j, wv) = locate(v, -grid.v_max, grid.dv(), grid.n_v);
    let lower = (1.0 - wv) * a[[i, j]] + wv * a[[i, j + 1]];
    let upper = (1.0 - wv) * a[[i + 1, j]] + wv * a[[i + 1, j + 1]];
    Ok((1.0 - ws) * lower + ws * upper)
}

/// Dumps surfaces as `tau,S,v,F,phi`, ordered by level, then `i`, then `j`.
pub fn write_surface_csv<W: Write>(out: &mut W, grid: &GridSpec, levels: &[ValueSurface]) -> std::io::Result<()> {
    writeln!(out, "tau,S,v,F,phi")?;
    for level in levels {
        for i in 0..grid.n_s {
            for j in 0..grid.n_v {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    sig6(level.tau),
                    sig6(grid.s(i)),
                    sig6(grid.v(j)),
                    sig6(level.f[[i, j]]),
                    sig6(level.phi[[i, j]])
                )?;
            }
        }
    }
    Ok(())
}
