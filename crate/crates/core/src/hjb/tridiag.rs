/// Outcome of one tridiagonal solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TridiagonalReport {
    /// Rows where `|diag| < |lower| + |upper|`.
    pub non_dominant_rows: usize,
}

/// Thomas algorithm for `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] =
/// rhs[k]`. `lower[0]` and `upper[n-1]` are ignored. The solution overwrites
/// `rhs`; `scratch` must have the same length.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> TridiagonalReport {
    let n = rhs.len();
    debug_assert!(lower.len() == n && diag.len() == n && upper.len() == n && scratch.len() == n);
    let mut report = TridiagonalReport::default();
    for k in 0..n {
        let off = if k > 0 { lower[k].abs() } else { 0.0 } + if k + 1 < n { upper[k].abs() } else { 0.0 };
        if diag[k].abs() < off {
            report.non_dominant_rows += 1;
        }
    }
    scratch[0] = upper[0] / diag[0];
    rhs[0] /= diag[0];
    for k in 1..n {
        let m = diag[k] - lower[k] * scratch[k - 1];
        scratch[k] = upper[k] / m;
        rhs[k] = (rhs[k] - lower[k] * rhs[k - 1]) / m;
    }
    for k in (0..n - 1).rev() {
        rhs[k] -= scratch[k] * rhs[k + 1];
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_known_system() {
        // Tridiagonal (-1, 2, -1) with x = (1, 2, 3, 4).
        let x = [1.0, 2.0, 3.0, 4.0];
        let lower = [0.0, -1.0, -1.0, -1.0];
        let diag = [2.0; 4];
        let upper = [-1.0, -1.0, -1.0, 0.0];
        let mut rhs: Vec<f64> = (0..4)
            .map(|k| {
                let mut y = diag[k] * x[k];
                if k > 0 {
                    y += lower[k] * x[k - 1];
                }
                if k < 3 {
                    y += upper[k] * x[k + 1];
                }
                y
            })
            .collect();
        let mut scratch = vec![0.0; 4];
        let report = solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch);
        for k in 0..4 {
            assert!((rhs[k] - x[k]).abs() < 1e-12);
        }
        assert_eq!(report.non_dominant_rows, 0);
    }

    #[test]
    fn flags_lost_dominance() {
        let mut rhs = vec![1.0, 1.0, 1.0];
        let mut scratch = vec![0.0; 3];
        let report = solve_tridiagonal(&[0.0, 2.0, 2.0], &[1.0, 1.0, 1.0], &[0.1, 2.0, 0.0], &mut rhs, &mut scratch);
        assert_eq!(report.non_dominant_rows, 2);
    }
}
