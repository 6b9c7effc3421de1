use crate::error::{ErpError, Result};

/// Iteration cap for [`bracketed_root`].
pub const MAX_BISECTIONS: usize = 55;

/// Root of a monotone `g` on `[lo, hi]` by plain bisection.
///
/// Stops once the bracket is narrower than `tol` or after
/// [`MAX_BISECTIONS`] halvings, and returns the bracket midpoint. Only the
/// sign of `g` is used, so kinks and one-sided derivatives are harmless.
pub fn bracketed_root<G: FnMut(f64) -> Result<f64>>(mut g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(ErpError::Domain(format!("bad bracket [{lo}, {hi}]")));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let y = g(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(ErpError::NonFinite(format!("g({x}) = {y}")))
        }
    };
    let (mut a, mut b) = (lo, hi);
    let g_a = eval(a)?;
    if g_a == 0.0 {
        return Ok(a);
    }
    let g_b = eval(b)?;
    if g_b == 0.0 {
        return Ok(b);
    }
    if g_a.signum() == g_b.signum() {
        return Err(ErpError::NoBracket { lo, hi, g_lo: g_a, g_hi: g_b });
    }
    let a_negative = g_a < 0.0;
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let g_m = eval(m)?;
        if g_m == 0.0 {
            return Ok(m);
        }
        if (g_m < 0.0) == a_negative {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let v = bracketed_root(|v| Ok(v - 1.0), 0.0, 2.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn log_two() {
        let v = bracketed_root(|v| Ok(v.exp() - 2.0), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2f64.ln()).abs() <= 1e-12);
    }

    #[test]
    fn decreasing_function() {
        let v = bracketed_root(|v| Ok(3.0 - v), 0.0, 10.0, 1e-10).unwrap();
        assert!((v - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(bracketed_root(Ok, 0.0, 1.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn no_bracket() {
        let err = bracketed_root(|v| Ok(v + 1.0), 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, ErpError::NoBracket { .. }));
    }

    #[test]
    fn non_finite() {
        let err = bracketed_root(|v| Ok(if v > 0.5 { f64::NAN } else { v - 1.0 }), 0.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, ErpError::NonFinite(_)));
    }

    #[test]
    fn deterministic() {
        let f = |v: f64| Ok(v.powi(3) - 0.3);
        assert_eq!(
            bracketed_root(f, 0.0, 1.0, 1e-12).unwrap().to_bits(),
            bracketed_root(f, 0.0, 1.0, 1e-12).unwrap().to_bits()
        );
    }
}
