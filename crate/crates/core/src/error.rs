use thiserror::Error;

/// Errors raised by the pricing and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErpError {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("root is not bracketed: g({lo}) = {g_lo}, g({hi}) = {g_hi}")]
    NoBracket { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    /// Exponential risk evaluated on an argument large enough to overflow.
    #[error("unstable evaluation: {0}")]
    Unstable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("non-finite surface value {value} at node (i = {i}, j = {j}) after step {step}")]
    SurfaceBlowUp { i: usize, j: usize, step: usize, value: f64 },

    #[error("seller and buyer surfaces do not cross on row {i}; v_max is too small")]
    EmptyCrossing { i: usize },
}

pub type Result<T> = std::result::Result<T, ErpError>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(ErpError::Domain(format!("{name} must be finite, got {x}")))
    }
}

pub(crate) fn ensure_non_negative(name: &str, x: f64) -> Result<()> {
    ensure_finite(name, x)?;
    if x < 0.0 {
        return Err(ErpError::Domain(format!("{name} must be non-negative, got {x}")));
    }
    Ok(())
}

pub(crate) fn ensure_positive(name: &str, x: f64) -> Result<()> {
    ensure_finite(name, x)?;
    if x <= 0.0 {
        return Err(ErpError::Domain(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}
