//! Number formatting shared by the CSV writers.

/// `x` with six significant digits, fixed notation where it stays short.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..=9).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding can carry into a new digit (999999.5 -> 1000000).
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 6 && decimals > 0 {
            return format!("{x:.prec$}", prec = decimals - 1);
        }
        if s == "-0" || s.chars().all(|c| c == '-' || c == '0' || c == '.') {
            return "0".to_string();
        }
        s
    } else {
        format!("{x:.5e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.7891534), "-0.789153");
        assert_eq!(sig6(4.731342), "4.73134");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(9.9999999), "10.0000");
        assert_eq!(sig6(1.5e-9), "1.50000e-9");
        assert_eq!(sig6(2.0), "2.00000");
    }
}
