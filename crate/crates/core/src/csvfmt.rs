//! CSV emission helpers shared by the report types and the CLI.
//!
//! Floats are written with 9 significant digits in scientific notation so
//! that identical runs produce byte-identical files.

/// Format a float with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        // Normalize -0.0 so output does not depend on the sign of zero.
        return "0.00000000e0".to_string();
    }
    format!("{x:.8e}")
}

/// Join a header row.
pub fn header(cols: &[&str]) -> String {
    cols.join(",")
}

/// Join one data row of already-formatted fields.
pub fn row(fields: &[String]) -> String {
    fields.join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_is_stable() {
        assert_eq!(sig9(1.0), "1.00000000e0");
        assert_eq!(sig9(0.0), "0.00000000e0");
        assert_eq!(sig9(-0.0), "0.00000000e0");
        assert_eq!(sig9(-2.5e-3), "-2.50000000e-3");
        assert_eq!(sig9(123456789.0), "1.23456789e8");
    }
}
