//! Error function wrappers.

/// Error function erf(x).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function erfc(x), accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series, summed far past convergence for |x| <= 2.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    #[test]
    fn reference_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() < 1e-15);
        assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert!((erf(-1.0) + 0.842_700_792_949_714_9).abs() < 1e-15);
    }

    #[test]
    fn matches_series() {
        for i in -40..=40 {
            let x = i as f64 * 0.05;
            assert!((erf(x) - erf_series(x)).abs() < 1e-14, "{x}");
        }
    }

    #[test]
    fn complement() {
        for &x in &[0.1, 1.0, 3.0] {
            assert!((erf(x) + erfc(x) - 1.0).abs() < 1e-15);
        }
        // erfc(6) from mpmath
        assert!((erfc(6.0) / 2.151_973_671_249_891_3e-17 - 1.0).abs() < 1e-13);
    }
}
