//! Digamma, trigamma and log-gamma in double precision.
//!
//! All three use the same scheme: shift the argument upward with the
//! recurrence relation until it is large enough, then evaluate the
//! Stirling/asymptotic series. The recurrence thresholds and series
//! lengths below keep the absolute error under 1e-10 (digamma),
//! 1e-9 (trigamma) and the relative error under 1e-12 (ln_gamma)
//! across [1e-3, 1e6].

use crate::error::{Error, Result};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_7;

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} requires x > 0, got {x}")))
    }
}

/// Digamma function psi(x) = d/dx ln Gamma(x).
///
/// Upward recurrence psi(x) = psi(x+1) - 1/x until x >= 6, then the
/// asymptotic series in 1/x^2 through the x^-12 term.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    let mut shift = 0.0;
    let mut z = x;
    while z < 6.0 {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // psi(z) ~ ln z - 1/(2z) - sum B_2n / (2n z^2n)
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    Ok(shift + z.ln() - 0.5 * inv - series)
}

/// Trigamma function psi1(x) = d/dx psi(x).
///
/// Upward recurrence psi1(x) = psi1(x+1) + 1/x^2 until x >= 6, then the
/// asymptotic series through the x^-13 term.
pub fn trigamma(x: f64) -> Result<f64> {
    check_positive("trigamma", x)?;
    let mut shift = 0.0;
    let mut z = x;
    while z < 6.0 {
        shift += 1.0 / (z * z);
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // psi1(z) ~ 1/z + 1/(2z^2) + sum B_2n / z^(2n+1)
    let series = inv
        * (1.0
            + inv * 0.5
            + inv2
                * (1.0 / 6.0
                    - inv2
                        * (1.0 / 30.0
                            - inv2
                                * (1.0 / 42.0
                                    - inv2
                                        * (1.0 / 30.0
                                            - inv2
                                                * (5.0 / 66.0
                                                    - inv2 * (691.0 / 2730.0)))))));
    Ok(shift + series)
}

/// Natural log of the gamma function.
///
/// Upward recurrence ln Gamma(x) = ln Gamma(x+1) - ln x until x >= 10,
/// then the Stirling series through the x^-13 term.
pub fn ln_gamma(x: f64) -> Result<f64> {
    check_positive("ln_gamma", x)?;
    let mut shift = 0.0;
    let mut z = x;
    while z < 10.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            - inv2
                * (1.0 / 360.0
                    - inv2
                        * (1.0 / 1260.0
                            - inv2
                                * (1.0 / 1680.0
                                    - inv2
                                        * (1.0 / 1188.0
                                            - inv2
                                                * (691.0 / 360_360.0
                                                    - inv2 / 156.0))))));
    Ok(shift + (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series)
}
