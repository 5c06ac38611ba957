//! Central-difference gradient oracle.

use crate::error::Result;

/// Gradient of `f` at `x` by central differences with step `h`
/// (1e-5 is a good default for O(1) arguments). Each coordinate costs
/// two evaluations; failures of `f` propagate.
pub fn finite_diff_gradient<F>(mut f: F, x: &[f64], h: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let mut point = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        point[i] = x[i] + h;
        let plus = f(&point)?;
        point[i] = x[i] - h;
        let minus = f(&point)?;
        point[i] = x[i];
        grad.push((plus - minus) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sum_of_squares_gradient() {
        let f = |v: &[f64]| Ok(v.iter().map(|x| x * x).sum());
        let g = finite_diff_gradient(f, &[1.0, 2.0], 1e-5).unwrap();
        assert_abs_diff_eq!(g[0], 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(g[1], 4.0, epsilon = 1e-8);
    }

    #[test]
    fn constant_function_has_zero_gradient() {
        let g = finite_diff_gradient(|_| Ok(7.5), &[0.3, -1.2, 9.9], 1e-5).unwrap();
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn propagates_evaluation_failures() {
        let f = |_: &[f64]| -> Result<f64> {
            Err(crate::error::Error::Domain("boom".into()))
        };
        assert!(finite_diff_gradient(f, &[1.0], 1e-5).is_err());
    }
}
