//! Determinant test for the extended Chebyshev system `{1, t^{ν₁}, …, t^{ν_N}}`.
//!
//! For strictly ordered evaluation points in `(0, 1]` the determinant
//! `Δ(t₀, …, t_N)` is positive; repeated points are handled by replacing the
//! repeated column with successive derivatives. Positivity of Δ is what
//! bounds the zero count of generalized polynomials and makes every tight
//! direction construction in this module well posed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::curve::CurveSpec;

/// Evaluates `Δ(t₀, …, t_N)` over the extended system; `ts` must have
/// exactly `N+1` entries, be sorted ascending, and lie in `(0, 1]`.
/// The `k`-th occurrence of a repeated value contributes the `k`-th
/// derivative column.
pub fn chebyshev_determinant(spec: &CurveSpec, ts: &[f64]) -> Result<f64> {
    let n = spec.dim();
    if ts.len() != n + 1 {
        return Err(Error::Contract(format!(
            "extended system of dimension {} needs exactly {} points, got {}",
            n + 1,
            n + 1,
            ts.len()
        )));
    }
    if ts.iter().any(|t| !t.is_finite() || *t <= 0.0 || *t > 1.0) {
        return Err(Error::Domain("evaluation points must lie in (0, 1]".into()));
    }
    if !ts.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::Contract("evaluation points must be sorted ascending".into()));
    }

    let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
    for (i, &t) in ts.iter().enumerate() {
        let order = ts[..i].iter().filter(|&&u| u == t).count();
        let col = extended_derivative(spec, t, order)?;
        for (r, &x) in col.iter().enumerate() {
            m[(r, i)] = x;
        }
    }
    Ok(m.full_piv_lu().determinant())
}

/// `d^k/dt^k (1, t^{ν₁}, …, t^{ν_N})`; the constant component vanishes for
/// every positive order.
fn extended_derivative(spec: &CurveSpec, t: f64, order: usize) -> Result<Vec<f64>> {
    let mut col = Vec::with_capacity(spec.dim() + 1);
    col.push(if order == 0 { 1.0 } else { 0.0 });
    col.extend(spec.derivative(t, order)?);
    Ok(col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_for_ordered_distinct_points() {
        let spec = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        let d = chebyshev_determinant(&spec, &[0.2, 0.5, 0.9]).unwrap();
        assert!(d > 0.0, "determinant {d} should be positive");
    }

    #[test]
    fn positive_with_derivative_column() {
        let spec = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        let d = chebyshev_determinant(&spec, &[0.2, 0.5, 0.5]).unwrap();
        assert!(d > 0.0, "determinant {d} should be positive");
        // limit of the distinct case: Δ(0.2, 0.5, 0.5+h)/h -> Δ with derivative column
        let h = 1e-6;
        let dh = chebyshev_determinant(&spec, &[0.2, 0.5, 0.5 + h]).unwrap() / h;
        assert!((d - dh).abs() < 1e-4 * d.abs().max(1.0));
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let spec = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        assert!(chebyshev_determinant(&spec, &[0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(chebyshev_determinant(&spec, &[0.2, 0.5]).is_err());
    }

    #[test]
    fn unsorted_and_out_of_range_rejected() {
        let spec = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        assert!(chebyshev_determinant(&spec, &[0.5, 0.2, 0.9]).is_err());
        assert!(chebyshev_determinant(&spec, &[0.0, 0.2, 0.9]).is_err());
        assert!(chebyshev_determinant(&spec, &[0.2, 0.9, 1.1]).is_err());
    }

    #[test]
    fn positive_across_random_ordered_tuples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        for n in 2..=6 {
            // mix of integer and fractional exponent systems
            let mut nus = vec![1.0];
            for i in 1..n {
                nus.push(nus[i - 1] + rng.random_range(0.3..1.7));
            }
            let spec = CurveSpec::new(nus).unwrap();
            for _ in 0..50 {
                let mut ts: Vec<f64> = (0..=n).map(|_| rng.random_range(0.05..1.0)).collect();
                ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let d = chebyshev_determinant(&spec, &ts).unwrap();
                assert!(d > 0.0, "n={n}, ts={ts:?}: determinant {d}");
            }
        }
    }
}
