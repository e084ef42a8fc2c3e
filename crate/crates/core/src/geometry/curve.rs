//! The classical curve `Π(t) = (t^{ν₁}, …, t^{ν_N})` and its derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::EfficiencySettings;

/// Exponent vector of the classical curve: `ν₁ = 1 < ν₂ < … < ν_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    nus: Vec<f64>,
}

impl CurveSpec {
    pub fn new(nus: Vec<f64>) -> Result<Self> {
        if nus.len() < 2 {
            return Err(Error::Contract(format!("need at least 2 exponents, got {}", nus.len())));
        }
        if nus[0] != 1.0 {
            return Err(Error::Contract(format!("first exponent must be exactly 1, got {}", nus[0])));
        }
        if !nus.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Contract("exponents must be strictly increasing".into()));
        }
        if nus.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("exponents must be finite".into()));
        }
        Ok(Self { nus })
    }

    pub fn from_settings(settings: &EfficiencySettings) -> Self {
        // settings guarantee strict ordering, so the constructor cannot fail
        Self::new(settings.nus()).expect("valid settings yield a valid curve")
    }

    /// Integer exponents `ν_i = i`, the uniform-efficiency case.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i as f64).collect())
    }

    pub fn dim(&self) -> usize {
        self.nus.len()
    }

    pub fn nus(&self) -> &[f64] {
        &self.nus
    }

    /// Whether every exponent is an integer (within `tol`); derivative
    /// columns at `t = 0` are finite only in this case.
    pub fn has_integer_exponents(&self, tol: f64) -> bool {
        self.nus.iter().all(|v| (v - v.round()).abs() <= tol)
    }

    /// Curve point `Π(t) = (t^{ν₁}, …, t^{ν_N})`, `t ∈ [0, 1]`.
    pub fn point(&self, t: f64) -> Result<Vec<f64>> {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("curve parameter {t} outside [0, 1]")));
        }
        Ok(self.nus.iter().map(|&nu| t.powf(nu)).collect())
    }

    /// Tangent `Π̇(t) = (ν₁ t^{ν₁-1}, …, ν_N t^{ν_N-1})`.
    ///
    /// At `t = 0` the analytic limit `(1, 0, …, 0)` applies since `ν₁ = 1`
    /// and all other exponents exceed 1.
    pub fn tangent(&self, t: f64) -> Vec<f64> {
        // 0^0 = 1 in IEEE arithmetic, so the limit falls out of the formula.
        self.nus.iter().map(|&nu| nu * t.powf(nu - 1.0)).collect()
    }

    /// `Π̇(a+h) - Π̇(a)` without subtractive cancellation: component `i` is
    /// `ν a^{ν-1}·((1+h/a)^{ν-1} - 1)` via `expm1`/`ln_1p`.
    ///
    /// Requires `a > 0`; accurate for `h/a ≲ 0.5`.
    pub fn tangent_increment(&self, a: f64, h: f64) -> Vec<f64> {
        let u = h / a;
        self.nus
            .iter()
            .map(|&nu| nu * a.powf(nu - 1.0) * ((nu - 1.0) * u.ln_1p()).exp_m1())
            .collect()
    }

    /// `Π(a+h) - Π(a) - (h/2)·(Π̇(a) + Π̇(a+h))`: the defect of the
    /// trapezoid rule over `[a, a+h]`, of size `O(h³)`, evaluated to full
    /// relative precision by its power series in `u = h/a`.
    ///
    /// Requires `a > 0` and `|u| ≲ 0.25` for fast convergence.
    pub fn trapezoid_defect(&self, a: f64, h: f64) -> Vec<f64> {
        let u = h / a;
        self.nus.iter().map(|&nu| a.powf(nu) * trapezoid_defect_series(u, nu)).collect()
    }

    /// `j`-th derivative `Π^{(j)}(t)`, components `ν(ν-1)⋯(ν-j+1)·t^{ν-j}`.
    ///
    /// Fails for `t = 0` when a non-integer exponent `ν_i < j` would make the
    /// component diverge.
    pub fn derivative(&self, t: f64, order: usize) -> Result<Vec<f64>> {
        if order == 0 {
            return self.point(t);
        }
        let mut out = Vec::with_capacity(self.nus.len());
        for &nu in &self.nus {
            let mut coeff = 1.0;
            for k in 0..order {
                coeff *= nu - k as f64;
            }
            let expo = nu - order as f64;
            let val = if coeff == 0.0 {
                // integer exponent below the derivative order: d^j/dt^j t^nu = 0
                0.0
            } else if t == 0.0 {
                if expo > 0.0 {
                    0.0
                } else if expo == 0.0 {
                    coeff
                } else {
                    return Err(Error::Domain(format!(
                        "derivative of order {order} of t^{nu} diverges at t = 0"
                    )));
                }
            } else {
                coeff * t.powf(expo)
            };
            out.push(val);
        }
        Ok(out)
    }
}

/// `(1+u)^ν - 1 - (νu/2)·(1 + (1+u)^{ν-1})  =  Σ_{k≥3} ν·C(ν-1,k-1)·(2-k)/(2k)·u^k`.
/// The k = 2 term cancels exactly, so every summand is well scaled.
fn trapezoid_defect_series(u: f64, nu: f64) -> f64 {
    let mut coeff = (nu - 1.0) * (nu - 2.0) * 0.5; // C(nu-1, k-1) at k = 3
    let mut upow = u * u * u;
    let mut k = 3.0;
    let mut acc = 0.0;
    let mut scale = 0.0f64;
    loop {
        let term = coeff * nu * (2.0 - k) / (2.0 * k) * upow;
        acc += term;
        scale = scale.max(term.abs());
        if term.abs() <= scale * 1e-17 + 1e-300 || k >= 250.0 {
            break;
        }
        coeff *= (nu - k) / k;
        upow *= u;
        k += 1.0;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_endpoints_and_midpoint() {
        let c = CurveSpec::uniform(3).unwrap();
        assert_eq!(c.point(1.0).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(c.point(0.0).unwrap(), vec![0.0, 0.0, 0.0]);
        assert_eq!(c.point(0.5).unwrap(), vec![0.5, 0.25, 0.125]);
        assert!(c.point(1.5).is_err());
        assert!(c.point(-0.1).is_err());
    }

    #[test]
    fn tangent_values() {
        let c2 = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(c2.tangent(1.0), vec![1.0, 2.0]);
        assert_eq!(c2.tangent(0.0), vec![1.0, 0.0]);
        let c3 = CurveSpec::uniform(3).unwrap();
        assert_eq!(c3.tangent(0.5), vec![1.0, 1.0, 0.75]);
    }

    #[test]
    fn tangent_limit_at_zero_for_fractional_exponents() {
        let c = CurveSpec::new(vec![1.0, 1.5, 2.25]).unwrap();
        assert_eq!(c.tangent(0.0), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let c = CurveSpec::new(vec![1.0, 2.3, 4.1]).unwrap();
        let t = 0.6;
        let h = 1e-6;
        let d1 = c.derivative(t, 1).unwrap();
        let num: Vec<f64> = c
            .point(t + h)
            .unwrap()
            .iter()
            .zip(c.point(t - h).unwrap())
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect();
        for (a, b) in d1.iter().zip(num) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn derivative_at_zero_integer_vs_fractional() {
        let int = CurveSpec::uniform(3).unwrap();
        assert_eq!(int.derivative(0.0, 2).unwrap(), vec![0.0, 2.0, 0.0]);
        assert_eq!(int.derivative(0.0, 3).unwrap(), vec![0.0, 0.0, 6.0]);
        let frac = CurveSpec::new(vec![1.0, 1.5, 3.0]).unwrap();
        assert!(frac.derivative(0.0, 2).is_err());
    }

    #[test]
    fn spec_requires_leading_one() {
        assert!(CurveSpec::new(vec![1.5, 2.0]).is_err());
        assert!(CurveSpec::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn tangent_increment_matches_direct_difference_when_separated() {
        let c = CurveSpec::new(vec![1.0, 2.4, 3.7]).unwrap();
        let (a, h) = (0.5, 0.1);
        let direct: Vec<f64> =
            c.tangent(a + h).iter().zip(c.tangent(a)).map(|(x, y)| x - y).collect();
        for (s, d) in c.tangent_increment(a, h).iter().zip(direct) {
            assert!((s - d).abs() < 1e-13, "{s} vs {d}");
        }
    }

    #[test]
    fn trapezoid_defect_matches_direct_formula_when_separated() {
        let c = CurveSpec::new(vec![1.0, 2.4, 3.7]).unwrap();
        let (a, h) = (0.6, 0.1);
        let pa = c.point(a).unwrap();
        let pb = c.point(a + h).unwrap();
        let ta = c.tangent(a);
        let tb = c.tangent(a + h);
        for i in 0..3 {
            let direct = pb[i] - pa[i] - 0.5 * h * (ta[i] + tb[i]);
            let series = c.trapezoid_defect(a, h)[i];
            assert!(
                (series - direct).abs() < 1e-14,
                "component {i}: {series} vs {direct}"
            );
        }
    }

    #[test]
    fn stable_pair_helpers_keep_relative_precision_for_tiny_gaps() {
        // at h = 1e-8 the direct differences lose ~8 digits; the series keeps
        // full precision, so check against the leading-order Taylor terms
        let c = CurveSpec::new(vec![1.0, 2.0, 3.5]).unwrap();
        let (a, h) = (0.5, 1e-8);
        let d2 = c.derivative(a, 2).unwrap();
        let d3 = c.derivative(a, 3).unwrap();
        let inc = c.tangent_increment(a, h);
        for i in 0..3 {
            let lead = h * d2[i] + 0.5 * h * h * d3[i];
            assert!(
                (inc[i] - lead).abs() <= 1e-10 * lead.abs().max(1e-300),
                "component {i}: {} vs {lead}",
                inc[i]
            );
        }
        let defect = c.trapezoid_defect(a, h);
        for i in 0..3 {
            // the omitted k = 4 series term is O(h/a) relative, ~1e-8 here
            let lead = -h * h * h / 12.0 * d3[i];
            assert!(
                (defect[i] - lead).abs() <= 1e-7 * lead.abs().max(1e-300),
                "component {i}: {} vs {lead}",
                defect[i]
            );
        }
    }
}
