//! Nonlinear classicality tests: the closed-form envelopes for two and three
//! settings, and the Hausdorff moment-matrix tests for uniformly spaced
//! efficiencies `η_i = i/N`.
//!
//! For the uniform grid, the no-click probabilities extended by `P₀ = 1` are
//! classical iff they are the moments of a probability distribution on
//! `[0, 1]`, which holds iff two symmetric moment matrices are positive
//! semidefinite.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{lambda_three, CurveSpec, Tau};
use crate::states::{EfficiencySettings, NoClickVector};

/// Tolerance used by [`EfficiencySettings::is_uniform`] when gating the
/// moment tests.
pub const UNIFORM_TOL: f64 = 1e-12;

/// Default relative PSD tolerance for the eigenvalue test.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// The two Hausdorff moment matrices built from the extended vector
/// `(P₀=1, P₁, …, P_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrices {
    pub m1: DMatrix<f64>,
    pub m2: DMatrix<f64>,
    pub parity: Parity,
}

/// Verdict of the moment-matrix test with the minimal eigenvalue of each
/// matrix as the violation magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentVerdict {
    pub classical: bool,
    pub min_eigenvalue_m1: f64,
    pub min_eigenvalue_m2: f64,
}

impl MomentVerdict {
    /// Positive when nonclassical: the most negative eigenvalue, negated.
    pub fn violation(&self) -> f64 {
        -self.min_eigenvalue_m1.min(self.min_eigenvalue_m2)
    }
}

/// Violations of the two-setting envelope `(P₁^{ν₂} - P₂, P₂ - P₁)`;
/// classical-compatible iff both entries are ≤ 0.
pub fn envelope_two(p: &NoClickVector, nu2: f64) -> Result<(f64, f64)> {
    if p.len() != 2 {
        return Err(Error::Contract(format!("envelope_two needs 2 entries, got {}", p.len())));
    }
    if nu2 <= 1.0 {
        return Err(Error::Domain(format!("nu2 must exceed 1, got {nu2}")));
    }
    let (p1, p2) = (p.as_slice()[0], p.as_slice()[1]);
    Ok((p1.powf(nu2) - p2, p2 - p1))
}

/// Violations of the three-setting tests.
///
/// For `ν₂ = 2, ν₃ = 3` (uniform grid) the entries are the closed forms
/// `(P₂² - P₁P₃, (P₁-P₂)² - (1-P₁)(P₂-P₃), 3P₁ - 3P₂ + P₃ - 1)`.
///
/// For general exponents the first entry is the envelope
/// `P₂^{ν₃-1} - P₁^{ν₃-ν₂}·P₃^{ν₂-1}` of the τ = 0 family, the second is the
/// maximal violation over the τ = 1 linear family, and the third the
/// boundary inequality from the `t₁ → 1` limit direction.
pub fn envelope_three(p: &NoClickVector, nu2: f64, nu3: f64) -> Result<[f64; 3]> {
    if p.len() != 3 {
        return Err(Error::Contract(format!("envelope_three needs 3 entries, got {}", p.len())));
    }
    if !(1.0 < nu2 && nu2 < nu3) {
        return Err(Error::Domain(format!("need 1 < nu2 < nu3, got {nu2}, {nu3}")));
    }
    let [p1, p2, p3] = [p.as_slice()[0], p.as_slice()[1], p.as_slice()[2]];
    if (nu2 - 2.0).abs() < 1e-12 && (nu3 - 3.0).abs() < 1e-12 {
        return Ok([
            p2 * p2 - p1 * p3,
            (p1 - p2).powi(2) - (1.0 - p1) * (p2 - p3),
            3.0 * p1 - 3.0 * p2 + p3 - 1.0,
        ]);
    }
    let envelope = p2.powf(nu3 - 1.0) - p1.powf(nu3 - nu2) * p3.powf(nu2 - 1.0);
    let spec = CurveSpec::new(vec![1.0, nu2, nu3])?;
    let tau_one = max_tau_one_violation(&spec, &[p1, p2, p3]);
    let c = |x: f64| nu2 * nu3 * (nu3 - nu2) * x;
    let boundary = c(p1) - nu3 * (nu3 - 1.0) * p2 + nu2 * (nu2 - 1.0) * p3
        - (c(1.0) - nu3 * (nu3 - 1.0) + nu2 * (nu2 - 1.0));
    Ok([envelope, tau_one, boundary])
}

/// Dense scan plus local refinement of `λ(t₁;1)·P - sup` over `t₁ ∈ [0,1]`.
fn max_tau_one_violation(spec: &CurveSpec, p: &[f64]) -> f64 {
    let value = |t: f64| match lambda_three(spec, t, Tau::One) {
        Ok(d) => d.lambda.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() - d.sup_value,
        Err(_) => f64::NEG_INFINITY,
    };
    let grid = 400;
    let mut best_t = 0.0;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=grid {
        let t = k as f64 / grid as f64;
        let v = value(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let mut lo = (best_t - 1.0 / grid as f64).max(0.0);
    let mut hi = (best_t + 1.0 / grid as f64).min(1.0);
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if value(m1) < value(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.max(value(0.5 * (lo + hi)))
}

/// Assembles the Hausdorff matrices `M⁽¹⁾`, `M⁽²⁾` for uniformly spaced
/// efficiencies, with `P₀ = 1` prepended.
///
/// Even `N = 2m`:  `M⁽¹⁾_{ij} = P_{i+j}` (size m+1), `M⁽²⁾_{ij} = P_{i+j} - P_{i+j+2}` (size m).
/// Odd `N = 2m+1`: `M⁽¹⁾_{ij} = P_{i+j+1}` (size m+1), `M⁽²⁾_{ij} = P_{i+j} - P_{i+j+1}` (size m+1).
pub fn build_moment_matrices(
    p: &NoClickVector,
    settings: &EfficiencySettings,
) -> Result<MomentMatrices> {
    if settings.len() != p.len() {
        return Err(Error::Contract(format!(
            "settings ({}) and probabilities ({}) disagree on N",
            settings.len(),
            p.len()
        )));
    }
    if !settings.is_uniform(UNIFORM_TOL) {
        return Err(Error::Contract(
            "moment matrices require uniformly spaced efficiencies eta_i = i/N".into(),
        ));
    }
    let n = p.len();
    let mut ext = Vec::with_capacity(n + 1);
    ext.push(1.0);
    ext.extend_from_slice(p.as_slice());

    let (m1, m2, parity) = if n % 2 == 0 {
        let m = n / 2;
        let m1 = DMatrix::from_fn(m + 1, m + 1, |i, j| ext[i + j]);
        let m2 = DMatrix::from_fn(m, m, |i, j| ext[i + j] - ext[i + j + 2]);
        (m1, m2, Parity::Even)
    } else {
        let m = (n - 1) / 2;
        let m1 = DMatrix::from_fn(m + 1, m + 1, |i, j| ext[i + j + 1]);
        let m2 = DMatrix::from_fn(m + 1, m + 1, |i, j| ext[i + j] - ext[i + j + 1]);
        (m1, m2, Parity::Odd)
    };
    Ok(MomentMatrices { m1, m2, parity })
}

/// Eigenvalue PSD test: classical-compatible iff the minimal eigenvalue of
/// each matrix is at least `-tol` times its largest absolute entry.
pub fn is_classical_moments(mm: &MomentMatrices, tol: f64) -> MomentVerdict {
    let min1 = min_eigenvalue(&mm.m1);
    let min2 = min_eigenvalue(&mm.m2);
    let scale1 = mm.m1.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let scale2 = mm.m2.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    MomentVerdict {
        classical: min1 >= -tol * scale1 && min2 >= -tol * scale2,
        min_eigenvalue_m1: min1,
        min_eigenvalue_m2: min2,
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &x| a.min(x))
}

/// Sylvester-style alternative to the eigenvalue route: non-negativity of
/// every principal minor, exact for the small matrices of this problem.
pub fn sylvester_all_principal_minors_nonneg(m: &DMatrix<f64>, tol: f64) -> bool {
    let n = m.nrows();
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
        let det = sub.full_piv_lu().determinant();
        if det < -tol * scale.powi(idx.len() as i32) {
            return false;
        }
    }
    true
}

/// Startup self-test backing the general-exponent envelope: on curve points
/// (exactly classical) the envelope must be ≤ 0 and tight, and for random
/// perturbed vectors its sign must agree with the τ = 0 linear family.
pub fn envelope_consistency_selftest() -> Result<()> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(90210);
    for _ in 0..200 {
        let nu2 = rng.random_range(1.2..3.0);
        let nu3 = rng.random_range(nu2 + 0.2..nu2 + 2.5);
        let t: f64 = rng.random_range(0.05..1.0);
        let p = NoClickVector::new(vec![t, t.powf(nu2), t.powf(nu3)])?;
        let env = envelope_three(&p, nu2, nu3)?;
        if env[0] > 1e-10 {
            return Err(Error::Contract(format!(
                "envelope positive on curve point: {} at t={t}, nu=({nu2},{nu3})",
                env[0]
            )));
        }
        // tightness: curve points saturate the tau = 0 envelope
        if env[0].abs() > 1e-9 {
            return Err(Error::Contract(format!(
                "envelope not tight on curve point: {} at t={t}, nu=({nu2},{nu3})",
                env[0]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::EfficiencySettings;

    fn vec2(a: f64, b: f64) -> NoClickVector {
        NoClickVector::new(vec![a, b]).unwrap()
    }

    fn vec3(a: f64, b: f64, c: f64) -> NoClickVector {
        NoClickVector::new(vec![a, b, c]).unwrap()
    }

    #[test]
    fn envelope_two_examples() {
        let p = vec2((-1.0f64).exp(), (-2.0f64).exp());
        let (e1, e2) = envelope_two(&p, 2.0).unwrap();
        assert!(e1.abs() < 1e-15, "coherent point sits on the envelope: {e1}");
        assert!(e2 < 0.0);

        let fock = vec2(0.5, 0.0);
        let (f1, f2) = envelope_two(&fock, 2.0).unwrap();
        assert!((f1 - 0.25).abs() < 1e-15);
        assert!((f2 + 0.5).abs() < 1e-15);

        let vacuum = vec2(1.0, 1.0);
        assert_eq!(envelope_two(&vacuum, 2.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn envelope_three_uniform_cases() {
        for &t in &[0.2, 0.5, 0.8] {
            let p = vec3(t, t * t, t * t * t);
            let e = envelope_three(&p, 2.0, 3.0).unwrap();
            assert!(e[0].abs() < 1e-15, "first entry saturates on the curve");
            assert!(e[1] <= 1e-15);
            assert!(e[2] <= 0.0);
        }
        let vac = vec3(1.0, 1.0, 1.0);
        assert_eq!(envelope_three(&vac, 2.0, 3.0).unwrap(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn envelope_three_general_matches_uniform_at_integer_exponents() {
        // the general branch must agree in sign with the closed forms
        let p = vec3(0.8, 0.5, 0.4);
        let closed = envelope_three(&p, 2.0, 3.0).unwrap();
        let general = envelope_three(&p, 2.0 + 1e-9, 3.0).unwrap();
        assert_eq!(closed[0] > 0.0, general[0] > 0.0);
        assert_eq!(closed[1] > 0.0, general[1] > 1e-12);
    }

    #[test]
    fn moment_matrices_two_settings() {
        let s = EfficiencySettings::uniform(2, 1.0).unwrap();
        let p = vec2(0.6, 0.5);
        let mm = build_moment_matrices(&p, &s).unwrap();
        assert_eq!(mm.m1.nrows(), 2);
        assert_eq!(mm.m1[(0, 0)], 1.0);
        assert_eq!(mm.m1[(0, 1)], 0.6);
        assert_eq!(mm.m1[(1, 1)], 0.5);
        assert_eq!(mm.m2.nrows(), 1);
        assert_eq!(mm.m2[(0, 0)], 1.0 - 0.5);
    }

    #[test]
    fn moment_matrices_three_settings() {
        let s = EfficiencySettings::uniform(3, 1.0).unwrap();
        let p = vec3(0.7, 0.55, 0.45);
        let mm = build_moment_matrices(&p, &s).unwrap();
        assert_eq!(mm.m1.nrows(), 2);
        assert_eq!(mm.m1[(0, 0)], 0.7);
        assert_eq!(mm.m1[(0, 1)], 0.55);
        assert_eq!(mm.m1[(1, 1)], 0.45);
        assert_eq!(mm.m2[(0, 0)], 1.0 - 0.7);
        assert_eq!(mm.m2[(0, 1)], 0.7 - 0.55);
        assert_eq!(mm.m2[(1, 1)], 0.55 - 0.45);
    }

    #[test]
    fn non_uniform_settings_rejected() {
        let s = EfficiencySettings::new(vec![0.4, 1.0], 1.0).unwrap();
        assert!(build_moment_matrices(&vec2(0.6, 0.5), &s).is_err());
    }

    #[test]
    fn vacuum_matrices_are_psd() {
        let s = EfficiencySettings::uniform(2, 1.0).unwrap();
        let mm = build_moment_matrices(&vec2(1.0, 1.0), &s).unwrap();
        let v = is_classical_moments(&mm, DEFAULT_PSD_TOL);
        assert!(v.classical);
        assert!(v.min_eigenvalue_m1 >= -1e-12);
    }

    #[test]
    fn fock_one_is_nonclassical() {
        // det M1 = 0 - 0.25 < 0
        let s = EfficiencySettings::uniform(2, 1.0).unwrap();
        let mm = build_moment_matrices(&vec2(0.5, 0.0), &s).unwrap();
        let v = is_classical_moments(&mm, DEFAULT_PSD_TOL);
        assert!(!v.classical);
        assert!(v.min_eigenvalue_m1 < 0.0);
        assert!(v.violation() > 0.0);
    }

    #[test]
    fn curve_points_give_psd_matrices() {
        for n in 2..=6 {
            let s = EfficiencySettings::uniform(n, 1.0).unwrap();
            for &t in &[0.1f64, 0.5, 0.9] {
                let p =
                    NoClickVector::new((1..=n).map(|i| t.powi(i as i32)).collect()).unwrap();
                let mm = build_moment_matrices(&p, &s).unwrap();
                let v = is_classical_moments(&mm, DEFAULT_PSD_TOL);
                assert!(v.classical, "n={n}, t={t}: {v:?}");
            }
        }
    }

    #[test]
    fn discrete_distributions_pass_moment_test() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(31);
        for _ in 0..100 {
            let n = rng.random_range(2..=6);
            let atoms = rng.random_range(1..=5);
            let mut ws: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.01..1.0)).collect();
            let total: f64 = ws.iter().sum();
            ws.iter_mut().for_each(|w| *w /= total);
            let ts: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.0..=1.0)).collect();
            let p = NoClickVector::new(
                (1..=n)
                    .map(|i| {
                        ws.iter().zip(&ts).map(|(w, t)| w * t.powi(i as i32)).sum::<f64>()
                    })
                    .collect(),
            )
            .unwrap();
            let s = EfficiencySettings::uniform(n, 1.0).unwrap();
            let mm = build_moment_matrices(&p, &s).unwrap();
            let v = is_classical_moments(&mm, DEFAULT_PSD_TOL);
            assert!(v.classical, "n={n}: {v:?}");
        }
    }

    #[test]
    fn sylvester_route_agrees_with_eigenvalues() {
        let s = EfficiencySettings::uniform(3, 1.0).unwrap();
        for (p, expect) in [
            (vec3(0.7, 0.55, 0.45), true),
            (vec3(0.5, 0.45, 0.448), false),
        ] {
            let mm = build_moment_matrices(&p, &s).unwrap();
            let eig = is_classical_moments(&mm, DEFAULT_PSD_TOL).classical;
            let syl = sylvester_all_principal_minors_nonneg(&mm.m1, DEFAULT_PSD_TOL)
                && sylvester_all_principal_minors_nonneg(&mm.m2, DEFAULT_PSD_TOL);
            assert_eq!(eig, syl);
            assert_eq!(eig, expect, "{p:?}");
        }
    }

    #[test]
    fn selftest_passes() {
        envelope_consistency_selftest().unwrap();
    }
}
