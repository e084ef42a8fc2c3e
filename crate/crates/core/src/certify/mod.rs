//! Maximal-violation computation over all tight-direction families,
//! robustness of the verdict under efficiency-calibration uncertainty, and
//! the independent LP hull-membership oracle.

mod optim;
mod oracle;

pub use oracle::{hull_membership_oracle, HullFeasibility, DEFAULT_GRID, TAU_LP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    lambda_even_boundary, lambda_even_interior, lambda_odd, CurveSpec, Tau, TightDirection,
    EPS_MERGE,
};
use crate::states::{probability_vector, EfficiencySettings, NoClickVector, StateModel};
use optim::{maximize_ordered_simplex, minimize_box, DEFAULT_STARTS};

/// Default significance multiplier for the statistical margin `V > z·ε`.
pub const DEFAULT_Z: f64 = 3.0;

/// Outcome of a certification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ClassicalCompatible,
    Nonclassical,
    Inconclusive,
}

/// Full result of a certification: verdict, the maximal (or robust-minimal)
/// violation, the witnessing direction, the worst-case efficiency errors,
/// the statistical error when trial counts are available, and whether the
/// independent oracle agreed (when it was run).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub violation: f64,
    pub best_direction: TightDirection,
    pub best_delta: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub oracle_agrees: Option<bool>,
}

/// Box of efficiency-calibration errors `|δᵢ| ≤ bounds[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyDomain {
    bounds: Vec<f64>,
}

impl UncertaintyDomain {
    pub fn new(bounds: Vec<f64>) -> Result<Self> {
        if bounds.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::Domain("uncertainty half-widths must be finite and >= 0".into()));
        }
        Ok(Self { bounds })
    }

    /// Takes the half-widths recorded on the settings themselves.
    pub fn from_settings(settings: &EfficiencySettings) -> Self {
        Self { bounds: settings.delta_bound().to_vec() }
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn is_zero(&self) -> bool {
        self.bounds.iter().all(|b| *b == 0.0)
    }

    /// Per-coordinate interval for `δᵢ`, clipped so every efficiency stays
    /// in `(0, 1]`. Fails when clipping empties an interval.
    fn clipped_intervals(&self, settings: &EfficiencySettings) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.bounds.len() != settings.len() {
            return Err(Error::Contract(format!(
                "domain has {} bounds for {} settings",
                self.bounds.len(),
                settings.len()
            )));
        }
        let mut lo = Vec::with_capacity(self.bounds.len());
        let mut hi = Vec::with_capacity(self.bounds.len());
        for (&b, &eta) in self.bounds.iter().zip(settings.etas()) {
            let l = (-b).max(1e-9 - eta);
            let h = b.min(1.0 - eta);
            if l > h {
                return Err(Error::Domain(format!(
                    "uncertainty box around eta = {eta} leaves no admissible efficiency"
                )));
            }
            lo.push(l);
            hi.push(h);
        }
        Ok((lo, hi))
    }
}

/// What the robustness minimization holds fixed while the efficiencies vary.
#[derive(Debug, Clone, Copy)]
pub enum RobustInput<'a> {
    /// Measured probabilities stay fixed; δ moves only the classical curve.
    /// This is the experimental reading and the default mode.
    Measured(&'a NoClickVector),
    /// Probabilities are recomputed from the state model at each candidate
    /// efficiency vector.
    Model(&'a StateModel),
}

/// `λ·P - sup λ·Π`: positive values witness nonclassicality.
pub fn violation(direction: &TightDirection, p: &NoClickVector) -> Result<f64> {
    if direction.dim() != p.len() {
        return Err(Error::Contract(format!(
            "direction dimension {} does not match vector length {}",
            direction.dim(),
            p.len()
        )));
    }
    let dot: f64 = direction.lambda.iter().zip(p.as_slice()).map(|(a, b)| a * b).sum();
    Ok(dot - direction.sup_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Odd(Tau),
    EvenInterior,
    EvenBoundary,
}

impl Family {
    fn for_dimension(n: usize) -> Vec<Family> {
        if n % 2 == 0 {
            vec![Family::EvenInterior, Family::EvenBoundary]
        } else {
            vec![Family::Odd(Tau::Zero), Family::Odd(Tau::One)]
        }
    }

    fn zero_count(self, n: usize) -> usize {
        match self {
            Family::Odd(_) => (n - 1) / 2,
            Family::EvenInterior => n / 2,
            Family::EvenBoundary => n / 2 - 1,
        }
    }

    fn construct(self, spec: &CurveSpec, zeros: &[f64]) -> Result<TightDirection> {
        match self {
            Family::Odd(tau) => lambda_odd(spec, zeros, tau),
            Family::EvenInterior => lambda_even_interior(spec, zeros),
            Family::EvenBoundary => lambda_even_boundary(spec, zeros),
        }
    }
}

/// Maximal violation `V = max λ·P - sup λ·Π` over both tight families of
/// the parity of `N`, optimizing the zeros on the ordered simplex.
///
/// When the optimum lands on (nearly) coinciding zeros, the search re-runs
/// in the reduced configuration with the merged multiplicities, where the
/// generalized derivative-column constructors apply.
pub fn max_violation(
    p: &NoClickVector,
    settings: &EfficiencySettings,
) -> Result<(f64, TightDirection)> {
    if settings.len() != p.len() {
        return Err(Error::Contract(format!(
            "settings ({}) and probabilities ({}) disagree on N",
            settings.len(),
            p.len()
        )));
    }
    let n = p.len();
    let spec = CurveSpec::from_settings(settings);

    let mut best: Option<(f64, TightDirection)> = None;
    for family in Family::for_dimension(n) {
        let dim = family.zero_count(n);
        let objective = |zeros: &[f64]| match family.construct(&spec, zeros) {
            Ok(d) => {
                let v = violation(&d, p).unwrap_or(f64::NEG_INFINITY);
                if v.is_finite() {
                    v
                } else {
                    f64::NEG_INFINITY
                }
            }
            Err(_) => f64::NEG_INFINITY,
        };
        let mut result = maximize_ordered_simplex(dim, DEFAULT_STARTS, &objective);

        // re-optimize within the merged configuration when zeros coincide
        if has_merge(&result.x) {
            let merged = merged_representatives(&result.x);
            let mult = multiplicities(&result.x, &merged);
            let expand = |unique: &[f64]| {
                let mut full = Vec::with_capacity(dim);
                for (u, &m) in unique.iter().zip(&mult) {
                    for _ in 0..m {
                        full.push(*u);
                    }
                }
                full
            };
            let reduced = maximize_ordered_simplex(merged.len(), DEFAULT_STARTS, &|u: &[f64]| {
                objective(&expand(u))
            });
            if reduced.value > result.value {
                result = optim_expand(reduced, &expand);
            }
        }

        if result.value.is_finite() {
            let direction = family.construct(&spec, &result.x)?;
            let keep = match &best {
                None => true,
                Some((v, _)) => result.value > *v,
            };
            if keep {
                best = Some((result.value, direction));
            }
        }
    }
    best.ok_or_else(|| {
        Error::NoConvergence("no tight-direction family produced a finite violation".into())
    })
}

fn has_merge(zeros: &[f64]) -> bool {
    zeros.windows(2).any(|w| w[1] - w[0] < EPS_MERGE)
}

fn merged_representatives(zeros: &[f64]) -> Vec<f64> {
    let mut reps: Vec<f64> = Vec::new();
    for &z in zeros {
        match reps.last() {
            Some(&r) if z - r < EPS_MERGE => {}
            _ => reps.push(z),
        }
    }
    reps
}

fn multiplicities(zeros: &[f64], reps: &[f64]) -> Vec<usize> {
    let mut mult = vec![0usize; reps.len()];
    for &z in zeros {
        let i = reps
            .iter()
            .position(|&r| (z - r).abs() < EPS_MERGE)
            .unwrap_or(reps.len() - 1);
        mult[i] += 1;
    }
    mult
}

fn optim_expand(r: optim::OptimResult, expand: &dyn Fn(&[f64]) -> Vec<f64>) -> optim::OptimResult {
    optim::OptimResult { x: expand(&r.x), value: r.value }
}

/// Robust certification: minimizes `V(η₀ + δ)` over the uncertainty box and
/// certifies only when the minimum stays positive (with the statistical
/// margin `V > z·ε` when trial counts are present).
///
/// Seeds include every box corner; worst cases empirically sit near corners
/// for these monotone curves.
pub fn robust_violation(
    input: RobustInput,
    settings: &EfficiencySettings,
    domain: &UncertaintyDomain,
) -> Result<CertificationReport> {
    let measured: Option<&NoClickVector> = match input {
        RobustInput::Measured(p) => Some(p),
        RobustInput::Model(_) => None,
    };
    let base_p: NoClickVector = match input {
        RobustInput::Measured(p) => p.clone(),
        RobustInput::Model(state) => probability_vector(state, settings)?,
    };
    if base_p.len() != settings.len() {
        return Err(Error::Contract("probability vector and settings disagree on N".into()));
    }

    let evaluate = |delta: &[f64]| -> Result<(f64, TightDirection)> {
        let etas: Vec<f64> =
            settings.etas().iter().zip(delta).map(|(e, d)| e + d).collect();
        let perturbed = EfficiencySettings::new(etas, settings.eta_c())?;
        match input {
            RobustInput::Measured(p) => max_violation(p, &perturbed),
            RobustInput::Model(state) => {
                let p = probability_vector(state, &perturbed)?;
                max_violation(&p, &perturbed)
            }
        }
    };

    let (delta_star, v_min) = if domain.is_zero() {
        let zeros = vec![0.0; settings.len()];
        let (v, _) = evaluate(&zeros)?;
        (zeros, v)
    } else {
        let (lo, hi) = domain.clipped_intervals(settings)?;
        let n = lo.len();
        let mut seeds: Vec<Vec<f64>> = vec![vec![0.0; n]];
        for corner in 0u32..(1 << n) {
            seeds.push(
                (0..n)
                    .map(|i| if corner & (1 << i) != 0 { hi[i] } else { lo[i] })
                    .collect(),
            );
        }
        let objective = |delta: &[f64]| match evaluate(delta) {
            Ok((v, _)) => v,
            Err(_) => f64::INFINITY, // invalid efficiency ordering: outside the domain
        };
        let starts = DEFAULT_STARTS.max(seeds.len());
        let result = minimize_box(&lo, &hi, &seeds, starts, &objective);
        if !result.value.is_finite() {
            return Err(Error::Domain(
                "uncertainty box admits no valid efficiency configuration".into(),
            ));
        }
        (result.x, result.value)
    };

    let (_, best_direction) = evaluate(&delta_star)?;
    let epsilon = measured.and_then(|p| statistical_error(&best_direction, p));
    let verdict = match epsilon {
        _ if v_min <= 0.0 => Verdict::ClassicalCompatible,
        Some(eps) if v_min > DEFAULT_Z * eps => Verdict::Nonclassical,
        Some(_) => Verdict::Inconclusive,
        None => Verdict::Nonclassical,
    };
    Ok(CertificationReport {
        verdict,
        violation: v_min,
        best_direction,
        best_delta: Some(delta_star),
        epsilon,
        oracle_agrees: None,
    })
}

/// Plug-in Bernoulli error of `λ·P̂` for per-entry trial counts.
fn statistical_error(direction: &TightDirection, p: &NoClickVector) -> Option<f64> {
    let trials = p.trials()?;
    let mut acc = 0.0;
    for ((l, q), &m) in direction.lambda.iter().zip(p.as_slice()).zip(trials) {
        if m == 0 {
            return None;
        }
        acc += l * l * q * (1.0 - q) / m as f64;
    }
    Some(acc.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::lambda_two;
    use crate::states::StateModel;

    #[test]
    fn violation_dimension_check() {
        let spec = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        let d = lambda_two(&spec, 0.5).unwrap();
        let p3 = NoClickVector::new(vec![0.5, 0.4, 0.3]).unwrap();
        assert!(violation(&d, &p3).is_err());
    }

    #[test]
    fn curve_points_never_violate() {
        let spec = CurveSpec::new(vec![1.0, 2.0]).unwrap();
        for &t in &[0.1, 0.5, 0.9] {
            let p = NoClickVector::new(vec![t, t * t]).unwrap();
            for &t1 in &[0.0, 0.3, 0.7, 1.0] {
                let d = lambda_two(&spec, t1).unwrap();
                assert!(violation(&d, &p).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn fock_state_is_caught_for_two_settings() {
        let settings = EfficiencySettings::new(vec![0.5, 1.0], 1.0).unwrap();
        let p = NoClickVector::new(vec![0.5, 0.0]).unwrap();
        let (v, d) = max_violation(&p, &settings).unwrap();
        assert!(v > 0.0, "expected positive violation, got {v}");
        // the witnessing direction corresponds to the P1^2 <= P2 envelope:
        // tangency near t1 = P1
        assert!((d.zeros.ts[0] - 0.5).abs() < 0.2, "zeros {:?}", d.zeros.ts);
    }

    #[test]
    fn coherent_states_stay_classical() {
        for n in 2..=5 {
            let settings = EfficiencySettings::uniform(n, 0.9).unwrap();
            let p = probability_vector(&StateModel::Coherent { amplitude_sq: 1.3 }, &settings)
                .unwrap();
            let (v, _) = max_violation(&p, &settings).unwrap();
            assert!(v <= 1e-8, "n={n}: V={v}");
        }
    }

    #[test]
    fn zero_box_reduces_to_max_violation() {
        let settings = EfficiencySettings::uniform(3, 0.8).unwrap();
        let state = StateModel::SqueezedCoherent { squeeze: 0.5, amplitude: 1.0 };
        let p = probability_vector(&state, &settings).unwrap();
        let (v, _) = max_violation(&p, &settings).unwrap();
        let domain = UncertaintyDomain::new(vec![0.0; 3]).unwrap();
        let report = robust_violation(RobustInput::Measured(&p), &settings, &domain).unwrap();
        assert!((report.violation - v).abs() < 1e-12);
        assert_eq!(report.best_delta.as_deref(), Some(&[0.0, 0.0, 0.0][..]));
    }

    #[test]
    fn coherent_state_never_robustly_certifies() {
        let settings = EfficiencySettings::uniform(3, 0.9).unwrap();
        let p = probability_vector(&StateModel::Coherent { amplitude_sq: 0.8 }, &settings)
            .unwrap();
        let domain = UncertaintyDomain::new(vec![0.005; 3]).unwrap();
        let report = robust_violation(RobustInput::Measured(&p), &settings, &domain).unwrap();
        assert!(report.violation <= 0.0);
        assert_eq!(report.verdict, Verdict::ClassicalCompatible);
    }

    #[test]
    fn uncertainty_box_is_clipped_at_unit_efficiency() {
        let settings = EfficiencySettings::uniform(3, 0.8).unwrap();
        let domain = UncertaintyDomain::new(vec![0.01; 3]).unwrap();
        let (lo, hi) = domain.clipped_intervals(&settings).unwrap();
        assert_eq!(hi[2], 0.0, "eta_3 = 1 cannot move up");
        assert_eq!(lo[2], -0.01);
        assert_eq!(hi[0], 0.01);
    }

    #[test]
    fn invalid_domain_is_rejected() {
        let settings = EfficiencySettings::new(vec![0.5, 1.0], 1.0).unwrap();
        assert!(UncertaintyDomain::new(vec![-0.1, 0.0]).is_err());
        let d = UncertaintyDomain::new(vec![0.1]).unwrap();
        assert!(d.clipped_intervals(&settings).is_err());
    }
}
