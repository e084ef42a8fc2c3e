//! Closed-form no-click probabilities for the supported optical states and
//! assembly of the measured probability vector across efficiency settings.
//!
//! An on-off detector with efficiency `η` has no-click POVM element
//! `(1-η)^n̂`, so every state enters the certification pipeline only through
//! its no-click law `P(0|η)`. The laws implemented here:
//!
//! * coherent `|α⟩`:              `P(0|η) = exp(-η|α|²)`
//! * Fock `|n⟩`:                  `P(0|η) = (1-η)^n`
//! * squeezed coherent `|r,α₀⟩`:  Gaussian closed form (see
//!   [`noclick_squeezed_coherent`])
//! * finite coherent mixture:     weighted sum of coherent laws

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight tolerance for mixture normalization.
const MIXTURE_WEIGHT_TOL: f64 = 1e-12;
/// Overflow guard for the squeezing parameter; no physical example comes close.
const MAX_SQUEEZE: f64 = 20.0;
/// Cap on Fock photon number to avoid pointless underflow loops.
const MAX_FOCK_N: u64 = 1_000_000;

/// A quantum state of one light mode, described by its no-click law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateModel {
    /// Coherent state `|α⟩` with `|α|² = amplitude_sq`.
    Coherent { amplitude_sq: f64 },
    /// Fock state `|n⟩`.
    Fock { photon_number: u64 },
    /// Squeezed coherent state `|r,α₀⟩` with real amplitude `α₀`.
    ///
    /// The amplitude is restricted to real values; the closed form is only
    /// stated for the phase-aligned case, so complex amplitudes are not
    /// representable by this model.
    SqueezedCoherent { squeeze: f64, amplitude: f64 },
    /// Statistical mixture of coherent states: pairs `(weight, |α_j|²)`.
    CoherentMixture { components: Vec<(f64, f64)> },
}

impl StateModel {
    /// Checks the model parameters against their stated domains.
    pub fn validate(&self) -> Result<()> {
        match self {
            StateModel::Coherent { amplitude_sq } => {
                if !amplitude_sq.is_finite() || *amplitude_sq < 0.0 {
                    return Err(Error::Domain(format!(
                        "coherent |alpha|^2 must be finite and >= 0, got {amplitude_sq}"
                    )));
                }
            }
            StateModel::Fock { photon_number } => {
                if *photon_number > MAX_FOCK_N {
                    return Err(Error::Domain(format!(
                        "Fock photon number {photon_number} exceeds cap {MAX_FOCK_N}"
                    )));
                }
            }
            StateModel::SqueezedCoherent { squeeze, amplitude } => {
                if !squeeze.is_finite() || *squeeze < 0.0 {
                    return Err(Error::Domain(format!(
                        "squeeze parameter must be finite and >= 0, got {squeeze}"
                    )));
                }
                if *squeeze > MAX_SQUEEZE {
                    return Err(Error::Domain(format!(
                        "squeeze parameter {squeeze} exceeds overflow guard {MAX_SQUEEZE}"
                    )));
                }
                if !amplitude.is_finite() {
                    return Err(Error::Domain("amplitude must be finite".into()));
                }
            }
            StateModel::CoherentMixture { components } => {
                if components.is_empty() {
                    return Err(Error::Domain("mixture must have at least one component".into()));
                }
                let mut total = 0.0;
                for &(w, a2) in components {
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::Domain(format!("mixture weight {w} must be >= 0")));
                    }
                    if !a2.is_finite() || a2 < 0.0 {
                        return Err(Error::Domain(format!("mixture |alpha|^2 {a2} must be >= 0")));
                    }
                    total += w;
                }
                if (total - 1.0).abs() > MIXTURE_WEIGHT_TOL {
                    return Err(Error::Domain(format!(
                        "mixture weights sum to {total}, expected 1 within {MIXTURE_WEIGHT_TOL}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// No-click probability of this state at effective efficiency `eta`.
    pub fn noclick(&self, eta: f64) -> Result<f64> {
        self.validate()?;
        match self {
            StateModel::Coherent { amplitude_sq } => noclick_coherent(eta, *amplitude_sq),
            StateModel::Fock { photon_number } => noclick_fock(eta, *photon_number),
            StateModel::SqueezedCoherent { squeeze, amplitude } => {
                noclick_squeezed_coherent(eta, *squeeze, *amplitude)
            }
            StateModel::CoherentMixture { components } => {
                let mut p = 0.0;
                for &(w, a2) in components {
                    p += w * noclick_coherent(eta, a2)?;
                }
                Ok(p.clamp(0.0, 1.0))
            }
        }
    }
}

/// Ordered detection-efficiency settings `η₁ < η₂ < … < η_N`, the overall
/// detection efficiency `η_c`, and the half-widths of the calibration
/// uncertainty box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencySettings {
    etas: Vec<f64>,
    eta_c: f64,
    delta_bound: Vec<f64>,
}

impl EfficiencySettings {
    /// Builds settings from an ordered efficiency list and overall efficiency.
    pub fn new(etas: Vec<f64>, eta_c: f64) -> Result<Self> {
        if etas.len() < 2 {
            return Err(Error::Contract(format!(
                "need at least 2 efficiency settings, got {}",
                etas.len()
            )));
        }
        for &e in &etas {
            if !e.is_finite() || e <= 0.0 || e > 1.0 {
                return Err(Error::Domain(format!("efficiency {e} must lie in (0, 1]")));
            }
        }
        if !etas.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Contract("efficiencies must be strictly increasing".into()));
        }
        if !eta_c.is_finite() || eta_c <= 0.0 || eta_c > 1.0 {
            return Err(Error::Domain(format!("eta_c {eta_c} must lie in (0, 1]")));
        }
        let n = etas.len();
        Ok(Self { etas, eta_c, delta_bound: vec![0.0; n] })
    }

    /// Uniformly spaced settings `η_i = i/N`.
    pub fn uniform(n: usize, eta_c: f64) -> Result<Self> {
        let etas = (1..=n).map(|i| i as f64 / n as f64).collect();
        Self::new(etas, eta_c)
    }

    /// Attaches per-setting uncertainty half-widths `δᵢ_max ≥ 0`.
    pub fn with_delta_bound(mut self, delta: Vec<f64>) -> Result<Self> {
        if delta.len() != self.etas.len() {
            return Err(Error::Contract(format!(
                "delta bound length {} does not match {} settings",
                delta.len(),
                self.etas.len()
            )));
        }
        if delta.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(Error::Domain("delta bounds must be finite and >= 0".into()));
        }
        self.delta_bound = delta;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn eta_c(&self) -> f64 {
        self.eta_c
    }

    pub fn delta_bound(&self) -> &[f64] {
        &self.delta_bound
    }

    /// Efficiency ratios `ν_i = η_i/η₁`; `ν₁ = 1` exactly.
    pub fn nus(&self) -> Vec<f64> {
        let eta1 = self.etas[0];
        let mut nus: Vec<f64> = self.etas.iter().map(|e| e / eta1).collect();
        nus[0] = 1.0;
        nus
    }

    /// Whether the settings are the uniform grid `η_i = i/N` (within `tol`).
    pub fn is_uniform(&self, tol: f64) -> bool {
        let n = self.etas.len() as f64;
        self.etas
            .iter()
            .enumerate()
            .all(|(i, &e)| (e - (i as f64 + 1.0) / n).abs() <= tol)
    }
}

/// The measured no-click probability vector, one entry per efficiency
/// setting, optionally carrying per-entry trial counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoClickVector {
    probabilities: Vec<f64>,
    trials: Option<Vec<u64>>,
}

impl NoClickVector {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::Contract("probability vector must not be empty".into()));
        }
        for &p in &probabilities {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
            }
        }
        Ok(Self { probabilities, trials: None })
    }

    pub fn with_trials(mut self, trials: Vec<u64>) -> Result<Self> {
        if trials.len() != self.probabilities.len() {
            return Err(Error::Contract(format!(
                "trial counts length {} does not match {} probabilities",
                trials.len(),
                self.probabilities.len()
            )));
        }
        self.trials = Some(trials);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn trials(&self) -> Option<&[u64]> {
        self.trials.as_deref()
    }
}

/// `P(0|η) = exp(-η|α|²)` for a coherent state.
pub fn noclick_coherent(eta: f64, amplitude_sq: f64) -> Result<f64> {
    check_eta(eta)?;
    if !amplitude_sq.is_finite() || amplitude_sq < 0.0 {
        return Err(Error::Domain(format!(
            "|alpha|^2 must be finite and >= 0, got {amplitude_sq}"
        )));
    }
    Ok((-eta * amplitude_sq).exp())
}

/// `P(0|η) = (1-η)^n` for a Fock state, evaluated as `exp(n·ln(1-η))` for
/// stability, with exact 0 at `η = 1`.
pub fn noclick_fock(eta: f64, n: u64) -> Result<f64> {
    check_eta(eta)?;
    if n > MAX_FOCK_N {
        return Err(Error::Domain(format!("photon number {n} exceeds cap {MAX_FOCK_N}")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    if eta >= 1.0 {
        return Ok(0.0);
    }
    Ok((n as f64 * (1.0 - eta).ln()).exp())
}

/// No-click probability of the squeezed coherent state `|r,α₀⟩` with real
/// amplitude, evaluated from the Gaussian closed form
///
/// ```text
/// P(0|η) = D^{-1/2} · exp[ (α₀, -α₀) σ⁻¹ (-α₀, α₀)ᵀ ],
/// D      = 1 + η(2-η) sinh²r,
/// σ⁻¹    = η/(4D) · [[η cosh2r + 2 - η,  -η sinh2r],
///                    [-η sinh2r,  η cosh2r + 2 - η]]
/// ```
///
/// At `r = 0` this reduces exactly to the coherent law `exp(-η α₀²)`.
pub fn noclick_squeezed_coherent(eta: f64, r: f64, alpha0: f64) -> Result<f64> {
    check_eta(eta)?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::Domain(format!("squeeze parameter must be >= 0, got {r}")));
    }
    if r > MAX_SQUEEZE {
        return Err(Error::Domain(format!(
            "squeeze parameter {r} exceeds overflow guard {MAX_SQUEEZE}"
        )));
    }
    if !alpha0.is_finite() {
        return Err(Error::Domain("amplitude must be finite".into()));
    }
    let sh = r.sinh();
    let d = 1.0 + eta * (2.0 - eta) * sh * sh;
    let scale = eta / (4.0 * d);
    let diag = eta * (2.0 * r).cosh() + 2.0 - eta;
    let off = -eta * (2.0 * r).sinh();
    // row (α₀, -α₀) · σ⁻¹ · col (-α₀, α₀)
    let col = (-alpha0, alpha0);
    let mv = (
        scale * (diag * col.0 + off * col.1),
        scale * (off * col.0 + diag * col.1),
    );
    let exponent = alpha0 * mv.0 + (-alpha0) * mv.1;
    Ok((exponent.exp() / d.sqrt()).clamp(0.0, 1.0))
}

/// Assembles the no-click vector `P_i = P(0|η_c·η_i)` for a state across all
/// settings.
pub fn probability_vector(state: &StateModel, settings: &EfficiencySettings) -> Result<NoClickVector> {
    state.validate()?;
    let probs = settings
        .etas()
        .iter()
        .map(|&eta| state.noclick(settings.eta_c() * eta))
        .collect::<Result<Vec<f64>>>()?;
    NoClickVector::new(probs)
}

fn check_eta(eta: f64) -> Result<()> {
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("efficiency {eta} outside [0, 1]")));
    }
    Ok(())
}
