//! Seeded Monte Carlo simulation of the click experiment and the
//! statistical error of linear witnesses.
//!
//! Each efficiency setting is measured `M` times; the no-click count is a
//! Binomial(M, Pᵢ) draw on its own counter-addressed PRNG stream, so records
//! are reproducible per (seed, setting index) and generation may be
//! parallelized across settings without changing the result.
//!
//! `M` is interpreted as trials per setting. The error formula
//! `ε = √((1/M)·Σᵢ λᵢ²·P̂ᵢ·(1-P̂ᵢ))` sums the per-setting Bernoulli
//! variances of the witness components; under the alternative reading
//! (`M` as the total across settings) every ε below scales by `√N`.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::certify::Verdict;
use crate::error::{Error, Result};
use crate::geometry::TightDirection;
use crate::states::{probability_vector, EfficiencySettings, NoClickVector, StateModel};

/// One simulation campaign: a state, the settings, trials per setting, and
/// the seed that makes the record reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialPlan {
    pub trials_per_setting: u64,
    pub seed: u64,
    pub settings: EfficiencySettings,
    pub state: StateModel,
}

/// Observed no-click counts and the derived estimates `P̂ᵢ = countᵢ/M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalRecord {
    pub no_click_counts: Vec<u64>,
    pub estimated: NoClickVector,
    pub trials_per_setting: u64,
}

/// Draws the no-click counts for every setting of the plan.
pub fn run_experiment(plan: &TrialPlan) -> Result<EmpiricalRecord> {
    if plan.trials_per_setting == 0 {
        return Err(Error::Contract("need at least one trial per setting".into()));
    }
    let truth = probability_vector(&plan.state, &plan.settings)?;
    let m = plan.trials_per_setting;
    let mut counts = Vec::with_capacity(truth.len());
    for (i, &p) in truth.as_slice().iter().enumerate() {
        let mut rng = ChaCha12Rng::seed_from_u64(plan.seed);
        rng.set_stream(i as u64 + 1);
        let dist = Binomial::new(m, p)
            .map_err(|e| Error::Domain(format!("binomial parameters invalid: {e}")))?;
        counts.push(dist.sample(&mut rng));
    }
    let estimated =
        NoClickVector::new(counts.iter().map(|&c| c as f64 / m as f64).collect())?
            .with_trials(vec![m; counts.len()])?;
    Ok(EmpiricalRecord { no_click_counts: counts, estimated, trials_per_setting: m })
}

/// Statistical error of the witness value `λ·P̂`:
/// `ε = √((1/M)·Σᵢ λᵢ²·P̂ᵢ·(1-P̂ᵢ))`, the plug-in Bernoulli variance of the
/// random variable that takes `λᵢ` on a no-click at setting `i` and 0
/// otherwise.
pub fn witness_error(direction: &TightDirection, record: &EmpiricalRecord) -> Result<f64> {
    let p = record.estimated.as_slice();
    if direction.dim() != p.len() {
        return Err(Error::Contract(format!(
            "direction dimension {} does not match record length {}",
            direction.dim(),
            p.len()
        )));
    }
    let m = record.trials_per_setting as f64;
    let var: f64 = direction
        .lambda
        .iter()
        .zip(p)
        .map(|(l, q)| l * l * q * (1.0 - q))
        .sum::<f64>()
        / m;
    Ok(var.sqrt())
}

/// Decision rule wrapping the confidence margin: nonclassical iff `V > z·ε`,
/// inconclusive for a positive but insignificant violation.
pub fn significance(v: f64, epsilon: f64, z: f64) -> Verdict {
    if v > z * epsilon {
        Verdict::Nonclassical
    } else if v > 0.0 {
        Verdict::Inconclusive
    } else {
        Verdict::ClassicalCompatible
    }
}
