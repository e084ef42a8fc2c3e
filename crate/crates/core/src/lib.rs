//! Decides whether a vector of no-click probabilities, measured with a
//! single on-off photodetector at several efficiency settings, can be
//! reproduced by statistical mixtures of coherent states — and quantifies
//! the violation when it cannot.
//!
//! The pipeline, bottom to top:
//!
//! * [`states`] — closed-form no-click laws for coherent, Fock, squeezed
//!   coherent, and mixture states, and assembly of the probability vector.
//! * [`geometry`] — the classical curve `Π(t) = (t^{ν₁}, …, t^{ν_N})`, the
//!   complete families of tight supporting-hyperplane directions for odd and
//!   even setting counts, and the Chebyshev determinant engine.
//! * [`moments`] — nonlinear envelope tests for two and three settings and
//!   the Hausdorff moment-matrix tests for uniformly spaced efficiencies.
//! * [`certify`] — maximal violation over all tight directions, robust
//!   certification over efficiency-uncertainty boxes, and an independent
//!   LP hull-membership oracle.
//! * [`simulate`] — seeded Monte Carlo click experiments and the statistical
//!   error of linear witnesses.

pub mod certify;
pub mod error;
pub mod geometry;
pub mod moments;
pub mod simulate;
pub mod states;

pub use certify::{
    hull_membership_oracle, max_violation, robust_violation, violation, CertificationReport,
    HullFeasibility, RobustInput, UncertaintyDomain, Verdict,
};
pub use error::{Error, Result};
pub use geometry::{CurveSpec, Tau, TightDirection, ZeroSet};
pub use moments::{
    build_moment_matrices, envelope_three, envelope_two, is_classical_moments, MomentMatrices,
};
pub use simulate::{run_experiment, significance, witness_error, EmpiricalRecord, TrialPlan};
pub use states::{
    noclick_coherent, noclick_fock, noclick_squeezed_coherent, probability_vector,
    EfficiencySettings, NoClickVector, StateModel,
};
