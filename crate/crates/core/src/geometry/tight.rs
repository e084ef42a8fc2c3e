//! Construction of tight supporting-hyperplane directions for the convex
//! hull of the classical curve, for every parity of the setting count,
//! including the degenerate coinciding-zero variants.
//!
//! Each direction `λ` is the Hodge star of a wedge of chord and tangent
//! (or higher-derivative) columns evaluated at the zeros of the associated
//! generalized polynomial `sup - λ·Π(t)`. Zeros closer than [`EPS_MERGE`]
//! are merged and routed to the derivative-column (l'Hôpital) form, since
//! the plain wedge loses rank there. Distinct zeros closer than the series
//! radius use divided-difference columns evaluated by power series, which
//! keeps the wedge well conditioned through the near-degenerate window.
//! Every constructed direction is verified against its defining residuals
//! (tangent orthogonality and equal heights at the zeros); configurations
//! whose construction cannot reach those residuals are rejected as
//! [`Error::Degenerate`] rather than returned wrong.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::curve::CurveSpec;
use crate::geometry::hodge::hodge_star;

/// Zeros closer than this are merged into a higher-multiplicity zero.
pub const EPS_MERGE: f64 = 1e-6;

/// Relative gap `h/t` below which adjacent simple zeros switch to the
/// series-evaluated divided-difference columns.
const PAIR_STABLE_U: f64 = 0.2;

/// Wedge outputs below this norm indicate a rank collapse.
const DEGENERACY_NORM: f64 = 1e-240;

/// Residual bound (relative) for the construction self-check.
const SELF_CHECK_TOL: f64 = 1e-8;

/// Which endpoint a tight polynomial of odd dimension touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tau {
    Zero,
    One,
}

impl Tau {
    pub fn value(self) -> f64 {
        match self {
            Tau::Zero => 0.0,
            Tau::One => 1.0,
        }
    }
}

/// Boundary zeros of a tight polynomial: the subset of `{0, 1}` where the
/// supporting hyperplane touches an endpoint of the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryZeros {
    None,
    Zero,
    One,
    Both,
}

impl BoundaryZeros {
    pub fn points(self) -> &'static [f64] {
        match self {
            BoundaryZeros::None => &[],
            BoundaryZeros::Zero => &[0.0],
            BoundaryZeros::One => &[1.0],
            BoundaryZeros::Both => &[0.0, 1.0],
        }
    }

    pub fn count(self) -> usize {
        self.points().len()
    }
}

/// The zeros of a tight generalized polynomial. Every listed interior value
/// carries multiplicity 2 per occurrence; boundary zeros carry multiplicity 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    /// Interior zeros, sorted ascending; duplicates raise the multiplicity.
    pub ts: Vec<f64>,
    /// Boundary zeros (the set `T`).
    pub boundary: BoundaryZeros,
}

impl ZeroSet {
    pub fn new(mut ts: Vec<f64>, boundary: BoundaryZeros) -> Result<Self> {
        if ts.iter().any(|t| !t.is_finite() || !(0.0..=1.0).contains(t)) {
            return Err(Error::Domain("zeros must lie in [0, 1]".into()));
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { ts, boundary })
    }

    /// Total zero count with multiplicities; must equal the space dimension.
    pub fn total_multiplicity(&self) -> usize {
        2 * self.ts.len() + self.boundary.count()
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.total_multiplicity() != dim {
            return Err(Error::Contract(format!(
                "zero multiplicities sum to {}, expected {dim}",
                self.total_multiplicity()
            )));
        }
        Ok(())
    }
}

/// A tight direction: a unit normal `λ` of a supporting hyperplane of the
/// classical hull, its generating zeros, and `sup_{t∈[0,1]} λ·Π(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TightDirection {
    pub lambda: Vec<f64>,
    pub zeros: ZeroSet,
    pub sup_value: f64,
    pub normalized: bool,
}

impl TightDirection {
    pub fn dim(&self) -> usize {
        self.lambda.len()
    }
}

/// Interior zeros grouped by proximity: `(representative, multiplicity)`.
fn group_zeros(ts: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = ts.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for &t in &sorted {
        match groups.last_mut() {
            Some((rep, count)) if (t - *rep).abs() < EPS_MERGE => {
                // running mean keeps the representative centered
                *rep = (*rep * *count as f64 + t) / (*count as f64 + 1.0);
                *count += 1;
            }
            _ => groups.push((t, 1)),
        }
    }
    groups
}

fn delta_pi(spec: &CurveSpec, t: f64, reference: f64) -> Result<Vec<f64>> {
    let a = spec.point(t)?;
    let b = spec.point(reference)?;
    Ok(a.iter().zip(b).map(|(x, y)| x - y).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Columns for a run of interior groups. `chord` produces the family's
/// zeroth-order column for one group. Adjacent simple groups inside the
/// series radius contribute the stable pair block
/// `[chord(a), Π̇(a), trapezoid-defect, tangent-increment]`, which spans the
/// same subspace as their four plain columns without cancellation.
fn interior_group_columns(
    spec: &CurveSpec,
    groups: &[(f64, usize)],
    chord: &mut dyn FnMut(f64) -> Result<Vec<f64>>,
    cols: &mut Vec<Vec<f64>>,
) -> Result<()> {
    let mut i = 0;
    while i < groups.len() {
        let (t, omega) = groups[i];
        let pairable = omega == 1
            && i + 1 < groups.len()
            && groups[i + 1].1 == 1
            && t > 0.0
            && (groups[i + 1].0 - t) / t <= PAIR_STABLE_U;
        if pairable {
            let h = groups[i + 1].0 - t;
            cols.push(chord(t)?);
            cols.push(spec.derivative(t, 1)?);
            cols.push(spec.trapezoid_defect(t, h));
            cols.push(spec.tangent_increment(t, h));
            i += 2;
        } else {
            cols.push(chord(t)?);
            for j in 1..=2 * omega - 1 {
                cols.push(spec.derivative(t, j)?);
            }
            i += 1;
        }
    }
    Ok(())
}

/// Shared tail of every constructor: Hodge star, degeneracy check,
/// orientation fix against probe points, unit normalization, and the
/// residual self-check at the generating zeros.
fn assemble(
    spec: &CurveSpec,
    columns: Vec<Vec<f64>>,
    paper_sign: f64,
    interior_reps: &[f64],
    boundary_pts: &[f64],
    zeros: ZeroSet,
) -> Result<TightDirection> {
    let mut raw = hodge_star(&columns)?;
    for x in &mut raw {
        *x *= paper_sign;
    }
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("wedge product produced non-finite entries".into()));
    }
    let nrm = norm(&raw);
    if nrm < DEGENERACY_NORM {
        return Err(Error::Degenerate(format!(
            "wedge determinant collapsed (norm {nrm:.3e})"
        )));
    }

    // sup over the curve equals the common value at the generating zeros;
    // a zero at t = 0 pins it to exactly zero.
    let mut sup_raw = if boundary_pts.contains(&0.0) {
        0.0
    } else if let Some(&b) = boundary_pts.first() {
        dot(&raw, &spec.point(b)?)
    } else {
        dot(&raw, &spec.point(interior_reps[0])?)
    };

    // Orientation: the generalized polynomial sup - λ·Π(t) must be
    // non-negative; probe the gaps between consecutive maxima and flip if
    // the largest probe is negative.
    let mut pts: Vec<f64> = interior_reps.iter().chain(boundary_pts).copied().collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < EPS_MERGE);
    let mut probes = Vec::new();
    if pts[0] > EPS_MERGE {
        probes.push(pts[0] / 2.0);
    }
    for w in pts.windows(2) {
        probes.push(0.5 * (w[0] + w[1]));
    }
    if pts[pts.len() - 1] < 1.0 - EPS_MERGE {
        probes.push(0.5 * (pts[pts.len() - 1] + 1.0));
    }
    let mut gap = 0.0f64;
    for &q in &probes {
        let p = sup_raw - dot(&raw, &spec.point(q)?);
        if p.abs() > gap.abs() {
            gap = p;
        }
    }
    if gap < 0.0 {
        for x in &mut raw {
            *x = -*x;
        }
        sup_raw = -sup_raw;
    }

    let lambda: Vec<f64> = raw.iter().map(|x| x / nrm).collect();
    let sup_value = sup_raw / nrm;

    // self-check: the defining residuals of a tight direction
    for &z in interior_reps {
        let tan = spec.tangent(z);
        if dot(&lambda, &tan).abs() > SELF_CHECK_TOL * norm(&tan) {
            return Err(Error::Degenerate(format!(
                "tangent orthogonality lost at zero {z} (residual {:.3e})",
                dot(&lambda, &tan).abs() / norm(&tan)
            )));
        }
    }
    for &z in interior_reps.iter().chain(boundary_pts) {
        let height = dot(&lambda, &spec.point(z)?);
        if (height - sup_value).abs() > SELF_CHECK_TOL * sup_value.abs().max(1.0) {
            return Err(Error::Degenerate(format!(
                "equal-height property lost at zero {z} (gap {:.3e})",
                (height - sup_value).abs()
            )));
        }
    }

    Ok(TightDirection { lambda, zeros, sup_value, normalized: true })
}

/// `λ(t_m; τ)` for `N = 2m+1` settings: the supporting hyperplane through
/// the endpoint `Π(τ)` tangent to the curve at every interior zero.
pub fn lambda_odd(spec: &CurveSpec, interior: &[f64], tau: Tau) -> Result<TightDirection> {
    let n = spec.dim();
    if n % 2 == 0 || n < 3 {
        return Err(Error::Contract(format!("odd family needs odd dimension >= 3, got {n}")));
    }
    let m = (n - 1) / 2;
    if interior.len() != m {
        return Err(Error::Contract(format!(
            "odd family in dimension {n} needs {m} interior zeros, got {}",
            interior.len()
        )));
    }
    check_zero_range(interior)?;
    let groups = group_zeros(interior);
    let tau_val = tau.value();
    let mut cols = Vec::new();
    let mut plain: Vec<(f64, usize)> = Vec::new();
    for &(t, omega) in &groups {
        if (t - tau_val).abs() < EPS_MERGE {
            // zero merged with the endpoint: skip the vanishing chord and
            // take one extra derivative order
            for j in 1..=2 * omega {
                cols.push(spec.derivative(tau_val, j)?);
            }
        } else {
            plain.push((t, omega));
        }
    }
    interior_group_columns(spec, &plain, &mut |t| delta_pi(spec, t, tau_val), &mut cols)?;
    let sign = if tau == Tau::Zero { -1.0 } else { 1.0 };
    // groups merged onto τ are constructed (and checked) at τ itself
    let interior_reps: Vec<f64> = plain.iter().map(|g| g.0).collect();
    let boundary = if tau == Tau::Zero { BoundaryZeros::Zero } else { BoundaryZeros::One };
    let zeros = ZeroSet::new(interior.to_vec(), boundary)?;
    assemble(spec, cols, sign, &interior_reps, &[tau_val], zeros)
}

/// `λ(t_m)` for `N = 2m` settings: the hyperplane tangent to the curve at
/// all `m` interior zeros, touching no endpoint.
pub fn lambda_even_interior(spec: &CurveSpec, interior: &[f64]) -> Result<TightDirection> {
    let n = spec.dim();
    if n % 2 != 0 || n < 2 {
        return Err(Error::Contract(format!("even interior family needs even dimension, got {n}")));
    }
    let m = n / 2;
    if interior.len() != m {
        return Err(Error::Contract(format!(
            "even interior family in dimension {n} needs {m} zeros, got {}",
            interior.len()
        )));
    }
    check_zero_range(interior)?;
    let groups = group_zeros(interior);
    let reference = groups[0].0;
    let mut cols = Vec::new();
    let ref_pairs_with_next = groups[0].1 == 1
        && groups.len() > 1
        && groups[1].1 == 1
        && reference > 0.0
        && (groups[1].0 - reference) / reference <= PAIR_STABLE_U;
    let rest = if ref_pairs_with_next {
        let h = groups[1].0 - reference;
        cols.push(spec.derivative(reference, 1)?);
        cols.push(spec.trapezoid_defect(reference, h));
        cols.push(spec.tangent_increment(reference, h));
        &groups[2..]
    } else {
        for j in 1..=2 * groups[0].1 - 1 {
            cols.push(spec.derivative(reference, j)?);
        }
        &groups[1..]
    };
    interior_group_columns(spec, rest, &mut |t| delta_pi(spec, t, reference), &mut cols)?;
    let interior_reps: Vec<f64> = groups.iter().map(|g| g.0).collect();
    let zeros = ZeroSet::new(interior.to_vec(), BoundaryZeros::None)?;
    assemble(spec, cols, 1.0, &interior_reps, &[], zeros)
}

/// `λ(t_{m-1}; 0, 1)` for `N = 2m` settings: the hyperplane through both
/// endpoints; its sup over the curve is exactly zero.
pub fn lambda_even_boundary(spec: &CurveSpec, interior: &[f64]) -> Result<TightDirection> {
    let n = spec.dim();
    if n % 2 != 0 || n < 2 {
        return Err(Error::Contract(format!("even boundary family needs even dimension, got {n}")));
    }
    let m = n / 2;
    if interior.len() != m - 1 {
        return Err(Error::Contract(format!(
            "even boundary family in dimension {n} needs {} zeros, got {}",
            m - 1,
            interior.len()
        )));
    }
    check_zero_range(interior)?;
    let groups = group_zeros(interior);
    let mut cols = Vec::new();
    let mut plain: Vec<(f64, usize)> = Vec::new();
    for &(t, omega) in &groups {
        if t < EPS_MERGE {
            for j in 1..=2 * omega {
                cols.push(spec.derivative(0.0, j)?);
            }
        } else if t > 1.0 - EPS_MERGE {
            for j in 1..=2 * omega {
                cols.push(spec.derivative(1.0, j)?);
            }
        } else {
            plain.push((t, omega));
        }
    }
    // ΔΠ(t, 0) = Π(t)
    interior_group_columns(spec, &plain, &mut |t| spec.point(t), &mut cols)?;
    cols.push(spec.point(1.0)?); // ΔΠ(1, 0) = (1, …, 1)
    // groups merged onto an endpoint are constructed (and checked) there
    let interior_reps: Vec<f64> = plain.iter().map(|g| g.0).collect();
    let zeros = ZeroSet::new(interior.to_vec(), BoundaryZeros::Both)?;
    assemble(spec, cols, -1.0, &interior_reps, &[0.0, 1.0], zeros)
}

/// Two-setting tangent direction `λ(t₁) ∝ (ν₂ t₁^{ν₂-1}, -1)`, normal to the
/// curve's tangent line at `t₁`.
pub fn lambda_two(spec: &CurveSpec, t1: f64) -> Result<TightDirection> {
    if spec.dim() != 2 {
        return Err(Error::Contract(format!("lambda_two needs dimension 2, got {}", spec.dim())));
    }
    if !(0.0..=1.0).contains(&t1) {
        return Err(Error::Domain(format!("zero {t1} outside [0, 1]")));
    }
    let nu2 = spec.nus()[1];
    let raw = [nu2 * t1.powf(nu2 - 1.0), -1.0];
    let nrm = (raw[0] * raw[0] + 1.0).sqrt();
    let sup = (nu2 - 1.0) * t1.powf(nu2) / nrm;
    Ok(TightDirection {
        lambda: vec![raw[0] / nrm, raw[1] / nrm],
        zeros: ZeroSet::new(vec![t1], BoundaryZeros::None)?,
        sup_value: sup,
        normalized: true,
    })
}

/// The chord direction `λ_↖ ∝ (-1, 1)` encoding `P₂ ≤ P₁`, with sup 0.
pub fn lambda_nw(spec: &CurveSpec) -> Result<TightDirection> {
    if spec.dim() != 2 {
        return Err(Error::Contract(format!("lambda_nw needs dimension 2, got {}", spec.dim())));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(TightDirection {
        lambda: vec![-s, s],
        zeros: ZeroSet::new(vec![], BoundaryZeros::Both)?,
        sup_value: 0.0,
        normalized: true,
    })
}

/// Explicit three-setting directions `λ(t₁; τ)` with their l'Hôpital limit
/// vectors at `t₁ → 0` (τ = 0) and `t₁ → 1` (τ = 1).
pub fn lambda_three(spec: &CurveSpec, t1: f64, tau: Tau) -> Result<TightDirection> {
    if spec.dim() != 3 {
        return Err(Error::Contract(format!("lambda_three needs dimension 3, got {}", spec.dim())));
    }
    if !(0.0..=1.0).contains(&t1) {
        return Err(Error::Domain(format!("zero {t1} outside [0, 1]")));
    }
    let (n2, n3) = (spec.nus()[1], spec.nus()[2]);
    let raw: Vec<f64> = match tau {
        Tau::Zero => {
            if t1 < EPS_MERGE {
                vec![0.0, 0.0, -1.0]
            } else {
                vec![
                    -(n3 - n2) * t1.powf(n2 + n3 - 1.0),
                    (n3 - 1.0) * t1.powf(n3),
                    -(n2 - 1.0) * t1.powf(n2),
                ]
            }
        }
        Tau::One => {
            if t1 > 1.0 - EPS_MERGE {
                vec![n2 * n3 * (n3 - n2), -n3 * (n3 - 1.0), n2 * (n2 - 1.0)]
            } else {
                vec![
                    (n3 - n2) * t1.powf(n3 + n2 - 1.0) - n3 * t1.powf(n3 - 1.0)
                        + n2 * t1.powf(n2 - 1.0),
                    -(n3 - 1.0) * t1.powf(n3) + n3 * t1.powf(n3 - 1.0) - 1.0,
                    (n2 - 1.0) * t1.powf(n2) - n2 * t1.powf(n2 - 1.0) + 1.0,
                ]
            }
        }
    };
    let nrm = norm(&raw);
    if nrm < DEGENERACY_NORM {
        return Err(Error::Degenerate("three-setting direction collapsed".into()));
    }
    let lambda: Vec<f64> = raw.iter().map(|x| x / nrm).collect();
    let sup = match tau {
        Tau::Zero => 0.0,
        Tau::One => lambda.iter().sum(),
    };
    let boundary = if tau == Tau::Zero { BoundaryZeros::Zero } else { BoundaryZeros::One };
    Ok(TightDirection {
        lambda,
        zeros: ZeroSet::new(vec![t1], boundary)?,
        sup_value: sup,
        normalized: true,
    })
}

/// Unnormalized odd-family direction with the printed determinant sign, and
/// the sup value of the raw determinant form. Requires distinct zeros away
/// from `τ`; the normalized [`lambda_odd`] handles the degenerate cases.
pub fn lambda_odd_raw(spec: &CurveSpec, interior: &[f64], tau: Tau) -> Result<(Vec<f64>, f64)> {
    let n = spec.dim();
    let m = (n - 1) / 2;
    if n % 2 == 0 || interior.len() != m {
        return Err(Error::Contract("raw odd form needs m distinct interior zeros".into()));
    }
    check_zero_range(interior)?;
    let groups = group_zeros(interior);
    if groups.len() != m || groups.iter().any(|g| (g.0 - tau.value()).abs() < EPS_MERGE) {
        return Err(Error::Contract(
            "raw determinant form is only valid for distinct zeros away from tau".into(),
        ));
    }
    let mut cols = Vec::new();
    for &(t, _) in &groups {
        cols.push(delta_pi(spec, t, tau.value())?);
        cols.push(spec.derivative(t, 1)?);
    }
    let sign = if tau == Tau::Zero { -1.0 } else { 1.0 };
    let mut raw = hodge_star(&cols)?;
    for x in &mut raw {
        *x *= sign;
    }
    let sup = match tau {
        Tau::Zero => 0.0,
        Tau::One => raw.iter().sum(),
    };
    Ok((raw, sup))
}

/// Unnormalized even-interior direction (printed determinant sign) and its
/// raw sup value `λ·Π(t₁)`.
pub fn lambda_even_interior_raw(spec: &CurveSpec, interior: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = spec.dim();
    let m = n / 2;
    if n % 2 != 0 || interior.len() != m {
        return Err(Error::Contract("raw even form needs m distinct interior zeros".into()));
    }
    check_zero_range(interior)?;
    let groups = group_zeros(interior);
    if groups.len() != m {
        return Err(Error::Contract("raw determinant form is only valid for distinct zeros".into()));
    }
    let mut cols = vec![spec.derivative(groups[0].0, 1)?];
    for &(t, _) in &groups[1..] {
        cols.push(delta_pi(spec, t, groups[0].0)?);
        cols.push(spec.derivative(t, 1)?);
    }
    let raw = hodge_star(&cols)?;
    let sup = dot(&raw, &spec.point(groups[0].0)?);
    Ok((raw, sup))
}

fn check_zero_range(ts: &[f64]) -> Result<()> {
    if ts.iter().any(|t| !t.is_finite() || !(0.0..=1.0).contains(t)) {
        return Err(Error::Domain("zeros must lie in [0, 1]".into()));
    }
    Ok(())
}

/// Which construction family a configuration count refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaFamily {
    /// Odd `N`, one endpoint `τ` (count is per value of `τ`).
    OddTau,
    /// Even `N`, all zeros interior.
    EvenInterior,
    /// Even `N`, both endpoints in the zero set.
    EvenBoundary,
}

/// Number of distinct degenerate variants of `λ` within a family, counting
/// the ways zeros can coincide with each other or with boundary points.
pub fn enumerate_configurations(n: usize, family: LambdaFamily) -> Result<u64> {
    if n < 2 {
        return Err(Error::Contract(format!("need at least 2 settings, got {n}")));
    }
    match family {
        LambdaFamily::OddTau => {
            if n % 2 == 0 {
                return Err(Error::Contract(format!("odd family needs odd N, got {n}")));
            }
            let m = (n - 1) / 2;
            Ok(1u64 << m)
        }
        LambdaFamily::EvenInterior => {
            if n % 2 != 0 {
                return Err(Error::Contract(format!("even family needs even N, got {n}")));
            }
            let m = n / 2;
            Ok(1u64 << (m - 1))
        }
        LambdaFamily::EvenBoundary => {
            if n % 2 != 0 {
                return Err(Error::Contract(format!("even family needs even N, got {n}")));
            }
            let m = n / 2;
            Ok((1u64 << (m + 1)) - 1)
        }
    }
}
