//! Deterministic multi-start coordinatewise refinement over the ordered-zero
//! simplex `0 ≤ x₁ ≤ … ≤ x_l ≤ 1` and over box domains.
//!
//! Starts come from the R_d low-discrepancy sequence (plastic constant), so
//! repeated runs are bit-identical; ties between starts break
//! lexicographically on the coordinates.

pub(crate) struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Number of quasi-random starts used by the violation optimizers.
pub(crate) const DEFAULT_STARTS: usize = 32;

const LINE_SCAN: usize = 17;
const TERNARY_ITERS: usize = 28;
const MAX_SWEEPS: usize = 12;
const SWEEP_TOL: f64 = 1e-14;
/// Coordinates closer than this are moved jointly in the grouped pass.
const GROUP_TOL: f64 = 1e-6;

/// Generalized golden ratios for the R_d sequence.
fn plastic_alphas(dim: usize) -> Vec<f64> {
    // unique positive root of x^(d+1) = x + 1
    let d = dim as f64;
    let mut phi: f64 = 1.5;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d + 1.0));
    }
    (0..dim).map(|j| (1.0 / phi.powi(j as i32 + 1)).fract()).collect()
}

fn rd_point(alphas: &[f64], k: usize) -> Vec<f64> {
    alphas.iter().map(|a| (0.5 + a * (k as f64 + 1.0)).fract()).collect()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Maximizes `f` over the ordered simplex in `[0,1]^dim`.
pub(crate) fn maximize_ordered_simplex(
    dim: usize,
    starts: usize,
    f: &dyn Fn(&[f64]) -> f64,
) -> OptimResult {
    if dim == 0 {
        let v = f(&[]);
        return OptimResult { x: vec![], value: v };
    }
    let alphas = plastic_alphas(dim);
    let mut best: Option<OptimResult> = None;
    for k in 0..starts {
        let mut x = if k == 0 {
            // structured start: equispaced interior points
            (1..=dim).map(|i| i as f64 / (dim as f64 + 1.0)).collect::<Vec<f64>>()
        } else {
            let mut p = rd_point(&alphas, k - 1);
            p.sort_by(|a, b| a.partial_cmp(b).unwrap());
            p
        };
        let value = refine_with_groups(&mut x, f, LINE_SCAN);
        let better = match &best {
            None => true,
            Some(b) => {
                value > b.value + SWEEP_TOL
                    || ((value - b.value).abs() <= SWEEP_TOL && lex_less(&x, &b.x))
            }
        };
        if better {
            best = Some(OptimResult { x, value });
        }
    }
    // polish pass with a denser line scan
    let mut out = best.expect("at least one start");
    let polished = refine_with_groups(&mut out.x, f, 65);
    if polished > out.value {
        out.value = polished;
    }
    out
}

/// Alternates plain coordinate refinement with a pass that moves clusters of
/// (nearly) coinciding coordinates jointly. Plain coordinate moves jam when
/// the optimum sits on a diagonal face `x_i = x_{i+1}` of the ordered
/// simplex — each member is pinned by the other — so the cluster must slide
/// as one variable.
fn refine_with_groups(x: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> f64, scan: usize) -> f64 {
    let mut current = refine_simplex(x, f, scan);
    for _ in 0..3 {
        let improved = refine_groups_once(x, f, scan, current);
        if improved <= current + SWEEP_TOL {
            current = current.max(improved);
            break;
        }
        current = improved;
        // allow the clusters to split again
        current = current.max(refine_simplex(x, f, scan));
    }
    current
}

fn refine_groups_once(
    x: &mut Vec<f64>,
    f: &dyn Fn(&[f64]) -> f64,
    scan: usize,
    mut current: f64,
) -> f64 {
    let dim = x.len();
    // contiguous runs of coordinates within GROUP_TOL
    let mut groups: Vec<(usize, usize)> = Vec::new(); // [start, end)
    let mut s = 0;
    for i in 1..=dim {
        if i == dim || x[i] - x[i - 1] > GROUP_TOL {
            groups.push((s, i));
            s = i;
        }
    }
    if groups.iter().all(|(a, b)| b - a == 1) {
        return current;
    }
    for _ in 0..MAX_SWEEPS {
        let before = current;
        for (gi, &(a, b)) in groups.iter().enumerate() {
            let lo = if gi == 0 { 0.0 } else { x[groups[gi - 1].1 - 1] };
            let hi = if gi + 1 == groups.len() { 1.0 } else { x[groups[gi + 1].0] };
            let offsets: Vec<f64> = x[a..b].iter().map(|v| v - x[a]).collect();
            let span = offsets[offsets.len() - 1];
            let (t, v) = line_maximize(
                &mut |t| {
                    let saved: Vec<f64> = x[a..b].to_vec();
                    for (k, off) in offsets.iter().enumerate() {
                        x[a + k] = t + off;
                    }
                    let v = f(x);
                    x[a..b].copy_from_slice(&saved);
                    v
                },
                lo,
                (hi - span).max(lo),
                scan,
                current,
            );
            if v > current {
                for (k, off) in offsets.iter().enumerate() {
                    x[a + k] = t + off;
                }
                current = v;
            }
        }
        if current - before <= SWEEP_TOL {
            break;
        }
    }
    current
}

fn refine_simplex(x: &mut Vec<f64>, f: &dyn Fn(&[f64]) -> f64, scan: usize) -> f64 {
    let dim = x.len();
    let mut current = f(x);
    for _ in 0..MAX_SWEEPS {
        let before = current;
        for i in 0..dim {
            let lo = if i == 0 { 0.0 } else { x[i - 1] };
            let hi = if i == dim - 1 { 1.0 } else { x[i + 1] };
            let (t, v) = line_maximize(&mut |t| eval_at(x, i, t, f), lo, hi, scan, current);
            if v > current {
                x[i] = t;
                current = v;
            }
        }
        if current - before <= SWEEP_TOL {
            break;
        }
    }
    current
}

fn eval_at(x: &mut Vec<f64>, i: usize, t: f64, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let old = x[i];
    x[i] = t;
    let v = f(x);
    x[i] = old;
    v
}

/// Scans `[lo, hi]`, then ternary-refines around the best sample.
/// `current` is the value at the incumbent coordinate, kept as a floor.
fn line_maximize(
    f: &mut dyn FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    scan: usize,
    current: f64,
) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let mut best_t = lo;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..scan {
        let t = lo + (hi - lo) * k as f64 / (scan - 1) as f64;
        let v = f(t);
        if v > best_v {
            best_v = v;
            best_t = t;
        }
    }
    let cell = (hi - lo) / (scan - 1) as f64;
    let mut a = (best_t - cell).max(lo);
    let mut b = (best_t + cell).min(hi);
    for _ in 0..TERNARY_ITERS {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let mid = 0.5 * (a + b);
    let vm = f(mid);
    if vm > best_v {
        best_v = vm;
        best_t = mid;
    }
    if best_v < current {
        (best_t, current.max(best_v))
    } else {
        (best_t, best_v)
    }
}

/// Minimizes `f` over the box `∏ [lo_i, hi_i]` with the given extra seeds
/// (clipped into the box); used for robustness over efficiency errors.
pub(crate) fn minimize_box(
    lo: &[f64],
    hi: &[f64],
    seeds: &[Vec<f64>],
    starts: usize,
    f: &dyn Fn(&[f64]) -> f64,
) -> OptimResult {
    let dim = lo.len();
    let clip = |p: &mut Vec<f64>| {
        for i in 0..dim {
            p[i] = p[i].clamp(lo[i], hi[i]);
        }
    };
    let alphas = plastic_alphas(dim);
    let mut points: Vec<Vec<f64>> = Vec::new();
    points.push(lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect());
    for s in seeds {
        let mut p = s.clone();
        clip(&mut p);
        points.push(p);
    }
    let mut k = 0;
    while points.len() < starts.max(seeds.len() + 1) {
        let u = rd_point(&alphas, k);
        points.push(u.iter().zip(lo.iter().zip(hi)).map(|(x, (a, b))| a + x * (b - a)).collect());
        k += 1;
    }

    let neg = |x: &[f64]| -f(x);
    let mut best: Option<OptimResult> = None;
    for p in points {
        let mut x = p;
        let mut current = neg(&x);
        for _ in 0..4 {
            let before = current;
            for i in 0..dim {
                let (t, v) = line_maximize(
                    &mut |t| {
                        let old = x[i];
                        x[i] = t;
                        let v = neg(&x);
                        x[i] = old;
                        v
                    },
                    lo[i],
                    hi[i],
                    9,
                    current,
                );
                if v > current {
                    x[i] = t;
                    current = v;
                }
            }
            if current - before <= 1e-13 {
                break;
            }
        }
        let better = match &best {
            None => true,
            Some(b) => {
                current > b.value + 1e-15
                    || ((current - b.value).abs() <= 1e-15 && lex_less(&x, &b.x))
            }
        };
        if better {
            best = Some(OptimResult { x, value: current });
        }
    }
    let out = best.expect("at least one start");
    OptimResult { x: out.x, value: -out.value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_maximum_of_smooth_objective() {
        // f(x) = -(x1-0.3)^2 - (x2-0.7)^2, max at (0.3, 0.7), ordered
        let f = |x: &[f64]| -(x[0] - 0.3).powi(2) - (x[1] - 0.7).powi(2);
        let r = maximize_ordered_simplex(2, DEFAULT_STARTS, &f);
        assert!((r.x[0] - 0.3).abs() < 1e-5, "{:?}", r.x);
        assert!((r.x[1] - 0.7).abs() < 1e-5);
        assert!(r.value > -1e-10);
    }

    #[test]
    fn respects_ordering_constraint() {
        // unconstrained max at (0.8, 0.2) violates ordering; the constrained
        // max sits on the diagonal at 0.5
        let f = |x: &[f64]| -(x[0] - 0.8).powi(2) - (x[1] - 0.2).powi(2);
        let r = maximize_ordered_simplex(2, DEFAULT_STARTS, &f);
        assert!(r.x[0] <= r.x[1] + 1e-12);
        assert!((r.x[0] - 0.5).abs() < 1e-6, "{:?}", r.x);
        assert!((r.x[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn multimodal_objective_found_by_multistart() {
        // narrow peak at 0.91 plus broad bump at 0.2
        let f = |x: &[f64]| {
            let t = x[0];
            (-(t - 0.2).powi(2) / 0.02).exp() + 2.0 * (-(t - 0.91).powi(2) / 0.0002).exp()
        };
        let r = maximize_ordered_simplex(1, DEFAULT_STARTS, &f);
        assert!((r.x[0] - 0.91).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn zero_dimensional_case() {
        let r = maximize_ordered_simplex(0, DEFAULT_STARTS, &|_| 42.0);
        assert_eq!(r.value, 42.0);
        assert!(r.x.is_empty());
    }

    #[test]
    fn box_minimization_hits_corner() {
        // min of linear function over a box sits at a corner
        let f = |x: &[f64]| 2.0 * x[0] - x[1];
        let lo = [-1.0, -1.0];
        let hi = [1.0, 1.0];
        let corners: Vec<Vec<f64>> =
            vec![vec![-1.0, -1.0], vec![-1.0, 1.0], vec![1.0, -1.0], vec![1.0, 1.0]];
        let r = minimize_box(&lo, &hi, &corners, 16, &f);
        assert!((r.value + 3.0).abs() < 1e-9, "{}", r.value);
        assert!((r.x[0] + 1.0).abs() < 1e-9);
        assert!((r.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_across_runs() {
        let f = |x: &[f64]| (x[0] * 7.3).sin() + (x[1] * 3.1).cos();
        let a = maximize_ordered_simplex(2, DEFAULT_STARTS, &f);
        let b = maximize_ordered_simplex(2, DEFAULT_STARTS, &f);
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }
}
