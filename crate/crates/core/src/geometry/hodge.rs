//! Hodge star of an (N−1)-fold wedge product: the determinant-based map
//! sending N−1 vectors in N-space to a vector orthogonal to all of them,
//! generalizing the cross product.

use crate::error::{Error, Result};

/// Determinant by full-pivot Gaussian elimination on a row-major buffer.
/// Sized for the small minors of this problem (n ≤ ~10).
fn det_full_pivot(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        // full pivot search over the remaining submatrix
        let (mut pr, mut pc, mut pv) = (k, k, a[k * n + k].abs());
        for r in k..n {
            for c in k..n {
                let v = a[r * n + c].abs();
                if v > pv {
                    pv = v;
                    pr = r;
                    pc = c;
                }
            }
        }
        if pv == 0.0 {
            return 0.0;
        }
        if pr != k {
            for c in 0..n {
                a.swap(k * n + c, pr * n + c);
            }
            det = -det;
        }
        if pc != k {
            for r in 0..n {
                a.swap(r * n + k, r * n + pc);
            }
            det = -det;
        }
        let piv = a[k * n + k];
        det *= piv;
        for r in k + 1..n {
            let f = a[r * n + k] / piv;
            if f != 0.0 {
                for c in k + 1..n {
                    a[r * n + c] -= f * a[k * n + c];
                }
            }
        }
    }
    det
}

/// Formal expansion of `det[e; v¹; …; v^{N-1}]` along the basis row `e`:
/// component `j` is `(-1)^j` times the minor with column `j` removed.
pub fn hodge_star(vectors: &[Vec<f64>]) -> Result<Vec<f64>> {
    if vectors.is_empty() {
        return Err(Error::Contract("hodge star needs at least one input vector".into()));
    }
    let n = vectors[0].len();
    if vectors.len() != n - 1 {
        return Err(Error::Contract(format!(
            "hodge star in dimension {n} needs {} vectors, got {}",
            n - 1,
            vectors.len()
        )));
    }
    if vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Contract("hodge star inputs must share one dimension".into()));
    }
    let m = n - 1;
    let mut out = Vec::with_capacity(n);
    let mut minor = vec![0.0f64; m * m];
    for j in 0..n {
        for (r, v) in vectors.iter().enumerate() {
            let mut c = 0;
            for (k, &x) in v.iter().enumerate() {
                if k != j {
                    minor[r * m + c] = x;
                    c += 1;
                }
            }
        }
        let det = det_full_pivot(&mut minor, m);
        out.push(if j % 2 == 0 { det } else { -det });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_in_three_dimensions() {
        let w = hodge_star(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(w, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn parallel_inputs_give_zero() {
        let w = hodge_star(&[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]]).unwrap();
        assert_eq!(w, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn four_dimensional_basis_example() {
        let e2 = vec![0.0, 1.0, 0.0, 0.0];
        let e3 = vec![0.0, 0.0, 1.0, 0.0];
        let e4 = vec![0.0, 0.0, 0.0, 1.0];
        let w = hodge_star(&[e2, e3, e4]).unwrap();
        // cofactor expansion: first component carries sign +1
        assert_eq!(w, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn wrong_count_is_rejected() {
        assert!(hodge_star(&[vec![1.0, 0.0, 0.0]]).is_err());
        assert!(hodge_star(&[vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn output_is_orthogonal_to_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for n in 3..=7 {
            for _ in 0..50 {
                let vs: Vec<Vec<f64>> = (0..n - 1)
                    .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .collect();
                let w = hodge_star(&vs).unwrap();
                let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                for v in &vs {
                    let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let dot: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
                    assert!(dot.abs() <= 1e-10 * wn * vn.max(1.0), "n={n}: dot={dot}");
                }
            }
        }
    }

    #[test]
    fn matches_cofactor_oracle_against_full_determinant() {
        // det[u; v1; ...] must equal u . hodge(v1, ...) for random u
        use nalgebra::DMatrix;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(12);
        for n in 2..=6 {
            for _ in 0..20 {
                let vs: Vec<Vec<f64>> = (0..n - 1)
                    .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .collect();
                let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                let w = hodge_star(&vs).unwrap();
                let dot: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
                let mut m = DMatrix::<f64>::zeros(n, n);
                for (j, &x) in u.iter().enumerate() {
                    m[(0, j)] = x;
                }
                for (i, v) in vs.iter().enumerate() {
                    for (j, &x) in v.iter().enumerate() {
                        m[(i + 1, j)] = x;
                    }
                }
                let det = m.full_piv_lu().determinant();
                assert!((dot - det).abs() < 1e-12 * det.abs().max(1.0), "n={n}: {dot} vs {det}");
            }
        }
    }
}
