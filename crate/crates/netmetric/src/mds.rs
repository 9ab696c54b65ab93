//! Euclidean embeddings of dissimilarity matrices: classical scaling via
//! double centering and a Jacobi eigendecomposition, refined by SMACOF
//! stress majorization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An embedding with its raw stress, the sum over pairs of squared
/// residuals between embedded distances and the input dissimilarities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingResult {
    /// One row of `k` coordinates per point.
    pub coords: Vec<Vec<f64>>,
    pub stress: f64,
}

/// Sum over pairs of squared residuals between embedded Euclidean
/// distances and the target dissimilarities.
pub fn stress_of(coords: &[Vec<f64>], dissim: &[Vec<f64>]) -> f64 {
    let n = coords.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&coords[i], &coords[j]);
            let r = d - dissim[i][j];
            total += r * r;
        }
    }
    total
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Pairwise Euclidean distance matrix of embedded points.
pub fn distance_matrix(coords: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = coords.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(&coords[i], &coords[j]);
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

const JACOBI_SWEEPS: usize = 100;
const JACOBI_EPS: f64 = 1e-12;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvectors as columns), unordered.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..JACOBI_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off <= JACOBI_EPS * JACOBI_EPS {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= JACOBI_EPS {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    (values, v)
}

/// Classical scaling: double-centered Gram matrix, eigendecomposition,
/// negative eigenvalues clamped to zero. Axes are ordered by descending
/// eigenvalue and each axis sign is fixed by its first nonzero loading.
pub fn classical_mds(dissim: &[Vec<f64>], k: usize) -> Result<EmbeddingResult> {
    let n = dissim.len();
    if n < 2 {
        return Err(Error::DegenerateInput {
            detail: format!("classical scaling needs at least 2 points, got {n}"),
        });
    }
    if k == 0 {
        return Err(Error::InvalidParameter {
            detail: "embedding dimension must be at least 1".into(),
        });
    }
    let sq: Vec<Vec<f64>> = dissim
        .iter()
        .map(|row| row.iter().map(|d| d * d).collect())
        .collect();
    let row_mean: Vec<f64> = sq.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + grand);
        }
    }

    let (values, vectors) = jacobi_eigen(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[y].partial_cmp(&values[x]).unwrap());

    let mut coords = vec![vec![0.0; k]; n];
    for (axis, &e) in order.iter().take(k).enumerate() {
        let lambda = values[e].max(0.0);
        let scale = lambda.sqrt();
        for i in 0..n {
            coords[i][axis] = vectors[i][e] * scale;
        }
    }
    canonicalize_signs(&mut coords);
    let stress = stress_of(&coords, dissim);
    Ok(EmbeddingResult { coords, stress })
}

/// Flips each axis so its first nonzero coordinate is positive.
pub fn canonicalize_signs(coords: &mut [Vec<f64>]) {
    if coords.is_empty() {
        return;
    }
    let k = coords[0].len();
    for axis in 0..k {
        let lead = coords.iter().map(|row| row[axis]).find(|v| v.abs() > 1e-12);
        if let Some(lead) = lead {
            if lead < 0.0 {
                for row in coords.iter_mut() {
                    row[axis] = -row[axis];
                }
            }
        }
    }
}

/// SMACOF stress majorization from an initial configuration. Stress is
/// non-increasing per iteration; stops after `iters` rounds or when the
/// relative stress change drops below `tol`.
pub fn smacof_refine(
    init: &EmbeddingResult,
    dissim: &[Vec<f64>],
    iters: usize,
    tol: f64,
) -> Result<EmbeddingResult> {
    let n = dissim.len();
    if init.coords.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: init.coords.len(),
        });
    }
    let k = init.coords.first().map_or(0, |r| r.len());
    let mut coords = init.coords.clone();
    let mut stress = stress_of(&coords, dissim);
    for _ in 0..iters {
        // Guttman transform: X' = (1/n) B(X) X with
        // b_ij = -delta_ij / d_ij(X) off the diagonal.
        let mut next = vec![vec![0.0; k]; n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = euclidean(&coords[i], &coords[j]);
                let b = if d > 1e-12 { dissim[i][j] / d } else { 0.0 };
                diag += b;
                for axis in 0..k {
                    next[i][axis] -= b * coords[j][axis];
                }
            }
            for axis in 0..k {
                next[i][axis] += diag * coords[i][axis];
                next[i][axis] /= n as f64;
            }
        }
        let new_stress = stress_of(&next, dissim);
        debug_assert!(
            new_stress <= stress + 1e-9,
            "majorization must not increase stress: {stress} -> {new_stress}"
        );
        let change = (stress - new_stress).abs() / stress.max(1e-30);
        coords = next;
        let done = change < tol;
        stress = new_stress;
        if done {
            break;
        }
    }
    canonicalize_signs(&mut coords);
    let stress = stress_of(&coords, dissim);
    Ok(EmbeddingResult { coords, stress })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn equilateral() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]
    }

    #[test]
    fn recovers_equilateral_triangle() {
        let emb = classical_mds(&equilateral(), 2).unwrap();
        assert!(emb.stress <= 1e-9, "stress {}", emb.stress);
        let d = distance_matrix(&emb.coords);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!((d[i][j] - 1.0).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn recovers_collinear_points() {
        let line = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ];
        let emb = classical_mds(&line, 2).unwrap();
        assert!(emb.stress <= 1e-9, "stress {}", emb.stress);
    }

    #[test]
    fn nonmetric_input_has_positive_stress() {
        // The gamma = 1 matrix violates the triangle inequality and cannot
        // be realized in any Euclidean space.
        let g1 = crate::gen::gen_gamma(1.0).unwrap();
        let emb = classical_mds(g1.matrix(), 2).unwrap();
        assert!(emb.stress > 1e-6, "stress {}", emb.stress);
    }

    #[test]
    fn degenerate_input_rejected() {
        assert!(classical_mds(&[vec![0.0]], 2).is_err());
    }

    #[test]
    fn deterministic_and_sign_canonical() {
        let g = crate::gen::gen_er(8, 3).unwrap();
        let a = classical_mds(g.matrix(), 3).unwrap();
        let b = classical_mds(g.matrix(), 3).unwrap();
        assert_eq!(a.coords, b.coords);
        for axis in 0..3 {
            let lead = a.coords.iter().map(|r| r[axis]).find(|v| v.abs() > 1e-12);
            if let Some(lead) = lead {
                assert!(lead > 0.0);
            }
        }
    }

    #[test]
    fn smacof_fixed_point_on_optimal_input() {
        let emb = classical_mds(&equilateral(), 2).unwrap();
        let refined = smacof_refine(&emb, &equilateral(), 50, 1e-8).unwrap();
        assert!(refined.stress <= 1e-9);
        for (a, b) in emb.coords.iter().zip(&refined.coords) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= 1e-6, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn smacof_never_increases_stress() {
        let g = crate::gen::gen_er(10, 5).unwrap();
        let init = classical_mds(g.matrix(), 2).unwrap();
        // Track the stress sequence iteration by iteration.
        let mut current = init.clone();
        for _ in 0..20 {
            let next = smacof_refine(&current, g.matrix(), 1, 0.0).unwrap();
            assert!(next.stress <= current.stress + 1e-9);
            current = next;
        }
        assert!(current.stress <= init.stress);
    }

    #[test]
    fn smacof_improves_nonmetric_classical_solution() {
        let g1 = crate::gen::gen_gamma(1.0).unwrap();
        let init = classical_mds(g1.matrix(), 2).unwrap();
        let refined = smacof_refine(&init, g1.matrix(), 200, 1e-10).unwrap();
        assert!(refined.stress <= init.stress + 1e-12);
    }
}
