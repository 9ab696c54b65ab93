//! Shared test fixtures: an independent LP oracle for the transport
//! programs and random-instance helpers.
#![allow(dead_code)] // each test target uses a different subset

use netmetric::interior::BarycentricPoint;
use netmetric::rng::SplitMix64;
use netmetric::Network;

/// Dense tableau simplex (Big-M, Bland's rule): minimize `c·x` subject to
/// `A x = b`, `x >= 0`. Written independently of the library's
/// transportation solver so the two can check each other.
pub fn solve_lp_min(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    const BIG_M: f64 = 1e7;
    let m = a.len();
    let n = c.len();
    // Tableau columns: n structural, m artificial, 1 rhs. Rows flipped so
    // the rhs is nonnegative.
    let cols = n + m + 1;
    let mut t = vec![vec![0.0f64; cols]; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols - 1] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut cost = vec![BIG_M; n + m];
    cost[..n].copy_from_slice(c);
    run_simplex(&mut t, &mut basis, &cost, n + m);

    let residual: f64 = basis
        .iter()
        .zip(&t)
        .filter(|(&bj, _)| bj >= n)
        .map(|(_, row)| row[cols - 1])
        .sum();
    assert!(residual <= 1e-6, "LP oracle: infeasible instance (residual {residual})");
    basis
        .iter()
        .zip(&t)
        .map(|(&bj, row)| if bj < n { c[bj] * row[cols - 1] } else { 0.0 })
        .sum()
}

fn run_simplex(t: &mut [Vec<f64>], basis: &mut [usize], cost: &[f64], enter_limit: usize) {
    let m = t.len();
    let cols = t[0].len();
    for _ in 0..100_000 {
        // Reduced costs; Bland: first negative column enters.
        let mut entering = None;
        for j in 0..enter_limit {
            if basis.contains(&j) {
                continue;
            }
            let rc = cost[j] - (0..m).map(|i| cost[basis[i]] * t[i][j]).sum::<f64>();
            if rc < -1e-9 {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else { return };
        // Ratio test; Bland tie-break on the smallest basis index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][e] > 1e-9 {
                let ratio = t[i][cols - 1] / t[i][e];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - 1e-12 || (ratio < lr + 1e-12 && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (li, _) = leave.expect("LP oracle: unbounded phase");
        let piv = t[li][e];
        for x in t[li].iter_mut() {
            *x /= piv;
        }
        for i in 0..m {
            if i != li && t[i][e].abs() > 1e-12 {
                let f = t[i][e];
                for j in 0..cols {
                    t[i][j] -= f * t[li][j];
                }
            }
        }
        basis[li] = e;
    }
    panic!("LP oracle: pivot limit exceeded");
}

/// Builds the flow-conservation system of the minimal-transformation
/// program: one signed flow per node pair (i < j), split into positive and
/// negative parts. Row i encodes `sum_{j>i} w_ij - sum_{j<i} w_ji =
/// p_i - m_i`.
fn transform_system(p: &[f64], m: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<(usize, usize)>) {
    let n = p.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let nv = 2 * pairs.len(); // w+ then w- per pair
    let mut a = vec![vec![0.0; nv]; n];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        a[i][2 * k] = 1.0;
        a[i][2 * k + 1] = -1.0;
        a[j][2 * k] = -1.0;
        a[j][2 * k + 1] = 1.0;
    }
    let b: Vec<f64> = p.iter().zip(m).map(|(x, y)| x - y).collect();
    (a, b, pairs)
}

/// Stage-1 optimum by the generic LP: least total moved mass transforming
/// `p` into `m`.
pub fn lp_stage1_total(p: &BarycentricPoint, m: &BarycentricPoint) -> f64 {
    let (a, b, pairs) = transform_system(p.weights(), m.weights());
    let c = vec![1.0; 2 * pairs.len()];
    solve_lp_min(&a, &b, &c)
}

/// Full two-stage optimum by the generic LP: among least-total
/// transformations, the least relationship-weighted cost. The stage-1 value
/// is pinned with an extra equality row.
pub fn lp_interior_distance(net: &Network, p: &BarycentricPoint, m: &BarycentricPoint) -> f64 {
    let (mut a, mut b, pairs) = transform_system(p.weights(), m.weights());
    let total = lp_stage1_total(p, m);
    a.push(vec![1.0; 2 * pairs.len()]);
    b.push(total);
    let c: Vec<f64> = pairs
        .iter()
        .flat_map(|&(i, j)| [net.weight(i, j), net.weight(i, j)])
        .collect();
    solve_lp_min(&a, &b, &c)
}

/// Random network with weights uniform in `[lo, hi]`.
pub fn random_network(rng: &mut SplitMix64, n: usize, lo: f64, hi: f64) -> Network {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = lo + rng.uniform01() * (hi - lo);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    Network::from_matrix(d).expect("generated matrix is valid")
}

/// Random barycentric point; roughly half the draws are sparse.
pub fn random_point(rng: &mut SplitMix64, n: usize) -> BarycentricPoint {
    let sparse = rng.below(2) == 0;
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.below(2) == 0 {
                0.0
            } else {
                rng.uniform01() + 1e-3
            }
        })
        .collect();
    let sum: f64 = w.iter().sum();
    if sum <= 0.0 {
        w[rng.below(n)] = 1.0;
    } else {
        for x in w.iter_mut() {
            *x /= sum;
        }
    }
    BarycentricPoint::new(w).expect("normalized weights are valid")
}
