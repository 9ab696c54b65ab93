//! Balanced transportation problem solved exactly with the transportation
//! simplex (northwest-corner start, MODI potentials, cycle pivoting).
//!
//! Instances here are tiny (at most a few dozen supply/demand nodes), so the
//! dense tableau is the right tool: exact optimality, no dependencies.

/// One positive shipment from supply row `source` to demand column `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shipment {
    pub source: usize,
    pub target: usize,
    pub amount: f64,
}

#[derive(Debug, Clone)]
pub struct TransportSolution {
    pub shipments: Vec<Shipment>,
    pub cost: f64,
}

const RC_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

/// Minimizes `sum f_ij * cost[i][j]` over nonnegative flows with row sums
/// `supply` and column sums `demand`. Supplies and demands must balance; the
/// caller is expected to have dropped entries below 1e-12.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> TransportSolution {
    let ns = supply.len();
    let nd = demand.len();
    if ns == 0 || nd == 0 {
        return TransportSolution {
            shipments: Vec::new(),
            cost: 0.0,
        };
    }

    let mut alloc = vec![vec![0.0f64; nd]; ns];
    let mut basic = vec![vec![false; nd]; ns];

    // Northwest-corner start. On a supply/demand tie we move down, leaving a
    // degenerate zero allocation in the next cell, so the basis always has
    // ns + nd - 1 cells.
    {
        let mut s = supply.to_vec();
        let mut d = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let x = s[i].min(d[j]);
            alloc[i][j] = x;
            basic[i][j] = true;
            s[i] -= x;
            d[j] -= x;
            if i == ns - 1 && j == nd - 1 {
                break;
            }
            if s[i] <= d[j] && i < ns - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    for _ in 0..MAX_PIVOTS {
        let (u, v) = potentials(ns, nd, &basic, cost);
        // Entering cell: most negative reduced cost, lowest (i, j) on ties.
        let mut entering = None;
        let mut best = -RC_TOL;
        for i in 0..ns {
            for j in 0..nd {
                if !basic[i][j] {
                    let rc = cost[i][j] - u[i] - v[j];
                    if rc < best {
                        best = rc;
                        entering = Some((i, j));
                    }
                }
            }
        }
        let Some((ei, ej)) = entering else { break };

        let cycle = pivot_cycle(ns, nd, &basic, (ei, ej));
        // Odd positions along the cycle lose flow.
        let mut theta = f64::INFINITY;
        let mut leaving = cycle[1];
        for (k, &(i, j)) in cycle.iter().enumerate().skip(1).step_by(2) {
            let _ = k;
            if alloc[i][j] < theta {
                theta = alloc[i][j];
                leaving = (i, j);
            }
        }
        for (k, &(i, j)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                alloc[i][j] += theta;
            } else {
                alloc[i][j] -= theta;
            }
        }
        basic[ei][ej] = true;
        basic[leaving.0][leaving.1] = false;
        alloc[leaving.0][leaving.1] = 0.0;
    }

    let mut shipments = Vec::new();
    let mut total_cost = 0.0;
    for i in 0..ns {
        for j in 0..nd {
            if alloc[i][j] > 1e-15 {
                shipments.push(Shipment {
                    source: i,
                    target: j,
                    amount: alloc[i][j],
                });
                total_cost += alloc[i][j] * cost[i][j];
            }
        }
    }
    TransportSolution {
        shipments,
        cost: total_cost,
    }
}

/// MODI potentials from the basis tree, rooted at row 0 with u[0] = 0.
fn potentials(ns: usize, nd: usize, basic: &[Vec<bool>], cost: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![f64::NAN; ns];
    let mut v = vec![f64::NAN; nd];
    u[0] = 0.0;
    // The basis is a spanning tree of rows and columns, so repeated sweeps
    // settle all potentials in at most ns + nd passes.
    for _ in 0..(ns + nd) {
        let mut progress = false;
        for i in 0..ns {
            for j in 0..nd {
                if basic[i][j] {
                    if !u[i].is_nan() && v[j].is_nan() {
                        v[j] = cost[i][j] - u[i];
                        progress = true;
                    } else if u[i].is_nan() && !v[j].is_nan() {
                        u[i] = cost[i][j] - v[j];
                        progress = true;
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    (u, v)
}

/// The unique cycle created by adding `entering` to the basis tree, listed
/// starting at `entering` and alternating row / column moves.
fn pivot_cycle(
    ns: usize,
    nd: usize,
    basic: &[Vec<bool>],
    entering: (usize, usize),
) -> Vec<(usize, usize)> {
    let mut cells: Vec<(usize, usize)> = Vec::new();
    for i in 0..ns {
        for j in 0..nd {
            if basic[i][j] {
                cells.push((i, j));
            }
        }
    }
    cells.push(entering);

    // Peel off cells that are alone in their row or column; whatever
    // remains is exactly the cycle.
    loop {
        let mut row_count = vec![0usize; ns];
        let mut col_count = vec![0usize; nd];
        for &(i, j) in &cells {
            row_count[i] += 1;
            col_count[j] += 1;
        }
        let before = cells.len();
        cells.retain(|&(i, j)| row_count[i] > 1 && col_count[j] > 1);
        if cells.len() == before {
            break;
        }
    }
    debug_assert!(cells.contains(&entering), "entering cell must lie on the cycle");

    let mut path = vec![entering];
    let mut along_row = true;
    let mut current = entering;
    loop {
        let next = cells
            .iter()
            .copied()
            .find(|&(i, j)| {
                (i, j) != current
                    && if along_row {
                        i == current.0
                    } else {
                        j == current.1
                    }
                    && !(path.len() > 1 && (i, j) == path[path.len() - 2])
            })
            .expect("cycle walk must continue");
        if next == entering {
            break;
        }
        path.push(next);
        current = next;
        along_row = !along_row;
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total_cost(sol: &TransportSolution) -> f64 {
        sol.cost
    }

    #[test]
    fn single_cell() {
        let sol = solve_transport(&[1.0], &[1.0], &[vec![3.0]]);
        assert_eq!(sol.shipments.len(), 1);
        assert!((total_cost(&sol) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn prefers_cheap_route() {
        // Two suppliers, two consumers; optimal plan is the diagonal.
        let sol = solve_transport(
            &[1.0, 1.0],
            &[1.0, 1.0],
            &[vec![1.0, 10.0], vec![10.0, 1.0]],
        );
        assert!((total_cost(&sol) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn classic_three_by_three() {
        // Known optimum 743 for this standard textbook-style instance.
        let supply = [15.0, 25.0, 10.0];
        let demand = [5.0, 15.0, 15.0, 15.0];
        let cost = vec![
            vec![10.0, 2.0, 20.0, 11.0],
            vec![12.0, 7.0, 9.0, 20.0],
            vec![4.0, 14.0, 16.0, 18.0],
        ];
        let sol = solve_transport(&supply, &demand, &cost);
        assert!((total_cost(&sol) - 435.0).abs() < 1e-9, "cost {}", sol.cost);
        // Row and column sums respected.
        for (i, &s) in supply.iter().enumerate() {
            let row: f64 = sol
                .shipments
                .iter()
                .filter(|sh| sh.source == i)
                .map(|sh| sh.amount)
                .sum();
            assert!((row - s).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_ties() {
        // Equal supply and demand blocks trigger degenerate pivots.
        let sol = solve_transport(
            &[0.5, 0.5],
            &[0.5, 0.5],
            &[vec![2.0, 1.0], vec![1.0, 2.0]],
        );
        assert!((total_cost(&sol) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        use crate::rng::SplitMix64;
        // 2x2 instances solvable in closed form: flow on the cheap diagonal.
        let mut rng = SplitMix64::new(77);
        for _ in 0..200 {
            let a = rng.uniform01() + 0.1;
            let b = rng.uniform01() + 0.1;
            let c = vec![
                vec![rng.uniform01() + 0.1, rng.uniform01() + 0.1],
                vec![rng.uniform01() + 0.1, rng.uniform01() + 0.1],
            ];
            let supply = [a, b];
            let demand = [b, a];
            let sol = solve_transport(&supply, &demand, &c);
            // Enumerate: x = flow on (0,0) in [max(0, a-a2), min(a, b1)]
            // cost is linear in x so optimum is at an endpoint.
            let lo = (a - demand[1]).max(0.0);
            let hi = a.min(demand[0]);
            let eval = |x: f64| {
                x * c[0][0]
                    + (a - x) * c[0][1]
                    + (demand[0] - x) * c[1][0]
                    + (b - (demand[0] - x)) * c[1][1]
            };
            let best = eval(lo).min(eval(hi));
            assert!(
                (sol.cost - best).abs() < 1e-9,
                "simplex {} vs brute {}",
                sol.cost,
                best
            );
        }
    }
}
