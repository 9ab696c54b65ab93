//! Interior points of a network and the semimetric they carry.
//!
//! A barycentric point is a convex combination of the original nodes. The
//! dissimilarity between two interior points is the cost of the cheapest
//! transformation between them: stage 1 minimizes the total moved mass,
//! stage 2 breaks ties by minimizing the mass-weighted sum of original
//! relationships (see `minimal_transport_plan`).

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Network, NodeMapping};
use crate::transport::solve_transport;
use crate::TOL;

/// Mass below which a supply or demand is dropped before solving; avoids
/// zero-row cycling in the transportation simplex.
const MASS_EPS: f64 = 1e-12;

/// A convex combination of a network's nodes, stored as one mass per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarycentricPoint {
    weights: Vec<f64>,
}

impl BarycentricPoint {
    /// Builds a point from raw masses. Entries must be nonnegative and sum
    /// to 1 within 1e-9; the sum is then renormalized to exactly 1.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidBarycentric { sum: 0.0 });
        }
        let mut weights = weights;
        for w in &mut weights {
            if *w < 0.0 {
                if *w < -TOL {
                    return Err(Error::InvalidBarycentric {
                        sum: weights.iter().sum(),
                    });
                }
                *w = 0.0;
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::InvalidBarycentric { sum });
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(BarycentricPoint { weights })
    }

    /// The original vertex `i` of an `n`-node network.
    pub fn vertex(n: usize, i: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[i] = 1.0;
        BarycentricPoint { weights }
    }

    /// The midpoint of nodes `i` and `j`.
    pub fn midpoint(n: usize, i: usize, j: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[i] = 0.5;
        weights[j] = 0.5;
        BarycentricPoint { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every coordinate matches within `tol`.
    pub fn coincides_with(&self, other: &BarycentricPoint, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Index of the vertex this point equals, if any.
    pub fn as_vertex(&self, tol: f64) -> Option<usize> {
        self.weights.iter().position(|&w| (w - 1.0).abs() <= tol)
    }
}

/// Signed per-edge flows realizing a minimal transformation between two
/// barycentric points. Positive flow on `(i, j)` with `i < j` moves mass
/// from node `i` toward node `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub flows: BTreeMap<(usize, usize), f64>,
    /// Total moved mass, `sum |w_ij|`.
    pub total: f64,
    /// Mass-weighted relationship cost, `sum |w_ij| r(i, j)`.
    pub cost: f64,
}

impl TransportPlan {
    fn empty() -> Self {
        TransportPlan {
            flows: BTreeMap::new(),
            total: 0.0,
            cost: 0.0,
        }
    }

    /// Residual of the flow-conservation constraint at every node for the
    /// pair `(p, m)` this plan was built from. Used by tests.
    pub fn conservation_residual(&self, p: &BarycentricPoint, m: &BarycentricPoint) -> f64 {
        let n = p.len();
        let mut net_out = vec![0.0; n];
        for (&(i, j), &w) in &self.flows {
            net_out[i] += w;
            net_out[j] -= w;
        }
        (0..n)
            .map(|i| ((p.weights()[i] - m.weights()[i]) - net_out[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Cheapest transformation of `p` into `m` over the network's node set.
///
/// Stage 1 minimizes the total moved mass; its optimum is exactly
/// `sum_i max(p_i - m_i, 0)` and is attained only by direct excess-to-deficit
/// shipments (any intermediate hop strictly increases the total). Stage 2
/// picks, among those optima, the shipment pattern minimizing the
/// relationship-weighted cost; that is a balanced transportation problem
/// solved exactly.
pub fn minimal_transport_plan(
    net: &Network,
    p: &BarycentricPoint,
    m: &BarycentricPoint,
) -> Result<TransportPlan> {
    let n = net.len();
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: p.len(),
        });
    }
    if m.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.len(),
        });
    }

    let mut sources = Vec::new(); // (node, excess mass)
    let mut sinks = Vec::new(); // (node, deficit mass)
    for i in 0..n {
        let diff = p.weights()[i] - m.weights()[i];
        if diff > MASS_EPS {
            sources.push((i, diff));
        } else if diff < -MASS_EPS {
            sinks.push((i, -diff));
        }
    }
    if sources.is_empty() || sinks.is_empty() {
        return Ok(TransportPlan::empty());
    }

    // Rebalance float drift so the transportation problem is exactly
    // balanced.
    let supply_sum: f64 = sources.iter().map(|&(_, s)| s).sum();
    let demand_sum: f64 = sinks.iter().map(|&(_, d)| d).sum();
    let scale = supply_sum / demand_sum;
    let supply: Vec<f64> = sources.iter().map(|&(_, s)| s).collect();
    let demand: Vec<f64> = sinks.iter().map(|&(_, d)| d * scale).collect();
    let cost: Vec<Vec<f64>> = sources
        .iter()
        .map(|&(i, _)| sinks.iter().map(|&(j, _)| net.weight(i, j)).collect())
        .collect();

    let solution = solve_transport(&supply, &demand, &cost);

    let mut flows = BTreeMap::new();
    let mut total = 0.0;
    let mut weighted = 0.0;
    for sh in &solution.shipments {
        let u = sources[sh.source].0;
        let v = sinks[sh.target].0;
        let (key, signed) = if u < v {
            ((u, v), sh.amount)
        } else {
            ((v, u), -sh.amount)
        };
        *flows.entry(key).or_insert(0.0) += signed;
        total += sh.amount;
        weighted += sh.amount * net.weight(u, v);
    }
    debug_assert!(
        (solution.cost - weighted).abs() <= 1e-9 * (1.0 + weighted.abs()),
        "simplex cost must match the recomputed weighted cost"
    );
    Ok(TransportPlan {
        flows,
        total,
        cost: weighted,
    })
}

/// The induced semimetric `s(p, m)`: the relationship-weighted cost of the
/// minimal transformation between the two points.
pub fn interior_distance(
    net: &Network,
    p: &BarycentricPoint,
    m: &BarycentricPoint,
) -> Result<f64> {
    Ok(minimal_transport_plan(net, p, m)?.cost)
}

/// A finite sample of a network's interior: the original vertices followed
/// by extra barycentric points, with all pairwise induced dissimilarities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpace {
    base: Network,
    labels: Vec<String>,
    points: Vec<BarycentricPoint>,
    dissim: Vec<Vec<f64>>,
}

impl SampledSpace {
    pub fn base(&self) -> &Network {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of original vertices (the leading points).
    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn points(&self) -> &[BarycentricPoint] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dissim(&self) -> &[Vec<f64>] {
        &self.dissim
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dissim[u][v]
    }

    /// Index of the sample point coinciding with `p`, if any.
    pub fn find_point(&self, p: &BarycentricPoint, tol: f64) -> Option<usize> {
        self.points.iter().position(|q| q.coincides_with(p, tol))
    }

    /// The sampled space viewed as a network over its points.
    pub fn as_network(&self) -> Result<Network> {
        Network::new(self.labels.clone(), self.dissim.clone())
    }

    pub fn to_json_string(&self) -> String {
        let raw = RawSampledSpace {
            labels: self.labels.clone(),
            dissim: self.dissim.clone(),
            points: self.points.iter().map(|p| p.weights().to_vec()).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("sampled space serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<SampledSpace> {
        let raw: RawSampledSpace = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let points: Vec<BarycentricPoint> = raw
            .points
            .into_iter()
            .map(BarycentricPoint::new)
            .collect::<Result<_>>()?;
        // The leading standard vertices determine the base network.
        let mut base_len = 0;
        for (idx, p) in points.iter().enumerate() {
            if p.as_vertex(TOL) == Some(idx) {
                base_len = idx + 1;
            } else {
                break;
            }
        }
        if base_len == 0 {
            return Err(Error::DegenerateInput {
                detail: "sampled space must start with the original vertices".into(),
            });
        }
        let base = Network::new(
            raw.labels[..base_len].to_vec(),
            raw.dissim[..base_len]
                .iter()
                .map(|row| row[..base_len].to_vec())
                .collect(),
        )?;
        Ok(SampledSpace {
            base,
            labels: raw.labels,
            points,
            dissim: raw.dissim,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct RawSampledSpace {
    labels: Vec<String>,
    dissim: Vec<Vec<f64>>,
    points: Vec<Vec<f64>>,
}

/// Augments a network with arbitrary extra interior points and computes all
/// induced dissimilarities.
pub fn augment_with(net: &Network, extra: &[BarycentricPoint]) -> Result<SampledSpace> {
    let n = net.len();
    let mut points: Vec<BarycentricPoint> = (0..n).map(|i| BarycentricPoint::vertex(n, i)).collect();
    let mut labels: Vec<String> = net.labels().to_vec();
    for (k, p) in extra.iter().enumerate() {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        if points.iter().any(|q| q.coincides_with(p, TOL)) {
            return Err(Error::DuplicatePoint { index: k });
        }
        labels.push(point_label(net, p));
        points.push(p.clone());
    }

    let total = points.len();
    // Entries are independent; compute the upper triangle in parallel.
    let pairs: Vec<(usize, usize)> = (0..total)
        .flat_map(|u| ((u + 1)..total).map(move |v| (u, v)))
        .collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(u, v)| {
            interior_distance(net, &points[u], &points[v]).expect("points validated above")
        })
        .collect();
    let mut dissim = vec![vec![0.0; total]; total];
    for (&(u, v), &val) in pairs.iter().zip(&values) {
        dissim[u][v] = val;
        dissim[v][u] = val;
    }

    Ok(SampledSpace {
        base: net.clone(),
        labels,
        points,
        dissim,
    })
}

fn point_label(net: &Network, p: &BarycentricPoint) -> String {
    let support: Vec<usize> = p
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > TOL)
        .map(|(i, _)| i)
        .collect();
    if support.len() == 2
        && (p.weights()[support[0]] - 0.5).abs() <= TOL
        && (p.weights()[support[1]] - 0.5).abs() <= TOL
    {
        format!("mid({},{})", net.label(support[0]), net.label(support[1]))
    } else {
        let parts: Vec<String> = support
            .iter()
            .map(|&i| format!("{}:{:.6}", net.label(i), p.weights()[i]))
            .collect();
        format!("pt({})", parts.join(","))
    }
}

/// Adds the midpoint of every node pair; the standard sampling rule that
/// makes any two augmented networks a regular sample pair.
pub fn midpoint_augment(net: &Network) -> Result<SampledSpace> {
    let n = net.len();
    if n < 2 {
        return Err(Error::InvalidN { min: 2, got: n });
    }
    let extra: Vec<BarycentricPoint> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| BarycentricPoint::midpoint(n, i, j))
        .collect();
    augment_with(net, &extra)
}

/// Image of a barycentric point under a node map: mass sums over preimages.
pub fn push_forward(map: &NodeMapping, target_len: usize, x: &BarycentricPoint) -> Result<BarycentricPoint> {
    map.check(x.len(), target_len)?;
    let mut weights = vec![0.0; target_len];
    for (j, &w) in x.weights().iter().enumerate() {
        weights[map.apply(j)] += w;
    }
    BarycentricPoint::new(weights)
}

/// Maximum original-node count for the regular-sample-pair enumeration.
pub const REGULAR_PAIR_MAX_NODES: usize = 5;

/// Checks closure of both sample sets under every push-forward induced by a
/// node map, in both directions.
pub fn is_regular_sample_pair(qx: &SampledSpace, qy: &SampledSpace, tol: f64) -> Result<bool> {
    let nx = qx.base_len();
    let ny = qy.base_len();
    if nx > REGULAR_PAIR_MAX_NODES || ny > REGULAR_PAIR_MAX_NODES {
        return Err(Error::TooLarge {
            detail: format!(
                "regular-pair check enumerates {ny}^{nx} + {nx}^{ny} maps; limit is {REGULAR_PAIR_MAX_NODES} nodes per side"
            ),
        });
    }
    Ok(closed_under_push_forwards(qx, qy, tol) && closed_under_push_forwards(qy, qx, tol))
}

fn closed_under_push_forwards(from: &SampledSpace, to: &SampledSpace, tol: f64) -> bool {
    let nx = from.base_len();
    let ny = to.base_len();
    let mut assignment = vec![0usize; nx];
    loop {
        let map = NodeMapping {
            assignment: assignment.clone(),
        };
        for p in from.points() {
            let image = push_forward(&map, ny, p).expect("sampled points are valid");
            if to.find_point(&image, tol).is_none() {
                return false;
            }
        }
        // Next map in lexicographic order.
        let mut k = 0;
        loop {
            if k == nx {
                return true;
            }
            assignment[k] += 1;
            if assignment[k] < ny {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}
