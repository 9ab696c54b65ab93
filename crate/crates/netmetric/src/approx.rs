//! Scalable approximation of the embedding distances: embed each network
//! (optionally interior-augmented) into Euclidean space, then minimize the
//! bottleneck mismatch over maps by multistart local search.
//!
//! The distance path embeds with classical scaling only. The clamping of
//! negative eigenvalues is what makes triangle-violating networks collapse
//! onto identical configurations — the failure mode interiors are meant to
//! fix — and stress refinement would re-inflate those directions and mask
//! it. Refinement is reserved for the 2D plotting path ([`embed2d`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::delta_of_assignment;
use crate::interior::{midpoint_augment, push_forward, SampledSpace};
use crate::mds::{classical_mds, distance_matrix, smacof_refine, EmbeddingResult};
use crate::network::{Network, NodeMapping};
use crate::rng::{derive_seed, SplitMix64};
use crate::TOL;

const SMACOF_ITERS: usize = 300;
const SMACOF_TOL: f64 = 1e-8;

// Context tags for derived seed streams.
const TAG_RESTART: u64 = 0x5245;
const TAG_PAIR: u64 = 0x5052;

/// Configuration of the approximation pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxConfig {
    /// Augment each network with edge midpoints before embedding.
    pub use_interior: bool,
    /// Embedding dimension used for the distance search.
    pub mds_dim: usize,
    /// Number of random local-search starts, in addition to the seeded
    /// starts.
    pub restarts: usize,
    /// Cap on accepted local-search moves per start; `None` means
    /// 10 times the point count.
    pub max_iters: Option<usize>,
    pub seed: u64,
}

impl ApproxConfig {
    pub fn new(seed: u64) -> Self {
        ApproxConfig {
            use_interior: true,
            mds_dim: 2,
            restarts: 16,
            max_iters: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 || self.mds_dim < 1 || self.max_iters == Some(0) {
            return Err(Error::InvalidParameter {
                detail: "restarts, mds_dim and max_iters must all be at least 1".into(),
            });
        }
        Ok(())
    }

    fn move_cap(&self, points: usize) -> usize {
        self.max_iters.unwrap_or(10 * points.max(1))
    }
}

/// Heuristic minimization of the bottleneck mismatch over maps from the
/// points of `dissim_x` to the points of `dissim_y`. The first
/// `restricted_sources` source points may only map to the first
/// `restricted_targets` target points. Runs `cfg.restarts` random starts, a
/// greedy profile-matching start, and any caller-provided `seeded_starts`;
/// returns the best value found with its map. The result is always an upper
/// bound on the exact minimum.
pub fn local_search_partial_embedding(
    dissim_x: &[Vec<f64>],
    dissim_y: &[Vec<f64>],
    restricted_sources: usize,
    restricted_targets: usize,
    cfg: &ApproxConfig,
    seeded_starts: &[Vec<usize>],
) -> Result<(f64, NodeMapping)> {
    cfg.validate()?;
    let nx = dissim_x.len();
    let ny = dissim_y.len();
    if restricted_sources > nx || restricted_targets > ny || (restricted_sources > 0 && restricted_targets == 0) {
        return Err(Error::InvalidParameter {
            detail: format!(
                "restriction ({restricted_sources} sources into {restricted_targets} targets) exceeds the instance"
            ),
        });
    }
    if nx == 0 || ny == 0 {
        return Err(Error::DegenerateInput {
            detail: "empty dissimilarity matrix".into(),
        });
    }
    if nx == 1 {
        // Only one candidate pair value; any feasible target is optimal.
        return Ok((0.0, NodeMapping { assignment: vec![0] }));
    }

    let limit = |i: usize| if i < restricted_sources { restricted_targets } else { ny };
    let cap = cfg.move_cap(nx);

    let mut starts: Vec<Vec<usize>> = Vec::new();
    starts.push(greedy_profile_start(dissim_x, dissim_y, &limit));
    for s in seeded_starts {
        if s.len() == nx && s.iter().enumerate().all(|(i, &t)| t < limit(i)) {
            starts.push(s.clone());
        }
    }
    for r in 0..cfg.restarts {
        let mut rng = SplitMix64::new(derive_seed(cfg.seed, &[TAG_RESTART, r as u64]));
        starts.push((0..nx).map(|i| rng.below(limit(i))).collect());
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in starts {
        let (value, map) = descend(dissim_x, dissim_y, &limit, start, cap);
        match &best {
            Some((bv, _)) if *bv <= value => {}
            _ => best = Some((value, map)),
        }
    }
    let (value, assignment) = best.expect("at least one start");
    Ok((value, NodeMapping { assignment }))
}

/// Matches row-mean profiles; cheap deterministic start.
fn greedy_profile_start(
    dissim_x: &[Vec<f64>],
    dissim_y: &[Vec<f64>],
    limit: &dyn Fn(usize) -> usize,
) -> Vec<usize> {
    let mean = |row: &[f64]| row.iter().sum::<f64>() / row.len().max(1) as f64;
    let my: Vec<f64> = dissim_y.iter().map(|r| mean(r)).collect();
    dissim_x
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mx = mean(row);
            (0..limit(i))
                .min_by(|&a, &b| {
                    (my[a] - mx)
                        .abs()
                        .partial_cmp(&(my[b] - mx).abs())
                        .unwrap()
                })
                .unwrap_or(0)
        })
        .collect()
}

/// Row maximum of the mismatch matrix together with the two largest
/// entries, so the maximum excluding one column is O(1).
#[derive(Clone, Copy)]
struct RowMax {
    max1: f64,
    arg1: usize,
    max2: f64,
}

fn row_max(row: &[f64], skip: usize) -> RowMax {
    let mut m = RowMax {
        max1: -1.0,
        arg1: usize::MAX,
        max2: -1.0,
    };
    for (v, &x) in row.iter().enumerate() {
        if v == skip {
            continue;
        }
        if x > m.max1 {
            m.max2 = m.max1;
            m.max1 = x;
            m.arg1 = v;
        } else if x > m.max2 {
            m.max2 = x;
        }
    }
    m
}

impl RowMax {
    fn excluding(&self, col: usize) -> f64 {
        if self.arg1 == col {
            self.max2
        } else {
            self.max1
        }
    }
}

/// First-improvement single-point reassignment descent on the bottleneck
/// objective, evaluated incrementally: the pairwise mismatch matrix and its
/// row maxima are maintained across moves, and a point is only worth moving
/// when some pair involving it attains the current bottleneck.
fn descend(
    dx: &[Vec<f64>],
    dy: &[Vec<f64>],
    limit: &dyn Fn(usize) -> usize,
    mut assignment: Vec<usize>,
    move_cap: usize,
) -> (f64, Vec<usize>) {
    let nx = dx.len();
    let mut mismatch = vec![vec![0.0f64; nx]; nx];
    for u in 0..nx {
        for v in (u + 1)..nx {
            let m = (dx[u][v] - dy[assignment[u]][assignment[v]]).abs();
            mismatch[u][v] = m;
            mismatch[v][u] = m;
        }
    }
    let mut rowmax: Vec<RowMax> = (0..nx).map(|u| row_max(&mismatch[u], u)).collect();

    let mut moves = 0usize;
    'outer: loop {
        let mut improved = false;
        for i in 0..nx {
            // Bottleneck over pairs not involving i stays fixed while we
            // move i; no move can beat it.
            let mut ex_max = 0.0f64;
            for u in 0..nx {
                if u != i {
                    ex_max = ex_max.max(rowmax[u].excluding(i));
                }
            }
            let cur_i = rowmax[i].max1;
            if cur_i - ex_max <= 1e-15 {
                continue;
            }
            let bar = cur_i - 1e-15;
            for t in 0..limit(i) {
                if t == assignment[i] {
                    continue;
                }
                let mut cand = 0.0f64;
                for u in 0..nx {
                    if u == i {
                        continue;
                    }
                    cand = cand.max((dx[i][u] - dy[t][assignment[u]]).abs());
                    if cand >= bar {
                        break;
                    }
                }
                if cand < bar {
                    assignment[i] = t;
                    for u in 0..nx {
                        if u == i {
                            continue;
                        }
                        let m = (dx[i][u] - dy[t][assignment[u]]).abs();
                        mismatch[i][u] = m;
                        mismatch[u][i] = m;
                        rowmax[u] = row_max(&mismatch[u], u);
                    }
                    rowmax[i] = row_max(&mismatch[i], i);
                    improved = true;
                    moves += 1;
                    if moves >= move_cap {
                        break 'outer;
                    }
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let value = delta_of_assignment(dx, dy, &assignment);
    (value, assignment)
}

/// Approximate partial embedding distance from `a` to `b`.
///
/// Pipeline: optional midpoint augmentation, per-side classical-scaling
/// embedding at `cfg.mds_dim`, then restricted local search on the embedded
/// distance matrices. Deterministic for a fixed config.
pub fn approx_partial_embedding(a: &Network, b: &Network, cfg: &ApproxConfig) -> Result<f64> {
    cfg.validate()?;
    let (dx, dy, restricted_sources, restricted_targets, seeds) = if cfg.use_interior {
        let qa = midpoint_augment(a)?;
        let qb = midpoint_augment(b)?;
        let seeds = push_forward_starts(a, b, &qa, &qb, cfg)?;
        let dx = embedded_distances(qa.dissim(), cfg.mds_dim)?;
        let dy = embedded_distances(qb.dissim(), cfg.mds_dim)?;
        (dx, dy, a.len(), b.len(), seeds)
    } else {
        let dx = embedded_distances(a.matrix(), cfg.mds_dim)?;
        let dy = embedded_distances(b.matrix(), cfg.mds_dim)?;
        let mut seeds = vec![node_level_map(a, b, cfg)?.assignment];
        if a.len() <= b.len() {
            seeds.push((0..a.len()).collect());
        }
        (dx, dy, a.len(), b.len(), seeds)
    };
    let (value, _) = local_search_partial_embedding(
        &dx,
        &dy,
        restricted_sources,
        restricted_targets,
        cfg,
        &seeds,
    )?;
    Ok(value)
}

fn embedded_distances(dissim: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>> {
    Ok(distance_matrix(&classical_mds(dissim, k)?.coords))
}

/// A quick node-level map found by local search on the raw matrices.
fn node_level_map(a: &Network, b: &Network, cfg: &ApproxConfig) -> Result<NodeMapping> {
    let mut node_cfg = cfg.clone();
    node_cfg.restarts = cfg.restarts.min(8);
    let identity: Vec<Vec<usize>> = if a.len() <= b.len() {
        vec![(0..a.len()).collect()]
    } else {
        Vec::new()
    };
    let (_, map) = local_search_partial_embedding(
        a.matrix(),
        b.matrix(),
        a.len(),
        b.len(),
        &node_cfg,
        &identity,
    )?;
    Ok(map)
}

/// Extends a node-level map to the sampled spaces via push-forward; every
/// midpoint lands on a sample point of the other side.
fn push_forward_starts(
    a: &Network,
    b: &Network,
    qa: &SampledSpace,
    qb: &SampledSpace,
    cfg: &ApproxConfig,
) -> Result<Vec<Vec<usize>>> {
    let mut node_maps = vec![node_level_map(a, b, cfg)?];
    if a.len() <= b.len() {
        node_maps.push(NodeMapping::identity(a.len()));
    }
    let mut starts = Vec::new();
    for node_map in node_maps {
        let mut full = Vec::with_capacity(qa.len());
        let mut ok = true;
        for p in qa.points() {
            let image = push_forward(&node_map, b.len(), p)?;
            match qb.find_point(&image, TOL) {
                Some(idx) => full.push(idx),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            starts.push(full);
        }
    }
    Ok(starts)
}

/// Symmetrized approximation: max of both directions.
pub fn approx_embedding_distance(a: &Network, b: &Network, cfg: &ApproxConfig) -> Result<f64> {
    let forward = approx_partial_embedding(a, b, cfg)?;
    let backward = approx_partial_embedding(b, a, cfg)?;
    Ok(forward.max(backward))
}

/// Symmetric matrix of approximate embedding distances over a network set.
/// Each pair runs with a seed derived from (cfg.seed, i, j), so the result
/// is independent of the parallel schedule.
pub fn pairwise_matrix(networks: &[Network], cfg: &ApproxConfig) -> Result<Vec<Vec<f64>>> {
    if networks.len() < 2 {
        return Err(Error::InsufficientData {
            detail: format!("pairwise matrix needs at least 2 networks, got {}", networks.len()),
        });
    }
    cfg.validate()?;
    let n = networks.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let values: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut pair_cfg = cfg.clone();
            pair_cfg.seed = derive_seed(cfg.seed, &[TAG_PAIR, i as u64, j as u64]);
            approx_embedding_distance(&networks[i], &networks[j], &pair_cfg)
        })
        .collect();
    let mut matrix = vec![vec![0.0; n]; n];
    for (&(i, j), value) in pairs.iter().zip(values) {
        let v = value?;
        matrix[i][j] = v;
        matrix[j][i] = v;
    }
    Ok(matrix)
}

/// Two-dimensional embedding of a distance matrix, for plotting: classical
/// scaling refined by SMACOF stress majorization.
pub fn embed2d(matrix: &[Vec<f64>]) -> Result<EmbeddingResult> {
    let init = classical_mds(matrix, 2)?;
    smacof_refine(&init, matrix, SMACOF_ITERS, SMACOF_TOL)
}

/// Leave-one-out nearest-centroid error rate over labeled coordinates.
pub fn nearest_centroid_eval(coords: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
    if coords.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: coords.len(),
            got: labels.len(),
        });
    }
    let classes: Vec<usize> = {
        let mut c: Vec<usize> = labels.to_vec();
        c.sort_unstable();
        c.dedup();
        c
    };
    if classes.len() < 2 {
        return Err(Error::InsufficientData {
            detail: "need at least 2 classes".into(),
        });
    }
    for &class in &classes {
        if labels.iter().filter(|&&l| l == class).count() < 2 {
            return Err(Error::InsufficientData {
                detail: format!("class {class} has fewer than 2 samples"),
            });
        }
    }
    let k = coords[0].len();
    let mut errors = 0usize;
    for held in 0..coords.len() {
        let mut best_class = classes[0];
        let mut best_dist = f64::INFINITY;
        for &class in &classes {
            let mut centroid = vec![0.0; k];
            let mut count = 0usize;
            for (idx, point) in coords.iter().enumerate() {
                if idx != held && labels[idx] == class {
                    for (c, x) in centroid.iter_mut().zip(point) {
                        *c += x;
                    }
                    count += 1;
                }
            }
            if count == 0 {
                continue;
            }
            for c in centroid.iter_mut() {
                *c /= count as f64;
            }
            let d = crate::mds::euclidean(&coords[held], &centroid);
            if d < best_dist {
                best_dist = d;
                best_class = class;
            }
        }
        if best_class != labels[held] {
            errors += 1;
        }
    }
    Ok(errors as f64 / coords.len() as f64)
}

/// Per-class (intra-class mean, inter-class mean) over a distance matrix.
pub fn per_class_distance_stats(matrix: &[Vec<f64>], labels: &[usize]) -> Vec<(usize, f64, f64)> {
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    classes
        .iter()
        .map(|&class| {
            let mut intra = (0.0, 0usize);
            let mut inter = (0.0, 0usize);
            for i in 0..labels.len() {
                if labels[i] != class {
                    continue;
                }
                for j in 0..labels.len() {
                    if i == j {
                        continue;
                    }
                    if labels[j] == class {
                        if j > i {
                            intra.0 += matrix[i][j];
                            intra.1 += 1;
                        }
                    } else {
                        inter.0 += matrix[i][j];
                        inter.1 += 1;
                    }
                }
            }
            (
                class,
                intra.0 / intra.1.max(1) as f64,
                inter.0 / inter.1.max(1) as f64,
            )
        })
        .collect()
}
