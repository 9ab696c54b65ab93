//! Exhaustive evaluation of the embedding-based distances on small
//! instances. Everything here is exact: correspondences are enumerated as
//! bitmasks, node maps as odometer sequences, with streaming min-reduction
//! and deterministic lexicographic tie-breaks.

use crate::error::{Error, Result};
use crate::interior::SampledSpace;
use crate::network::{Correspondence, Network, NodeMapping};

/// Guard for the 2^(|X||Y|) correspondence enumeration.
pub const CORRESPONDENCE_MAX_CELLS: usize = 20;

/// Guard for map enumerations.
pub const MAX_MAP_COUNT: f64 = 1e7;

/// Worst-case dissimilarity mismatch over all pairs of correspondent pairs.
pub fn gamma_diff(a: &Network, b: &Network, c: &Correspondence) -> Result<f64> {
    c.check(a.len(), b.len())?;
    let pairs: Vec<(usize, usize)> = c.pairs.iter().copied().collect();
    let mut worst = 0.0f64;
    for &(x, y) in &pairs {
        for &(x2, y2) in &pairs {
            worst = worst.max((a.weight(x, x2) - b.weight(y, y2)).abs());
        }
    }
    Ok(worst)
}

/// Worst-case dissimilarity mismatch of a total map.
pub fn delta_map(a: &Network, b: &Network, map: &NodeMapping) -> Result<f64> {
    map.check(a.len(), b.len())?;
    Ok(delta_of_assignment(a.matrix(), b.matrix(), &map.assignment))
}

pub(crate) fn delta_of_assignment(a: &[Vec<f64>], b: &[Vec<f64>], assignment: &[usize]) -> f64 {
    let n = assignment.len();
    let mut worst = 0.0f64;
    for x in 0..n {
        for x2 in x..n {
            worst = worst.max((a[x][x2] - b[assignment[x]][assignment[x2]]).abs());
        }
    }
    worst
}

/// How far a pair of maps is from being mutually inverse:
/// max over (x, y) of |r_X(x, psi(y)) - r_Y(phi(x), y)|.
pub fn delta_cross(
    a: &Network,
    b: &Network,
    phi: &NodeMapping,
    psi: &NodeMapping,
) -> Result<f64> {
    phi.check(a.len(), b.len())?;
    psi.check(b.len(), a.len())?;
    let mut worst = 0.0f64;
    for x in 0..a.len() {
        for y in 0..b.len() {
            worst = worst.max((a.weight(x, psi.apply(y)) - b.weight(phi.apply(x), y)).abs());
        }
    }
    Ok(worst)
}

/// Global minimum of `gamma_diff` over all correspondences, with the argmin
/// witness (lowest bitmask on ties).
pub fn correspondence_distance(a: &Network, b: &Network) -> Result<(f64, Correspondence)> {
    let nx = a.len();
    let ny = b.len();
    let cells = nx * ny;
    if cells > CORRESPONDENCE_MAX_CELLS {
        return Err(Error::TooLarge {
            detail: format!(
                "correspondence enumeration needs 2^{cells} subsets; limit is {CORRESPONDENCE_MAX_CELLS} cells"
            ),
        });
    }
    let mut best = f64::INFINITY;
    let mut witness = 0u32;
    'mask: for mask in 1u32..(1u32 << cells) {
        // Coverage filters before any distance work.
        for x in 0..nx {
            let row = ((mask >> (x * ny)) & ((1 << ny) - 1)) != 0;
            if !row {
                continue 'mask;
            }
        }
        for y in 0..ny {
            let mut covered = false;
            for x in 0..nx {
                if mask & (1 << (x * ny + y)) != 0 {
                    covered = true;
                    break;
                }
            }
            if !covered {
                continue 'mask;
            }
        }
        let mut worst = 0.0f64;
        for x in 0..nx {
            for y in 0..ny {
                if mask & (1 << (x * ny + y)) == 0 {
                    continue;
                }
                for x2 in 0..nx {
                    for y2 in 0..ny {
                        if mask & (1 << (x2 * ny + y2)) == 0 {
                            continue;
                        }
                        worst = worst.max((a.weight(x, x2) - b.weight(y, y2)).abs());
                        if worst >= best {
                            continue 'mask;
                        }
                    }
                }
            }
        }
        if worst < best {
            best = worst;
            witness = mask;
        }
    }
    let pairs = (0..cells)
        .filter(|&k| witness & (1 << k) != 0)
        .map(|k| (k / ny, k % ny));
    Ok((best, Correspondence::new(pairs)))
}

/// Advances an odometer over base `base`; returns false after the last
/// configuration.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// The correspondence distance computed through its two-map reformulation:
/// min over (phi, psi) of max{Delta(phi), Delta(psi), cross(phi, psi)}.
/// Must agree with `correspondence_distance`; kept as an independent route.
pub fn correspondence_distance_via_maps(a: &Network, b: &Network) -> Result<f64> {
    let nx = a.len() as f64;
    let ny = b.len() as f64;
    let count = ny.powf(nx) * nx.powf(ny);
    if count > MAX_MAP_COUNT {
        return Err(Error::TooLarge {
            detail: format!("map-pair enumeration needs {count:.0} candidates; limit is {MAX_MAP_COUNT:.0}"),
        });
    }
    let mut best = f64::INFINITY;
    let mut phi = vec![0usize; a.len()];
    loop {
        let phi_map = NodeMapping {
            assignment: phi.clone(),
        };
        let d_phi = delta_map(a, b, &phi_map)?;
        if d_phi < best {
            let mut psi = vec![0usize; b.len()];
            loop {
                let psi_map = NodeMapping {
                    assignment: psi.clone(),
                };
                let d_psi = delta_map(b, a, &psi_map)?;
                if d_psi < best {
                    let cross = delta_cross(a, b, &phi_map, &psi_map)?;
                    let value = d_phi.max(d_psi).max(cross);
                    if value < best {
                        best = value;
                    }
                }
                if !advance(&mut psi, a.len()) {
                    break;
                }
            }
        }
        if !advance(&mut phi, b.len()) {
            break;
        }
    }
    Ok(best)
}

/// Global minimum of `delta_map` over all total maps, with the
/// lexicographically smallest argmin assignment.
pub fn partial_embedding_distance(a: &Network, b: &Network) -> Result<(f64, NodeMapping)> {
    let count = (b.len() as f64).powf(a.len() as f64);
    if count > MAX_MAP_COUNT {
        return Err(Error::TooLarge {
            detail: format!("map enumeration needs {count:.0} candidates; limit is {MAX_MAP_COUNT:.0}"),
        });
    }
    let mut best = f64::INFINITY;
    let mut witness = vec![0usize; a.len()];
    let mut assignment = vec![0usize; a.len()];
    loop {
        let value = delta_of_assignment(a.matrix(), b.matrix(), &assignment);
        if value < best {
            best = value;
            witness.copy_from_slice(&assignment);
        }
        if !advance_lex(&mut assignment, b.len()) {
            break;
        }
    }
    Ok((best, NodeMapping { assignment: witness }))
}

/// Odometer with the leftmost digit most significant, so configurations are
/// visited in lexicographic order of the assignment array.
fn advance_lex(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Symmetrized partial embedding distance.
pub fn embedding_distance(a: &Network, b: &Network) -> Result<f64> {
    let (forward, _) = partial_embedding_distance(a, b)?;
    let (backward, _) = partial_embedding_distance(b, a)?;
    Ok(forward.max(backward))
}

/// Minimum mismatch over maps between two sampled spaces, restricted so
/// original vertices land on original vertices. Witness maps sample-point
/// indices of the source space to sample-point indices of the target space.
pub fn sampled_partial_embedding_distance(
    qa: &SampledSpace,
    qb: &SampledSpace,
) -> Result<(f64, NodeMapping)> {
    let nx = qa.base_len();
    let ny = qb.base_len();
    let extra = qa.len() - nx;
    let count = (ny as f64).powf(nx as f64) * (qb.len() as f64).powf(extra as f64);
    if count > MAX_MAP_COUNT {
        return Err(Error::TooLarge {
            detail: format!(
                "restricted map enumeration needs {count:.0} candidates; limit is {MAX_MAP_COUNT:.0}"
            ),
        });
    }
    let da = qa.dissim();
    let db = qb.dissim();
    let mut best = f64::INFINITY;
    let mut witness = vec![0usize; qa.len()];
    let mut assignment = vec![0usize; qa.len()];
    loop {
        let value = delta_of_assignment(da, db, &assignment);
        if value < best {
            best = value;
            witness.copy_from_slice(&assignment);
        }
        if !advance_restricted(&mut assignment, nx, ny, qb.len()) {
            break;
        }
    }
    Ok((best, NodeMapping { assignment: witness }))
}

/// Lexicographic odometer where the first `nx` digits count in base
/// `ny_base` and the rest in base `full_base`.
fn advance_restricted(digits: &mut [usize], nx: usize, ny_base: usize, full_base: usize) -> bool {
    let len = digits.len();
    for pos in (0..len).rev() {
        let base = if pos < nx { ny_base } else { full_base };
        digits[pos] += 1;
        if digits[pos] < base {
            return true;
        }
        digits[pos] = 0;
    }
    false
}
