//! Weighted network data model: node labels plus a symmetric dissimilarity
//! matrix with zero diagonal and strictly positive off-diagonal entries.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::TOL;

/// A finite node set with pairwise dissimilarities.
///
/// Immutable after construction; all invariants are checked by [`Network::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork", into = "RawNetwork")]
pub struct Network {
    labels: Vec<String>,
    dissim: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    labels: Vec<String>,
    dissim: Vec<Vec<f64>>,
}

impl TryFrom<RawNetwork> for Network {
    type Error = Error;
    fn try_from(raw: RawNetwork) -> Result<Self> {
        Network::new(raw.labels, raw.dissim)
    }
}

impl From<Network> for RawNetwork {
    fn from(net: Network) -> Self {
        RawNetwork {
            labels: net.labels,
            dissim: net.dissim,
        }
    }
}

impl Network {
    /// Validates a raw matrix and label list into a `Network`.
    ///
    /// Rejects non-square matrices, asymmetric entries, nonzero diagonals,
    /// nonpositive off-diagonal values and duplicate labels.
    pub fn new(labels: Vec<String>, dissim: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 || dissim.len() != n || dissim.iter().any(|row| row.len() != n) {
            return Err(Error::ShapeMismatch {
                rows: dissim.len(),
                cols: dissim.first().map_or(0, |r| r.len()),
                labels: n,
            });
        }
        let mut seen = BTreeSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        for i in 0..n {
            if dissim[i][i] != 0.0 {
                return Err(Error::NonzeroDiagonal {
                    i,
                    value: dissim[i][i],
                });
            }
            for j in (i + 1)..n {
                if dissim[i][j] != dissim[j][i] {
                    return Err(Error::AsymmetricMatrix {
                        i,
                        j,
                        a: dissim[i][j],
                        b: dissim[j][i],
                    });
                }
                if !(dissim[i][j] > 0.0) || !dissim[i][j].is_finite() {
                    return Err(Error::NonpositiveOffDiagonal {
                        i,
                        j,
                        value: dissim[i][j],
                    });
                }
            }
        }
        Ok(Network { labels, dissim })
    }

    /// Convenience constructor that numbers nodes "0", "1", ...
    pub fn from_matrix(dissim: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..dissim.len()).map(|i| i.to_string()).collect();
        Network::new(labels, dissim)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // n >= 1 by construction
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.dissim[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.dissim
    }

    /// The sub-network induced by `nodes` (indices into this network).
    pub fn induced_subnetwork(&self, nodes: &[usize]) -> Result<Network> {
        let labels = nodes.iter().map(|&i| self.labels[i].clone()).collect();
        let dissim = nodes
            .iter()
            .map(|&i| nodes.iter().map(|&j| self.dissim[i][j]).collect())
            .collect();
        Network::new(labels, dissim)
    }

    /// Returns a copy with nodes reordered by `perm`, where node `i` of the
    /// result is node `perm[i]` of the original.
    pub fn permuted(&self, perm: &[usize]) -> Result<Network> {
        if perm.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: perm.len(),
            });
        }
        self.induced_subnetwork(perm)
    }

    /// JSON form: `{"labels": [...], "dissim": [[...], ...]}`.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Network> {
        serde_json::from_str(text).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => {
                // Validation failure surfaced through serde; re-run validation
                // on the raw value to recover the precise error.
                match serde_json::from_str::<RawNetwork>(text) {
                    Ok(raw) => Network::new(raw.labels, raw.dissim)
                        .err()
                        .unwrap_or(Error::Parse {
                            line: e.line(),
                            column: e.column(),
                            message: e.to_string(),
                        }),
                    Err(_) => Error::Parse {
                        line: e.line(),
                        column: e.column(),
                        message: e.to_string(),
                    },
                }
            }
            _ => Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
        })
    }

    /// CSV form: first row is the label list, each following row is one
    /// matrix row.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.labels.join(","));
        out.push('\n');
        for row in &self.dissim {
            let cells: Vec<String> = row.iter().map(|v| format_weight(*v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Network> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            column: 1,
            message: "empty file".into(),
        })?;
        let labels: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut dissim = Vec::with_capacity(labels.len());
        for (lineno, line) in lines {
            let mut row = Vec::with_capacity(labels.len());
            for (col, cell) in line.split(',').enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    column: col + 1,
                    message: format!("invalid number {:?}", cell.trim()),
                })?;
                row.push(v);
            }
            dissim.push(row);
        }
        Network::new(labels, dissim)
    }

    /// Loads a network from a `.json` or `.csv` file (decided by extension;
    /// anything that is not `.csv` is treated as JSON).
    pub fn load(path: impl AsRef<Path>) -> Result<Network> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "csv") {
            Network::from_csv_str(&text)
        } else {
            Network::from_json_str(&text)
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = if path.extension().is_some_and(|e| e == "csv") {
            self.to_csv_string()
        } else {
            self.to_json_string()
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Shortest decimal that round-trips through f64.
pub(crate) fn format_weight(v: f64) -> String {
    let mut s = format!("{v}");
    if s.parse::<f64>() != Ok(v) {
        s = format!("{v:.17}");
    }
    s
}

/// A total map between node sets, stored as the target index of each source
/// node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeMapping {
    pub assignment: Vec<usize>,
}

impl NodeMapping {
    pub fn identity(n: usize) -> Self {
        NodeMapping {
            assignment: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Checks that the mapping is total over `source_len` nodes and lands in
    /// `target_len` nodes.
    pub fn check(&self, source_len: usize, target_len: usize) -> Result<()> {
        if self.assignment.len() != source_len {
            return Err(Error::DimensionMismatch {
                expected: source_len,
                got: self.assignment.len(),
            });
        }
        if let Some(&bad) = self.assignment.iter().find(|&&t| t >= target_len) {
            return Err(Error::DimensionMismatch {
                expected: target_len,
                got: bad,
            });
        }
        Ok(())
    }
}

/// A covering pair set between two node sets: every index on each side
/// appears in at least one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correspondence {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Correspondence {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Correspondence::new((0..n).map(|i| (i, i)))
    }

    /// Verifies coverage of both sides.
    pub fn check(&self, source_len: usize, target_len: usize) -> Result<()> {
        for i in 0..source_len {
            if !self.pairs.iter().any(|&(x, _)| x == i) {
                return Err(Error::InvalidCorrespondence {
                    side: "source",
                    index: i,
                });
            }
        }
        for j in 0..target_len {
            if !self.pairs.iter().any(|&(_, y)| y == j) {
                return Err(Error::InvalidCorrespondence {
                    side: "target",
                    index: j,
                });
            }
        }
        if let Some(&(x, y)) = self
            .pairs
            .iter()
            .find(|&&(x, y)| x >= source_len || y >= target_len)
        {
            return Err(Error::InvalidCorrespondence {
                side: if x >= source_len { "source" } else { "target" },
                index: if x >= source_len { x } else { y },
            });
        }
        Ok(())
    }
}

/// Maximum size for the factorial isomorphism check.
pub const ISOMORPHISM_MAX_NODES: usize = 8;

/// Tests whether some node permutation makes the two matrices equal
/// entrywise within `tol`. Exhaustive over all n! permutations; guarded at
/// n = 8.
pub fn are_isomorphic(a: &Network, b: &Network, tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let n = a.len();
    if n > ISOMORPHISM_MAX_NODES {
        return Err(Error::TooLarge {
            detail: format!("isomorphism check enumerates {n}! permutations; limit is {ISOMORPHISM_MAX_NODES} nodes"),
        });
    }
    let mut perm: Vec<usize> = (0..n).collect();
    Ok(permutations_any(&mut perm, 0, &mut |p| {
        (0..n).all(|i| ((i + 1)..n).all(|j| (a.weight(i, j) - b.weight(p[i], p[j])).abs() <= tol))
    }))
}

fn permutations_any(perm: &mut [usize], k: usize, pred: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == perm.len() {
        return pred(perm);
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        if permutations_any(perm, k + 1, pred) {
            perm.swap(k, i);
            return true;
        }
        perm.swap(k, i);
    }
    false
}

/// Entrywise equality of two networks within the global tolerance.
pub fn approx_equal(a: &Network, b: &Network) -> bool {
    a.len() == b.len()
        && a.labels() == b.labels()
        && (0..a.len())
            .all(|i| (0..a.len()).all(|j| (a.weight(i, j) - b.weight(i, j)).abs() <= TOL))
}
