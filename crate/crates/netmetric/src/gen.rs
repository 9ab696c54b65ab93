//! Seeded synthetic network generators: weighted Erdős–Rényi, unit-disk RBF,
//! feature-correlation, and the three-node gamma family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::rng::{derive_seed, SplitMix64};

/// Off-diagonal weights are clamped to at least this value so generated
/// networks always satisfy strict positivity.
pub const MIN_WEIGHT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    ErdosRenyi,
    UnitCircle,
    Correlation,
    GammaFamily,
}

impl Model {
    /// Stable tag used when deriving per-network seed streams.
    pub fn tag(self) -> u64 {
        match self {
            Model::ErdosRenyi => 1,
            Model::UnitCircle => 2,
            Model::Correlation => 3,
            Model::GammaFamily => 4,
        }
    }
}

/// Parameters for one generated network; also the schema of a manifest
/// entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_feat_dim")]
    pub feat_dim: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_sigma() -> f64 {
    0.5
}

fn default_feat_dim() -> usize {
    5
}

fn default_gamma() -> f64 {
    1.0
}

impl GenSpec {
    pub fn generate(&self) -> Result<Network> {
        if self.sigma <= 0.0 {
            return Err(Error::InvalidParameter {
                detail: format!("sigma must be positive, got {}", self.sigma),
            });
        }
        match self.model {
            Model::ErdosRenyi => gen_er(self.n, self.seed),
            Model::UnitCircle => gen_circle(self.n, self.sigma, self.seed),
            Model::Correlation => gen_corr(self.n, self.feat_dim, self.seed),
            Model::GammaFamily => gen_gamma(self.gamma),
        }
    }
}

/// Seed for the `index`-th network of a batch drawn from `model`.
pub fn network_seed(root: u64, model: Model, index: u64) -> u64 {
    derive_seed(root, &[model.tag(), index])
}

fn symmetric_from(n: usize, mut weight: impl FnMut(usize, usize) -> f64) -> Result<Network> {
    let mut dissim = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = weight(i, j).max(MIN_WEIGHT);
            dissim[i][j] = w;
            dissim[j][i] = w;
        }
    }
    Network::from_matrix(dissim)
}

/// Weighted Erdős–Rényi: i.i.d. uniform weights from (0, 1].
pub fn gen_er(n: usize, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(Error::InvalidN { min: 2, got: n });
    }
    let mut rng = SplitMix64::new(derive_seed(seed, &[Model::ErdosRenyi.tag()]));
    symmetric_from(n, |_, _| rng.uniform01_open_low())
}

/// Unit-disk model: vertices uniform over the closed unit disk, weights from
/// the Gaussian radial basis function exp(-d^2 / (2 sigma^2)).
pub fn gen_circle(n: usize, sigma: f64, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(Error::InvalidN { min: 2, got: n });
    }
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter {
            detail: format!("sigma must be positive, got {sigma}"),
        });
    }
    let mut rng = SplitMix64::new(derive_seed(seed, &[Model::UnitCircle.tag()]));
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let r = rng.uniform01().sqrt();
            let theta = std::f64::consts::TAU * rng.uniform01();
            (r * theta.cos(), r * theta.sin())
        })
        .collect();
    symmetric_from(n, |i, j| {
        rbf_weight(points[i], points[j], sigma)
    })
}

pub(crate) fn rbf_weight(a: (f64, f64), b: (f64, f64), sigma: f64) -> f64 {
    let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// Correlation model: each vertex carries an i.i.d. standard-normal feature
/// vector; the weight between two vertices is rho/2 + 0.5 for their Pearson
/// correlation rho, clamped into [1e-9, 1].
pub fn gen_corr(n: usize, feat_dim: usize, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(Error::InvalidN { min: 2, got: n });
    }
    if feat_dim < 2 {
        return Err(Error::InvalidParameter {
            detail: format!("feat_dim must be at least 2 for Pearson correlation, got {feat_dim}"),
        });
    }
    let mut rng = SplitMix64::new(derive_seed(seed, &[Model::Correlation.tag()]));
    let mut features = Vec::with_capacity(n);
    for index in 0..n {
        let mut attempts = 0;
        let feat = loop {
            let v: Vec<f64> = (0..feat_dim).map(|_| rng.normal()).collect();
            if sample_variance(&v) > 1e-12 {
                break v;
            }
            attempts += 1;
            if attempts >= 8 {
                return Err(Error::DegenerateFeature { index, attempts });
            }
        };
        features.push(feat);
    }
    symmetric_from(n, |i, j| {
        let rho = pearson(&features[i], &features[j]);
        (rho / 2.0 + 0.5).min(1.0)
    })
}

fn sample_variance(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / v.len() as f64
}

pub(crate) fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Three-node family: r(a,b) = r(a,c) = gamma, r(b,c) = 11. The triangle
/// inequality fails exactly when gamma < 5.5.
pub fn gen_gamma(gamma: f64) -> Result<Network> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidGamma { got: gamma });
    }
    Network::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![
            vec![0.0, gamma, gamma],
            vec![gamma, 0.0, 11.0],
            vec![gamma, 11.0, 0.0],
        ],
    )
}
