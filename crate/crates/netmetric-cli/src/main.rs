//! `netmetric` — compare weighted networks from the command line.
//!
//! Exit codes: 0 success, 2 input/IO error, 3 exact-computation guard
//! exceeded, 4 infeasible configuration.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use netmetric::approx::{
    approx_embedding_distance, embed2d, nearest_centroid_eval, pairwise_matrix, ApproxConfig,
};
use netmetric::exact;
use netmetric::gen::{network_seed, GenSpec, Model};
use netmetric::interior::midpoint_augment;
use netmetric::rng::{derive_seed, SplitMix64};
use netmetric::{Error, Network};

const EXIT_INPUT: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge { .. } => EXIT_GUARD,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "netmetric", version, about = "Compare weighted networks via embedding distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a network file is well-formed.
    Validate { path: PathBuf },
    /// Distance between two networks.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Approx)]
        method: Method,
        /// Augment with edge midpoints (approx method only).
        #[arg(long)]
        interior: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit a JSON object with the witness instead of a bare value.
        #[arg(long)]
        json: bool,
    },
    /// Distance matrix over the gamma family, written as CSV. A companion
    /// `<out>.exact.csv` holds the exact distances for error analysis.
    Heatmap {
        /// Gamma values: a range like `1..10` or a comma list like `1,3,5`.
        #[arg(long, default_value = "1..10")]
        gammas: String,
        #[arg(long, value_enum, default_value_t = HeatMethod::Approx)]
        method: HeatMethod,
        #[arg(long, value_enum, default_value_t = OnOff::On)]
        interior: OnOff,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate labeled networks, compute all pairwise distances, embed the
    /// set in 2D and score a leave-one-out nearest-centroid classifier.
    Classify {
        /// JSON file holding the same settings as the flags below; flags
        /// are ignored when given.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "er,circle,corr")]
        models: Vec<String>,
        #[arg(long = "per-model", default_value_t = 10)]
        per_model: usize,
        /// Node count: a number like `12` or a range like `10..14`.
        #[arg(long, default_value = "12")]
        nodes: String,
        #[arg(long)]
        interior: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for matrix.csv, embedding.csv, metrics.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a single network and write it as JSON.
    Gen {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long = "feat-dim", default_value_t = 5)]
        feat_dim: usize,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Midpoint-augment a network and write the sampled interior space.
    Augment {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Exact partial embedding distance (directed, A into B).
    ExactPe,
    /// Exact correspondence distance.
    ExactC,
    /// Exact embedding distance (symmetrized).
    ExactEe,
    /// Exact sampled-space distance on midpoint augmentations.
    ExactPeq,
    /// Embedding + local-search approximation of the embedding distance.
    Approx,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeatMethod {
    Approx,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Er,
    Circle,
    Corr,
    Gamma,
}

impl ModelArg {
    fn model(self) -> Model {
        match self {
            ModelArg::Er => Model::ErdosRenyi,
            ModelArg::Circle => Model::UnitCircle,
            ModelArg::Corr => Model::Correlation,
            ModelArg::Gamma => Model::GammaFamily,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// NETMETRIC_THREADS caps the rayon pool; results never depend on it.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("NETMETRIC_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Dist {
            a,
            b,
            method,
            interior,
            seed,
            json,
        } => cmd_dist(&a, &b, method, interior, seed, json),
        Command::Heatmap {
            gammas,
            method: HeatMethod::Approx,
            interior,
            seed,
            out,
        } => cmd_heatmap(&gammas, interior == OnOff::On, seed, &out),
        Command::Classify {
            manifest,
            models,
            per_model,
            nodes,
            interior,
            seed,
            out,
        } => {
            let spec = match manifest {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text)
                        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
                }
                None => ClassifySpec {
                    models,
                    per_model,
                    nodes,
                    interior,
                    seed,
                    out: out.ok_or_else(|| Failure::config("--out directory is required"))?,
                },
            };
            cmd_classify(&spec)
        }
        Command::Gen {
            model,
            n,
            seed,
            sigma,
            feat_dim,
            gamma,
            out,
        } => {
            let spec = GenSpec {
                model: model.model(),
                n,
                sigma,
                feat_dim,
                gamma,
                seed,
            };
            cmd_gen(&spec, &out)
        }
        Command::Augment { path, out } => cmd_augment(&path, &out),
    }
}

fn cmd_validate(path: &Path) -> CmdResult {
    let net = Network::load(path)?;
    println!(
        "valid network: {} nodes, weights in [{:?}, {:?}]",
        net.len(),
        min_weight(&net),
        max_weight(&net)
    );
    Ok(())
}

fn min_weight(net: &Network) -> f64 {
    let n = net.len();
    let mut m = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.min(net.weight(i, j));
        }
    }
    m
}

fn max_weight(net: &Network) -> f64 {
    let n = net.len();
    let mut m = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.max(net.weight(i, j));
        }
    }
    m
}

#[derive(Serialize)]
struct DistReport {
    method: &'static str,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_map: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_pairs: Option<Vec<(usize, usize)>>,
}

fn cmd_dist(a: &Path, b: &Path, method: Method, interior: bool, seed: u64, json: bool) -> CmdResult {
    let na = Network::load(a)?;
    let nb = Network::load(b)?;
    let report = match method {
        Method::ExactPe => {
            let (value, map) = exact::partial_embedding_distance(&na, &nb)?;
            DistReport {
                method: "exact-pe",
                value,
                witness_map: Some(map.assignment),
                witness_pairs: None,
            }
        }
        Method::ExactC => {
            let (value, corr) = exact::correspondence_distance(&na, &nb)?;
            DistReport {
                method: "exact-c",
                value,
                witness_map: None,
                witness_pairs: Some(corr.pairs.into_iter().collect()),
            }
        }
        Method::ExactEe => DistReport {
            method: "exact-ee",
            value: exact::embedding_distance(&na, &nb)?,
            witness_map: None,
            witness_pairs: None,
        },
        Method::ExactPeq => {
            let qa = midpoint_augment(&na)?;
            let qb = midpoint_augment(&nb)?;
            let (value, map) = exact::sampled_partial_embedding_distance(&qa, &qb)?;
            DistReport {
                method: "exact-peq",
                value,
                witness_map: Some(map.assignment),
                witness_pairs: None,
            }
        }
        Method::Approx => {
            let mut cfg = ApproxConfig::new(seed);
            cfg.use_interior = interior;
            DistReport {
                method: "approx",
                value: approx_embedding_distance(&na, &nb, &cfg)?,
                witness_map: None,
                witness_pairs: None,
            }
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!("{:?}", report.value);
    }
    Ok(())
}

/// `a..b` (inclusive, integer steps) or a comma list of values.
fn parse_gammas(text: &str) -> Result<Vec<f64>, Failure> {
    let values: Vec<f64> = if let Some((lo, hi)) = text.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| Failure::input(format!("bad range {text:?}")))?;
        let hi: i64 = hi.trim().parse().map_err(|_| Failure::input(format!("bad range {text:?}")))?;
        if hi < lo {
            return Err(Failure::input(format!("empty range {text:?}")));
        }
        (lo..=hi).map(|g| g as f64).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::input(format!("bad gamma list {text:?}")))?
    };
    if values.len() < 2 {
        return Err(Failure::config("need at least 2 gamma values"));
    }
    Ok(values)
}

fn cmd_heatmap(gammas: &str, interior: bool, seed: u64, out: &Path) -> CmdResult {
    let gammas = parse_gammas(gammas)?;
    let nets: Vec<Network> = gammas
        .iter()
        .map(|&g| GenSpec {
            model: Model::GammaFamily,
            n: 3,
            sigma: 0.5,
            feat_dim: 5,
            gamma: g,
            seed: 0,
        }
        .generate())
        .collect::<Result<_, _>>()?;
    let labels: Vec<String> = gammas.iter().map(|g| format!("gamma{g}")).collect();

    let mut cfg = ApproxConfig::new(seed);
    cfg.use_interior = interior;
    let approx = pairwise_matrix(&nets, &cfg)?;
    write_matrix_csv(out, &labels, &approx)?;

    let k = nets.len();
    let mut exact_matrix = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let d = exact::embedding_distance(&nets[i], &nets[j])?;
            exact_matrix[i][j] = d;
            exact_matrix[j][i] = d;
        }
    }
    write_matrix_csv(&companion_exact_path(out), &labels, &exact_matrix)?;
    Ok(())
}

fn companion_exact_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("heatmap");
    out.with_file_name(format!("{stem}.exact.csv"))
}

/// Header row of labels, then the matrix; loadable by `Network::load` when
/// the off-diagonal entries are positive.
fn write_matrix_csv(path: &Path, labels: &[String], matrix: &[Vec<f64>]) -> CmdResult {
    let mut text = labels.join(",");
    text.push('\n');
    for row in matrix {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ClassifySpec {
    models: Vec<String>,
    per_model: usize,
    nodes: String,
    #[serde(default)]
    interior: bool,
    #[serde(default)]
    seed: u64,
    out: PathBuf,
}

#[derive(Serialize)]
struct ClassifyMetrics {
    loo_error: f64,
    intra_mean: f64,
    inter_mean: f64,
}

fn parse_model_name(name: &str) -> Result<Model, Failure> {
    match name {
        "er" => Ok(Model::ErdosRenyi),
        "circle" => Ok(Model::UnitCircle),
        "corr" => Ok(Model::Correlation),
        "gamma" => Ok(Model::GammaFamily),
        other => Err(Failure::config(format!("unknown model {other:?}"))),
    }
}

/// `n` or `nmin..nmax` (inclusive).
fn parse_nodes(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::config(format!("bad node spec {text:?}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if hi < lo {
            return Err(bad());
        }
        Ok((lo, hi))
    } else {
        let n: usize = text.trim().parse().map_err(|_| bad())?;
        Ok((n, n))
    }
}

const TAG_NODE_COUNT: u64 = 0x4e43;

fn cmd_classify(spec: &ClassifySpec) -> CmdResult {
    let models: Vec<Model> = spec
        .models
        .iter()
        .map(|m| parse_model_name(m))
        .collect::<Result<_, _>>()?;
    if models.len() < 2 {
        return Err(Failure::config("need at least 2 models"));
    }
    if spec.per_model < 2 {
        return Err(Failure::config("per-model count must be at least 2"));
    }
    let (nmin, nmax) = parse_nodes(&spec.nodes)?;
    if nmin < 3 {
        return Err(Failure::config("node count must be at least 3"));
    }

    let mut networks = Vec::new();
    let mut class_of = Vec::new();
    let mut row_labels = Vec::new();
    for (class, (model, name)) in models.iter().zip(&spec.models).enumerate() {
        for k in 0..spec.per_model {
            let n = if nmin == nmax {
                nmin
            } else {
                let mut rng = SplitMix64::new(derive_seed(
                    spec.seed,
                    &[TAG_NODE_COUNT, model.tag(), k as u64],
                ));
                nmin + rng.below(nmax - nmin + 1)
            };
            let gen = GenSpec {
                model: *model,
                n,
                sigma: 0.5,
                feat_dim: 5,
                gamma: 1.0 + k as f64,
                seed: network_seed(spec.seed, *model, k as u64),
            };
            let net = gen.generate().map_err(|e| match e {
                Error::TooLarge { .. } | Error::InvalidN { .. } | Error::InvalidParameter { .. } => {
                    Failure::config(e.to_string())
                }
                other => Failure::from(other),
            })?;
            networks.push(net);
            class_of.push(class);
            row_labels.push(format!("{name}-{k}"));
        }
    }

    let mut cfg = ApproxConfig::new(spec.seed);
    cfg.use_interior = spec.interior;
    let matrix = pairwise_matrix(&networks, &cfg).map_err(|e| match e {
        Error::TooLarge { .. } => Failure::config(e.to_string()),
        other => Failure::from(other),
    })?;

    std::fs::create_dir_all(&spec.out)
        .map_err(|e| Failure::input(format!("{}: {e}", spec.out.display())))?;
    write_matrix_csv(&spec.out.join("matrix.csv"), &row_labels, &matrix)?;

    let embedding = embed2d(&matrix)?;
    let mut text = String::from("x,y,model\n");
    for (coords, class) in embedding.coords.iter().zip(&class_of) {
        text.push_str(&format!(
            "{:?},{:?},{}\n",
            coords[0], coords[1], spec.models[*class]
        ));
    }
    let emb_path = spec.out.join("embedding.csv");
    std::fs::write(&emb_path, text)
        .map_err(|e| Failure::input(format!("{}: {e}", emb_path.display())))?;

    let loo_error = nearest_centroid_eval(&embedding.coords, &class_of)?;
    let (mut intra_sum, mut intra_n, mut inter_sum, mut inter_n) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..networks.len() {
        for j in (i + 1)..networks.len() {
            if class_of[i] == class_of[j] {
                intra_sum += matrix[i][j];
                intra_n += 1;
            } else {
                inter_sum += matrix[i][j];
                inter_n += 1;
            }
        }
    }
    let metrics = ClassifyMetrics {
        loo_error,
        intra_mean: intra_sum / intra_n.max(1) as f64,
        inter_mean: inter_sum / inter_n.max(1) as f64,
    };
    let metrics_path = spec.out.join("metrics.json");
    std::fs::write(
        &metrics_path,
        serde_json::to_string_pretty(&metrics).expect("metrics serialize"),
    )
    .map_err(|e| Failure::input(format!("{}: {e}", metrics_path.display())))?;
    println!(
        "classified {} networks: loo_error {:?}, intra {:?}, inter {:?}",
        networks.len(),
        metrics.loo_error,
        metrics.intra_mean,
        metrics.inter_mean
    );
    Ok(())
}

fn cmd_gen(spec: &GenSpec, out: &Path) -> CmdResult {
    let net = spec.generate()?;
    net.save(out)?;
    Ok(())
}

fn cmd_augment(path: &Path, out: &Path) -> CmdResult {
    let net = Network::load(path)?;
    let space = midpoint_augment(&net)?;
    std::fs::write(out, space.to_json_string())
        .map_err(|e| Failure::input(format!("{}: {e}", out.display())))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_parsing() {
        assert_eq!(parse_gammas("1..3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_gammas("1,3,5").unwrap(), vec![1.0, 3.0, 5.0]);
        assert!(parse_gammas("5").is_err());
        assert!(parse_gammas("x..y").is_err());
    }

    #[test]
    fn node_parsing() {
        assert_eq!(parse_nodes("12").unwrap(), (12, 12));
        assert_eq!(parse_nodes("10..14").unwrap(), (10, 14));
        assert!(parse_nodes("14..10").is_err());
    }

    #[test]
    fn companion_path() {
        assert_eq!(
            companion_exact_path(Path::new("/tmp/heat.csv")),
            PathBuf::from("/tmp/heat.exact.csv")
        );
    }
}
