use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "fillrad",
    version,
    about = "Filling-radius estimates and finite-scale geometric checks on sampled manifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Sample a manifold; writes a distance CSV and a JSON sidecar.
    Sample(SampleArgs),
    /// Vietoris–Rips barcode of a distance matrix.
    Persist(PersistArgs),
    /// Filling-radius estimate from a distance matrix.
    Fillrad(FillradArgs),
    /// Check every applicable bound against an estimate.
    Bounds(BoundsArgs),
    /// Run one of the constructive checks.
    #[command(subcommand)]
    Probe(Probe),
    /// Run the end-to-end scenarios; exit 0 iff all pass.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Manifold {
    Circle,
    Sphere2,
    Sphere3,
    Torus,
    Rp2,
    Quotient,
    Graph,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub manifold: Manifold,
    /// Number of points. Base points for `rp2` and `graph`, total points
    /// (even) for `quotient`; unused by `torus`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Circle length.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub circumference: f64,
    /// Torus: length of the base circle.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    pub big_l: f64,
    /// Torus: length of the fiber circle.
    #[arg(long, default_value_t = 1.2 * std::f64::consts::PI)]
    pub small_l: f64,
    #[arg(long, default_value_t = 32)]
    pub n_big: usize,
    #[arg(long, default_value_t = 20)]
    pub n_small: usize,
    /// Graph: Hopf fiber scale.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Graph: points per fiber.
    #[arg(long, default_value_t = 12)]
    pub fiber_points: usize,
    /// Graph: neighbors per point (default from the sample size).
    #[arg(long)]
    pub neighbors: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    /// Sidecar path; defaults to `--out` with a `.json` extension.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct EstimatorArgs {
    /// Filtration threshold (default derived from the best known bound).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub min_gap: f64,
    #[arg(long, default_value_t = fillrad_core::persistence::DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct PersistArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Largest simplex dimension; homology is reported below it.
    #[arg(long, default_value_t = 2)]
    pub maxdim: usize,
    /// Filtration threshold (default: the diameter).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = fillrad_core::persistence::DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FillradArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Homology degree.
    #[arg(long)]
    pub dim: usize,
    /// Sidecar with the sample's geometric data.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long)]
    pub est: PathBuf,
    /// Warped product: filling radius of the base.
    #[arg(long, requires_all = ["warp", "fiber_diam"])]
    pub base_fillrad: Option<f64>,
    /// Warped product: largest value of the warping function.
    #[arg(long)]
    pub warp: Option<f64>,
    /// Warped product: diameter of the fiber.
    #[arg(long)]
    pub fiber_diam: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    /// Midpoint witnesses: points with two nearest sample points.
    Reach(ReachArgs),
    /// Shifted-row witnesses with a unique nearest sample point.
    Project(ProjectArgs),
    /// Fixed points of the center-of-mass retraction.
    Retract(RetractArgs),
    /// Mapping-cylinder homotopy of a submersion sample.
    Cylinder(CylinderArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ReachArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, requires = "q")]
    pub p: Option<usize>,
    #[arg(long, requires = "p")]
    pub q: Option<usize>,
    /// Random pairs, used when `--p/--q` are absent.
    #[arg(long, default_value_t = 20)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, requires = "delta")]
    pub p: Option<usize>,
    #[arg(long, requires = "p")]
    pub delta: Option<f64>,
    /// Random `(p, delta)` cases, used when `--p/--delta` are absent.
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RetractArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.9 * std::f64::consts::FRAC_PI_4)]
    pub radius: f64,
    /// Number of sampled points whose rows are retracted.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CylinderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Sidecar listing the fibers.
    #[arg(long)]
    pub meta: PathBuf,
    #[arg(long, default_value_t = fillrad_core::constructions::DEFAULT_T_GRID)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SuiteArgs {
    #[arg(long, default_value = "fillrad-suite")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run only these scenarios.
    #[arg(long)]
    pub only: Vec<String>,
    #[arg(long, default_value_t = fillrad_core::persistence::DEFAULT_SIMPLEX_BUDGET)]
    pub budget: usize,
}
