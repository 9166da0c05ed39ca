use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // metric validation
    #[error("distance matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("non-finite distance at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("nonzero diagonal entry d[{i}][{i}] = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("asymmetric distances: d[{i}][{j}] = {dij} but d[{j}][{i}] = {dji}")]
    AsymmetricInput {
        i: usize,
        j: usize,
        dij: f64,
        dji: f64,
    },
    #[error("distinct points {i} and {j} at distance {value}")]
    NonpositiveDistance { i: usize, j: usize, value: f64 },
    #[error("triangle inequality violated: d[{i}][{j}] exceeds d[{i}][{via}] + d[{via}][{j}] by {excess}")]
    TriangleViolation {
        i: usize,
        j: usize,
        via: usize,
        excess: f64,
    },
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    // samplers
    #[error("too few points: need at least {min}, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error("neighbor graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },
    #[error("quotient is not a metric: {0}")]
    QuotientNotMetric(Box<Error>),
    #[error("orbit {0} is empty")]
    EmptyOrbit(usize),
    #[error("orbits do not partition the index set: {0}")]
    NotAPartition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // persistence
    #[error("simplex budget exceeded: more than {budget} simplices below the threshold")]
    SimplexBudgetExceeded { budget: usize },
    #[error("{points} points need {bits} bits per vertex; {vertices}-vertex simplices do not fit in 64 bits")]
    VertexEncodingOverflow {
        points: usize,
        bits: u32,
        vertices: usize,
    },
    #[error("no dominant bar in degree {k} (gap ratio {gap_ratio:?}, required {min_gap})")]
    NoDominantBar {
        k: usize,
        gap_ratio: Option<f64>,
        min_gap: f64,
    },
    #[error(
        "dominant class in degree {k} is still alive at threshold {threshold}; increase r_max"
    )]
    DeathAtThreshold { k: usize, threshold: f64 },

    // constructions
    #[error("vicinity set of radius {radius} is empty")]
    EmptyVicinity { radius: f64 },
    #[error("point {r} is strictly closer to the witness than its generators ({distance} < {half_delta})")]
    StrictlyCloserPoint {
        r: usize,
        distance: f64,
        half_delta: f64,
    },
    #[error("witness check failed: {0}")]
    WitnessFailed(String),

    // bounds
    #[error("injectivity radius must be positive, got {0}")]
    NonpositiveInjectivityRadius(f64),
    #[error(
        "fibers are all singletons and dimensions agree: total space must have larger dimension"
    )]
    DimensionNotExceeded,

    // io
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::NonFinite { .. } => "NonFinite",
            Error::NonzeroDiagonal { .. } => "NonzeroDiagonal",
            Error::AsymmetricInput { .. } => "AsymmetricInput",
            Error::NonpositiveDistance { .. } => "NonpositiveDistance",
            Error::TriangleViolation { .. } => "TriangleViolation",
            Error::NonpositiveScale(_) => "NonpositiveScale",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::BadGrid(_) => "BadGrid",
            Error::DisconnectedGraph { .. } => "DisconnectedGraph",
            Error::QuotientNotMetric(_) => "QuotientNotMetric",
            Error::EmptyOrbit(_) => "EmptyOrbit",
            Error::NotAPartition(_) => "NotAPartition",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::SimplexBudgetExceeded { .. } => "SimplexBudgetExceeded",
            Error::VertexEncodingOverflow { .. } => "VertexEncodingOverflow",
            Error::NoDominantBar { .. } => "NoDominantBar",
            Error::DeathAtThreshold { .. } => "DeathAtThreshold",
            Error::EmptyVicinity { .. } => "EmptyVicinity",
            Error::StrictlyCloserPoint { .. } => "StrictlyCloserPoint",
            Error::WitnessFailed(_) => "WitnessFailed",
            Error::NonpositiveInjectivityRadius(_) => "NonpositiveInjectivityRadius",
            Error::DimensionNotExceeded => "DimensionNotExceeded",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::SimplexBudgetExceeded { .. } | Error::VertexEncodingOverflow { .. }
        )
    }
}
