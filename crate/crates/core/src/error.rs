use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row on line {0} has the wrong number of cells")]
    RaggedRow(u64),
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("non-numeric cell {value:?} in numeric column {column:?}")]
    NonNumericCell { column: String, value: String },
    #[error("invalid schema: {0}")]
    InvalidSchema(String),
    #[error("unknown dataset {0:?} (expected adult, compas or german)")]
    UnknownDataset(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("degenerate split: {0}")]
    DegenerateSplit(String),
    #[error("only one sensitive group present")]
    SingleGroup,
    #[error("only one label class present")]
    SingleClass,
    #[error("empty input")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("all sample weights are zero")]
    AllZeroWeights,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("iterative solve did not converge (residual {0:e})")]
    NoConvergence(f64),
    #[error("no grid point satisfies the utility constraint")]
    NoFeasiblePoint,
    #[error("{}", infeasible_message(*.lambda_f, *.lambda_u, *.max_feasible_lambda_f))]
    Infeasible {
        lambda_f: f64,
        lambda_u: f64,
        max_feasible_lambda_f: Option<f64>,
    },
    #[error("empty joint cell (a={a}, y={y})")]
    EmptyCell { a: u8, y: u8 },
    #[error("missing artifact {0}")]
    MissingArtifacts(PathBuf),
    #[error("run directory {0} already exists")]
    RunDirExists(PathBuf),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

fn infeasible_message(lambda_f: f64, lambda_u: f64, max: Option<f64>) -> String {
    match max {
        Some(max) => format!(
            "reweighting LP infeasible at lambda_f={lambda_f}, lambda_u={lambda_u}; \
             largest feasible lambda_f at this lambda_u is {max:.6}"
        ),
        None => format!(
            "reweighting LP infeasible at lambda_f={lambda_f}, lambda_u={lambda_u}; \
             no lambda_f in [0, 1] is feasible at this lambda_u"
        ),
    }
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The underlying error with stage tags removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit code: 2 configuration, 3 pipeline, 4 infeasible
    /// optimization.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::Infeasible { .. } | Error::NoFeasiblePoint => 4,
            Error::InvalidConfig(_)
            | Error::InvalidSchema(_)
            | Error::UnknownDataset(_)
            | Error::UnknownColumn(_)
            | Error::DuplicateColumn(_)
            | Error::Json(_)
            | Error::RunDirExists(_)
            | Error::MissingArtifacts(_)
            | Error::Io { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
