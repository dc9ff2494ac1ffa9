use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum QchaosError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFiniteInput(String),

    #[error("diagonalization failed: {0}")]
    DiagonalizationFailure(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate vector: {0}")]
    DegenerateVector(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<QchaosError>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl QchaosError {
    /// Process exit status for the CLI: 2 config, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            QchaosError::Config(_) => 2,
            QchaosError::Io { .. } => 4,
            QchaosError::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        QchaosError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

/// Attaches the name of the pipeline stage to an error.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            e @ (QchaosError::Stage { .. } | QchaosError::Config(_) | QchaosError::Io { .. }) => e,
            e => QchaosError::Stage {
                stage,
                source: Box::new(e),
            },
        })
    }
}

pub type Result<T> = std::result::Result<T, QchaosError>;
