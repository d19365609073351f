use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("generator {generator} is not defined on the {module} module")]
    IllegalGenerator { generator: String, module: String },

    #[error("p-power map is only defined on single basis elements, got {0}")]
    NotBasisElement(String),

    #[error("no free-field polynomial tables for rank {0}")]
    MissingTables(usize),

    #[error("unsupported Lie algebra: {0}")]
    Unsupported(String),

    #[error("incompatible p-character: {0}")]
    IncompatibleCharacter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed Lie algebra data: {0}")]
    InvalidData(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
