use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown or invalid Cartan type `{0}`")]
    UnknownType(String),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("coweight {0} is not dominant")]
    NotDominant(String),

    #[error("finite Weyl group exceeds the enumeration cap of {cap} elements")]
    WeylGroupTooLarge { cap: usize },

    #[error("element does not belong to this Iwahori-Weyl group")]
    DatumMismatch,

    #[error("reflections {0:?} generate an infinite parabolic subgroup")]
    InfiniteParabolic(Vec<usize>),

    #[error("invalid Frobenius twist: {0}")]
    InvalidTwist(String),

    #[error("plateau search exceeded the cap of {0} elements")]
    PlateauCapExceeded(usize),

    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
