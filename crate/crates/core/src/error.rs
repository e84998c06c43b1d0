use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension `{dim}` is degenerate (min == max == {value}); cannot normalize")]
    DegenerateDimension { dim: &'static str, value: f64 },

    #[error("{what} = {value} is outside [0, 1]")]
    OutOfUnitRange { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("no lane change executed: lateral velocity never reaches {threshold} m/s")]
    NoLaneChange { threshold: f64 },

    #[error("kernel radius {radius} too large for volume with smallest dimension {min_dim} (need 2r+1 < {min_dim})")]
    KernelTooLarge { radius: u32, min_dim: usize },

    #[error(
        "no clusters found (q = {q:?}, r = {radius}, noise fraction = {noise_fraction}, \
         {components} raw components)"
    )]
    NoClusters {
        q: [u32; 3],
        radius: u32,
        noise_fraction: f64,
        components: usize,
    },

    #[error("k = {k} exceeds the number of distinct samples ({distinct})")]
    TooFewDistinct { k: usize, distinct: usize },

    #[error("class `{class}` has {distinct} distinct samples, fewer than k = {k}")]
    ClassTooSmall {
        class: &'static str,
        k: usize,
        distinct: usize,
    },

    #[error("model is empty")]
    EmptyModel,

    #[error("noise is not a valid training label")]
    NoiseLabel,

    #[error("dataset has no labels")]
    Unlabeled,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(source_name: impl Into<String>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 1,
            Error::Parse { .. }
            | Error::Io(_)
            | Error::EmptyTrajectory
            | Error::NoLaneChange { .. }
            | Error::NoiseLabel
            | Error::Unlabeled
            | Error::LengthMismatch { .. }
            | Error::DimensionMismatch { .. }
            | Error::EmptyModel => 2,
            Error::DegenerateDimension { .. }
            | Error::OutOfUnitRange { .. }
            | Error::KernelTooLarge { .. }
            | Error::NoClusters { .. }
            | Error::TooFewDistinct { .. }
            | Error::ClassTooSmall { .. } => 3,
        }
    }
}
