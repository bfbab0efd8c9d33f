use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is outside the valid range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: u64,
        min: u64,
        max: u64,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// `Z[√d]` with `d > 0` has infinitely many units.
    #[error(
        "Z[√{0}] is a real quadratic ring with infinitely many units; \
         only imaginary rings Z[√−d] with d ≥ 1 are supported"
    )]
    RealQuadratic(u64),

    #[error("resource guard: {what} = {value} exceeds the limit {max}")]
    ResourceGuard {
        what: &'static str,
        value: u64,
        max: u64,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        LabError::InvalidArgument(msg.into())
    }
}
