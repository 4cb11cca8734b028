use alloc::string::String;

/// Errors raised by the engines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid chained action: {0}")]
    InvalidChain(crate::evoc::ChainViolation),
    #[error("STILL has no opposite posture")]
    NoOpposite,
    #[error("invalid value for `{key}`: {reason}")]
    InvalidConfig { key: &'static str, reason: String },
    #[error("function gene {0} is outside 1..=13")]
    UnknownFunction(u8),
    #[error("node {node}: connection {conn} does not point to an earlier node or input")]
    BadConnection { node: usize, conn: usize },
    #[error("output gene {index} references {target}, beyond the last node")]
    BadOutput { index: usize, target: usize },
    #[error("image is {got_w}x{got_h}, expected {want_w}x{want_h}")]
    DimensionMismatch {
        got_w: usize,
        got_h: usize,
        want_w: usize,
        want_h: usize,
    },
    #[error("invalid sitter assets: {0}")]
    InvalidAssets(&'static str),
}

impl Error {
    pub(crate) fn config(key: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            key,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_probability(key: &'static str, value: f64) -> Result<(), Error> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::config(
            key,
            alloc::format!("{value} is outside the probability domain [0, 1]"),
        ))
    }
}
