use thiserror::Error;

/// Errors raised by the extension tests and the geometry underneath them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at {re}{im:+}i: the extension has a nonzero singular part there")]
    Pole { re: f64, im: f64 },

    #[error("non-finite sample at theta = {theta}")]
    NonFinite { theta: f64 },

    #[error("resolution error: pole bound {pole_bound} needs more than {samples} samples")]
    Resolution { pole_bound: usize, samples: usize },

    #[error("ill-conditioned radial system at frequency {frequency} (condition {condition:e}); spread the radii further apart")]
    IllConditioned { frequency: i64, condition: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown gallery entry '{name}'; registered: {}", registered.join(", "))]
    UnknownEntry { name: String, registered: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
