use thiserror::Error;

/// Errors raised by any layer of the simulator.
///
/// Numerical and domain errors carry the name of the module that raised them
/// so that a failing sweep reports where the problem originated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{module}: {msg}")]
    Domain { module: &'static str, msg: String },

    #[error("{module}: dimension mismatch: expected {expected}, found {found}")]
    Dimension {
        module: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{module}: numerical error: {msg}")]
    Numerical { module: &'static str, msg: String },

    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn numerical(module: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical {
            module,
            msg: msg.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}
