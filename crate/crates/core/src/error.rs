use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={len}")]
    Range { index: usize, len: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("sampler emitted index {0} whose entry is zero")]
    InvalidSampler(usize),

    #[error("size cap exceeded: {0}")]
    Size(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inconsistent outcome: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_index(index: usize, len: usize) -> Result<()> {
    if index == 0 || index > len {
        Err(Error::Range { index, len })
    } else {
        Ok(())
    }
}
