use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("set partitions of a {k}-element set exceed the enumeration guard (k <= {max})")]
    PartitionGuard { k: usize, max: usize },

    #[error("index {index} out of range (valid: {valid})")]
    IndexOutOfRange { index: usize, valid: String },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("model provides derivatives up to order {available}, order {requested} requested")]
    Capability { requested: usize, available: usize },

    #[error("generalized exponential series did not certify convergence within {terms} terms")]
    Divergence { terms: usize },

    #[error("non-finite value in subset {subset} at step {step}")]
    NonFinite { subset: String, step: usize },

    #[error("path for subset {0} requested before it was simulated")]
    Scheduling(String),

    #[error("{} Monte Carlo sample(s) failed: {}", .0.len(), format_failures(.0))]
    Samples(Vec<(u64, String)>),

    #[error("configuration invalid:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_failures(failures: &[(u64, String)]) -> String {
    failures
        .iter()
        .map(|(seed, msg)| format!("seed {seed}: {msg}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
