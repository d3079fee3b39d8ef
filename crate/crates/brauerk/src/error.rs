use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid structure: {0}")]
    Validation(String),

    #[error("the zero ring is not admitted (0 = 1)")]
    ZeroRing,

    #[error("size cap exceeded in {what}: size {size} > cap {cap}")]
    CapExceeded { what: &'static str, size: u64, cap: u64 },

    #[error("budget exhausted in {stage}: limit {limit}")]
    Budget { stage: &'static str, limit: u64 },

    #[error("search inconclusive in {stage}: node budget {limit} exhausted")]
    Inconclusive { stage: &'static str, limit: u64 },

    #[error("objects live over different rings")]
    MixedRings,

    #[error("{0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code classification: budget-style outcomes are reported as
    /// inconclusive (2), everything else as failure (1).
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::Budget { .. } | Error::Inconclusive { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
