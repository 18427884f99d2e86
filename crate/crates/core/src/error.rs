use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration value failed validation. `field` names the
    /// offending input so the CLI can point at it.
    #[error("invalid {field}: {reason}")]
    Invalid { field: String, reason: String },

    #[error("scene has no triangles")]
    EmptyScene,

    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("beam edge reaches or passes 90 degrees (beam parallel to track)")]
    BeamParallelToTrack,

    #[error("coverage hole: update interval {interval} m exceeds minimum coverage distance {coverage:.3} m")]
    CoverageHole { interval: f64, coverage: f64 },

    #[error("schedule does not cover chainage {0:.3} m")]
    ScheduleGap(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("missing channel gain for base station {bs} at position index {position}")]
    MissingGain { bs: usize, position: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    Config(#[from] toml::de::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error stems from bad user input rather than a runtime
    /// failure. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid { .. }
                | Error::Config(_)
                | Error::CoverageHole { .. }
                | Error::BeamParallelToTrack
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
