use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no root bracket for {0}")]
    NoBracket(String),

    #[error("memory undefined: gamma ({gamma} g) must be below the Faraday threshold ({gamma_f} g)")]
    AboveThreshold { gamma: f64, gamma_f: f64 },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("grid under-resolved: dx = {dx:.4e} m exceeds lambda_F/8 = {limit:.4e} m")]
    UnderResolved { dx: f64, limit: f64 },

    #[error("wave field blew up at t = {t:.6} s (max |eta| = {max_eta:.3e} m)")]
    BlowUp { t: f64, max_eta: f64 },

    #[error("position ({x:.6e}, {y:.6e}) m is outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("trajectory approached a node of the wave function at t = {t}: step fell below {dt_min:e}")]
    NodeProximity { t: f64, dt_min: f64 },

    #[error("|psi| underflows at ({x}, {y}), t = {t}")]
    Nodal { x: f64, y: f64, t: f64 },

    #[error("threshold calibration failed: {0}")]
    Calibration(String),

    #[error("{0}")]
    Validation(String),

    #[error("config line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("grid file: {0}")]
    GridFormat(String),

    #[error("trajectory file: {0}")]
    TrajectoryFormat(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
