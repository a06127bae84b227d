use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no subcritical window: beta1^2 = {beta1_sq} <= 4*beta2 = {four_beta2}")]
    NoSubcriticalWindow { beta1_sq: f64, four_beta2: f64 },

    #[error("integration blew up at t = {time} (norm {norm} exceeds guard {bound})")]
    Blowup { time: f64, norm: f64, bound: f64 },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("state norm vanished at t = {time}")]
    NormVanished { time: f64 },

    #[error("state within {distance} of obstacle {index}")]
    ObstacleSingularity { index: usize, distance: f64 },

    #[error("thresholds not bracketed in [{u_min}, {u_max}]: {detail}")]
    NotBracketed { u_min: f64, u_max: f64, detail: String },
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Blowup { .. } | Error::NonFinite { .. } | Error::NormVanished { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
