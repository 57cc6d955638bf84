use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no real root: radicand {radicand} is negative")]
    NoRealRoot { radicand: f64 },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("unsupported parameter regime: {0}")]
    UnsupportedRegime(String),

    #[error("hypothesis not satisfied: {0}")]
    Inapplicable(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error(
        "positivity violation in `{species}` at cell {cell}, t = {t}: value {value} below clip window"
    )]
    PositivityViolation {
        species: &'static str,
        cell: usize,
        t: f64,
        value: f64,
    },

    #[error("blow-up guard tripped at t = {t}: sup u = {sup_u} exceeds {limit}")]
    BlowUp { t: f64, sup_u: f64, limit: f64 },

    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
}

impl Error {
    /// True for failures of the time integration itself (as opposed to bad input).
    pub fn is_numerical_failure(&self) -> bool {
        matches!(
            self,
            Error::PositivityViolation { .. } | Error::BlowUp { .. } | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
