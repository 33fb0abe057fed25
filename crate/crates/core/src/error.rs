use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the estimators, closed-form evaluators and simulators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Every block maximum exceeds the threshold so log F̂ is undefined.
    #[error("degenerate threshold: every block maximum exceeds u (F\u{302} = {fhat}); choose a larger threshold")]
    AllBlocksExceed { fhat: f64 },

    /// No observation exceeds the threshold so τ̂ = 0.
    #[error("degenerate threshold: no exceedances of u (\u{3c4}\u{302} = {tau_hat}); choose a smaller threshold")]
    NoExceedances { tau_hat: f64 },

    #[error("insufficient data: {what} requires n >= {required}, got n = {n}")]
    InsufficientData {
        what: &'static str,
        n: usize,
        required: usize,
    },

    #[error("insufficient exceedances: at least 2 are required, found {found}")]
    InsufficientExceedances { found: usize },

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    /// True for the two threshold degeneracies of the blocks estimators.
    pub fn is_degenerate_threshold(&self) -> bool {
        matches!(
            self,
            Error::AllBlocksExceed { .. } | Error::NoExceedances { .. }
        )
    }
}
