use thiserror::Error;

/// Errors raised by the special functions, closed forms and oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument out of domain: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: overflow: {detail}")]
    Overflow {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: no convergence: {detail}")]
    Convergence {
        function: &'static str,
        detail: String,
    },

    #[error("exponential-sum construction failed: {0}")]
    Construction(String),

    #[error("near-degenerate partial fractions: |omega*lambda2 - lambda3| = {gap:e}; use the special-case branch")]
    NearDegenerate { gap: f64 },

    #[error("branch mismatch: {0}")]
    BranchMismatch(String),

    #[error("invalid parameter `{field}`: {detail}")]
    InvalidParameter {
        field: &'static str,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn convergence(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn invalid(field: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            detail: detail.into(),
        }
    }

    /// True for failures of an iterative or adaptive numerical method, as opposed
    /// to bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::Overflow { .. } | Error::Construction(_)
        )
    }
}
