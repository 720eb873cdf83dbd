use crate::optimize::RootError;
use crate::quadrature::QuadratureError;

/// Failure of a library operation. `op` names the module and operation, e.g. `freegas::m_of_n`.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },
    #[error("{op}: quadrature failed: {source}")]
    Quadrature {
        op: &'static str,
        #[source]
        source: QuadratureError,
    },
    #[error("{op}: root finding failed: {source}")]
    Root {
        op: &'static str,
        #[source]
        source: RootError,
    },
    #[error("{op}: {msg}")]
    Numeric { op: &'static str, msg: String },
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub fn numeric(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric { op, msg: msg.into() }
    }

    /// Module and operation that failed.
    pub fn op(&self) -> &'static str {
        match self {
            Error::Domain { op, .. }
            | Error::Quadrature { op, .. }
            | Error::Root { op, .. }
            | Error::Numeric { op, .. } => op,
        }
    }

    /// True for invalid-argument failures, false for numeric breakdowns.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) trait Context<T> {
    fn during(self, op: &'static str) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, QuadratureError> {
    fn during(self, op: &'static str) -> Result<T> {
        self.map_err(|source| Error::Quadrature { op, source })
    }
}

impl<T> Context<T> for std::result::Result<T, RootError> {
    fn during(self, op: &'static str) -> Result<T> {
        self.map_err(|source| Error::Root { op, source })
    }
}
