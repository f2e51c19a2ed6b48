//! Error type shared by every pipeline stage.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Two operands (or an operand and a contract) disagree on dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix required to be unitary failed the Frobenius test.
    #[error("matrix is not unitary: ||U*U - I||_F = {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    /// A mesh violates its structural invariants.
    #[error("malformed mesh: {0}")]
    Mesh(String),

    /// A netlist violates its structural invariants.
    #[error("malformed netlist: {0}")]
    Netlist(String),

    /// A simulation touched a (path, OAM) label outside the tracked basis.
    #[error("simulation basis error: {0}")]
    Basis(String),

    /// A JSON artifact failed to parse; `field` names the offending entry.
    #[error("parse error at `{field}`: {reason}")]
    Parse { field: String, reason: String },
}

impl Error {
    pub fn parse(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse { field: field.into(), reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
