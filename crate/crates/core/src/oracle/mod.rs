//! Finite set-theoretic oracle.
//!
//! Inductive types are interpreted as least fixpoints of rule sets, computed
//! by finite iteration up to a depth bound, and eliminators as the functional
//! relation generated by their own rule set. Evaluating a term through this
//! interpretation never uses ι-reduction, so comparing the result with the
//! kernel's normal form cross-checks the reduction machinery.

pub mod config;
pub mod interp;
pub mod rules;
pub mod value;

pub use interp::{Oracle, Sem, TySem};
pub use rules::{lfp_stages, Rule, RuleSet, Rules, Stages};
pub use value::{decode, decode_all, encode, SetValue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("outside the oracle fragment: {0}")]
    Unsupported(String),
    #[error("depth {depth} exhausted: {what}")]
    DepthExhausted { what: String, depth: usize },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl OracleError {
    pub fn slug(&self) -> &'static str {
        match self {
            OracleError::Argument(_) => "argument",
            OracleError::Unsupported(_) => "unsupported-fragment",
            OracleError::DepthExhausted { .. } => "depth-exhausted",
            OracleError::Invariant(_) => "invariant",
        }
    }
}
