//! A bounded, executable reading of the denotational semantics, and the
//! differential checks that compare the engines against it.

mod check;
mod den;
mod domain;

pub use check::{check_completeness, check_soundness, covers, CheckConfig, Kind, Report, Violation};
pub use den::{in_subst_sem, Oracle, OracleParams};
pub use domain::{default_term, domain_size, enum_ground_terms, ground, ReprFun, Signature};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("the signature has no nullary constructor, so the ground domain is empty")]
    EmptyDomain,
    #[error("oracle gave up after {work} search nodes")]
    Inconclusive { work: u64 },
    #[error("{0} candidate representing functions exceed the enumeration limit")]
    TooManyCandidates(u128),
}
