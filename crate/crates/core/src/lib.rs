//! A relational interpreter in the miniKanren tradition.
//!
//! Programs are evaluated by two deterministic labeled transition systems:
//! fair interleaving search ([`interleave`]) and depth-first SLD resolution
//! with cut ([`sld`]). The [`oracle`] module gives an executable, bounded
//! reading of the denotational semantics that both engines are tested
//! against.

pub mod interleave;
pub mod machine;
pub mod oracle;
pub mod reify;
pub mod sld;
pub mod state;
pub mod syntax;
pub mod unify;

pub use interleave::{initial_state, Interleaving, QueryVars};
pub use machine::{answers, trace, trace_events, trace_length, Answers, CutSignal, Rule, Search, Transition};
pub use reify::{reify, ReifiedAnswer};
pub use sld::Sld;
pub use state::{state_well_formed, well_formed, ExtState, Label, State, SumMark, WellFormedness};
pub use syntax::{parse_spec, Goal, Spec, Term, Var};
pub use unify::{mgu, Subst};
