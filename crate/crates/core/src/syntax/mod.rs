//! Abstract syntax, the concrete `.mk` format, and the syntactic operations
//! (free variables, substitution, validation) the engines rely on.

mod ast;
mod lexer;
mod parser;
mod pretty;
mod subst;
mod validate;

pub use ast::{Args, Goal, Name, RelDef, Spec, Term, Var};
pub use lexer::Pos;
pub use parser::{parse_spec, parse_unchecked, ParseError, ParseErrorKind, SourceMap};
pub use subst::{free_vars, free_vars_ordered, subst_goal, subst_goal_many};
pub use validate::{validate_spec, ValidationError};
