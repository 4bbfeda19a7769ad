//! Presenting answers in terms of the query's own variables.

use std::collections::BTreeMap;
use std::fmt;

use crate::interleave::QueryVars;
use crate::syntax::{Name, Term, Var};
use crate::unify::{apply, Subst};

/// An answer restricted to the query variables. Residual variables are
/// renumbered from zero in order of first occurrence and are held as
/// `Var::Sem(k)`; they print as `_k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReifiedAnswer {
    pub bindings: Vec<(Name, Term)>,
}

pub fn reify(sigma: &Subst, vars: &QueryVars) -> ReifiedAnswer {
    let mut renaming = BTreeMap::new();
    let bindings = vars
        .0
        .iter()
        .map(|(name, idx)| (name.clone(), rename(&apply(sigma, &Term::sem(*idx)), &mut renaming)))
        .collect();
    ReifiedAnswer { bindings }
}

fn rename(t: &Term, renaming: &mut BTreeMap<u32, u32>) -> Term {
    match t {
        Term::Var(Var::Sem(i)) => {
            let next = renaming.len() as u32;
            Term::sem(*renaming.entry(*i).or_insert(next))
        }
        Term::Var(v) => Term::Var(v.clone()),
        Term::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(|a| rename(a, renaming)).collect()),
    }
}

/// Writes a reified term, showing residual variables as `_k`.
pub struct Residual<'a>(pub &'a Term);

impl fmt::Display for Residual<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Term::Var(Var::Sem(i)) => write!(f, "_{i}"),
            Term::Var(Var::Syn(x)) => write!(f, "{x}"),
            Term::Ctor(c, args) => {
                f.write_str(c)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{}", Residual(a))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl ReifiedAnswer {
    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.iter().find(|(n, _)| &**n == var).map(|(_, t)| t)
    }

    /// `(name, rendering)` pairs.
    pub fn rendered(&self) -> Vec<(String, String)> {
        self.bindings.iter().map(|(n, t)| (n.to_string(), Residual(t).to_string())).collect()
    }
}

impl fmt::Display for ReifiedAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n} = {}", Residual(t))?;
        }
        Ok(())
    }
}
