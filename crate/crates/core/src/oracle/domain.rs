//! Bounded ground-term domains and representing functions.

use std::collections::BTreeMap;
use std::fmt;

use crate::syntax::{Name, Term, Var};

use super::OracleError;

/// Constructor names with arities.
pub type Signature = [(Name, usize)];

/// All ground terms of depth at most `depth` over `signature`. Terms are
/// ordered by constructor in signature order, then by the order of their
/// arguments.
pub fn enum_ground_terms(signature: &Signature, depth: usize) -> Result<Vec<Term>, OracleError> {
    if !signature.iter().any(|(_, a)| *a == 0) {
        return Err(OracleError::EmptyDomain);
    }
    let mut level: Vec<Term> = Vec::new();
    for d in 1..=depth {
        let mut next = Vec::new();
        for (name, arity) in signature {
            if *arity == 0 {
                next.push(Term::Ctor(name.clone(), Vec::new().into()));
            } else if d > 1 {
                for args in product(&level, *arity) {
                    next.push(Term::Ctor(name.clone(), args.into()));
                }
            }
        }
        level = next;
    }
    Ok(level)
}

fn product(items: &[Term], k: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// Number of terms `enum_ground_terms` would return, saturating.
pub fn domain_size(signature: &Signature, depth: usize) -> u128 {
    let mut c: u128 = 0;
    for d in 1..=depth {
        let mut next: u128 = 0;
        for (_, arity) in signature {
            next = next.saturating_add(match (*arity, d) {
                (0, _) => 1,
                (_, 1) => 0,
                (a, _) => c.saturating_pow(a as u32),
            });
        }
        c = next;
    }
    c
}

/// The first nullary constructor in signature order.
pub fn default_term(signature: &Signature) -> Result<Term, OracleError> {
    signature
        .iter()
        .find(|(_, a)| *a == 0)
        .map(|(n, _)| Term::Ctor(n.clone(), Vec::new().into()))
        .ok_or(OracleError::EmptyDomain)
}

/// A total map from semantic variables to ground terms, stored as finitely
/// many assignments and a default value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReprFun {
    pub assignments: BTreeMap<u32, Term>,
    pub default: Term,
}

impl ReprFun {
    pub fn new(default: Term) -> ReprFun {
        debug_assert!(default.is_ground());
        ReprFun { assignments: BTreeMap::new(), default }
    }

    pub fn for_signature(signature: &Signature) -> Result<ReprFun, OracleError> {
        Ok(ReprFun::new(default_term(signature)?))
    }

    pub fn with(mut self, var: u32, value: Term) -> ReprFun {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: u32, value: Term) {
        debug_assert!(value.is_ground());
        self.assignments.insert(var, value);
    }

    pub fn get(&self, var: u32) -> &Term {
        self.assignments.get(&var).unwrap_or(&self.default)
    }

    /// Largest variable with an explicit assignment.
    pub fn max_var(&self) -> u32 {
        self.assignments.keys().next_back().copied().unwrap_or(0)
    }
}

/// Homomorphic extension of `f` to terms.
pub fn ground(f: &ReprFun, t: &Term) -> Term {
    match t {
        Term::Var(Var::Sem(i)) => f.get(*i).clone(),
        Term::Var(Var::Syn(x)) => panic!("cannot ground syntactic variable {x}"),
        Term::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(|a| ground(f, a)).collect()),
    }
}

impl fmt::Display for ReprFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "α{k} ↦ {v}")?;
        }
        write!(f, "; _ ↦ {}}}", self.default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(items: &[(&str, usize)]) -> Vec<(Name, usize)> {
        items.iter().map(|(n, a)| (Name::from(*n), *a)).collect()
    }

    #[test]
    fn nil_only() {
        assert_eq!(enum_ground_terms(&sig(&[("Nil", 0)]), 2).unwrap(), vec![Term::atom("Nil")]);
    }

    #[test]
    fn lists_of_depth_two() {
        let s = sig(&[("Nil", 0), ("Cons", 2)]);
        let nil = Term::atom("Nil");
        assert_eq!(enum_ground_terms(&s, 2).unwrap(), vec![nil.clone(), Term::ctor("Cons", vec![nil.clone(), nil])]);
    }

    #[test]
    fn counts_follow_recurrence() {
        let s = sig(&[("Nil", 0), ("Cons", 2)]);
        let mut c = 1u128;
        for d in 1..=4 {
            assert_eq!(enum_ground_terms(&s, d).unwrap().len() as u128, c);
            assert_eq!(domain_size(&s, d), c);
            c = 1 + c * c;
        }
    }

    #[test]
    fn two_atoms() {
        let s = sig(&[("A", 0), ("B", 0)]);
        assert_eq!(enum_ground_terms(&s, 1).unwrap(), vec![Term::atom("A"), Term::atom("B")]);
    }

    #[test]
    fn no_nullary_constructor() {
        assert_eq!(enum_ground_terms(&sig(&[("S", 1)]), 3), Err(OracleError::EmptyDomain));
    }

    #[test]
    fn grounding() {
        let nil = Term::atom("Nil");
        let f = ReprFun::new(nil.clone()).with(1, nil.clone());
        assert_eq!(ground(&f, &nil), nil);
        let t = Term::ctor("Cons", vec![Term::sem(1), Term::sem(1)]);
        assert_eq!(ground(&f, &t), Term::ctor("Cons", vec![nil.clone(), nil]));
    }
}
