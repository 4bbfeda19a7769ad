use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

/// Interned-ish identifier shared between AST nodes.
pub type Name = Arc<str>;

/// A variable: either a semantic (logic) variable `α_i`, allocated during
/// evaluation, or a syntactic variable bound by `fresh` or a parameter list.
///
/// Semantic variables are ordered by index; `Sem(1)` is the first allocated
/// variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Sem(u32),
    Syn(Name),
}

impl Var {
    pub fn syn(name: &str) -> Var {
        Var::Syn(Name::from(name))
    }

    pub fn is_semantic(&self) -> bool {
        matches!(self, Var::Sem(_))
    }
}

pub type Args = Arc<[Term]>;

#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Clone, Debug, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    /// Arguments are shared, so cloning a term is cheap.
    Ctor(Name, Args),
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Ctor(f, xs), Term::Ctor(g, ys)) => f == g && (Arc::ptr_eq(xs, ys) || xs[..] == ys[..]),
            _ => false,
        }
    }
}

impl Term {
    pub fn sem(index: u32) -> Term {
        Term::Var(Var::Sem(index))
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Var::syn(name))
    }

    pub fn ctor(name: &str, args: Vec<Term>) -> Term {
        Term::Ctor(Name::from(name), args.into())
    }

    pub fn atom(name: &str) -> Term {
        Term::Ctor(Name::from(name), Args::from([]))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Ctor(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// True when no syntactic variable occurs in the term.
    pub fn is_semantic(&self) -> bool {
        match self {
            Term::Var(v) => v.is_semantic(),
            Term::Ctor(_, args) => args.iter().all(Term::is_semantic),
        }
    }

    /// Depth of the term tree; variables and nullary constructors have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Ctor(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn vars_into(&self, out: &mut BTreeSet<Var>) {
        fn go(t: &Term, out: &mut BTreeSet<Var>, seen: &mut HashSet<*const Term>) {
            match t {
                Term::Var(v) => {
                    out.insert(v.clone());
                }
                Term::Ctor(_, args) => {
                    if !args.is_empty() && seen.insert(args.as_ptr()) {
                        args.iter().for_each(|a| go(a, out, seen));
                    }
                }
            }
        }
        go(self, out, &mut HashSet::new());
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.vars_into(&mut out);
        out
    }

    /// Variables in left-to-right first-occurrence order, without duplicates.
    pub fn vars_ordered_into(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Ctor(_, args) => args.iter().for_each(|a| a.vars_ordered_into(out)),
        }
    }

    pub fn contains_var(&self, var: &Var) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Ctor(_, args) => args.iter().any(|a| a.contains_var(var)),
        }
    }

    /// Replaces every occurrence of `var` by `with`.
    pub fn replace(&self, var: &Var, with: &Term) -> Term {
        self.rename(&mut |v| (v == var).then(|| with.clone()))
    }

    /// Replaces each variable `v` for which `f(v)` is `Some`. Shared argument
    /// lists are rewritten once and unchanged ones are kept as they are.
    pub fn rename(&self, f: &mut impl FnMut(&Var) -> Option<Term>) -> Term {
        self.rename_in(f, &mut HashMap::new()).unwrap_or_else(|| self.clone())
    }

    fn rename_in(
        &self,
        f: &mut impl FnMut(&Var) -> Option<Term>,
        memo: &mut HashMap<*const Term, Option<Args>>,
    ) -> Option<Term> {
        match self {
            Term::Var(v) => f(v),
            Term::Ctor(_, args) if args.is_empty() => None,
            Term::Ctor(name, args) => {
                let key = args.as_ptr();
                let new = match memo.get(&key) {
                    Some(hit) => hit.clone(),
                    None => {
                        let changed: Vec<Option<Term>> = args.iter().map(|a| a.rename_in(f, memo)).collect();
                        let new = changed.iter().any(Option::is_some).then(|| {
                            changed.into_iter().zip(args.iter()).map(|(c, a)| c.unwrap_or_else(|| a.clone())).collect()
                        });
                        memo.insert(key, new.clone());
                        new
                    }
                };
                new.map(|args| Term::Ctor(name.clone(), args))
            }
        }
    }

    pub fn max_sem_index(&self) -> u32 {
        match self {
            Term::Var(Var::Sem(i)) => *i,
            Term::Var(Var::Syn(_)) => 0,
            Term::Ctor(_, args) => args.iter().map(Term::max_sem_index).max().unwrap_or(0),
        }
    }
}

/// A goal of the source language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    Unify(Term, Term),
    Conj(Arc<Goal>, Arc<Goal>),
    Disj(Arc<Goal>, Arc<Goal>),
    Fresh(Name, Arc<Goal>),
    Invoke(Name, Vec<Term>),
    /// Deliberately unsuccessful computation.
    Fail,
    /// Prolog-style cut; legal in SLD specifications only.
    Cut,
}

impl Goal {
    pub fn unify(a: Term, b: Term) -> Goal {
        Goal::Unify(a, b)
    }

    pub fn conj(a: Goal, b: Goal) -> Goal {
        Goal::Conj(Arc::new(a), Arc::new(b))
    }

    pub fn disj(a: Goal, b: Goal) -> Goal {
        Goal::Disj(Arc::new(a), Arc::new(b))
    }

    pub fn fresh(x: &str, body: Goal) -> Goal {
        Goal::Fresh(Name::from(x), Arc::new(body))
    }

    pub fn invoke(rel: &str, args: Vec<Term>) -> Goal {
        Goal::Invoke(Name::from(rel), args)
    }

    pub fn contains_cut(&self) -> bool {
        match self {
            Goal::Cut => true,
            Goal::Conj(a, b) | Goal::Disj(a, b) => a.contains_cut() || b.contains_cut(),
            Goal::Fresh(_, body) => body.contains_cut(),
            Goal::Unify(..) | Goal::Invoke(..) | Goal::Fail => false,
        }
    }

    /// Highest semantic variable index occurring anywhere in the goal (0 if none).
    pub fn max_sem_index(&self) -> u32 {
        match self {
            Goal::Unify(a, b) => a.max_sem_index().max(b.max_sem_index()),
            Goal::Conj(a, b) | Goal::Disj(a, b) => a.max_sem_index().max(b.max_sem_index()),
            Goal::Fresh(_, body) => body.max_sem_index(),
            Goal::Invoke(_, args) => args.iter().map(Term::max_sem_index).max().unwrap_or(0),
            Goal::Fail | Goal::Cut => 0,
        }
    }

    /// Nesting depth of goal constructors.
    pub fn depth(&self) -> usize {
        match self {
            Goal::Conj(a, b) | Goal::Disj(a, b) => 1 + a.depth().max(b.depth()),
            Goal::Fresh(_, body) => 1 + body.depth(),
            _ => 1,
        }
    }
}

/// `name = λ params . body`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelDef {
    pub name: Name,
    pub params: Vec<Name>,
    pub body: Goal,
}

/// Relation definitions plus the top-level query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub defs: IndexMap<Name, RelDef>,
    pub query: Goal,
    /// Set by the `#sld` pragma; permits `!` in goals.
    pub sld: bool,
}

impl Spec {
    pub fn new(defs: Vec<RelDef>, query: Goal) -> Spec {
        let sld = query.contains_cut() || defs.iter().any(|d| d.body.contains_cut());
        Spec {
            defs: defs.into_iter().map(|d| (d.name.clone(), d)).collect(),
            query,
            sld,
        }
    }

    pub fn def(&self, name: &str) -> Option<&RelDef> {
        self.defs.get(name)
    }

    pub fn contains_cut(&self) -> bool {
        self.query.contains_cut() || self.defs.values().any(|d| d.body.contains_cut())
    }

    /// Constructors with their arities in first-occurrence order (definitions
    /// in declaration order, then the query).
    pub fn signature(&self) -> Vec<(Name, usize)> {
        fn term(t: &Term, out: &mut Vec<(Name, usize)>) {
            if let Term::Ctor(name, args) = t {
                if !out.iter().any(|(n, a)| n == name && *a == args.len()) {
                    out.push((name.clone(), args.len()));
                }
                args.iter().for_each(|a| term(a, out));
            }
        }
        fn goal(g: &Goal, out: &mut Vec<(Name, usize)>) {
            match g {
                Goal::Unify(a, b) => {
                    term(a, out);
                    term(b, out);
                }
                Goal::Conj(a, b) | Goal::Disj(a, b) => {
                    goal(a, out);
                    goal(b, out);
                }
                Goal::Fresh(_, body) => goal(body, out),
                Goal::Invoke(_, args) => args.iter().for_each(|a| term(a, out)),
                Goal::Fail | Goal::Cut => {}
            }
        }
        let mut out = Vec::new();
        for def in self.defs.values() {
            goal(&def.body, &mut out);
        }
        goal(&self.query, &mut out);
        out
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Sem(i) => write!(f, "α{i}"),
            Var::Syn(name) => f.write_str(name),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Ctor(name, args) if args.is_empty() => f.write_str(name),
            Term::Ctor(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}
