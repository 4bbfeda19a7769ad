//! Free variables and capture-avoiding substitution of a variable by a term.
//!
//! The engines only ever substitute terms built from semantic variables, so a
//! `fresh` binder (which always binds a syntactic name) can never capture a
//! variable of the substituted term.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::ast::{Goal, Term, Var};

pub fn free_vars(g: &Goal) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    free_vars_into(g, &mut out);
    out
}

fn free_vars_into(g: &Goal, out: &mut BTreeSet<Var>) {
    match g {
        Goal::Unify(a, b) => {
            a.vars_into(out);
            b.vars_into(out);
        }
        Goal::Conj(a, b) | Goal::Disj(a, b) => {
            free_vars_into(a, out);
            free_vars_into(b, out);
        }
        Goal::Fresh(x, body) => {
            let mut inner = BTreeSet::new();
            free_vars_into(body, &mut inner);
            inner.remove(&Var::Syn(x.clone()));
            out.extend(inner);
        }
        Goal::Invoke(_, args) => args.iter().for_each(|a| a.vars_into(out)),
        Goal::Fail | Goal::Cut => {}
    }
}

/// Free variables in left-to-right order of first occurrence.
pub fn free_vars_ordered(g: &Goal) -> Vec<Var> {
    fn go(g: &Goal, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        let push_term = |t: &Term, bound: &Vec<Var>, out: &mut Vec<Var>| {
            let mut vs = Vec::new();
            t.vars_ordered_into(&mut vs);
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match g {
            Goal::Unify(a, b) => {
                push_term(a, bound, out);
                push_term(b, bound, out);
            }
            Goal::Conj(a, b) | Goal::Disj(a, b) => {
                go(a, bound, out);
                go(b, bound, out);
            }
            Goal::Fresh(x, body) => {
                bound.push(Var::Syn(x.clone()));
                go(body, bound, out);
                bound.pop();
            }
            Goal::Invoke(_, args) => args.iter().for_each(|a| push_term(a, bound, out)),
            Goal::Fail | Goal::Cut => {}
        }
    }
    let mut out = Vec::new();
    go(g, &mut Vec::new(), &mut out);
    out
}

/// `g[t/x]`: replaces the free occurrences of `x` in `g` by `t`.
///
/// `t` is expected to be semantic-only; a debug assertion guards this.
pub fn subst_goal(g: &Goal, x: &Var, t: &Term) -> Goal {
    debug_assert!(t.is_semantic(), "substituted term must be semantic-only: {t}");
    match g {
        Goal::Unify(a, b) => Goal::Unify(a.replace(x, t), b.replace(x, t)),
        Goal::Conj(a, b) => Goal::Conj(Arc::new(subst_goal(a, x, t)), Arc::new(subst_goal(b, x, t))),
        Goal::Disj(a, b) => Goal::Disj(Arc::new(subst_goal(a, x, t)), Arc::new(subst_goal(b, x, t))),
        Goal::Fresh(y, _) if matches!(x, Var::Syn(name) if name == y) => g.clone(),
        Goal::Fresh(y, body) => Goal::Fresh(y.clone(), Arc::new(subst_goal(body, x, t))),
        Goal::Invoke(r, args) => Goal::Invoke(r.clone(), args.iter().map(|a| a.replace(x, t)).collect()),
        Goal::Fail | Goal::Cut => g.clone(),
    }
}

/// Simultaneous substitution `g[t1/x1 … tk/xk]` of syntactic names.
///
/// Since every `ti` is semantic-only, this agrees with applying the single
/// substitutions one after another.
pub fn subst_goal_many(g: &Goal, bindings: &[(Var, Term)]) -> Goal {
    fn term(t: &Term, bindings: &[(Var, Term)]) -> Term {
        t.rename(&mut |v| bindings.iter().find(|(x, _)| x == v).map(|(_, t)| t.clone()))
    }
    if bindings.is_empty() {
        return g.clone();
    }
    match g {
        Goal::Unify(a, b) => Goal::Unify(term(a, bindings), term(b, bindings)),
        Goal::Conj(a, b) => Goal::Conj(
            Arc::new(subst_goal_many(a, bindings)),
            Arc::new(subst_goal_many(b, bindings)),
        ),
        Goal::Disj(a, b) => Goal::Disj(
            Arc::new(subst_goal_many(a, bindings)),
            Arc::new(subst_goal_many(b, bindings)),
        ),
        Goal::Fresh(y, body) => {
            let shadowed = |v: &Var| matches!(v, Var::Syn(name) if name == y);
            if bindings.iter().any(|(x, _)| shadowed(x)) {
                let rest: Vec<(Var, Term)> =
                    bindings.iter().filter(|(x, _)| !shadowed(x)).cloned().collect();
                Goal::Fresh(y.clone(), Arc::new(subst_goal_many(body, &rest)))
            } else {
                Goal::Fresh(y.clone(), Arc::new(subst_goal_many(body, bindings)))
            }
        }
        Goal::Invoke(r, args) => Goal::Invoke(r.clone(), args.iter().map(|a| term(a, bindings)).collect()),
        Goal::Fail | Goal::Cut => g.clone(),
    }
}
