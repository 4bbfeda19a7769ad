//! Membership in the bounded, step-indexed denotational semantics.
//!
//! Existentials introduced by `fresh` range over ground terms of bounded
//! depth. Instead of enumerating candidate witnesses, the decision procedure
//! keeps them symbolic: it explores the disjunctive structure of the goal
//! depth-first, solving the equations of each branch by unification and
//! checking that every witness still has an instance inside the bounded
//! domain. Because depth only grows under instantiation, a branch whose
//! witness is already too deep is abandoned at once. The result coincides
//! with literal enumeration.

use std::collections::HashSet;
use std::rc::Rc;
use std::sync::Arc;

use crate::state::State;
use crate::syntax::{subst_goal, subst_goal_many, Goal, Name, Spec, Term, Var};
use crate::unify::{compose, mgu, Subst};

use super::domain::{ground, ReprFun, Signature};
use super::OracleError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleParams {
    /// Depth of the enumerated domain.
    pub depth: usize,
    /// Maximal nesting of relation unfoldings.
    pub step_index: u32,
    /// Depth bound for `fresh` witnesses; `depth` when unset.
    pub witness_depth: Option<usize>,
    /// Offset added to the indices chosen for `fresh` variables.
    pub fresh_shift: u32,
    /// Search nodes explored before giving up.
    pub work_limit: u64,
}

impl OracleParams {
    pub fn new(depth: usize, step_index: u32) -> OracleParams {
        OracleParams { depth, step_index, witness_depth: None, fresh_shift: 0, work_limit: 5_000_000 }
    }

    pub fn witness_depth(&self) -> usize {
        self.witness_depth.unwrap_or(self.depth)
    }
}

/// The denotational reading of a specification over a fixed signature.
#[derive(Clone, Debug)]
pub struct Oracle<'a> {
    spec: &'a Spec,
    ctors: HashSet<(Name, usize)>,
    has_nullary: bool,
    pub params: OracleParams,
}

impl<'a> Oracle<'a> {
    pub fn new(spec: &'a Spec, params: OracleParams) -> Oracle<'a> {
        Oracle::with_signature(spec, &spec.signature(), params)
    }

    pub fn with_signature(spec: &'a Spec, signature: &Signature, params: OracleParams) -> Oracle<'a> {
        Oracle {
            spec,
            ctors: signature.iter().cloned().collect(),
            has_nullary: signature.iter().any(|(_, a)| *a == 0),
            params,
        }
    }

    pub fn spec(&self) -> &'a Spec {
        self.spec
    }

    /// Is `f` in the denotation of `g`?
    pub fn in_den_sem(&self, g: &Goal, f: &ReprFun) -> Result<bool, OracleError> {
        let base = g.max_sem_index().max(f.max_var()) + 1 + self.params.fresh_shift;
        let mut solver = Solver { oracle: self, f, base, work: 0 };
        solver.solve(&Arc::new(g.clone()), self.params.step_index, &Subst::empty(), base, &Rc::new(Cont::Done))
    }

    /// Membership in the denotation of a state.
    pub fn in_state_sem(&self, s: &State, f: &ReprFun) -> Result<bool, OracleError> {
        match s {
            State::Leaf { goal, subst, .. } => Ok(in_subst_sem(subst, f) && self.in_den_sem(goal, f)?),
            State::Sum(_, l, r) => Ok(self.in_state_sem(l, f)? || self.in_state_sem(r, f)?),
            State::Prod(l, g) => Ok(self.in_state_sem(l, f)? && self.in_den_sem(g, f)?),
        }
    }

    fn admissible(&self, t: &Term) -> bool {
        fn ctors_ok(o: &Oracle<'_>, t: &Term) -> bool {
            match t {
                Term::Var(_) => true,
                Term::Ctor(c, args) => {
                    o.ctors.contains(&(c.clone(), args.len())) && args.iter().all(|a| ctors_ok(o, a))
                }
            }
        }
        t.depth() <= self.params.witness_depth() && ctors_ok(self, t)
    }
}

/// `f ∈ ⟦σ⟧` for idempotent `σ`: `f` agrees with its own grounding of `σ`.
pub fn in_subst_sem(sigma: &Subst, f: &ReprFun) -> bool {
    debug_assert!(sigma.is_idempotent());
    sigma.iter().all(|(v, t)| *f.get(v) == ground(f, t))
}

enum Cont {
    Done,
    Then(Arc<Goal>, u32, Rc<Cont>),
}

struct Solver<'o, 'a> {
    oracle: &'o Oracle<'a>,
    f: &'o ReprFun,
    /// Variables below this index are read from `f`; the rest are witnesses.
    base: u32,
    work: u64,
}

impl Solver<'_, '_> {
    fn resolve(&self, t: &Term, theta: &Subst) -> Term {
        match t {
            Term::Var(Var::Sem(i)) if *i < self.base => self.f.get(*i).clone(),
            Term::Var(Var::Sem(i)) => theta.get(*i).cloned().unwrap_or_else(|| t.clone()),
            Term::Var(Var::Syn(x)) => panic!("free syntactic variable {x}"),
            Term::Ctor(c, args) => Term::Ctor(c.clone(), args.iter().map(|a| self.resolve(a, theta)).collect()),
        }
    }

    fn solve(&mut self, g: &Arc<Goal>, index: u32, theta: &Subst, next: u32, k: &Rc<Cont>) -> Result<bool, OracleError> {
        self.work += 1;
        if self.work > self.oracle.params.work_limit {
            return Err(OracleError::Inconclusive { work: self.work });
        }
        match &**g {
            Goal::Unify(a, b) => {
                let (a, b) = (self.resolve(a, theta), self.resolve(b, theta));
                let Ok(u) = mgu(&a, &b) else { return Ok(false) };
                let theta = compose(&u, theta);
                if theta.iter().any(|(_, t)| !self.oracle.admissible(t)) {
                    return Ok(false);
                }
                self.resume(&theta, next, k)
            }
            Goal::Conj(a, b) => self.solve(a, index, theta, next, &Rc::new(Cont::Then(b.clone(), index, k.clone()))),
            Goal::Disj(a, b) => Ok(self.solve(a, index, theta, next, k)? || self.solve(b, index, theta, next, k)?),
            Goal::Fresh(x, body) => {
                if !self.oracle.has_nullary {
                    return Ok(false);
                }
                let body = subst_goal(body, &Var::Syn(x.clone()), &Term::sem(next));
                self.solve(&Arc::new(body), index, theta, next + 1, k)
            }
            Goal::Invoke(r, args) => {
                if index == 0 {
                    return Ok(false);
                }
                let def = self.oracle.spec.def(r).unwrap_or_else(|| panic!("undefined relation `{r}`"));
                let bindings: Vec<(Var, Term)> =
                    def.params.iter().map(|p| Var::Syn(p.clone())).zip(args.iter().cloned()).collect();
                let body = subst_goal_many(&def.body, &bindings);
                self.solve(&Arc::new(body), index - 1, theta, next, k)
            }
            Goal::Fail => Ok(false),
            Goal::Cut => self.resume(theta, next, k),
        }
    }

    fn resume(&mut self, theta: &Subst, next: u32, k: &Rc<Cont>) -> Result<bool, OracleError> {
        match &**k {
            Cont::Done => Ok(true),
            Cont::Then(g, index, rest) => self.solve(g, *index, theta, next, rest),
        }
    }
}
