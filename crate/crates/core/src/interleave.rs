//! Interleaving search as a deterministic labeled transition system.
//!
//! A step always advances the leftmost leaf. After a sum's left operand
//! takes a step that does not finish it, the operands swap places, which is
//! what makes the search fair.

use crate::machine::{advance_with, descend, leaf_step, unwrap_state, CutSignal, Frame, Mutation, Rule, Search, Transition};
use crate::state::{ExtState, Label, State};
use crate::syntax::{free_vars_ordered, subst_goal_many, Goal, Name, Spec, Term, Var};
use crate::unify::Subst;

/// Interleaving search over the definitions of a specification.
#[derive(Clone, Copy, Debug)]
pub struct Interleaving<'a> {
    spec: &'a Spec,
    mutation: Option<Mutation>,
}

impl<'a> Interleaving<'a> {
    pub fn new(spec: &'a Spec) -> Self {
        Interleaving { spec, mutation: None }
    }

    #[doc(hidden)]
    pub fn with_mutation(spec: &'a Spec, mutation: Mutation) -> Self {
        Interleaving { spec, mutation: Some(mutation) }
    }
}

/// The semantic variable allocated for each free variable of the query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryVars(pub Vec<(Name, u32)>);

impl QueryVars {
    pub fn indices(&self) -> Vec<u32> {
        self.0.iter().map(|(_, i)| *i).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `⟨g', ε, k⟩` where `g'` is the query with its free variables, in order of
/// first occurrence, replaced by `α1 … αk`.
pub fn initial_state(spec: &Spec) -> (State, QueryVars) {
    let mut names = Vec::new();
    let mut bindings = Vec::new();
    for (i, v) in free_vars_ordered(&spec.query).into_iter().enumerate() {
        let Var::Syn(name) = &v else {
            panic!("query mentions semantic variable {v}");
        };
        let idx = i as u32 + 1;
        names.push((name.clone(), idx));
        bindings.push((v.clone(), Term::sem(idx)));
    }
    let goal = subst_goal_many(&spec.query, &bindings);
    (State::leaf(goal, Subst::empty(), names.len() as u32), QueryVars(names))
}

impl Search for Interleaving<'_> {
    fn step(&self, s: &State) -> Transition {
        let (goal, subst, n, frames) = descend(s);
        let leaf = leaf_step(self.spec, goal, subst, n, self.mutation, false);
        let axiom = leaf.rule;
        let mut label = leaf.label;
        let mut next = leaf.next;
        let mut rule = axiom;

        for frame in frames.into_iter().rev() {
            match frame {
                Frame::SumLeft(mark, right) => {
                    let answered = matches!(label, Label::Answer(..));
                    match next {
                        None => {
                            rule = if answered { Rule::SumStopAns } else { Rule::SumStop };
                            next = Some((*right).clone());
                        }
                        Some(left) => {
                            rule = if answered { Rule::SumStepAns } else { Rule::SumStep };
                            next = Some(State::Sum(mark, right, left.into()));
                        }
                    }
                }
                Frame::ProdLeft(g) => {
                    let (l, n_) = match &label {
                        Label::Answer(sigma, k) => (Some(sigma.clone()), *k),
                        Label::Step => (None, 0),
                    };
                    match (next, l) {
                        (None, None) => {
                            rule = Rule::ProdStop;
                            next = None;
                        }
                        (None, Some(sigma)) => {
                            rule = Rule::ProdStopAns;
                            next = Some(State::Leaf { goal: g, subst: sigma, next: n_ });
                        }
                        (Some(left), None) => {
                            rule = Rule::ProdStep;
                            next = Some(State::Prod(left.into(), g));
                        }
                        (Some(left), Some(sigma)) => {
                            rule = Rule::ProdStepAns;
                            let fork = State::Leaf { goal: g.clone(), subst: sigma, next: n_ };
                            next = Some(State::sum(fork, State::Prod(left.into(), g)));
                        }
                    }
                    label = Label::Step;
                }
            }
        }
        Transition { label, next: ExtState::from(next), signal: CutSignal::NoCut, rule, axiom }
    }

    fn advance(&self, s: State) -> Transition {
        let leaf = |g: &Goal, sub: &Subst, n| leaf_step(self.spec, g, sub, n, self.mutation, false);
        advance_with(s, leaf, |node, p| {
            let answered = matches!(p.label, Label::Answer(..));
            match node {
                State::Sum(_, l, r) => {
                    if p.gone {
                        p.rule = if answered { Rule::SumStopAns } else { Rule::SumStop };
                        *node = unwrap_state(r.clone());
                        p.gone = false;
                    } else {
                        p.rule = if answered { Rule::SumStepAns } else { Rule::SumStep };
                        std::mem::swap(l, r);
                    }
                }
                State::Prod(_, g) => {
                    let g = g.clone();
                    match (std::mem::replace(&mut p.label, Label::Step), p.gone) {
                        (Label::Step, true) => p.rule = Rule::ProdStop,
                        (Label::Answer(sigma, k), true) => {
                            p.rule = Rule::ProdStopAns;
                            *node = State::Leaf { goal: g, subst: sigma, next: k };
                            p.gone = false;
                        }
                        (Label::Step, false) => p.rule = Rule::ProdStep,
                        (Label::Answer(sigma, k), false) => {
                            p.rule = Rule::ProdStepAns;
                            let fork = State::Leaf { goal: g, subst: sigma, next: k };
                            let prod = std::mem::replace(node, fork.clone());
                            *node = State::sum(fork, prod);
                        }
                    }
                }
                State::Leaf { .. } => unreachable!(),
            }
        })
    }
}
