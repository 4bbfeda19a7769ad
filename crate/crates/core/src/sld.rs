//! SLD resolution with cut.
//!
//! Sums never swap, so the left operand runs to exhaustion before the right
//! one starts. Answers of the left operand of a conjunction fork the
//! remaining conjunction with a `⊛` sum. A cut leaf answers and raises a cut
//! signal; on its way to the root the signal discards the right operand of
//! every `⊛` it passes and of the first `⊕`, where it stops.

use crate::machine::{advance_with, descend, leaf_step, unwrap_state, CutSignal, Frame, Rule, Search, Transition};
use crate::state::{ExtState, Label, State, SumMark};
use crate::syntax::{Goal, Spec};
use crate::unify::Subst;

#[derive(Clone, Copy, Debug)]
pub struct Sld<'a> {
    spec: &'a Spec,
    literal_ast_swap: bool,
}

impl<'a> Sld<'a> {
    pub fn new(spec: &'a Spec) -> Self {
        Sld { spec, literal_ast_swap: false }
    }

    /// When set, a `⊛` sum swaps its operands after a non-final step of the
    /// left operand (like an interleaving `⊕`) instead of keeping
    /// depth-first order.
    pub fn with_literal_ast_swap(mut self, on: bool) -> Self {
        self.literal_ast_swap = on;
        self
    }
}

impl Search for Sld<'_> {
    fn step(&self, s: &State) -> Transition {
        let (goal, subst, n, frames) = descend(s);
        let leaf = leaf_step(self.spec, goal, subst, n, None, true);
        let axiom = leaf.rule;
        let mut label = leaf.label;
        let mut next = leaf.next;
        let mut signal = leaf.signal;
        let mut rule = axiom;

        for frame in frames.into_iter().rev() {
            let answered = matches!(label, Label::Answer(..));
            let cutting = signal == CutSignal::Cut;
            match frame {
                Frame::SumLeft(SumMark::Disj, right) => {
                    if cutting {
                        // The right branch is dropped and the signal absorbed.
                        rule = match (next.is_some(), answered) {
                            (false, false) => Rule::SumStopC,
                            (false, true) => Rule::SumStopAnsC,
                            (true, false) => Rule::SumStepC,
                            (true, true) => Rule::SumStepAnsC,
                        };
                        signal = CutSignal::NoCut;
                    } else {
                        match next {
                            None => {
                                rule = if answered { Rule::SumStopAns } else { Rule::SumStop };
                                next = Some((*right).clone());
                            }
                            Some(left) => {
                                rule = if answered { Rule::DisjStepAns } else { Rule::DisjStep };
                                next = Some(State::Sum(SumMark::Disj, left.into(), right));
                            }
                        }
                    }
                }
                Frame::SumLeft(SumMark::Prod, right) => {
                    if cutting {
                        rule = match (next.is_some(), answered) {
                            (false, false) => Rule::AstStopC,
                            (false, true) => Rule::AstStopAnsC,
                            (true, false) => Rule::AstStepC,
                            (true, true) => Rule::AstStepAnsC,
                        };
                    } else {
                        match next {
                            None => {
                                rule = if answered { Rule::AstStopAns } else { Rule::AstStop };
                                next = Some((*right).clone());
                            }
                            Some(left) => {
                                rule = if answered { Rule::AstStepAns } else { Rule::AstStep };
                                next = Some(if self.literal_ast_swap {
                                    State::Sum(SumMark::Prod, right, left.into())
                                } else {
                                    State::Sum(SumMark::Prod, left.into(), right)
                                });
                            }
                        }
                    }
                }
                Frame::ProdLeft(g) => {
                    let sigma = match &label {
                        Label::Answer(sigma, k) => Some((sigma.clone(), *k)),
                        Label::Step => None,
                    };
                    let (r, r_cut) = match (&next, &sigma) {
                        (None, None) => (Rule::ProdStop, Rule::ProdStopC),
                        (None, Some(_)) => (Rule::ProdStopAns, Rule::ProdStopAnsC),
                        (Some(_), None) => (Rule::ProdStep, Rule::ProdStepC),
                        (Some(_), Some(_)) => (Rule::ProdStepAns, Rule::ProdStepAnsC),
                    };
                    rule = if cutting { r_cut } else { r };
                    next = match (next, sigma) {
                        (None, None) => None,
                        (None, Some((sigma, k))) => Some(State::Leaf { goal: g, subst: sigma, next: k }),
                        (Some(left), None) => Some(State::Prod(left.into(), g)),
                        (Some(left), Some((sigma, k))) => Some(State::ast(
                            State::Leaf { goal: g.clone(), subst: sigma, next: k },
                            State::Prod(left.into(), g),
                        )),
                    };
                    label = Label::Step;
                }
            }
        }
        Transition { label, next: ExtState::from(next), signal, rule, axiom }
    }

    fn advance(&self, s: State) -> Transition {
        let leaf = |g: &Goal, sub: &Subst, n| leaf_step(self.spec, g, sub, n, None, true);
        advance_with(s, leaf, |node, p| {
            let answered = matches!(p.label, Label::Answer(..));
            let cutting = p.signal == CutSignal::Cut;
            match node {
                State::Sum(mark, l, r) => {
                    let disj = *mark == SumMark::Disj;
                    if cutting {
                        p.rule = match (!p.gone, answered, disj) {
                            (false, false, true) => Rule::SumStopC,
                            (false, true, true) => Rule::SumStopAnsC,
                            (true, false, true) => Rule::SumStepC,
                            (true, true, true) => Rule::SumStepAnsC,
                            (false, false, false) => Rule::AstStopC,
                            (false, true, false) => Rule::AstStopAnsC,
                            (true, false, false) => Rule::AstStepC,
                            (true, true, false) => Rule::AstStepAnsC,
                        };
                        if disj {
                            p.signal = CutSignal::NoCut;
                        }
                        if !p.gone {
                            *node = unwrap_state(l.clone());
                        }
                    } else if p.gone {
                        p.rule = match (answered, disj) {
                            (false, true) => Rule::SumStop,
                            (true, true) => Rule::SumStopAns,
                            (false, false) => Rule::AstStop,
                            (true, false) => Rule::AstStopAns,
                        };
                        *node = unwrap_state(r.clone());
                        p.gone = false;
                    } else {
                        p.rule = match (answered, disj) {
                            (false, true) => Rule::DisjStep,
                            (true, true) => Rule::DisjStepAns,
                            (false, false) => Rule::AstStep,
                            (true, false) => Rule::AstStepAns,
                        };
                        if !disj && self.literal_ast_swap {
                            std::mem::swap(l, r);
                        }
                    }
                }
                State::Prod(_, g) => {
                    let g = g.clone();
                    let (r, r_cut) = match (!p.gone, answered) {
                        (false, false) => (Rule::ProdStop, Rule::ProdStopC),
                        (false, true) => (Rule::ProdStopAns, Rule::ProdStopAnsC),
                        (true, false) => (Rule::ProdStep, Rule::ProdStepC),
                        (true, true) => (Rule::ProdStepAns, Rule::ProdStepAnsC),
                    };
                    p.rule = if cutting { r_cut } else { r };
                    if let Label::Answer(sigma, k) = std::mem::replace(&mut p.label, Label::Step) {
                        let fork = State::Leaf { goal: g, subst: sigma, next: k };
                        if p.gone {
                            *node = fork;
                            p.gone = false;
                        } else {
                            let prod = std::mem::replace(node, fork.clone());
                            *node = State::ast(fork, prod);
                        }
                    }
                }
                State::Leaf { .. } => unreachable!(),
            }
        })
    }
}
