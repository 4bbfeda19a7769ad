//! Machinery shared by both transition systems: rule names, transitions,
//! the leaf axioms, lazy traces, and answer collection.

use std::fmt;
use std::sync::Arc;

use crate::state::{ExtState, Label, State};
use crate::syntax::{subst_goal, subst_goal_many, Goal, Spec, Term, Var};
use crate::unify::{apply, compose, mgu, Subst};

/// Name of the rule that justified a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    UnifyFail,
    UnifySuccess,
    Disj,
    Conj,
    Fresh,
    Invoke,
    Fail,
    Cut,
    SumStop,
    SumStopAns,
    SumStep,
    SumStepAns,
    ProdStop,
    ProdStopAns,
    ProdStep,
    ProdStepAns,
    DisjStep,
    DisjStepAns,
    AstStop,
    AstStopAns,
    AstStep,
    AstStepAns,
    SumStopC,
    SumStopAnsC,
    SumStepC,
    SumStepAnsC,
    AstStopC,
    AstStopAnsC,
    AstStepC,
    AstStepAnsC,
    ProdStopC,
    ProdStopAnsC,
    ProdStepC,
    ProdStepAnsC,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::UnifyFail => "UnifyFail",
            Rule::UnifySuccess => "UnifySuccess",
            Rule::Disj => "Disj",
            Rule::Conj => "Conj",
            Rule::Fresh => "Fresh",
            Rule::Invoke => "Invoke",
            Rule::Fail => "Fail",
            Rule::Cut => "Cut",
            Rule::SumStop => "SumStop",
            Rule::SumStopAns => "SumStopAns",
            Rule::SumStep => "SumStep",
            Rule::SumStepAns => "SumStepAns",
            Rule::ProdStop => "ProdStop",
            Rule::ProdStopAns => "ProdStopAns",
            Rule::ProdStep => "ProdStep",
            Rule::ProdStepAns => "ProdStepAns",
            Rule::DisjStep => "DisjStep",
            Rule::DisjStepAns => "DisjStepAns",
            Rule::AstStop => "AstStop",
            Rule::AstStopAns => "AstStopAns",
            Rule::AstStep => "AstStep",
            Rule::AstStepAns => "AstStepAns",
            Rule::SumStopC => "SumStopC",
            Rule::SumStopAnsC => "SumStopAnsC",
            Rule::SumStepC => "SumStepC",
            Rule::SumStepAnsC => "SumStepAnsC",
            Rule::AstStopC => "AstStopC",
            Rule::AstStopAnsC => "AstStopAnsC",
            Rule::AstStepC => "AstStepC",
            Rule::AstStepAnsC => "AstStepAnsC",
            Rule::ProdStopC => "ProdStopC",
            Rule::ProdStopAnsC => "ProdStopAnsC",
            Rule::ProdStepC => "ProdStepC",
            Rule::ProdStepAnsC => "ProdStepAnsC",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutSignal {
    NoCut,
    Cut,
}

/// One transition `s --label--> next`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub label: Label,
    pub next: ExtState,
    /// Always [`CutSignal::NoCut`] for interleaving search.
    pub signal: CutSignal,
    /// The rule at the root of the derivation.
    pub rule: Rule,
    /// The axiom at the leaf of the derivation.
    pub axiom: Rule,
}

/// A deterministic transition system over [`State`].
pub trait Search {
    /// The unique transition out of a well-formed non-terminal state.
    fn step(&self, s: &State) -> Transition;

    /// Same transition as [`Search::step`], taking ownership so that the
    /// unshared parts of `s` are reused for the successor.
    fn advance(&self, s: State) -> Transition {
        self.step(&s)
    }
}

/// Deliberate defects used to check that the differential checks catch a
/// broken engine.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// UnifySuccess reports the new unifier without composing it with the
    /// accumulated substitution.
    DropComposition,
}

/// Result of an axiom applied to a leaf `⟨g, σ, n⟩`.
pub(crate) struct LeafStep {
    pub label: Label,
    pub next: Option<State>,
    pub signal: CutSignal,
    pub rule: Rule,
}

pub(crate) fn leaf_step(
    spec: &Spec,
    goal: &Goal,
    subst: &Subst,
    n: u32,
    mutation: Option<Mutation>,
    allow_cut: bool,
) -> LeafStep {
    let plain = |next: Option<State>, rule| LeafStep { label: Label::Step, next, signal: CutSignal::NoCut, rule };
    match goal {
        Goal::Unify(t1, t2) => match mgu(&apply(subst, t1), &apply(subst, t2)) {
            Ok(u) => {
                let sigma = match mutation {
                    Some(Mutation::DropComposition) => u,
                    None => compose(&u, subst),
                };
                LeafStep { label: Label::Answer(sigma, n), next: None, signal: CutSignal::NoCut, rule: Rule::UnifySuccess }
            }
            Err(_) => plain(None, Rule::UnifyFail),
        },
        Goal::Disj(g1, g2) => plain(
            Some(State::sum(State::leaf(g1.clone(), subst.clone(), n), State::leaf(g2.clone(), subst.clone(), n))),
            Rule::Disj,
        ),
        Goal::Conj(g1, g2) => plain(Some(State::prod(State::leaf(g1.clone(), subst.clone(), n), g2.clone())), Rule::Conj),
        Goal::Fresh(x, body) => {
            let body = subst_goal(body, &Var::Syn(x.clone()), &Term::sem(n + 1));
            plain(Some(State::leaf(body, subst.clone(), n + 1)), Rule::Fresh)
        }
        Goal::Invoke(r, args) => {
            let def = spec.def(r).unwrap_or_else(|| panic!("invocation of undefined relation `{r}`"));
            assert_eq!(def.params.len(), args.len(), "arity mismatch invoking `{r}`");
            let bindings: Vec<(Var, Term)> =
                def.params.iter().map(|p| Var::Syn(p.clone())).zip(args.iter().cloned()).collect();
            let body = subst_goal_many(&def.body, &bindings);
            plain(Some(State::leaf(body, subst.clone(), n)), Rule::Invoke)
        }
        Goal::Fail => plain(None, Rule::Fail),
        Goal::Cut => {
            assert!(allow_cut, "cut reached outside SLD search");
            LeafStep { label: Label::Answer(subst.clone(), n), next: None, signal: CutSignal::Cut, rule: Rule::Cut }
        }
    }
}

/// One pending ancestor of the leaf being stepped.
pub(crate) enum Frame {
    SumLeft(crate::state::SumMark, Arc<State>),
    ProdLeft(Arc<Goal>),
}

/// Splits `s` into its leftmost leaf and the path of ancestors (root first).
pub(crate) fn descend(s: &State) -> (&Arc<Goal>, &Subst, u32, Vec<Frame>) {
    let mut frames = Vec::new();
    let mut cur = s;
    loop {
        match cur {
            State::Leaf { goal, subst, next } => return (goal, subst, *next, frames),
            State::Sum(mark, l, r) => {
                frames.push(Frame::SumLeft(*mark, r.clone()));
                cur = l;
            }
            State::Prod(l, g) => {
                frames.push(Frame::ProdLeft(g.clone()));
                cur = l;
            }
        }
    }
}

/// Outcome of the part of a derivation below the current ancestor.
pub(crate) struct Pending {
    pub label: Label,
    /// The subtree was consumed: its successor is `◇`.
    pub gone: bool,
    pub signal: CutSignal,
    pub rule: Rule,
}

/// Steps `s` in place. `leaf` applies the axiom to the leftmost leaf, then
/// `frame` rewrites each ancestor bottom-up, given the node whose left child
/// already holds the child's successor (stale if `gone`).
pub(crate) fn advance_with(
    mut s: State,
    leaf: impl FnOnce(&Goal, &Subst, u32) -> LeafStep,
    mut frame: impl FnMut(&mut State, &mut Pending),
) -> Transition {
    let mut path: Vec<*mut State> = Vec::new();
    let mut cur: *mut State = &mut s;
    loop {
        // SAFETY: `cur` points either at `s` or into an Arc made unique by
        // `make_mut`; no other reference to that node is live.
        match unsafe { &mut *cur } {
            State::Leaf { .. } => break,
            State::Sum(_, l, _) | State::Prod(l, _) => {
                path.push(cur);
                cur = Arc::make_mut(l);
            }
        }
    }
    // SAFETY: as above; the ancestors are only touched after this borrow ends.
    let node = unsafe { &mut *cur };
    let State::Leaf { goal, subst, next } = &*node else { unreachable!() };
    let step = leaf(goal, subst, *next);
    let mut p = Pending { label: step.label, gone: step.next.is_none(), signal: step.signal, rule: step.rule };
    if let Some(n) = step.next {
        *node = n;
    }
    while let Some(a) = path.pop() {
        // SAFETY: every descendant of `a` on the path has been handled, and
        // each node is visited once.
        frame(unsafe { &mut *a }, &mut p);
    }
    let next = if p.gone { ExtState::Stop } else { ExtState::Running(s) };
    Transition { label: p.label, next, signal: p.signal, rule: p.rule, axiom: step.rule }
}

/// The state held by `a`, without copying when `a` is unshared.
pub(crate) fn unwrap_state(a: Arc<State>) -> State {
    Arc::try_unwrap(a).unwrap_or_else(|a| (*a).clone())
}

/// Lazily unfolds the transitions from a state.
pub struct Trace<'a, S: Search + ?Sized> {
    search: &'a S,
    current: Option<State>,
}

impl<'a, S: Search + ?Sized> Trace<'a, S> {
    pub fn new(search: &'a S, start: State) -> Self {
        Trace { search, current: Some(start) }
    }

    /// The state the next transition will start from, if any.
    pub fn current(&self) -> Option<&State> {
        self.current.as_ref()
    }
}

impl<S: Search + ?Sized> Iterator for Trace<'_, S> {
    type Item = Transition;

    fn next(&mut self) -> Option<Transition> {
        let s = self.current.take()?;
        let t = self.search.advance(s);
        self.current = match &t.next {
            ExtState::Stop => None,
            ExtState::Running(next) => Some(next.clone()),
        };
        Some(t)
    }
}

pub fn trace<S: Search + ?Sized>(search: &S, start: State) -> Trace<'_, S> {
    Trace::new(search, start)
}

/// Answers collected from a bounded prefix of a trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Answers {
    pub answers: Vec<(Subst, u32)>,
    /// Number of steps taken when each answer was produced.
    pub at_step: Vec<usize>,
    /// `Invoke` transitions taken before each answer.
    pub unfoldings: Vec<u32>,
    /// True iff the trace ended within the budgets.
    pub exhausted: bool,
    pub steps: usize,
}

/// Collects the answers of `trace(start)` until the trace ends, `max_answers`
/// answers are found, or `max_steps` transitions have been taken.
pub fn answers<S: Search + ?Sized>(search: &S, start: State, max_answers: usize, max_steps: usize) -> Answers {
    let mut out = Answers { answers: Vec::new(), at_step: Vec::new(), unfoldings: Vec::new(), exhausted: false, steps: 0 };
    if max_answers == 0 {
        return out;
    }
    let mut cur = start;
    let mut invokes = 0;
    while out.steps < max_steps {
        let t = search.advance(cur);
        out.steps += 1;
        if t.axiom == Rule::Invoke {
            invokes += 1;
        }
        if let Label::Answer(s, n) = t.label {
            out.answers.push((s, n));
            out.at_step.push(out.steps);
            out.unfoldings.push(invokes);
        }
        match t.next {
            ExtState::Stop => {
                out.exhausted = true;
                break;
            }
            ExtState::Running(next) => cur = next,
        }
        if out.answers.len() >= max_answers {
            break;
        }
    }
    out
}

/// Length of the trace from `start` if it ends within `budget` steps.
pub fn trace_length<S: Search + ?Sized>(search: &S, start: State, budget: usize) -> Option<usize> {
    let mut cur = start;
    for i in 1..=budget {
        match search.advance(cur).next {
            ExtState::Stop => return Some(i),
            ExtState::Running(next) => cur = next,
        }
    }
    None
}

/// Debug record of one transition.
#[derive(Clone, Debug)]
pub struct TraceEvent {
    pub step: usize,
    pub rule: Rule,
    pub axiom: Rule,
    pub label: Label,
    pub signal: CutSignal,
    /// Rendering of the state the transition started from.
    pub state: String,
}

pub fn trace_events<S: Search + ?Sized>(search: &S, start: State, budget: usize) -> Vec<TraceEvent> {
    let mut out = Vec::new();
    let mut cur = Some(start);
    while let Some(s) = cur.take() {
        if out.len() >= budget {
            break;
        }
        let t = search.step(&s);
        out.push(TraceEvent {
            step: out.len() + 1,
            rule: t.rule,
            axiom: t.axiom,
            label: t.label,
            signal: t.signal,
            state: s.to_string(),
        });
        cur = t.next.into_state();
    }
    out
}
