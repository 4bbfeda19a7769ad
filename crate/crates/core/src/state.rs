//! States and labels of the transition systems.
//!
//! Both search strategies share one state representation. Sums carry a mark
//! recording where they came from; interleaving search only ever builds
//! [`SumMark::Disj`] sums, SLD search additionally builds [`SumMark::Prod`]
//! sums when a conjunction produces an answer.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{free_vars, Goal, Var};
use crate::unify::Subst;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumMark {
    /// `⊕`, created by evaluating a disjunction. Absorbs cut signals.
    Disj,
    /// `⊛`, created while evaluating a conjunction. Transparent to cuts.
    Prod,
}

/// A non-terminal state: a search tree whose leaves are goals in context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum State {
    /// `⟨g, σ, n⟩`: goal, accumulated substitution, number of allocated
    /// semantic variables.
    Leaf { goal: Arc<Goal>, subst: Subst, next: u32 },
    Sum(SumMark, Arc<State>, Arc<State>),
    /// `s ⊗ g`
    Prod(Arc<State>, Arc<Goal>),
}

impl State {
    pub fn leaf(goal: impl Into<Arc<Goal>>, subst: Subst, next: u32) -> State {
        State::Leaf { goal: goal.into(), subst, next }
    }

    pub fn sum(left: State, right: State) -> State {
        State::Sum(SumMark::Disj, Arc::new(left), Arc::new(right))
    }

    pub fn ast(left: State, right: State) -> State {
        State::Sum(SumMark::Prod, Arc::new(left), Arc::new(right))
    }

    pub fn prod(left: State, goal: impl Into<Arc<Goal>>) -> State {
        State::Prod(Arc::new(left), goal.into())
    }

    /// Visits every leaf, left to right.
    pub fn for_each_leaf<'a>(&'a self, mut f: impl FnMut(&'a Goal, &'a Subst, u32)) {
        let mut stack: Vec<&State> = vec![self];
        while let Some(s) = stack.pop() {
            match s {
                State::Leaf { goal, subst, next } => f(goal, subst, *next),
                State::Sum(_, l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                State::Prod(l, _) => stack.push(l),
            }
        }
    }

    /// Smallest variable counter among the leaves.
    pub fn min_counter(&self) -> u32 {
        let mut min = u32::MAX;
        self.for_each_leaf(|_, _, n| min = min.min(n));
        min
    }

    pub fn size(&self) -> usize {
        match self {
            State::Leaf { .. } => 1,
            State::Sum(_, l, r) => 1 + l.size() + r.size(),
            State::Prod(l, _) => 1 + l.size(),
        }
    }

    pub fn contains_mark(&self, mark: SumMark) -> bool {
        match self {
            State::Leaf { .. } => false,
            State::Sum(m, l, r) => *m == mark || l.contains_mark(mark) || r.contains_mark(mark),
            State::Prod(l, _) => l.contains_mark(mark),
        }
    }
}

/// `◇` or a non-terminal state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtState {
    Stop,
    Running(State),
}

impl ExtState {
    pub fn into_state(self) -> Option<State> {
        match self {
            ExtState::Stop => None,
            ExtState::Running(s) => Some(s),
        }
    }

    pub fn is_stop(&self) -> bool {
        matches!(self, ExtState::Stop)
    }
}

impl From<Option<State>> for ExtState {
    fn from(s: Option<State>) -> Self {
        s.map_or(ExtState::Stop, ExtState::Running)
    }
}

/// Transition label: `∘` or an answer `(σ, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Step,
    Answer(Subst, u32),
}

impl Label {
    pub fn answer(&self) -> Option<(&Subst, u32)> {
        match self {
            Label::Step => None,
            Label::Answer(s, n) => Some((s, *n)),
        }
    }
}

fn vars_within(vars: impl IntoIterator<Item = Var>, n: u32) -> bool {
    vars.into_iter().all(|v| matches!(v, Var::Sem(i) if (1..=n).contains(&i)))
}

fn leaf_well_formed(goal: &Goal, subst: &Subst, n: u32) -> bool {
    vars_within(free_vars(goal), n)
        && subst.domain().iter().all(|i| (1..=n).contains(i))
        && subst.range().iter().all(|i| (1..=n).contains(i))
}

/// Well-formedness of a non-terminal state: every goal mentions only
/// allocated semantic variables, and so does every substitution.
pub fn state_well_formed(s: &State) -> bool {
    min_counter_if_well_formed(s).is_some()
}

/// One bottom-up pass; a product's goal is checked against the smallest
/// counter of its left operand.
fn min_counter_if_well_formed(s: &State) -> Option<u32> {
    match s {
        State::Leaf { goal, subst, next } => leaf_well_formed(goal, subst, *next).then_some(*next),
        State::Sum(_, l, r) => Some(min_counter_if_well_formed(l)?.min(min_counter_if_well_formed(r)?)),
        State::Prod(l, g) => {
            let n = min_counter_if_well_formed(l)?;
            vars_within(free_vars(g), n).then_some(n)
        }
    }
}

pub fn well_formed(s: &ExtState) -> bool {
    match s {
        ExtState::Stop => true,
        ExtState::Running(s) => state_well_formed(s),
    }
}

/// Well-formedness along a trace. Successive states share most of their
/// subtrees, so only nodes that are new since the previous check are visited.
#[derive(Default)]
pub struct WellFormedness {
    prev: PtrMap<State, (Arc<State>, Option<u32>)>,
    next: PtrMap<State, (Arc<State>, Option<u32>)>,
    goals: PtrMap<Goal, (Arc<Goal>, Bounds)>,
    substs: PtrMap<(), (Subst, Bounds)>,
}

/// Least and greatest semantic variable index, if any variable occurs.
type Bounds = Option<(u32, u32)>;

type PtrMap<K, V> = HashMap<*const K, V, BuildHasherDefault<PtrHasher>>;

/// Addresses are already well spread; multiply to mix the alignment bits.
#[derive(Default)]
struct PtrHasher(u64);

impl Hasher for PtrHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 = (self.0 << 8 | *b as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
    }

    fn write_usize(&mut self, n: usize) {
        self.0 = (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
}

const CACHE_LIMIT: usize = 1 << 16;

/// Smallest and largest index among `vars`; `None` if one is syntactic.
fn bounds(vars: impl IntoIterator<Item = Var>) -> Bounds {
    vars.into_iter().try_fold((u32::MAX, 0), |(lo, hi), v| match v {
        Var::Sem(i) => Some((lo.min(i), hi.max(i))),
        Var::Syn(_) => None,
    })
}

fn within(b: Bounds, n: u32) -> bool {
    matches!(b, Some((lo, hi)) if (lo >= 1 && hi <= n) || lo == u32::MAX)
}

impl WellFormedness {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, s: &ExtState) -> bool {
        let ExtState::Running(s) = s else { return true };
        let ok = self.min_counter(s).is_some();
        self.prev = std::mem::take(&mut self.next);
        if self.goals.len() > CACHE_LIMIT {
            self.goals.clear();
        }
        if self.substs.len() > CACHE_LIMIT {
            self.substs.clear();
        }
        ok
    }

    fn goal_bounds(&mut self, g: &Arc<Goal>) -> Bounds {
        self.goals.entry(Arc::as_ptr(g)).or_insert_with(|| (g.clone(), bounds(free_vars(g)))).1
    }

    fn subst_bounds(&mut self, s: &Subst) -> Bounds {
        self.substs
            .entry(s.as_ptr())
            .or_insert_with(|| {
                let vars = s.domain().into_iter().chain(s.range()).map(Var::Sem);
                (s.clone(), bounds(vars))
            })
            .1
    }

    fn min_counter(&mut self, s: &State) -> Option<u32> {
        match s {
            State::Leaf { goal, subst, next } => {
                (within(self.goal_bounds(goal), *next) && within(self.subst_bounds(subst), *next)).then_some(*next)
            }
            State::Sum(_, l, r) => Some(self.child(l)?.min(self.child(r)?)),
            // A step always rebuilds the left operand of a product, so only
            // operands of sums are worth remembering.
            State::Prod(l, g) => {
                let n = self.min_counter(l)?;
                within(self.goal_bounds(g), n).then_some(n)
            }
        }
    }

    fn child(&mut self, c: &Arc<State>) -> Option<u32> {
        let key = Arc::as_ptr(c);
        let result = match self.prev.get(&key).or_else(|| self.next.get(&key)) {
            Some((_, r)) => *r,
            None => self.min_counter(c),
        };
        self.next.insert(key, (c.clone(), result));
        result
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Step => f.write_str("∘"),
            Label::Answer(s, n) => write!(f, "({s}, {n})"),
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Leaf { goal, subst, next } => write!(f, "⟨{goal} | {subst} | {next}⟩"),
            State::Sum(SumMark::Disj, l, r) => write!(f, "({l} ⊕ {r})"),
            State::Sum(SumMark::Prod, l, r) => write!(f, "({l} ⊛ {r})"),
            State::Prod(l, g) => write!(f, "({l} ⊗ {g})"),
        }
    }
}

impl fmt::Display for ExtState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtState::Stop => f.write_str("◇"),
            ExtState::Running(s) => write!(f, "{s}"),
        }
    }
}
