//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kanren::machine::{trace, Search};
use kanren::oracle::{enum_ground_terms, ground, ReprFun};
use kanren::reify::reify;
use kanren::syntax::{subst_goal, subst_goal_many, Name, RelDef};
use kanren::{mgu, Goal, Label, QueryVars, Spec, State, Subst, Term, Var};

pub type Sig = Vec<(Name, usize)>;

pub fn sig(items: &[(&str, usize)]) -> Sig {
    items.iter().map(|(n, a)| (Name::from(*n), *a)).collect()
}

pub fn nil() -> Term {
    Term::atom("Nil")
}

pub fn cons(h: Term, t: Term) -> Term {
    Term::ctor("Cons", vec![h, t])
}

pub fn list(items: &[Term]) -> Term {
    items.iter().rev().fold(nil(), |acc, x| cons(x.clone(), acc))
}

pub const APPENDO: &str = "appendo x y xy =
  (x === Nil /\\ xy === y) \\/
  (fresh h t ty . x === Cons(h, t) /\\ xy === Cons(h, ty) /\\ appendo t y ty);
";

/// Runs `f` on a thread with a large stack; deep terms are dropped recursively.
pub fn big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new().stack_size(512 << 20).spawn(f).unwrap().join().unwrap()
}

/// Knobs for goal generation.
#[derive(Clone, Debug)]
pub struct GoalShape {
    pub sig: Sig,
    /// Relations available for invocation, with arities.
    pub rels: Vec<(String, usize)>,
    pub max_depth: usize,
    pub term_depth: usize,
    pub cut: bool,
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    fresh_names: u32,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh_names: 0 }
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn rng_range(&mut self, lo: u32, hi: u32) -> u32 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    /// At most three constructors of arity at most two, the first nullary.
    pub fn signature(&mut self) -> Sig {
        let n = self.rng.gen_range(1..=3);
        let names = ["A", "B", "C"];
        (0..n).map(|i| (Name::from(names[i]), if i == 0 { 0 } else { self.rng.gen_range(0..=2) })).collect()
    }

    pub fn term(&mut self, sig: &Sig, vars: &[Term], depth: usize) -> Term {
        let leaf = depth <= 1 || self.chance(0.4);
        if leaf {
            if !vars.is_empty() && self.chance(0.6) {
                return vars.choose(&mut self.rng).unwrap().clone();
            }
            let nullary: Vec<&(Name, usize)> = sig.iter().filter(|(_, a)| *a == 0).collect();
            let (c, _) = nullary.choose(&mut self.rng).unwrap();
            return Term::Ctor(c.clone(), Vec::new().into());
        }
        let (c, a) = sig.choose(&mut self.rng).unwrap().clone();
        let args: Vec<Term> = (0..a).map(|_| self.term(sig, vars, depth - 1)).collect();
        Term::Ctor(c, args.into())
    }

    pub fn goal(&mut self, shape: &GoalShape, vars: &[Term]) -> Goal {
        self.goal_at(shape, &mut vars.to_vec(), shape.max_depth)
    }

    fn goal_at(&mut self, shape: &GoalShape, vars: &mut Vec<Term>, depth: usize) -> Goal {
        if depth <= 1 || self.chance(0.3) {
            return self.leaf_goal(shape, vars);
        }
        match self.below(5) {
            0 | 1 => {
                let a = self.goal_at(shape, vars, depth - 1);
                let b = self.goal_at(shape, vars, depth - 1);
                Goal::conj(a, b)
            }
            2 | 3 => {
                let a = self.goal_at(shape, vars, depth - 1);
                let b = self.goal_at(shape, vars, depth - 1);
                Goal::disj(a, b)
            }
            _ => {
                self.fresh_names += 1;
                let x = format!("v{}", self.fresh_names);
                vars.push(Term::var(&x));
                let body = self.goal_at(shape, vars, depth - 1);
                vars.pop();
                Goal::fresh(&x, body)
            }
        }
    }

    fn leaf_goal(&mut self, shape: &GoalShape, vars: &[Term]) -> Goal {
        let roll = self.below(100);
        if shape.cut && roll < 8 {
            return Goal::Cut;
        }
        if roll < 12 {
            return Goal::Fail;
        }
        if roll < 40 && !shape.rels.is_empty() {
            let (r, a) = shape.rels.choose(&mut self.rng).unwrap().clone();
            let args = (0..a).map(|_| self.term(&shape.sig, vars, shape.term_depth)).collect();
            return Goal::invoke(&r, args);
        }
        let a = self.term(&shape.sig, vars, shape.term_depth);
        let b = self.term(&shape.sig, vars, shape.term_depth);
        Goal::unify(a, b)
    }

    /// A spec with at most two relations and a query over at most two
    /// variables `q0`, `q1`.
    pub fn spec(&mut self, sig: &Sig, max_depth: usize, cut: bool) -> Spec {
        let nrels = self.rng.gen_range(0..=2);
        let rels: Vec<(String, usize)> = (0..nrels).map(|i| (format!("r{i}"), self.rng.gen_range(1..=2))).collect();
        let shape = GoalShape { sig: sig.clone(), rels: rels.clone(), max_depth, term_depth: 2, cut };
        let defs = rels
            .iter()
            .map(|(name, arity)| {
                let params: Vec<Name> = (0..*arity).map(|i| Name::from(format!("p{i}").as_str())).collect();
                let vars: Vec<Term> = params.iter().map(|p| Term::var(p)).collect();
                RelDef { name: Name::from(name.as_str()), params, body: self.goal(&shape, &vars) }
            })
            .collect();
        let nq = self.rng.gen_range(1..=2);
        let qvars: Vec<Term> = (0..nq).map(|i| Term::var(&format!("q{i}"))).collect();
        let query = self.goal(&shape, &qvars);
        Spec::new(defs, query)
    }

    /// Same as [`Gen::spec`] but the query is a disjunction at the top.
    pub fn disj_spec(&mut self, sig: &Sig) -> Spec {
        let spec = self.spec(sig, 4, false);
        let shape = self.shape_of(&spec, sig, 3);
        let nq = self.rng.gen_range(1..=2);
        let qvars: Vec<Term> = (0..nq).map(|i| Term::var(&format!("q{i}"))).collect();
        let query = Goal::disj(self.goal(&shape, &qvars), self.goal(&shape, &qvars));
        Spec::new(spec.defs.into_values().collect(), query)
    }

    pub fn shape_of(&self, spec: &Spec, sig: &Sig, max_depth: usize) -> GoalShape {
        GoalShape {
            sig: sig.clone(),
            rels: spec.defs.values().map(|d| (d.name.to_string(), d.params.len())).collect(),
            max_depth,
            term_depth: 2,
            cut: false,
        }
    }

    /// A random idempotent substitution over `α1..=αk`.
    pub fn subst(&mut self, sig: &Sig, k: u32) -> Subst {
        let vars: Vec<Term> = (1..=k).map(Term::sem).collect();
        if k == 0 || self.chance(0.3) {
            return Subst::empty();
        }
        let a = self.term(sig, &vars, 3);
        let b = self.term(sig, &vars, 3);
        mgu(&a, &b).unwrap_or_else(|_| Subst::empty())
    }

    /// A random well-formed state whose goals mention `α1..=αk` and
    /// relations of `spec`. `sld` permits `⊛` sums.
    pub fn state(&mut self, spec: &Spec, sig: &Sig, k: u32, depth: usize, sld: bool) -> State {
        let mut shape = self.shape_of(spec, sig, 4);
        shape.cut = sld && spec.sld;
        let vars: Vec<Term> = (1..=k).map(Term::sem).collect();
        if depth <= 1 || self.chance(0.35) {
            let goal = self.goal(&shape, &vars);
            let subst = self.subst(sig, k);
            let next = k + self.rng.gen_range(0..3);
            return State::leaf(goal, subst, next);
        }
        match self.below(3) {
            0 => {
                let l = self.state(spec, sig, k, depth - 1, sld);
                let r = self.state(spec, sig, k, depth - 1, sld);
                if sld && self.chance(0.5) {
                    State::ast(l, r)
                } else {
                    State::sum(l, r)
                }
            }
            _ => {
                let l = self.state(spec, sig, k, depth - 1, sld);
                let g = self.goal(&shape, &vars);
                State::prod(l, g)
            }
        }
    }

    pub fn fun(&mut self, domain: &[Term], vars: &[u32]) -> ReprFun {
        let mut f = ReprFun::new(domain[0].clone());
        for &v in vars {
            f.set(v, domain.choose(&mut self.rng).unwrap().clone());
        }
        f
    }
}

/// Query goal with its free variables replaced by `α1..αk`, plus `k`.
pub fn closed_query(spec: &Spec) -> (Goal, QueryVars) {
    let (start, vars) = kanren::initial_state(spec);
    match start {
        State::Leaf { goal, .. } => ((*goal).clone(), vars),
        _ => unreachable!(),
    }
}

/// Every answer of a trace that ends within `budget` steps, or `None`.
pub fn finite_answers(search: &dyn Search, start: State, budget: usize) -> Option<Vec<(Subst, u32)>> {
    let mut out = Vec::new();
    let mut run = trace(search, start);
    for _ in 0..budget {
        let Some(t) = run.next() else { return Some(out) };
        if let Label::Answer(s, n) = t.label {
            out.push((s, n));
        }
    }
    if run.current().is_none() {
        Some(out)
    } else {
        None
    }
}

pub fn reified_set(answers: &[(Subst, u32)], vars: &QueryVars) -> BTreeSet<String> {
    answers.iter().map(|(s, _)| reify(s, vars).to_string()).collect()
}

/// Literal reading of the bounded denotational semantics: `fresh` ranges over
/// every ground term of depth at most `depth`, substituted into the body.
pub fn literal_den(spec: &Spec, domain: &[Term], g: &Goal, f: &ReprFun, index: u32) -> bool {
    match g {
        Goal::Unify(a, b) => ground(f, a) == ground(f, b),
        Goal::Conj(a, b) => literal_den(spec, domain, a, f, index) && literal_den(spec, domain, b, f, index),
        Goal::Disj(a, b) => literal_den(spec, domain, a, f, index) || literal_den(spec, domain, b, f, index),
        Goal::Fresh(x, body) => domain
            .iter()
            .any(|t| literal_den(spec, domain, &subst_goal(body, &Var::Syn(x.clone()), t), f, index)),
        Goal::Invoke(r, args) => {
            if index == 0 {
                return false;
            }
            let def = spec.def(r).unwrap();
            let bindings: Vec<(Var, Term)> =
                def.params.iter().map(|p| Var::Syn(p.clone())).zip(args.iter().cloned()).collect();
            literal_den(spec, domain, &subst_goal_many(&def.body, &bindings), f, index - 1)
        }
        Goal::Fail => false,
        Goal::Cut => true,
    }
}

pub fn domain(sig: &Sig, depth: usize) -> Vec<Term> {
    enum_ground_terms(sig, depth).unwrap()
}

/// Every ground list of length at most `n` over the given elements.
pub fn lists_up_to(elems: &[Term], n: usize) -> Vec<Term> {
    let mut out = vec![nil()];
    let mut layer = vec![nil()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|l| elems.iter().map(move |e| cons(e.clone(), l.clone()))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Elements of a ground list, or `None` if `t` is not a proper list.
pub fn as_list(t: &Term) -> Option<Vec<Term>> {
    let mut out = Vec::new();
    let mut cur = t;
    loop {
        match cur {
            Term::Ctor(c, args) if &**c == "Nil" && args.is_empty() => return Some(out),
            Term::Ctor(c, args) if &**c == "Cons" && args.len() == 2 => {
                out.push(args[0].clone());
                cur = &args[1];
            }
            _ => return None,
        }
    }
}
