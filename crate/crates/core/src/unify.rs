//! Idempotent substitutions over semantic variables and syntactic
//! first-order unification with occurs check.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::syntax::{Args, Term, Var};

/// An idempotent substitution: no variable of its domain occurs in any of its
/// images, and no variable is bound to itself.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subst(Arc<BTreeMap<u32, Term>>);

impl Subst {
    /// The empty substitution ε.
    pub fn empty() -> Subst {
        Subst::default()
    }

    /// Builds a substitution from bindings, checking the idempotence invariant.
    pub fn from_bindings(bindings: impl IntoIterator<Item = (u32, Term)>) -> Option<Subst> {
        let s = Subst(Arc::new(bindings.into_iter().collect()));
        s.is_idempotent().then_some(s)
    }

    pub fn get(&self, var: u32) -> Option<&Term> {
        self.0.get(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Term)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }

    pub fn domain(&self) -> BTreeSet<u32> {
        self.0.keys().copied().collect()
    }

    /// Free variables of the images.
    pub fn range(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let mut seen = HashSet::new();
        for t in self.0.values() {
            collect_sem_shared(t, &mut out, &mut seen);
        }
        out
    }

    /// Identity of the shared map, for caches keyed on sharing.
    pub(crate) fn as_ptr(&self) -> *const () {
        Arc::as_ptr(&self.0) as *const ()
    }

    pub fn is_idempotent(&self) -> bool {
        let range = self.range();
        self.0.iter().all(|(k, t)| !range.contains(k) && *t != Term::sem(*k))
    }

    /// Largest variable index in the domain or range (0 when empty).
    pub fn max_var(&self) -> u32 {
        let dom = self.0.keys().next_back().copied().unwrap_or(0);
        dom.max(self.range().last().copied().unwrap_or(0))
    }
}

/// Collects semantic variables, visiting each shared argument list once.
fn collect_sem_shared(t: &Term, out: &mut BTreeSet<u32>, seen: &mut HashSet<*const Term>) {
    match t {
        Term::Var(Var::Sem(i)) => {
            out.insert(*i);
        }
        Term::Var(Var::Syn(_)) => {}
        Term::Ctor(_, args) => {
            if !args.is_empty() && seen.insert(args.as_ptr()) {
                args.iter().for_each(|a| collect_sem_shared(a, out, seen));
            }
        }
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "α{k} ↦ {t}")?;
        }
        f.write_str("}")
    }
}

/// `tσ`: replaces every variable of `dom(σ)` by its image.
pub fn apply(s: &Subst, t: &Term) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    apply_changed(s, t).unwrap_or_else(|| t.clone())
}

/// `tσ`, or `None` when `t` mentions no variable of `dom(σ)`.
fn apply_changed(s: &Subst, t: &Term) -> Option<Term> {
    Applier { s, memo: HashMap::new() }.apply(t)
}

/// Applies a substitution to many terms, rewriting each shared argument
/// list once. The terms being rewritten must outlive the applier, since
/// argument lists are remembered by address.
struct Applier<'a> {
    s: &'a Subst,
    memo: HashMap<*const Term, Option<Args>>,
}

impl Applier<'_> {
    fn apply(&mut self, t: &Term) -> Option<Term> {
        match t {
            Term::Var(Var::Sem(i)) => self.s.get(*i).cloned(),
            Term::Var(Var::Syn(_)) => None,
            Term::Ctor(_, args) if args.is_empty() => None,
            Term::Ctor(name, args) => {
                let key = args.as_ptr();
                let new = match self.memo.get(&key) {
                    Some(hit) => hit.clone(),
                    None => {
                        let changed: Vec<Option<Term>> = args.iter().map(|a| self.apply(a)).collect();
                        let new = changed.iter().any(Option::is_some).then(|| {
                            changed.into_iter().zip(args.iter()).map(|(c, a)| c.unwrap_or_else(|| a.clone())).collect()
                        });
                        self.memo.insert(key, new.clone());
                        new
                    }
                };
                new.map(|args| Term::Ctor(name.clone(), args))
            }
        }
    }
}

/// `new ∘ old`: the substitution that applies `old` first, then `new`.
///
/// Requires disjoint domains and `ran(new) ∩ dom(old) = ∅`, which holds
/// whenever `new` unifies terms already instantiated by `old`.
pub fn compose(new: &Subst, old: &Subst) -> Subst {
    if new.is_empty() {
        return old.clone();
    }
    if old.is_empty() {
        return new.clone();
    }
    debug_assert!(
        new.0.keys().all(|k| !old.0.contains_key(k)),
        "compose: overlapping domains {new} / {old}"
    );
    let mut applier = Applier { s: new, memo: HashMap::new() };
    let mut out: BTreeMap<u32, Term> =
        old.0.iter().map(|(k, t)| (*k, applier.apply(t).unwrap_or_else(|| t.clone()))).collect();
    for (k, t) in new.0.iter() {
        out.insert(*k, t.clone());
    }
    out.retain(|k, t| *t != Term::sem(*k));
    let result = Subst(Arc::new(out));
    debug_assert!(result.is_idempotent(), "compose produced a non-idempotent result {result}");
    result
}

pub fn occurs(var: u32, t: &Term) -> bool {
    fn go(var: u32, t: &Term, seen: &mut HashSet<*const Term>) -> bool {
        match t {
            Term::Var(Var::Sem(i)) => *i == var,
            Term::Var(Var::Syn(_)) => false,
            Term::Ctor(_, args) => {
                !args.is_empty() && seen.insert(args.as_ptr()) && args.iter().any(|a| go(var, a, seen))
            }
        }
    }
    go(var, t, &mut HashSet::new())
}

/// Number of distinct variables occurring in the two terms together.
pub fn fv_measure(a: &Term, b: &Term) -> usize {
    let mut vars = a.vars();
    b.vars_into(&mut vars);
    vars.len()
}

/// Restricts `s` to the given variables.
pub fn restrict(s: &Subst, vars: &BTreeSet<u32>) -> Subst {
    Subst(Arc::new(s.0.iter().filter(|(k, _)| vars.contains(k)).map(|(k, t)| (*k, t.clone())).collect()))
}

/// Why two terms have no unifier. This is an ordinary outcome of unification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoUnifier {
    Clash { left: Term, right: Term },
    Occurs { var: u32, term: Term },
}

/// Most general unifier of two semantic terms, in idempotent form.
///
/// Scans for the leftmost mismatch of the instantiated terms; a
/// variable/term mismatch binds the variable (after an occurs check) and the
/// scan resumes on the instantiated residual problem. Between two variables
/// the lower-indexed one is bound to the higher-indexed one.
pub fn mgu(t1: &Term, t2: &Term) -> Result<Subst, NoUnifier> {
    let mut acc: BTreeMap<u32, Term> = BTreeMap::new();
    // Pairs still to be matched, leftmost on top of the stack.
    let mut stack: Vec<(Term, Term)> = vec![(t1.clone(), t2.clone())];
    let mut measure = if cfg!(debug_assertions) { fv_measure(t1, t2) } else { 0 };

    while let Some((a, b)) = stack.pop() {
        let a = instantiate(&acc, &a);
        let b = instantiate(&acc, &b);
        match (&a, &b) {
            (Term::Var(Var::Sem(x)), Term::Var(Var::Sem(y))) if x == y => continue,
            (Term::Var(Var::Sem(x)), Term::Var(Var::Sem(y))) => {
                let (lo, hi) = if x < y { (*x, *y) } else { (*y, *x) };
                bind(&mut acc, lo, Term::sem(hi));
            }
            (Term::Var(Var::Sem(x)), other) | (other, Term::Var(Var::Sem(x))) => {
                if occurs(*x, other) {
                    return Err(NoUnifier::Occurs { var: *x, term: other.clone() });
                }
                bind(&mut acc, *x, other.clone());
            }
            (Term::Ctor(f, xs), Term::Ctor(g, ys)) if f == g && Arc::ptr_eq(xs, ys) => continue,
            (Term::Ctor(f, xs), Term::Ctor(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(NoUnifier::Clash { left: a.clone(), right: b.clone() });
                }
                for pair in xs.iter().cloned().zip(ys.iter().cloned()).rev() {
                    stack.push(pair);
                }
                continue;
            }
            _ => panic!("mgu: syntactic variable in {a} =?= {b}"),
        }
        if cfg!(debug_assertions) {
            // Each variable elimination strictly shrinks the residual problem.
            let next = fv_measure(&instantiate(&acc, t1), &instantiate(&acc, t2));
            debug_assert!(next < measure, "fv measure did not decrease: {measure} -> {next}");
            measure = next;
        }
    }
    Ok(Subst(Arc::new(acc)))
}

fn instantiate(acc: &BTreeMap<u32, Term>, t: &Term) -> Term {
    if acc.is_empty() {
        return t.clone();
    }
    t.rename(&mut |v| match v {
        Var::Sem(i) => acc.get(i).cloned(),
        Var::Syn(_) => None,
    })
}

/// Adds `var ↦ t` (with `t` already instantiated) and keeps the accumulator
/// idempotent by eliminating `var` from the existing images.
fn bind(acc: &mut BTreeMap<u32, Term>, var: u32, t: Term) {
    let single = Term::sem(var);
    for image in acc.values_mut() {
        if occurs(var, image) {
            *image = image.replace(&Var::Sem(var), &t);
        }
    }
    debug_assert!(t != single);
    acc.insert(var, t);
}
