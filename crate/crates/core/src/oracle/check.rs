//! Differential checks of a search engine against the oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::interleave::{initial_state, QueryVars};
use crate::machine::{answers, trace, Search};
use crate::reify::{reify, ReifiedAnswer};
use crate::state::{Label, State};
use crate::syntax::{Goal, Name, Spec, Term, Var};
use crate::unify::{apply, restrict, Subst};

use super::den::{in_subst_sem, Oracle, OracleParams};
use super::domain::{enum_ground_terms, ground, ReprFun};
use super::OracleError;

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub params: OracleParams,
    /// Engine answers examined by the soundness check.
    pub max_answers: usize,
    pub max_steps: usize,
    /// Groundings tried per answer; sampled when there are more.
    pub groundings_cap: usize,
    pub seed: u64,
    /// Overrides the constructors collected from the specification.
    pub signature: Option<Vec<(Name, usize)>>,
    /// Refuses to enumerate more candidate functions than this.
    pub max_candidates: u128,
    /// Check each answer at no fewer unfoldings than the engine performed
    /// before producing it.
    pub raise_index: bool,
}

impl CheckConfig {
    pub fn new(depth: usize, step_index: u32) -> CheckConfig {
        CheckConfig {
            params: OracleParams::new(depth, step_index),
            max_answers: 10,
            max_steps: 10_000,
            groundings_cap: 200,
            seed: 0,
            signature: None,
            max_candidates: 2_000_000,
            raise_index: true,
        }
    }

    fn signature(&self, spec: &Spec) -> Vec<(Name, usize)> {
        self.signature.clone().unwrap_or_else(|| spec.signature())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Soundness,
    Completeness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub case: String,
    pub kind: Kind,
    pub witness: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    /// Groundings (soundness) or oracle members (completeness) examined.
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// Cases where the oracle ran out of work.
    pub inconclusive: usize,
    /// Whether the engine's trace ended within the step budget.
    pub exhausted: bool,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
        self.inconclusive += other.inconclusive;
        self.exhausted &= other.exhausted;
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.violations).expect("violations serialize")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            let kind = match v.kind {
                Kind::Soundness => "soundness",
                Kind::Completeness => "completeness",
            };
            writeln!(f, "violation {kind}: {} -- {}", v.case, v.witness)?;
        }
        write!(f, "checked {}, violations {}, inconclusive {}", self.checked, self.violations.len(), self.inconclusive)
    }
}

fn query_goal(start: &State) -> &Goal {
    match start {
        State::Leaf { goal, .. } => goal,
        _ => unreachable!("initial states are leaves"),
    }
}

fn render(vars: &QueryVars, f: &ReprFun) -> String {
    vars.0.iter().map(|(n, i)| format!("{n} = {}", f.get(*i))).collect::<Vec<_>>().join(", ")
}

fn residuals(sigma: &Subst, vars: &QueryVars) -> Vec<u32> {
    let mut seen = Vec::new();
    for i in vars.indices() {
        let mut vs = Vec::new();
        apply(sigma, &Term::sem(i)).vars_ordered_into(&mut vs);
        for v in vs {
            if let Var::Sem(k) = v {
                if !seen.contains(&k) {
                    seen.push(k);
                }
            }
        }
    }
    seen
}

/// Index tuples into a domain of size `base` for `width` positions: all of
/// them when there are at most `cap`, otherwise `cap` random ones.
fn tuples(base: usize, width: usize, cap: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total = (base as u128).checked_pow(width as u32);
    match total {
        Some(t) if t <= cap as u128 => {
            let mut out = Vec::with_capacity(t as usize);
            for mut code in 0..t {
                let mut tuple = Vec::with_capacity(width);
                for _ in 0..width {
                    tuple.push((code % base as u128) as usize);
                    code /= base as u128;
                }
                out.push(tuple);
            }
            out
        }
        _ => (0..cap).map(|_| (0..width).map(|_| rng.gen_range(0..base)).collect()).collect(),
    }
}

/// Every answer the engine produces within budget, grounded in every way
/// (up to the cap) over the bounded domain, must satisfy the query.
pub fn check_soundness(spec: &Spec, search: &dyn Search, cfg: &CheckConfig) -> Result<Report, OracleError> {
    let signature = cfg.signature(spec);
    let domain = enum_ground_terms(&signature, cfg.params.depth)?;
    let (start, vars) = initial_state(spec);
    let query = query_goal(&start).clone();
    let found = answers(search, start, cfg.max_answers, cfg.max_steps);
    let mut report = Report { exhausted: found.exhausted, ..Report::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let query_set: BTreeSet<u32> = vars.indices().into_iter().collect();

    for (a, (sigma, _)) in found.answers.iter().enumerate() {
        let deepest = sigma.iter().map(|(_, t)| t.depth()).max().unwrap_or(1);
        let mut params = cfg.params.clone();
        params.witness_depth = Some(cfg.params.depth + deepest);
        if cfg.raise_index {
            params.step_index = params.step_index.max(found.unfoldings[a]);
        }
        let oracle = Oracle::with_signature(spec, &signature, params);
        let visible = restrict(sigma, &query_set);
        let free = residuals(sigma, &vars);
        for tuple in tuples(domain.len(), free.len(), cfg.groundings_cap, &mut rng) {
            let mut f = ReprFun::new(domain[0].clone());
            for (v, &d) in free.iter().zip(&tuple) {
                f.set(*v, domain[d].clone());
            }
            for i in vars.indices() {
                let value = ground(&f, &apply(sigma, &Term::sem(i)));
                f.set(i, value);
            }
            assert!(in_subst_sem(&visible, &f), "grounding is not an instance of the answer");
            report.checked += 1;
            match oracle.in_den_sem(&query, &f) {
                Ok(true) => {}
                Ok(false) => report.violations.push(Violation {
                    case: format!("answer {}: {}", a + 1, reify(sigma, &vars)),
                    kind: Kind::Soundness,
                    witness: render(&vars, &f),
                }),
                Err(OracleError::Inconclusive { .. }) => report.inconclusive += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}

/// One-way matching of a reified term against a ground term.
fn matches(pattern: &Term, value: &Term, bound: &mut BTreeMap<u32, Term>) -> bool {
    match (pattern, value) {
        (Term::Var(Var::Sem(k)), _) => match bound.get(k) {
            Some(t) => t == value,
            None => {
                bound.insert(*k, value.clone());
                true
            }
        },
        (Term::Ctor(c, xs), Term::Ctor(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| matches(x, y, bound))
        }
        _ => false,
    }
}

/// Does some answer cover the values `f` gives the query variables?
pub fn covers(answers: &[ReifiedAnswer], vars: &QueryVars, f: &ReprFun) -> bool {
    answers.iter().any(|ans| {
        let mut bound = BTreeMap::new();
        ans.bindings.iter().zip(&vars.0).all(|((_, t), (_, i))| matches(t, f.get(*i), &mut bound))
    })
}

/// Every representing function over the bounded domain that the oracle
/// accepts must be covered by an answer found within the step budget.
pub fn check_completeness(spec: &Spec, search: &dyn Search, cfg: &CheckConfig) -> Result<Report, OracleError> {
    let signature = cfg.signature(spec);
    let domain = enum_ground_terms(&signature, cfg.params.depth)?;
    let (start, vars) = initial_state(spec);
    let query = query_goal(&start).clone();
    let candidates = (domain.len() as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
    if candidates > cfg.max_candidates {
        return Err(OracleError::TooManyCandidates(candidates));
    }
    let oracle = Oracle::with_signature(spec, &signature, cfg.params.clone());
    let mut report = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pending = Vec::new();
    for tuple in tuples(domain.len(), vars.len(), usize::MAX, &mut rng) {
        let mut f = ReprFun::new(domain[0].clone());
        for ((_, i), &d) in vars.0.iter().zip(&tuple) {
            f.set(*i, domain[d].clone());
        }
        match oracle.in_den_sem(&query, &f) {
            Ok(true) => pending.push(f),
            Ok(false) => {}
            Err(OracleError::Inconclusive { .. }) => report.inconclusive += 1,
            Err(e) => return Err(e),
        }
    }
    report.checked = pending.len();

    // Run the engine only until every member is covered.
    let mut seen = 0;
    let mut steps = 0;
    let mut run = trace(search, start);
    while !pending.is_empty() && steps < cfg.max_steps {
        let Some(t) = run.next() else { break };
        steps += 1;
        if let Label::Answer(sigma, _) = &t.label {
            seen += 1;
            let answer = [reify(sigma, &vars)];
            pending.retain(|f| !covers(&answer, &vars, f));
        }
    }
    report.exhausted = run.current().is_none();
    for f in pending {
        report.violations.push(Violation {
            case: format!("not covered by the {seen} answers found in {steps} steps"),
            kind: Kind::Completeness,
            witness: render(&vars, &f),
        });
    }
    Ok(report)
}
