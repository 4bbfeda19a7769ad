use std::collections::BTreeMap;

use thiserror::Error;

use super::ast::{Goal, Name, Spec, Term, Var};
use super::subst::free_vars;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("undefined relation `{name}` invoked in {}", describe(.context))]
    UndefinedRelation { name: Name, context: Option<Name> },
    #[error("relation `{name}` expects {expected} argument(s) but is invoked with {found} in {}", describe(.context))]
    RelationArity { name: Name, expected: usize, found: usize, context: Option<Name> },
    #[error("constructor `{name}` used with {found} argument(s), elsewhere with {expected}")]
    ConstructorArity { name: Name, expected: usize, found: usize },
    #[error("variable `{var}` is unbound in the body of `{relation}`")]
    UnboundVariable { relation: Name, var: Var },
    #[error("parameter `{param}` appears more than once in `{relation}`")]
    DuplicateParam { relation: Name, param: Name },
    #[error("relation `{0}` is defined more than once")]
    DuplicateRelation(Name),
    #[error("cut `!` used in {} but the specification is not marked `#sld`", describe(.context))]
    CutOutsideSld { context: Option<Name> },
}

impl ValidationError {
    /// The relation whose definition contains the error; `None` for the query
    /// and for specification-wide errors.
    pub fn relation(&self) -> Option<&Name> {
        match self {
            ValidationError::UnboundVariable { relation, .. } | ValidationError::DuplicateParam { relation, .. } => {
                Some(relation)
            }
            ValidationError::DuplicateRelation(name) => Some(name),
            ValidationError::UndefinedRelation { context, .. }
            | ValidationError::RelationArity { context, .. }
            | ValidationError::CutOutsideSld { context } => context.as_ref(),
            ValidationError::ConstructorArity { .. } => None,
        }
    }
}

fn describe(context: &Option<Name>) -> String {
    match context {
        Some(r) => format!("the body of `{r}`"),
        None => "the query".to_string(),
    }
}

/// Checks every structural invariant of a specification and reports all
/// violations.
pub fn validate_spec(spec: &Spec) -> Result<(), Vec<ValidationError>> {
    let mut errors = Vec::new();
    let mut ctor_arity: BTreeMap<Name, usize> = BTreeMap::new();

    for def in spec.defs.values() {
        let mut seen: Vec<&Name> = Vec::new();
        for p in &def.params {
            if seen.contains(&p) {
                errors.push(ValidationError::DuplicateParam { relation: def.name.clone(), param: p.clone() });
            } else {
                seen.push(p);
            }
        }
        for var in free_vars(&def.body) {
            let bound = matches!(&var, Var::Syn(n) if def.params.contains(n));
            if !bound {
                errors.push(ValidationError::UnboundVariable { relation: def.name.clone(), var });
            }
        }
        check_goal(spec, &def.body, Some(&def.name), &mut ctor_arity, &mut errors);
    }
    check_goal(spec, &spec.query, None, &mut ctor_arity, &mut errors);

    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn check_goal(
    spec: &Spec,
    g: &Goal,
    relation: Option<&Name>,
    ctor_arity: &mut BTreeMap<Name, usize>,
    errors: &mut Vec<ValidationError>,
) {
    match g {
        Goal::Unify(a, b) => {
            check_term(a, ctor_arity, errors);
            check_term(b, ctor_arity, errors);
        }
        Goal::Conj(a, b) | Goal::Disj(a, b) => {
            check_goal(spec, a, relation, ctor_arity, errors);
            check_goal(spec, b, relation, ctor_arity, errors);
        }
        Goal::Fresh(_, body) => check_goal(spec, body, relation, ctor_arity, errors),
        Goal::Invoke(name, args) => {
            match spec.defs.get(name) {
                None => errors.push(ValidationError::UndefinedRelation {
                    name: name.clone(),
                    context: relation.cloned(),
                }),
                Some(def) if def.params.len() != args.len() => errors.push(ValidationError::RelationArity {
                    name: name.clone(),
                    expected: def.params.len(),
                    found: args.len(),
                    context: relation.cloned(),
                }),
                Some(_) => {}
            }
            args.iter().for_each(|a| check_term(a, ctor_arity, errors));
        }
        Goal::Cut => {
            if !spec.sld {
                errors.push(ValidationError::CutOutsideSld { context: relation.cloned() });
            }
        }
        Goal::Fail => {}
    }
}

fn check_term(t: &Term, ctor_arity: &mut BTreeMap<Name, usize>, errors: &mut Vec<ValidationError>) {
    if let Term::Ctor(name, args) = t {
        match ctor_arity.get(name) {
            Some(&expected) if expected != args.len() => {
                let err = ValidationError::ConstructorArity { name: name.clone(), expected, found: args.len() };
                if !errors.contains(&err) {
                    errors.push(err);
                }
            }
            Some(_) => {}
            None => {
                ctor_arity.insert(name.clone(), args.len());
            }
        }
        args.iter().for_each(|a| check_term(a, ctor_arity, errors));
    }
}
