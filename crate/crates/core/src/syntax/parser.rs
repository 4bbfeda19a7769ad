//! Recursive-descent parser for `.mk` files.
//!
//! ```text
//! file  ::= ["#sld"] item*
//! item  ::= ident ident* "=" goal ";"        -- relation definition
//!         | "?" goal [";"]                   -- the query (exactly one)
//! goal  ::= conj ["\/" goal]
//! conj  ::= unary ["/\" conj]
//! unary ::= "fresh" ident+ "." goal | atom
//! atom  ::= "(" goal ")" | "fail" | "!"
//!         | ident "(" [term ("," term)*] ")" -- invocation
//!         | ident arg*                       -- invocation by juxtaposition
//! arg   ::= ident | Ctor | "(" term ")"
//!         | term "===" term
//! term  ::= ident | Ctor ["(" term ("," term)* ")"]
//! ```

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::ast::{Goal, Name, RelDef, Spec, Term, Var};
use super::lexer::{tokenize, Pos, Tok};
use super::validate::{validate_spec, ValidationError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("lexical error: {0}")]
    Lexical(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{0}")]
    Validation(ValidationError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// Lexical and syntax errors, as opposed to semantic validation failures.
    pub fn is_syntactic(&self) -> bool {
        !matches!(self.kind, ParseErrorKind::Validation(_))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.kind)
    }
}

impl std::error::Error for ParseError {}

/// Source positions of the top-level items, used to locate validation errors.
#[derive(Clone, Debug, Default)]
pub struct SourceMap {
    pub defs: HashMap<Name, Pos>,
    pub query: Pos,
}

impl SourceMap {
    pub fn locate(&self, err: &ValidationError) -> Pos {
        err.relation().and_then(|r| self.defs.get(r).copied()).unwrap_or(self.query)
    }
}

/// Parses and validates a specification.
pub fn parse_spec(text: &str) -> Result<Spec, Vec<ParseError>> {
    let (spec, map) = parse_unchecked(text)?;
    match validate_spec(&spec) {
        Ok(()) => Ok(spec),
        Err(errs) => Err(errs
            .into_iter()
            .map(|e| ParseError { pos: map.locate(&e), kind: ParseErrorKind::Validation(e) })
            .collect()),
    }
}

/// Parses without running [`validate_spec`]; duplicate definitions are still
/// rejected since the definition map cannot represent them.
pub fn parse_unchecked(text: &str) -> Result<(Spec, SourceMap), Vec<ParseError>> {
    let toks = tokenize(text).map_err(|errs| {
        errs.into_iter()
            .map(|e| ParseError { pos: e.pos, kind: ParseErrorKind::Lexical(e.message) })
            .collect::<Vec<_>>()
    })?;
    let mut p = Parser { toks, i: 0, sld: false, errors: Vec::new() };
    let result = p.file();
    if p.errors.is_empty() {
        Ok(result.expect("parser produced no result without errors"))
    } else {
        Err(p.errors)
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    sld: bool,
    errors: Vec<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    /// Does the next token start right after `len` characters of the current one?
    fn touching(&self, len: usize) -> bool {
        let (here, next) = (self.toks[self.i].1, self.toks[(self.i + 1).min(self.toks.len() - 1)].1);
        next.line == here.line && next.col == here.col + len
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos: self.pos(), kind: ParseErrorKind::Syntax(msg.into()) })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn recover(&mut self) {
        while !matches!(self.peek(), Tok::Semi | Tok::Eof) {
            self.bump();
        }
        if *self.peek() == Tok::Semi {
            self.bump();
        }
    }

    fn file(&mut self) -> Option<(Spec, SourceMap)> {
        if *self.peek() == Tok::SldPragma {
            self.sld = true;
            self.bump();
        }
        let mut defs: Vec<RelDef> = Vec::new();
        let mut map = SourceMap::default();
        let mut query: Option<Goal> = None;
        while *self.peek() != Tok::Eof {
            let start = self.pos();
            match self.peek().clone() {
                Tok::Query => {
                    self.bump();
                    match self.goal() {
                        Ok(g) => {
                            if *self.peek() == Tok::Semi {
                                self.bump();
                            }
                            if query.is_some() {
                                self.errors.push(ParseError {
                                    pos: start,
                                    kind: ParseErrorKind::Syntax("more than one query".into()),
                                });
                            } else {
                                map.query = start;
                                query = Some(g);
                            }
                        }
                        Err(e) => {
                            self.errors.push(e);
                            self.recover();
                        }
                    }
                }
                Tok::Ident(_) => match self.definition() {
                    Ok(def) => {
                        if map.defs.contains_key(&def.name) {
                            self.errors.push(ParseError {
                                pos: start,
                                kind: ParseErrorKind::Validation(ValidationError::DuplicateRelation(def.name.clone())),
                            });
                        } else {
                            map.defs.insert(def.name.clone(), start);
                            defs.push(def);
                        }
                    }
                    Err(e) => {
                        self.errors.push(e);
                        self.recover();
                    }
                },
                Tok::SldPragma => {
                    self.errors.push(ParseError {
                        pos: start,
                        kind: ParseErrorKind::Syntax("`#sld` must be the first item of the file".into()),
                    });
                    self.bump();
                }
                other => {
                    self.errors.push(ParseError {
                        pos: start,
                        kind: ParseErrorKind::Syntax(format!("expected a definition or `?`, found {other}")),
                    });
                    self.bump();
                    self.recover();
                }
            }
        }
        let Some(query) = query else {
            self.errors.push(ParseError {
                pos: self.pos(),
                kind: ParseErrorKind::Syntax("missing query `? goal`".into()),
            });
            return None;
        };
        let mut spec = Spec::new(defs, query);
        spec.sld = self.sld;
        Some((spec, map))
    }

    fn definition(&mut self) -> PResult<RelDef> {
        let Tok::Ident(name) = self.bump() else { unreachable!() };
        let mut params = Vec::new();
        while let Tok::Ident(p) = self.peek().clone() {
            self.bump();
            params.push(Name::from(p));
        }
        self.expect(Tok::Eq)?;
        let body = self.goal()?;
        self.expect(Tok::Semi)?;
        Ok(RelDef { name: Name::from(name), params, body })
    }

    fn goal(&mut self) -> PResult<Goal> {
        let left = self.conj()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let right = self.goal()?;
            return Ok(Goal::disj(left, right));
        }
        Ok(left)
    }

    fn conj(&mut self) -> PResult<Goal> {
        let left = self.unary()?;
        if *self.peek() == Tok::And {
            self.bump();
            let right = self.conj()?;
            return Ok(Goal::conj(left, right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Goal> {
        if *self.peek() != Tok::Fresh {
            return self.atom();
        }
        self.bump();
        let mut names = Vec::new();
        while let Tok::Ident(x) = self.peek().clone() {
            self.bump();
            names.push(x);
        }
        if names.is_empty() {
            return self.error("expected at least one variable after `fresh`");
        }
        self.expect(Tok::Dot)?;
        let body = self.goal()?;
        Ok(names.iter().rev().fold(body, |g, x| Goal::fresh(x, g)))
    }

    fn atom(&mut self) -> PResult<Goal> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let g = self.goal()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            Tok::Fail => {
                self.bump();
                Ok(Goal::Fail)
            }
            Tok::Bang => {
                if !self.sld {
                    return self.error("cut `!` is only allowed in files starting with `#sld`");
                }
                self.bump();
                Ok(Goal::Cut)
            }
            Tok::Ident(name) => match self.peek_at(1) {
                // `r(a, b)` takes an argument list only when the parenthesis
                // touches the name; `r (t) u` is juxtaposition.
                Tok::Unify => {
                    self.bump();
                    self.bump();
                    let rhs = self.term()?;
                    Ok(Goal::Unify(Term::var(&name), rhs))
                }
                Tok::LParen if self.touching(name.len()) => {
                    self.bump();
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        args.push(self.term()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            args.push(self.term()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(Goal::Invoke(Name::from(name), args))
                }
                _ => {
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        match self.peek() {
                            Tok::Ident(_) | Tok::Ctor(_) => args.push(self.term()?),
                            Tok::LParen => {
                                self.bump();
                                args.push(self.term()?);
                                self.expect(Tok::RParen)?;
                            }
                            _ => break,
                        }
                    }
                    if *self.peek() == Tok::Unify {
                        return self.error("unexpected `===` after a relation invocation");
                    }
                    Ok(Goal::Invoke(Name::from(name), args))
                }
            },
            Tok::Ctor(_) => {
                let lhs = self.term()?;
                self.expect(Tok::Unify)?;
                let rhs = self.term()?;
                Ok(Goal::Unify(lhs, rhs))
            }
            other => self.error(format!("expected a goal, found {other}")),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Term::Var(Var::Syn(Name::from(x))))
            }
            Tok::Ctor(c) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(Term::Ctor(Name::from(c), args.into()))
            }
            other => self.error(format!("expected a term, found {other}")),
        }
    }
}
