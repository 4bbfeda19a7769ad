use std::fmt;

/// 1-based line/column of a token's first character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// lowercase-initial: variable or relation name
    Ident(String),
    /// uppercase-initial constructor name
    Ctor(String),
    Fresh,
    Fail,
    Bang,
    LParen,
    RParen,
    Comma,
    Dot,
    Semi,
    Query,
    Eq,
    Unify,
    And,
    Or,
    SldPragma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Ctor(s) => write!(f, "`{s}`"),
            Tok::Fresh => f.write_str("`fresh`"),
            Tok::Fail => f.write_str("`fail`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Query => f.write_str("`?`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Unify => f.write_str("`===`"),
            Tok::And => f.write_str("`/\\`"),
            Tok::Or => f.write_str("`\\/`"),
            Tok::SldPragma => f.write_str("`#sld`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, Vec<LexError>> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }
    let starts = |i: usize, s: &str| -> bool {
        s.chars().enumerate().all(|(k, c)| chars.get(i + k) == Some(&c))
    };

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if starts(i, "--") {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!(1);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "fresh" => Tok::Fresh,
                "fail" => Tok::Fail,
                _ if c.is_ascii_uppercase() => Tok::Ctor(word),
                _ => Tok::Ident(word),
            };
            toks.push((tok, pos));
            continue;
        }
        let (tok, len) = if starts(i, "===") {
            (Tok::Unify, 3)
        } else if starts(i, "/\\") {
            (Tok::And, 2)
        } else if starts(i, "\\/") {
            (Tok::Or, 2)
        } else if starts(i, "#sld") {
            (Tok::SldPragma, 4)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                ';' => (Tok::Semi, 1),
                '?' => (Tok::Query, 1),
                '=' => (Tok::Eq, 1),
                '!' => (Tok::Bang, 1),
                _ => {
                    errors.push(LexError { pos, message: format!("unexpected character `{c}`") });
                    advance!(1);
                    continue;
                }
            }
        };
        advance!(len);
        toks.push((tok, pos));
    }
    toks.push((Tok::Eof, Pos { line, col }));
    if errors.is_empty() {
        Ok(toks)
    } else {
        Err(errors)
    }
}
