//! Printing of goals and specifications in the concrete syntax accepted by
//! the parser.

use std::fmt;

use super::ast::{Goal, Spec};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    Disj,
    Conj,
    Atom,
}

fn write_goal(f: &mut fmt::Formatter<'_>, g: &Goal, ctx: Prec) -> fmt::Result {
    let wrap = |f: &mut fmt::Formatter<'_>, own: Prec, body: &dyn Fn(&mut fmt::Formatter<'_>) -> fmt::Result| {
        if own < ctx {
            f.write_str("(")?;
            body(f)?;
            f.write_str(")")
        } else {
            body(f)
        }
    };
    match g {
        Goal::Unify(a, b) => write!(f, "{a} === {b}"),
        Goal::Fail => f.write_str("fail"),
        Goal::Cut => f.write_str("!"),
        Goal::Invoke(r, args) => {
            write!(f, "{r}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")
        }
        Goal::Disj(a, b) => wrap(f, Prec::Disj, &|f| {
            write_goal(f, a, Prec::Conj)?;
            f.write_str(" \\/ ")?;
            write_goal(f, b, Prec::Disj)
        }),
        Goal::Conj(a, b) => wrap(f, Prec::Conj, &|f| {
            write_goal(f, a, Prec::Atom)?;
            f.write_str(" /\\ ")?;
            write_goal(f, b, Prec::Conj)
        }),
        Goal::Fresh(x, body) => {
            // `fresh` extends as far right as possible, so it only goes bare at the top.
            let bare = ctx == Prec::Top;
            if !bare {
                f.write_str("(")?;
            }
            write!(f, "fresh {x}")?;
            let mut body = body;
            while let Goal::Fresh(y, inner) = &**body {
                write!(f, " {y}")?;
                body = inner;
            }
            f.write_str(" . ")?;
            write_goal(f, body, Prec::Top)?;
            if !bare {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_goal(f, self, Prec::Top)
    }
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sld {
            writeln!(f, "#sld")?;
        }
        for def in self.defs.values() {
            write!(f, "{}", def.name)?;
            for p in &def.params {
                write!(f, " {p}")?;
            }
            writeln!(f, " = {};", def.body)?;
        }
        writeln!(f, "? {}", self.query)
    }
}
