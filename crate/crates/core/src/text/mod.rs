//! Concrete syntax: lexer, parser, printers and problem files.
//!
//! Formulas: `P(x)`, `_|_`, `A & B`, `A | B`, `A -> B`, `all x:D. A`,
//! `some x:D. A`, `Id{D}(a, b)`. `&` binds tighter than `|`, which binds
//! tighter than `->`; all three associate to the right. A quantifier body
//! extends as far right as possible.
//!
//! Terms: `<a, b>`, `fst(p)`, `snd(p)`, `inl(a)`, `inr(b)`,
//! `case(p, x. f, y. g)`, `\x. b`, `app(f, a)`, `/\x:D. g`, `extr(f, t)`,
//! `eps(x. g, s)`, `inst(p, h.t. d)`, `refl(a, b)`, `t(a, b)` (identity
//! evidenced by the equation `t`), `rewr(p, t. d)`, `abort(p)` and the
//! ascription `(t : A)`.
//!
//! Identifiers resolve to constants when a constant of that name is
//! declared and no binder shadows it.

mod lexer;
mod parse;
mod print;

pub use lexer::{lex, LexError, Mode, Spanned, Tok};
pub use parse::{
    parse_formula, parse_judgement, parse_problem, parse_term, ParseError, ParseErrorKind, Problem,
    KEYWORDS,
};
pub use print::{print_evidence, print_formula, print_term, Notation};

use crate::checker::{Entry, Judgement};

/// Prints a judgement as one problem-file line.
pub fn print_judgement(j: &Judgement, notation: Notation) -> String {
    let ctx: Vec<String> = j
        .ctx
        .entries()
        .iter()
        .map(|e| match e {
            Entry::Proof(n, f) => format!("{n} : {}", print_formula(f, notation)),
            Entry::Ind(n, s) => format!("{n} : {s}"),
            Entry::Eq {
                name,
                sort,
                lhs,
                rhs,
            } => {
                let f = crate::syntax::Formula::id(sort.clone(), lhs.clone(), rhs.clone());
                format!("{name} : {}", print_formula(&f, notation))
            }
        })
        .collect();
    let turnstile = if notation == Notation::Paper {
        "⊢"
    } else {
        "|-"
    };
    let sep = if ctx.is_empty() { "" } else { " " };
    format!(
        "{}{sep}{turnstile} {} : {}",
        ctx.join(", "),
        print_term(&j.term, notation),
        print_formula(&j.formula, notation)
    )
}
