use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::lexer::{lex, LexError, Mode, Spanned, Tok};
use crate::checker::{Context, Entry, Judgement};
use crate::syntax::{Evidence, Formula, Individual, Name, ProofTerm, Signature, Sort};

/// Words that cannot be used as variable names.
pub const KEYWORDS: &[&str] = &[
    "all", "some", "Id", "fst", "snd", "inl", "inr", "case", "app", "extr", "eps", "inst", "refl",
    "rewr", "abort",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", expected_list(.expected))]
    Unexpected {
        expected: Vec<String>,
        found: String,
    },
    #[error("unexpected character `{0}`")]
    BadChar(char),
    #[error("{0}")]
    Declaration(String),
}

fn expected_list(xs: &[String]) -> String {
    match xs {
        [] => "nothing".to_string(),
        [x] => x.clone(),
        _ => format!("one of {}", xs.join(", ")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.kind)
    }
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            line: e.line,
            col: e.col,
            kind: ParseErrorKind::BadChar(e.found),
        }
    }
}

pub(crate) struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: &'a Signature,
    /// Individual binders in scope; they shadow constants.
    inds: Vec<Name>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(crate) fn new(
        src: &str,
        mode: Mode,
        first_line: usize,
        sig: &'a Signature,
    ) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src, mode, first_line)?,
            pos: 0,
            sig,
            inds: Vec::new(),
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            col: here.col,
            kind: ParseErrorKind::Unexpected {
                expected: expected.iter().map(|s| s.to_string()).collect(),
                found: here.tok.to_string(),
            },
        }
    }

    pub(crate) fn declaration_error(&self, msg: String) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            col: here.col,
            kind: ParseErrorKind::Declaration(msg),
        }
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    pub(crate) fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// Any identifier, keywords included.
    pub(crate) fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    /// A variable name: an identifier that is not a keyword.
    pub(crate) fn var_name(&mut self) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&["variable"])),
        }
    }

    pub(crate) fn expect_eof(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["end of input"])),
        }
    }

    fn sort(&mut self) -> PResult<Sort> {
        Ok(Sort::new(self.ident("sort")?))
    }

    fn individual(&mut self) -> PResult<Individual> {
        let name = self.var_name().map_err(|_| self.error(&["individual"]))?;
        Ok(self.resolve(name))
    }

    fn resolve(&self, name: Name) -> Individual {
        if !self.inds.contains(&name) {
            if let Some(sort) = self.sig.const_sort(&name) {
                return Individual::constant(name, sort.clone());
            }
        }
        Individual::Var(name)
    }

    fn with_ind<T>(&mut self, x: &Name, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.inds.push(x.clone());
        let r = f(self);
        self.inds.pop();
        r
    }

    // formula  := quant | imp
    // imp      := or ('->' formula)?
    // or       := and ('|' (quant | or))?
    // and      := atom ('&' (quant | and))?
    pub(crate) fn formula(&mut self) -> PResult<Formula> {
        if self.at_keyword("all") || self.at_keyword("some") {
            return self.quantifier();
        }
        let l = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            return Ok(Formula::imp(l, self.formula()?));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let l = self.conjunction()?;
        if self.eat(&Tok::Bar) {
            let r = if self.at_keyword("all") || self.at_keyword("some") {
                self.quantifier()?
            } else {
                self.disjunction()?
            };
            return Ok(Formula::or(l, r));
        }
        Ok(l)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let l = self.atomic_formula()?;
        if self.eat(&Tok::Amp) {
            let r = if self.at_keyword("all") || self.at_keyword("some") {
                self.quantifier()?
            } else {
                self.conjunction()?
            };
            return Ok(Formula::and(l, r));
        }
        Ok(l)
    }

    fn quantifier(&mut self) -> PResult<Formula> {
        let forall = self.ident("quantifier")? == "all";
        let x = self.var_name()?;
        self.expect(Tok::Colon, "`:`")?;
        let sort = self.sort()?;
        self.expect(Tok::Dot, "`.`")?;
        let body = self.with_ind(&x, |p| p.formula())?;
        Ok(if forall {
            Formula::forall(x, sort, body)
        } else {
            Formula::exists(x, sort, body)
        })
    }

    fn atomic_formula(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Bottom => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(s) if s == "Id" => {
                self.bump();
                self.expect(Tok::LBrace, "`{`")?;
                let sort = self.sort()?;
                self.expect(Tok::RBrace, "`}`")?;
                let (lhs, rhs) = self.individual_pair()?;
                Ok(Formula::id(sort, lhs, rhs))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.individual()?);
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(Tok::RParen, "`,` or `)`")?;
                        break;
                    }
                }
                Ok(Formula::atom(s, args))
            }
            _ => Err(self.error(&["formula"])),
        }
    }

    /// `(a, b)`
    fn individual_pair(&mut self) -> PResult<(Individual, Individual)> {
        self.expect(Tok::LParen, "`(`")?;
        let a = self.individual()?;
        self.expect(Tok::Comma, "`,`")?;
        let b = self.individual()?;
        self.expect(Tok::RParen, "`)`")?;
        Ok((a, b))
    }

    fn open(&mut self) -> PResult<()> {
        self.expect(Tok::LParen, "`(`")
    }

    fn close(&mut self) -> PResult<()> {
        self.expect(Tok::RParen, "`)`")
    }

    fn comma(&mut self) -> PResult<()> {
        self.expect(Tok::Comma, "`,`")
    }

    /// `x.`
    fn binder(&mut self) -> PResult<Name> {
        let x = self.var_name()?;
        self.expect(Tok::Dot, "`.`")?;
        Ok(x)
    }

    fn unary(&mut self, build: fn(ProofTerm) -> ProofTerm) -> PResult<ProofTerm> {
        self.open()?;
        let t = self.term()?;
        self.close()?;
        Ok(build(t))
    }

    pub(crate) fn term(&mut self) -> PResult<ProofTerm> {
        match self.peek().clone() {
            Tok::Backslash => {
                self.bump();
                let x = self.binder()?;
                Ok(ProofTerm::lam(x, self.term()?))
            }
            Tok::BigLambda => {
                self.bump();
                let x = self.var_name()?;
                self.expect(Tok::Colon, "`:`")?;
                let sort = self.sort()?;
                self.expect(Tok::Dot, "`.`")?;
                let body = self.with_ind(&x, |p| p.term())?;
                Ok(ProofTerm::tlam(x, sort, body))
            }
            Tok::LAngle => {
                self.bump();
                let a = self.term()?;
                self.comma()?;
                let b = self.term()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(ProofTerm::pair(a, b))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if self.eat(&Tok::Colon) {
                    let f = self.formula()?;
                    self.close()?;
                    return Ok(ProofTerm::ann(t, f));
                }
                self.close()?;
                Ok(t)
            }
            Tok::Ident(s) => {
                self.bump();
                self.term_headed_by(&s)
            }
            _ => Err(self.error(&["term"])),
        }
    }

    fn term_headed_by(&mut self, s: &str) -> PResult<ProofTerm> {
        match s {
            "fst" => self.unary(ProofTerm::fst),
            "snd" => self.unary(ProofTerm::snd),
            "inl" => self.unary(ProofTerm::inl),
            "inr" => self.unary(ProofTerm::inr),
            "abort" => self.unary(ProofTerm::abort),
            "app" => {
                self.open()?;
                let f = self.term()?;
                self.comma()?;
                let a = self.term()?;
                self.close()?;
                Ok(ProofTerm::app(f, a))
            }
            "case" => {
                self.open()?;
                let scrut = self.term()?;
                self.comma()?;
                let x = self.binder()?;
                let f = self.term()?;
                self.comma()?;
                let y = self.binder()?;
                let g = self.term()?;
                self.close()?;
                Ok(ProofTerm::case(scrut, x, f, y, g))
            }
            "extr" => {
                self.open()?;
                let f = self.term()?;
                self.comma()?;
                let t = self.individual()?;
                self.close()?;
                Ok(ProofTerm::extr(f, t))
            }
            "eps" => {
                self.open()?;
                let x = self.binder()?;
                let g = self.with_ind(&x, |p| p.term())?;
                self.comma()?;
                let s = self.individual()?;
                self.close()?;
                Ok(ProofTerm::ex_pair(x, g, s))
            }
            "inst" => {
                self.open()?;
                let scrut = self.term()?;
                self.comma()?;
                let h = self.binder()?;
                let t = self.binder()?;
                let d = self.with_ind(&t, |p| p.term())?;
                self.close()?;
                Ok(ProofTerm::inst(scrut, h, t, d))
            }
            "refl" => {
                let (lhs, rhs) = self.individual_pair()?;
                Ok(ProofTerm::IdIntro {
                    evidence: Evidence::refl(),
                    lhs,
                    rhs,
                })
            }
            "rewr" => {
                self.open()?;
                let scrut = self.term()?;
                self.comma()?;
                let t = self.binder()?;
                let d = self.term()?;
                self.close()?;
                Ok(ProofTerm::rewr(scrut, t, d))
            }
            kw if KEYWORDS.contains(&kw) => {
                self.pos -= 1;
                Err(self.error(&["term"]))
            }
            name => {
                if self.peek() == &Tok::LParen {
                    let (lhs, rhs) = self.individual_pair()?;
                    return Ok(ProofTerm::IdIntro {
                        evidence: Evidence::Var(name.to_string()),
                        lhs,
                        rhs,
                    });
                }
                Ok(ProofTerm::var(name))
            }
        }
    }

    /// `name : Sort` or `name : Formula`, separated by commas, up to `|-`.
    fn context_entries(&mut self) -> PResult<Vec<Entry>> {
        let mut out = Vec::new();
        if self.peek() == &Tok::Turnstile {
            return Ok(out);
        }
        loop {
            let name = self.var_name()?;
            self.expect(Tok::Colon, "`:`")?;
            let is_sort = matches!(self.peek(), Tok::Ident(s) if self.sig.has_sort(&Sort::new(s.clone())))
                && matches!(self.peek_at(1), Tok::Comma | Tok::Turnstile);
            if is_sort {
                out.push(Entry::Ind(name, self.sort()?));
            } else {
                out.push(Entry::Proof(name, self.formula()?));
            }
            if self.eat(&Tok::Comma) {
                continue;
            }
            if self.peek() == &Tok::Turnstile {
                return Ok(out);
            }
            return Err(self.error(&["`,`", "`|-`"]));
        }
    }

    /// `CTX |- TERM : FORMULA`
    pub(crate) fn judgement(&mut self, sig: &Arc<Signature>) -> PResult<Judgement> {
        let entries = self.context_entries()?;
        self.expect(Tok::Turnstile, "`|-`")?;
        let term = self.term()?;
        self.expect(Tok::Colon, "`:`")?;
        let formula = self.formula()?;
        self.expect_eof()?;
        Ok(Judgement::new(
            Context::with_entries(sig.clone(), entries),
            term,
            formula,
        ))
    }
}

pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src, Mode::Logic, 1, sig)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_term(src: &str, sig: &Signature) -> Result<ProofTerm, ParseError> {
    let mut p = Parser::new(src, Mode::Logic, 1, sig)?;
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_judgement(src: &str, sig: &Arc<Signature>) -> Result<Judgement, ParseError> {
    Parser::new(src, Mode::Logic, 1, sig)?.judgement(sig)
}

/// A parsed problem file: declarations and judgements with their line
/// numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub signature: Arc<Signature>,
    pub judgements: Vec<(usize, Judgement)>,
}

fn declaration(p: &mut Parser<'_>, sig: &mut Signature) -> PResult<()> {
    let kw = p.ident("declaration")?;
    let decl_err =
        |p: &Parser<'_>, e: crate::syntax::SignatureError| p.declaration_error(e.to_string());
    match kw.as_str() {
        "sort" => loop {
            let name = p.var_name()?;
            sig.declare_sort(name).map_err(|e| decl_err(p, e))?;
            if !p.eat(&Tok::Comma) {
                break;
            }
        },
        "const" => {
            let mut names = vec![p.var_name()?];
            while p.eat(&Tok::Comma) {
                names.push(p.var_name()?);
            }
            p.expect(Tok::Colon, "`:` or `,`")?;
            let sort = Sort::new(p.ident("sort")?);
            for n in names {
                sig.declare_const(n, sort.clone())
                    .map_err(|e| decl_err(p, e))?;
            }
        }
        "pred" => loop {
            let name = p.var_name()?;
            let mut arity = Vec::new();
            if p.eat(&Tok::LParen) {
                loop {
                    arity.push(Sort::new(p.ident("sort")?));
                    if p.eat(&Tok::Comma) {
                        continue;
                    }
                    p.expect(Tok::RParen, "`,` or `)`")?;
                    break;
                }
            }
            sig.declare_pred(name, arity).map_err(|e| decl_err(p, e))?;
            if !p.eat(&Tok::Comma) {
                break;
            }
        },
        _ => unreachable!("caller checks the keyword"),
    }
    p.expect_eof()
}

const DECLARATION_KEYWORDS: [&str; 3] = ["sort", "const", "pred"];

/// Parses a problem file: `sort`, `const` and `pred` declaration lines
/// followed by one judgement per line. `#` starts a comment.
///
/// ```text
/// sort D
/// const c1, c2 : D
/// pred A, B, P(D)
/// p : A & B |- <snd(p), fst(p)> : B & A
/// ```
pub fn parse_problem(src: &str) -> Result<Problem, ParseError> {
    let empty = Signature::new();
    let mut sig = Signature::new();
    let mut judgement_lines = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let lineno = i + 1;
        let mut p = Parser::new(line, Mode::Logic, lineno, &empty)?;
        match p.peek() {
            Tok::Eof => continue,
            Tok::Ident(s)
                if DECLARATION_KEYWORDS.contains(&s.as_str())
                    && !matches!(p.peek_at(1), Tok::Colon) =>
            {
                if !judgement_lines.is_empty() {
                    return Err(p.declaration_error("declarations must precede judgements".into()));
                }
                declaration(&mut p, &mut sig)?;
            }
            _ => judgement_lines.push((lineno, line)),
        }
    }
    let sig = Arc::new(sig);
    let mut judgements = Vec::new();
    for (lineno, line) in judgement_lines {
        let j = Parser::new(line, Mode::Logic, lineno, &sig)?.judgement(&sig)?;
        judgements.push((lineno, j));
    }
    Ok(Problem {
        signature: sig,
        judgements,
    })
}
