//! Lambda syntax: `\x. M`, left-associative application `M N`, parentheses,
//! numerals `#n`, and `M + N` / `M * N` for Church addition and
//! multiplication. `*` binds tighter than `+`; application binds tightest.

use super::UTerm;
use crate::text::{lex, Mode, ParseError, ParseErrorKind, Spanned, Tok};

/// `\f. \x. f (f (... x))` with `n` applications.
pub fn numeral(n: u64) -> UTerm {
    let mut body = UTerm::var("x");
    for _ in 0..n {
        body = UTerm::app(UTerm::var("f"), body);
    }
    UTerm::lam("f", UTerm::lam("x", body))
}

/// `\m. \n. \f. \x. m f (n f x)`
pub fn plus() -> UTerm {
    let v = UTerm::var;
    let nfx = UTerm::apps(v("n"), [v("f"), v("x")]);
    let body = UTerm::apps(v("m"), [v("f"), nfx]);
    UTerm::lam("m", UTerm::lam("n", UTerm::lam("f", UTerm::lam("x", body))))
}

/// `\m. \n. \f. m (n f)`
pub fn times() -> UTerm {
    let v = UTerm::var;
    let body = UTerm::app(v("m"), UTerm::app(v("n"), v("f")));
    UTerm::lam("m", UTerm::lam("n", UTerm::lam("f", body)))
}

struct P {
    toks: Vec<Spanned>,
    pos: usize,
}

type R<T> = Result<T, ParseError>;

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
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

    fn expect(&mut self, t: Tok, what: &str) -> R<()> {
        if self.peek() == &t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn sum(&mut self) -> R<UTerm> {
        let mut t = self.product()?;
        while self.peek() == &Tok::Plus {
            self.bump();
            let r = self.product()?;
            t = UTerm::apps(plus(), [t, r]);
        }
        Ok(t)
    }

    fn product(&mut self) -> R<UTerm> {
        let mut t = self.application()?;
        while self.peek() == &Tok::Star {
            self.bump();
            let r = self.application()?;
            t = UTerm::apps(times(), [t, r]);
        }
        Ok(t)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::LParen | Tok::Numeral(_) | Tok::Backslash
        )
    }

    fn application(&mut self) -> R<UTerm> {
        if !self.starts_atom() {
            return Err(self.error(&["term"]));
        }
        let mut t: Option<UTerm> = None;
        while self.starts_atom() {
            let lambda = self.peek() == &Tok::Backslash;
            let a = self.atom()?;
            t = Some(match t {
                None => a,
                Some(f) => UTerm::app(f, a),
            });
            // A lambda body extends to the right, so nothing follows it.
            if lambda {
                break;
            }
        }
        Ok(t.expect("at least one atom"))
    }

    fn atom(&mut self) -> R<UTerm> {
        match self.bump() {
            Tok::Ident(x) => Ok(UTerm::Var(x)),
            Tok::Numeral(n) => Ok(numeral(n)),
            Tok::LParen => {
                let t = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::Backslash => {
                let x = match self.bump() {
                    Tok::Ident(x) => x,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(&["variable"]));
                    }
                };
                self.expect(Tok::Dot, "`.`")?;
                Ok(UTerm::lam(x, self.sum()?))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(&["term"]))
            }
        }
    }
}

fn parse_at(src: &str, first_line: usize) -> R<Option<UTerm>> {
    let mut p = P {
        toks: lex(src, Mode::Lambda, first_line)?,
        pos: 0,
    };
    if p.peek() == &Tok::Eof {
        return Ok(None);
    }
    let t = p.sum()?;
    if p.peek() != &Tok::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(Some(t))
}

pub fn parse_uterm(src: &str) -> Result<UTerm, ParseError> {
    parse_at(src, 1)?.ok_or(ParseError {
        line: 1,
        col: 1,
        kind: ParseErrorKind::Unexpected {
            expected: vec!["term".into()],
            found: Tok::Eof.to_string(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaLine {
    pub line: usize,
    pub term: UTerm,
}

/// One term per non-blank line; `#` followed by a non-digit starts a
/// comment.
pub fn parse_lambda_file(src: &str) -> Result<Vec<LambdaLine>, ParseError> {
    let mut out = Vec::new();
    for (i, line) in src.lines().enumerate() {
        if let Some(term) = parse_at(line, i + 1)? {
            out.push(LambdaLine { line: i + 1, term });
        }
    }
    Ok(out)
}

pub(super) fn print(t: &UTerm, numerals: bool) -> String {
    let atomic = |t: &UTerm| matches!(t, UTerm::Var(_)) || (numerals && t.as_numeral().is_some());
    if numerals {
        if let Some(n) = t.as_numeral() {
            return format!("#{n}");
        }
    }
    match t {
        UTerm::Var(x) => x.clone(),
        UTerm::Lam(x, b) => format!("\\{x}. {}", print(b, numerals)),
        UTerm::App(f, a) => {
            let fs = match &**f {
                UTerm::Lam(..) if !atomic(f) => format!("({})", print(f, numerals)),
                _ => print(f, numerals),
            };
            let a_s = if atomic(a) {
                print(a, numerals)
            } else {
                format!("({})", print(a, numerals))
            };
            format!("{fs} {a_s}")
        }
    }
}
