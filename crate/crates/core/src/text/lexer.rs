use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `#n`, only in lambda mode.
    Numeral(u64),
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Backslash,
    BigLambda,
    Amp,
    Bar,
    Arrow,
    Turnstile,
    Bottom,
    Plus,
    Star,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Numeral(n) => return write!(f, "numeral `#{n}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LAngle => "`<`",
            Tok::RAngle => "`>`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Colon => "`:`",
            Tok::Backslash => "`\\`",
            Tok::BigLambda => "`/\\`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::Turnstile => "`|-`",
            Tok::Bottom => "`_|_`",
            Tok::Plus => "`+`",
            Tok::Star => "`*`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// `#` starts a comment.
    Logic,
    /// `#<digits>` is a Church numeral; any other `#` starts a comment.
    Lambda,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub col: usize,
    pub found: char,
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes `src`; `first_line` numbers the first line (1-based).
pub fn lex(src: &str, mode: Mode, first_line: usize) -> Result<Vec<Spanned>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, first_line, 1usize);
    let at = |i: usize| chars.get(i).copied();
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: tline,
                col: tcol,
            });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' if mode == Mode::Lambda && at(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                let mut j = i + 1;
                while at(j).is_some_and(|d| d.is_ascii_digit()) {
                    j += 1;
                }
                let digits: String = chars[i + 1..j].iter().collect();
                let n = digits.parse().map_err(|_| LexError {
                    line,
                    col,
                    found: '#',
                })?;
                push(Tok::Numeral(n), j - i, &mut i, &mut col);
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '<' => push(Tok::LAngle, 1, &mut i, &mut col),
            '>' => push(Tok::RAngle, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            '\\' => push(Tok::Backslash, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '/' if at(i + 1) == Some('\\') => push(Tok::BigLambda, 2, &mut i, &mut col),
            '-' if at(i + 1) == Some('>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '|' if at(i + 1) == Some('-') => push(Tok::Turnstile, 2, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            '_' if at(i + 1) == Some('|') && at(i + 2) == Some('_') => {
                push(Tok::Bottom, 3, &mut i, &mut col)
            }
            c if is_ident_start(c) => {
                let mut j = i + 1;
                while at(j).is_some_and(is_ident_continue) {
                    j += 1;
                }
                while at(j) == Some('\'') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                push(Tok::Ident(s), j - i, &mut i, &mut col);
            }
            other => {
                return Err(LexError {
                    line,
                    col,
                    found: other,
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
