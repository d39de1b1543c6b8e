//! Recursive-descent parser for component expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'x' digits | '(' expr ')' | func '(' expr ')'
//! func    := sin | cos | exp | sqrt
//! ```
//!
//! Binding strength is `^` > unary `-` > `*`,`/` > `+`,`-`, so `-x1^2`
//! means `-(x1^2)` and `x1^-2` is accepted. Exponentiation is
//! right-associative. A minus applied directly to a constant folds into
//! the constant.

use thiserror::Error;

use super::ast::{Expr, Func};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected {found}, expected {expected}")]
    Syntax { found: String, expected: &'static str },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("function `{0}` takes exactly one argument")]
    Arity(String),
    #[error("malformed number `{0}`")]
    Number(String),
    #[error("variable index must be at least 1 in `{0}`")]
    VariableIndex(String),
    #[error("variable x{index} exceeds chart dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                } else {
                    return Err(ParseError {
                        kind: ParseErrorKind::Number(src[start..j].to_string()),
                        offset: start,
                    });
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError {
                kind: ParseErrorKind::Number(text.to_string()),
                offset: start,
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let ch = src[start..].chars().next().expect("non-empty");
        return Err(ParseError {
            kind: ParseErrorKind::Syntax {
                found: format!("character `{ch}`"),
                expected: "an expression",
            },
            offset: start,
        });
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::Syntax {
                found: self.peek().describe(),
                expected,
            },
            offset: self.offset(),
        }
    }

    fn expect(&mut self, t: Tok, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            // only a bare literal folds into a negative constant
            let literal = matches!(self.peek(), Tok::Num(_));
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) if literal => Expr::Const(-c),
                e => Expr::Func(Func::Neg, Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if let Some(digits) = name.strip_prefix('x') {
                    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                        let index: usize = digits.parse().map_err(|_| ParseError {
                            kind: ParseErrorKind::VariableIndex(name.clone()),
                            offset,
                        })?;
                        if index == 0 {
                            return Err(ParseError {
                                kind: ParseErrorKind::VariableIndex(name),
                                offset,
                            });
                        }
                        return Ok(Expr::Var(index - 1));
                    }
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        offset,
                    });
                };
                self.expect(Tok::LParen, "`(` after function name")?;
                if *self.peek() == Tok::RParen {
                    return Err(ParseError {
                        kind: ParseErrorKind::Arity(name),
                        offset,
                    });
                }
                let arg = self.expr()?;
                if *self.peek() == Tok::Comma {
                    return Err(ParseError {
                        kind: ParseErrorKind::Arity(name),
                        offset,
                    });
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Func(func, Box::new(arg)))
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }
}

/// Parse a component expression.
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::Empty,
            offset: 0,
        });
    }
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Parse and check that every variable fits a chart of dimension `dim`.
pub fn parse_in_chart(src: &str, dim: usize) -> Result<Expr, ParseError> {
    let e = parse_expression(src)?;
    if let Some(i) = e.max_var() {
        if i >= dim {
            let needle = format!("x{}", i + 1);
            let offset = find_var(src, &needle).unwrap_or(0);
            return Err(ParseError {
                kind: ParseErrorKind::VariableOutOfRange { index: i + 1, dim },
                offset,
            });
        }
    }
    Ok(e)
}

fn find_var(src: &str, needle: &str) -> Option<usize> {
    let bytes = src.as_bytes();
    let mut from = 0;
    while let Some(k) = src[from..].find(needle) {
        let at = from + k;
        let end = at + needle.len();
        let left_ok = at == 0 || !(bytes[at - 1].is_ascii_alphanumeric() || bytes[at - 1] == b'_');
        let right_ok = end >= bytes.len() || !bytes[end].is_ascii_digit();
        if left_ok && right_ok {
            return Some(at);
        }
        from = end;
    }
    None
}
