//! Recursive-descent parser for the polynomial text grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' uint)?
//! base   := rational | ident | '(' expr ')'
//! ```
//!
//! A leading `-` is accepted on any term. Rationals are integers or `p/q`.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::polynomial::Poly;
use super::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Token::Int(input[start..i].parse().unwrap())));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(input[start..i].to_string())));
                continue;
            }
            other => {
                return Err(ParseError { position: start, message: format!("unexpected character '{other}'") })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, S: AsRef<str>> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    names: &'a [S],
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn nvars(&self) -> usize {
        self.names.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.here(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.signed_term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = acc + self.signed_term()?;
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = acc - self.signed_term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn signed_term(&mut self) -> Result<Poly, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(-self.term()?);
        }
        self.term()
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(&Token::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Token::Int(e)) => {
                    let Ok(e) = u32::try_from(&e) else {
                        return self.error("exponent too large");
                    };
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return self.error("expected unsigned integer exponent"),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                if self.peek() == Some(&Token::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Token::Int(d)) if !d.is_zero() => {
                            self.pos += 1;
                            Ok(Poly::constant(self.nvars(), Scalar::new(n, d)))
                        }
                        Some(Token::Int(_)) => self.error("zero denominator"),
                        _ => self.error("expected integer denominator"),
                    }
                } else {
                    Ok(Poly::constant(self.nvars(), Scalar::from_integer(n)))
                }
            }
            Some(Token::Ident(name)) => match self.names.iter().position(|v| v.as_ref() == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Poly::var(self.nvars(), i))
                }
                None => self.error(format!("undeclared variable '{name}'")),
            },
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return self.error("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => self.error(format!("unexpected token {t:?}")),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parse a polynomial over the declared variable names.
pub fn parse_poly<S: AsRef<str>>(input: &str, names: &[S]) -> Result<Poly, ParseError> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { tokens, pos: 0, end: input.len(), names };
    let p = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return parser.error("trailing input");
    }
    Ok(p)
}

/// Parse an exact rational literal such as `3`, `-2/5`.
pub fn parse_scalar(input: &str) -> Result<Scalar, ParseError> {
    let p = parse_poly::<&str>(input, &[])?;
    if p.is_zero() {
        return Ok(Scalar::zero());
    }
    let c = p.terms().next().map(|(_, c)| c.clone()).unwrap();
    Ok(c)
}
