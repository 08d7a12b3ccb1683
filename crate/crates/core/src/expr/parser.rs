//! Pratt parser for the expression grammar.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
//! associative). The operand of `^` may itself start with a unary minus, so
//! `2^-x` parses as `2^(-x)`.

use std::fmt;

use thiserror::Error;

use super::{Expr, Func};

/// Nesting bound that keeps recursion shallow on hostile input.
pub const MAX_NESTING: usize = 256;

const OPERAND: &[&str] = &["number", "x", "function", "(", "-"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at offset {}: found {}", self.offset, self.found)?;
        if !self.expected.is_empty() {
            write!(f, ", expected one of: {}", self.expected.join(", "))?;
        }
        Ok(())
    }
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
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn error(offset: usize, found: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError { offset, found: found.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    let digits = k;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    if k == digits {
                        return Err(error(k, found_at(text, k), &["exponent digits"]));
                    }
                    j = k;
                }
                let lit = &text[start..j];
                let v: f64 = lit.parse().map_err(|_| error(start, format!("malformed number `{lit}`"), &["number"]))?;
                i = j;
                out.push((start, Tok::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((start, Tok::Ident(text[start..j].to_string())));
                i = j;
                continue;
            }
            _ => return Err(error(start, found_at(text, start), &["number", "x", "function", "operator", "(", ")"])),
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

fn found_at(text: &str, offset: usize) -> String {
    match text[offset..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &(usize, Tok) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let (off, tok) = self.bump();
        if tok == Tok::RParen {
            Ok(())
        } else {
            Err(error(off, tok.describe(), &[")", "operator"]))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            let off = self.peek().0;
            return Err(error(off, "nesting deeper than the parser limit", &[]));
        }
        let mut lhs = self.prefix()?;
        loop {
            let (lbp, rbp) = match self.peek().1 {
                Tok::Plus | Tok::Minus => (1, 2),
                Tok::Star | Tok::Slash => (3, 4),
                Tok::Caret => (7, 6),
                _ => break,
            };
            if lbp < min_bp {
                break;
            }
            let (_, op) = self.bump();
            let rhs = self.expr(rbp)?;
            lhs = match op {
                Tok::Plus => Expr::add(lhs, rhs),
                Tok::Minus => Expr::sub(lhs, rhs),
                Tok::Star => Expr::mul(lhs, rhs),
                Tok::Slash => Expr::div(lhs, rhs),
                _ => Expr::pow(lhs, rhs),
            };
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let (off, tok) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Minus => Ok(Expr::neg(self.expr(5)?)),
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) if name == "x" => Ok(Expr::X),
            Tok::Ident(name) => {
                let Some(func) = Func::from_name(&name) else {
                    return Err(error(
                        off,
                        format!("unknown identifier `{name}`"),
                        &["x", "exp", "ln", "sin", "cos", "abs", "sqrt"],
                    ));
                };
                let (poff, p) = self.bump();
                if p != Tok::LParen {
                    return Err(error(poff, p.describe(), &["("]));
                }
                let arg = self.expr(0)?;
                self.expect_rparen()?;
                Ok(Expr::call(func, arg))
            }
            other => Err(error(off, other.describe(), OPERAND)),
        }
    }
}

/// Parse an expression in `x`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, depth: 0 };
    let e = p.expr(0)?;
    let (off, tok) = p.bump();
    if tok != Tok::End {
        return Err(error(off, tok.describe(), &["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("1+2*x").unwrap(), Expr::add(Expr::Const(1.0), Expr::mul(Expr::Const(2.0), Expr::X)));
        assert_eq!(parse("-x^2").unwrap(), Expr::neg(Expr::pow(Expr::X, Expr::Const(2.0))));
        assert_eq!(parse("x^2^3").unwrap(), Expr::pow(Expr::X, Expr::pow(Expr::Const(2.0), Expr::Const(3.0))));
        assert_eq!(parse(" ( x ) ").unwrap(), Expr::X);
        assert_eq!(parse("2*x+1").unwrap(), Expr::add(Expr::mul(Expr::Const(2.0), Expr::X), Expr::Const(1.0)));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Const(1.5e-3));
        assert_eq!(parse(".5").unwrap(), Expr::Const(0.5));
        assert_eq!(parse("2E2").unwrap(), Expr::Const(200.0));
        assert_eq!(parse("1e").unwrap_err().offset, 2);
        assert!(parse(".").is_err());
    }

    #[test]
    fn positioned_errors() {
        let e = parse("x^^2").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.expected.contains(&"number".to_string()));
        assert_eq!(parse("").unwrap_err().offset, 0);
        assert_eq!(parse("x+").unwrap_err().offset, 2);
        assert_eq!(parse("(x").unwrap_err().offset, 2);
        assert_eq!(parse("x)").unwrap_err().offset, 1);
        assert_eq!(parse("foo(x)").unwrap_err().offset, 0);
        assert_eq!(parse("exp x").unwrap_err().offset, 4);
        assert_eq!(parse("x # 2").unwrap_err().offset, 2);
        assert_eq!(parse("2 x").unwrap_err().offset, 2);
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let deep = "(".repeat(100_000) + "x" + &")".repeat(100_000);
        assert!(parse(&deep).is_err());
        let minus = "-".repeat(100_000) + "x";
        assert!(parse(&minus).is_err());
        let ok = "(".repeat(50) + "x" + &")".repeat(50);
        assert_eq!(parse(&ok).unwrap(), Expr::X);
    }

    #[test]
    fn non_ascii_input_is_an_error() {
        let e = parse("x+λ").unwrap_err();
        assert_eq!(e.offset, 2);
        assert_eq!(e.found, "`λ`");
    }
}
