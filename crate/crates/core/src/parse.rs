//! Text front end for expressions, polynomials, and comma-separated 1-form
//! component lists.
//!
//! Grammar (both modes share it):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := 'x' uint | number | prim '(' expr ')' | '(' expr ')'
//!         | '-' atom | 'int' '[' ident ']' '(' expr ')'
//! prim   := 'sin' | 'cos' | 'exp' | 'tanh' | 'atan'
//! ```
//!
//! Numbers are unsigned decimal literals (`3`, `0.5`, `2e3`) or integer
//! ratios (`1/8`); a leading minus is the unary operator, which binds tighter
//! than `^` (so `-x1^2` is `(-x1)^2`). Variables are 1-indexed in text and
//! 0-indexed internally. Polynomial mode rejects primitives and integral
//! nodes and keeps every number as an exact rational; expression mode converts
//! numbers to `f64`. Integration parameters are named identifiers bound by
//! `int[...]`, mapped to numeric ids in order of appearance.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::expr::{Expr, ParamId, Prim};
use crate::poly::{Poly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Number(String),
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Number(s) => format!("number '{s}'"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '+' => {
                bump(&mut chars);
                Tok::Plus
            }
            '-' => {
                bump(&mut chars);
                Tok::Minus
            }
            '*' => {
                bump(&mut chars);
                Tok::Star
            }
            '^' => {
                bump(&mut chars);
                Tok::Caret
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars);
                Tok::RBracket
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            d if d.is_ascii_digit() => {
                let mut s = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(bump(&mut chars));
                }
                if chars.peek() == Some(&'.') {
                    s.push(bump(&mut chars));
                    if !chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(ParseError::new(tline, tcol, "digits expected after '.'"));
                    }
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        s.push(bump(&mut chars));
                    }
                }
                if matches!(chars.peek(), Some('e' | 'E')) {
                    s.push(bump(&mut chars));
                    if matches!(chars.peek(), Some('+' | '-')) {
                        s.push(bump(&mut chars));
                    }
                    if !chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(ParseError::new(tline, tcol, "digits expected in exponent"));
                    }
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        s.push(bump(&mut chars));
                    }
                } else if chars.peek() == Some(&'/') && !s.contains('.') {
                    // Integer ratio literal a/b.
                    s.push(bump(&mut chars));
                    if !chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(ParseError::new(tline, tcol, "digits expected after '/'"));
                    }
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        s.push(bump(&mut chars));
                    }
                }
                Tok::Number(s)
            }
            a if a.is_ascii_alphabetic() => {
                let mut s = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    s.push(bump(&mut chars));
                }
                Tok::Ident(s)
            }
            other => {
                return Err(ParseError::new(
                    tline,
                    tcol,
                    format!("unexpected character '{other}'"),
                ));
            }
        };
        tokens.push(Token { tok, line: tline, col: tcol });
    }
    tokens.push(Token { tok: Tok::Eof, line, col });
    Ok(tokens)
}

/// Exact rational value of a number literal.
fn number_to_rational(text: &str, line: usize, col: usize) -> Result<Rational, ParseError> {
    let bad = || ParseError::new(line, col, format!("malformed number '{text}'"));
    if let Some((num, den)) = text.split_once('/') {
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ParseError::new(line, col, "zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (whole, frac) = match mantissa.split_once('.') {
        Some((w, f)) => (w, f),
        None => (mantissa, ""),
    };
    let digits: BigInt = format!("{whole}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i64;
    let pow10 = |e: u64| {
        let mut r = BigInt::one();
        for _ in 0..e {
            r *= 10;
        }
        r
    };
    Ok(if scale >= 0 {
        Rational::from_integer(digits * pow10(scale as u64))
    } else {
        Rational::new(digits, pow10((-scale) as u64))
    })
}

fn number_to_f64(text: &str, line: usize, col: usize) -> Result<f64, ParseError> {
    if let Some((num, den)) = text.split_once('/') {
        let n: f64 = num
            .parse()
            .map_err(|_| ParseError::new(line, col, format!("malformed number '{text}'")))?;
        let d: f64 = den
            .parse()
            .map_err(|_| ParseError::new(line, col, format!("malformed number '{text}'")))?;
        if d == 0.0 {
            return Err(ParseError::new(line, col, "zero denominator"));
        }
        return Ok(n / d);
    }
    text.parse()
        .map_err(|_| ParseError::new(line, col, format!("malformed number '{text}'")))
}

/// `x`-prefixed identifiers become variable indices; checks the 1-indexed
/// value against the ambient dimension.
fn variable_index(name: &str, dimension: usize, line: usize, col: usize) -> Option<Result<usize, ParseError>> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let value: usize = match digits.parse() {
        Ok(v) => v,
        Err(_) => {
            return Some(Err(ParseError::new(line, col, format!("variable '{name}' is out of range"))));
        }
    };
    if value == 0 || value > dimension {
        return Some(Err(ParseError::new(
            line,
            col,
            format!("variable '{name}' exceeds dimension {dimension}"),
        )));
    }
    Some(Ok(value - 1))
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dimension: usize,
    scope: Vec<(String, ParamId)>,
    next_param: ParamId,
}

impl Parser {
    fn new(text: &str, dimension: usize) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
            dimension,
            scope: Vec::new(),
            next_param: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Token, ParseError> {
        let t = self.advance();
        if t.tok == want {
            Ok(t)
        } else {
            Err(ParseError::new(
                t.line,
                t.col,
                format!("expected {}, found {}", want.describe(), t.tok.describe()),
            ))
        }
    }

    fn unexpected(&self, t: &Token, wanted: &str) -> ParseError {
        ParseError::new(t.line, t.col, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let t = self.advance();
        match &t.tok {
            Tok::Number(s) if s.bytes().all(|b| b.is_ascii_digit()) => s
                .parse()
                .map_err(|_| ParseError::new(t.line, t.col, format!("exponent '{s}' too large"))),
            _ => Err(self.unexpected(&t, "an integer exponent")),
        }
    }

    // ---- expression mode ----

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    terms.push(Expr::negate(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("nonempty") } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.peek().tok == Tok::Star {
            self.advance();
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("nonempty")
        } else {
            Expr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.advance();
            let k = self.exponent()?;
            return Ok(Expr::power(base, k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.advance();
        match &t.tok {
            Tok::Number(s) => Ok(Expr::Const(number_to_f64(s, t.line, t.col)?)),
            Tok::Minus => Ok(Expr::negate(self.atom()?)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if name == "int" && self.peek().tok == Tok::LBracket {
                    self.advance();
                    let pname = {
                        let t = self.advance();
                        match t.tok {
                            Tok::Ident(n) => n,
                            _ => return Err(self.unexpected(&t, "a parameter name")),
                        }
                    };
                    self.expect(Tok::RBracket)?;
                    self.expect(Tok::LParen)?;
                    let id = self.next_param;
                    self.next_param += 1;
                    self.scope.push((pname, id));
                    let body = self.expr()?;
                    self.scope.pop();
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::integral(id, body));
                }
                if let Some(p) = Prim::from_name(name) {
                    if self.peek().tok == Tok::LParen {
                        self.advance();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Expr::prim(p, arg));
                    }
                }
                if let Some(idx) = variable_index(name, self.dimension, t.line, t.col) {
                    return Ok(Expr::Var(idx?));
                }
                if let Some((_, id)) =
                    self.scope.iter().rev().find(|(n, _)| n == name)
                {
                    return Ok(Expr::Param(*id));
                }
                Err(ParseError::new(t.line, t.col, format!("unknown identifier '{name}'")))
            }
            _ => Err(self.unexpected(&t, "an expression")),
        }
    }

    // ---- polynomial mode ----

    fn poly_expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.poly_term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    acc = &acc + &self.poly_term()?;
                }
                Tok::Minus => {
                    self.advance();
                    acc = &acc - &self.poly_term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn poly_term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.poly_factor()?;
        while self.peek().tok == Tok::Star {
            self.advance();
            acc = &acc * &self.poly_factor()?;
        }
        Ok(acc)
    }

    fn poly_factor(&mut self) -> Result<Poly, ParseError> {
        let base = self.poly_atom()?;
        if self.peek().tok == Tok::Caret {
            self.advance();
            let k = self.exponent()?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn poly_atom(&mut self) -> Result<Poly, ParseError> {
        let t = self.advance();
        match &t.tok {
            Tok::Number(s) => {
                Ok(Poly::constant(self.dimension, number_to_rational(s, t.line, t.col)?))
            }
            // In polynomial text a leading minus covers the whole power
            // (`-x1^2` is `-(x1^2)`), so printed canonical forms with
            // negative leading coefficients parse back to themselves.
            Tok::Minus => Ok(-&self.poly_factor()?),
            Tok::LParen => {
                let inner = self.poly_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(idx) = variable_index(name, self.dimension, t.line, t.col) {
                    return Ok(Poly::var(self.dimension, idx?));
                }
                Err(ParseError::new(
                    t.line,
                    t.col,
                    format!("'{name}' is not allowed in a polynomial"),
                ))
            }
            _ => Err(self.unexpected(&t, "a polynomial")),
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        let t = self.peek().clone();
        if t.tok == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&t, "end of input"))
        }
    }
}

/// Parses one expression over `x1..x<dimension>`.
pub fn parse_expr(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text, dimension)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parses a comma-separated list of expressions (1-form components).
pub fn parse_expr_components(text: &str, dimension: usize) -> Result<Vec<Expr>, ParseError> {
    let mut p = Parser::new(text, dimension)?;
    let mut out = vec![p.expr()?];
    while p.peek().tok == Tok::Comma {
        p.advance();
        out.push(p.expr()?);
    }
    p.expect_eof()?;
    Ok(out)
}

/// Parses one polynomial with exact rational coefficients.
pub fn parse_poly(text: &str, dimension: usize) -> Result<Poly, ParseError> {
    let mut p = Parser::new(text, dimension)?;
    let poly = p.poly_expr()?;
    p.expect_eof()?;
    Ok(poly)
}

/// Parses a comma-separated list of polynomials (1-form components).
pub fn parse_poly_components(text: &str, dimension: usize) -> Result<Vec<Poly>, ParseError> {
    let mut p = Parser::new(text, dimension)?;
    let mut out = vec![p.poly_expr()?];
    while p.peek().tok == Tok::Comma {
        p.advance();
        out.push(p.poly_expr()?);
    }
    p.expect_eof()?;
    Ok(out)
}
