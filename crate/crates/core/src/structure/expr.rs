//! Recursive-descent parser and evaluator for the structure/coupling
//! expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := number | variable | 'q' | param | '(' expr ')' | func '(' expr ')'
//! func   := abs | sqrt | sin | cos | exp | bracket
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. Evaluation is carried out in complex arithmetic; callers
//! decide whether an imaginary part is acceptable.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error as ThisError;

use super::qbracket;

#[derive(Debug, Clone, PartialEq, Eq, ThisError)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        Self {
            position,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Sqrt,
    Sin,
    Cos,
    Exp,
    Bracket,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "bracket" => Func::Bracket,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Bracket => "bracket",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the variable slots declared at parse time.
    Var(usize),
    Q,
    Param(String, f64),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Names an expression may refer to.
#[derive(Debug, Clone, Default)]
pub struct Scope<'a> {
    pub variables: &'a [&'a str],
    pub allow_q: bool,
    pub params: Option<&'a BTreeMap<String, f64>>,
}

/// Values bound at evaluation time.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    pub variables: &'a [Complex64],
    pub q: Option<Complex64>,
}

impl Expr {
    pub fn parse(src: &str, scope: &Scope<'_>) -> Result<Expr, ParseError> {
        let tokens = tokenize(src)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            scope,
            src_len: src.len(),
        };
        let expr = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError::new(tok.pos, format!("unexpected {}", tok.kind)));
        }
        Ok(expr)
    }

    pub fn eval(&self, b: &Bindings<'_>) -> Complex64 {
        match self {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::Var(slot) => b.variables[*slot],
            // the parser only emits Q when q is in scope
            Expr::Q => b.q.unwrap_or(Complex64::new(f64::NAN, 0.0)),
            Expr::Param(_, v) => Complex64::new(*v, 0.0),
            Expr::Neg(e) => -e.eval(b),
            Expr::Binary(op, l, r) => {
                let l = l.eval(b);
                let r = r.eval(b);
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => l / r,
                    BinOp::Pow => power(l, r),
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.eval(b);
                match f {
                    Func::Abs => Complex64::new(a.norm(), 0.0),
                    Func::Sqrt => {
                        if a.im == 0.0 && a.re >= 0.0 {
                            Complex64::new(a.re.sqrt(), 0.0)
                        } else {
                            a.sqrt()
                        }
                    }
                    Func::Sin => real_or(a, f64::sin, Complex64::sin),
                    Func::Cos => real_or(a, f64::cos, Complex64::cos),
                    Func::Exp => real_or(a, f64::exp, Complex64::exp),
                    Func::Bracket => match b.q {
                        Some(q) => qbracket(q, a),
                        None => Complex64::new(f64::NAN, 0.0),
                    },
                }
            }
        }
    }

    /// True if the expression mentions `q` (directly or through `bracket`).
    pub fn uses_q(&self) -> bool {
        match self {
            Expr::Q | Expr::Call(Func::Bracket, _) => true,
            Expr::Num(_) | Expr::Var(_) | Expr::Param(..) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.uses_q(),
            Expr::Binary(_, l, r) => l.uses_q() || r.uses_q(),
        }
    }
}

fn real_or(a: Complex64, real: fn(f64) -> f64, complex: fn(Complex64) -> Complex64) -> Complex64 {
    if a.im == 0.0 {
        Complex64::new(real(a.re), 0.0)
    } else {
        complex(a)
    }
}

fn power(base: Complex64, exponent: Complex64) -> Complex64 {
    if exponent.im == 0.0 {
        let e = exponent.re;
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
            if base.im == 0.0 {
                return Complex64::new(base.re.powi(e as i32), 0.0);
            }
            return base.powi(e as i32);
        }
        if base.im == 0.0 && base.re >= 0.0 {
            return Complex64::new(base.re.powf(e), 0.0);
        }
    }
    if base == Complex64::new(0.0, 0.0) {
        return if exponent.re > 0.0 {
            base
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    base.powc(exponent)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(slot) => write!(f, "${slot}"),
            Expr::Q => write!(f, "q"),
            Expr::Param(name, _) => write!(f, "{name}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l}{sym}{r})")
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Number(v) => write!(f, "number {v}"),
            TokenKind::Ident(s) => write!(f, "identifier '{s}'"),
            TokenKind::Op(c) => write!(f, "'{c}'"),
            TokenKind::LParen => write!(f, "'('"),
            TokenKind::RParen => write!(f, "')'"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // scientific notation: 1e-3, 2.5E+4
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
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::new(start, format!("malformed number '{text}'")))?;
            out.push(Token {
                kind: TokenKind::Number(value),
                pos: start,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident(src[start..i].to_string()),
                pos: start,
            });
        } else {
            let kind = match c {
                '+' | '-' | '*' | '/' | '^' => TokenKind::Op(c),
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                _ => return Err(ParseError::new(start, format!("unexpected character '{c}'"))),
            };
            out.push(Token { kind, pos: start });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'s> {
    tokens: Vec<Token>,
    pos: usize,
    scope: &'s Scope<'s>,
    src_len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek_op(&self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c),
                ..
            }) if ops.contains(c) => Some(*c),
            _ => None,
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.next() {
            Some(Token {
                kind: TokenKind::RParen,
                ..
            }) => Ok(()),
            Some(t) => Err(ParseError::new(t.pos, format!("expected ')', found {}", t.kind))),
            None => Err(ParseError::new(self.src_len, "expected ')', found end of input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek_op(&['+', '-']) {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(op) = self.peek_op(&['*', '/']) {
            self.pos += 1;
            let rhs = self.factor()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op(&['-']).is_some() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek_op(&['^']).is_some() {
            self.pos += 1;
            let exponent = self.factor()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next() else {
            return Err(ParseError::new(self.src_len, "unexpected end of input"));
        };
        match tok.kind {
            TokenKind::Number(v) => Ok(Expr::Num(v)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            TokenKind::Ident(name) => self.identifier(name, tok.pos),
            other => Err(ParseError::new(tok.pos, format!("unexpected {other}"))),
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        if let Some(func) = Func::from_name(&name) {
            match self.next() {
                Some(Token {
                    kind: TokenKind::LParen,
                    ..
                }) => {}
                _ => return Err(ParseError::new(pos, format!("function '{name}' needs '('"))),
            }
            if func == Func::Bracket && !self.scope.allow_q {
                return Err(ParseError::new(pos, "bracket() needs a deformation parameter q"));
            }
            let arg = self.expr()?;
            self.expect_rparen()?;
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if let Some(slot) = self.scope.variables.iter().position(|v| *v == name) {
            return Ok(Expr::Var(slot));
        }
        if name == "q" && self.scope.allow_q {
            return Ok(Expr::Q);
        }
        if let Some(v) = self.scope.params.and_then(|p| p.get(&name)) {
            return Ok(Expr::Param(name, *v));
        }
        Err(ParseError::new(pos, format!("unknown identifier '{name}'")))
    }
}
