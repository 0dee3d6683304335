//! Arithmetic expressions over a single variable `t`.
//!
//! The model functions (stability index, Hurst function, amplitude) are
//! supplied as text such as `1.5+0.3*sin(2*pi*t)`. This module tokenizes and
//! parses that text into an [`ExprAst`], evaluates it, and offers the small
//! numerical checks the rest of the crate needs (central differences and
//! range validation on a grid).
//!
//! Precedence, from tightest to loosest: `^` (right associative), unary
//! minus, `*` `/`, `+` `-` (both left associative). So `-2^2` is `-(2^2)`
//! and `2^3^2` is `2^(3^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("domain error in `{op}` at t = {t}")]
    Domain { op: &'static str, t: f64 },
    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },
    #[error("validation failed at t = {t}: {source}")]
    AtPoint {
        t: f64,
        #[source]
        source: Box<ExprError>,
    },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Built-in functions. The set is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Exp,
    Log,
    Abs,
    Sqrt,
    Min,
    Max,
    Pow,
}

impl Function {
    fn lookup(name: &str) -> Option<Function> {
        Some(match name {
            "sin" => Function::Sin,
            "cos" => Function::Cos,
            "exp" => Function::Exp,
            "log" => Function::Log,
            "abs" => Function::Abs,
            "sqrt" => Function::Sqrt,
            "min" => Function::Min,
            "max" => Function::Max,
            "pow" => Function::Pow,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::Sin => "sin",
            Function::Cos => "cos",
            Function::Exp => "exp",
            Function::Log => "log",
            Function::Abs => "abs",
            Function::Sqrt => "sqrt",
            Function::Min => "min",
            Function::Max => "max",
            Function::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Function::Min | Function::Max | Function::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Constant(f64),
    Variable,
    Unary(UnaryOp, Box<ExprAst>),
    Binary(BinaryOp, Box<ExprAst>, Box<ExprAst>),
    Call(Function, Vec<ExprAst>),
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(source: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent part, only when followed by digits
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
                let text = &source[start..i];
                let value = text.parse::<f64>().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                TokenKind::Number(value)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokenKind::Ident(source[start..i].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                TokenKind::Op(c as char)
            }
            b'(' => {
                i += 1;
                TokenKind::LParen
            }
            b')' => {
                i += 1;
                TokenKind::RParen
            }
            b',' => {
                i += 1;
                TokenKind::Comma
            }
            _ => {
                let ch = source[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        tokens.push(Token {
            kind,
            offset: start,
        });
    }
    tokens.push(Token {
        kind: TokenKind::End,
        offset: source.len(),
    });
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, expected: &str) -> ExprError {
        let tok = self.peek();
        let found = match &tok.kind {
            TokenKind::End => "end of input".to_string(),
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Op(c) => format!("`{c}`"),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
        };
        ExprError::Syntax {
            offset: tok.offset,
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn expression(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Op('+') => BinaryOp::Add,
                TokenKind::Op('-') => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Op('*') => BinaryOp::Mul,
                TokenKind::Op('/') => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.unary()?;
            lhs = ExprAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        match self.peek().kind {
            TokenKind::Op('-') => {
                self.advance();
                Ok(ExprAst::Unary(UnaryOp::Neg, Box::new(self.unary()?)))
            }
            TokenKind::Op('+') => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.primary()?;
        if self.peek().kind == TokenKind::Op('^') {
            self.advance();
            // the exponent may itself carry a sign or another power: right associative
            let exponent = self.unary()?;
            return Ok(ExprAst::Binary(
                BinaryOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExprAst, ExprError> {
        let tok = self.peek().clone();
        match tok.kind {
            TokenKind::Number(v) => {
                self.advance();
                Ok(ExprAst::Constant(v))
            }
            TokenKind::LParen => {
                self.advance();
                let inner = self.expression()?;
                if self.peek().kind != TokenKind::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.advance();
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                self.advance();
                if self.peek().kind == TokenKind::LParen {
                    let func =
                        Function::lookup(&name).ok_or_else(|| ExprError::UnknownIdentifier {
                            name: name.clone(),
                            offset: tok.offset,
                        })?;
                    self.advance();
                    let mut args = Vec::new();
                    if self.peek().kind != TokenKind::RParen {
                        loop {
                            args.push(self.expression()?);
                            match self.peek().kind {
                                TokenKind::Comma => {
                                    self.advance();
                                }
                                TokenKind::RParen => break,
                                _ => return Err(self.unexpected("`,` or `)`")),
                            }
                        }
                    }
                    self.advance();
                    if args.len() != func.arity() {
                        return Err(ExprError::Arity {
                            name,
                            expected: func.arity(),
                            found: args.len(),
                        });
                    }
                    return Ok(ExprAst::Call(func, args));
                }
                match name.as_str() {
                    "t" => Ok(ExprAst::Variable),
                    "pi" => Ok(ExprAst::Constant(std::f64::consts::PI)),
                    "e" => Ok(ExprAst::Constant(std::f64::consts::E)),
                    _ => Err(ExprError::UnknownIdentifier {
                        name,
                        offset: tok.offset,
                    }),
                }
            }
            _ => Err(self.unexpected("an operand")),
        }
    }
}

/// Parses `source` into an expression tree.
pub fn parse_expr(source: &str) -> Result<ExprAst, ExprError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    if parser.peek().kind == TokenKind::End {
        return Err(ExprError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let ast = parser.expression()?;
    if parser.peek().kind != TokenKind::End {
        return Err(parser.unexpected("an operator or end of input"));
    }
    Ok(ast)
}

fn checked_pow(base: f64, exponent: f64, t: f64) -> Result<f64, ExprError> {
    if base < 0.0 && exponent.fract() != 0.0 {
        return Err(ExprError::Domain { op: "^", t });
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(ExprError::Domain { op: "^", t });
    }
    Ok(base.powf(exponent))
}

impl ExprAst {
    fn eval_inner(&self, t: f64) -> Result<f64, ExprError> {
        let v = match self {
            ExprAst::Constant(c) => *c,
            ExprAst::Variable => t,
            ExprAst::Unary(UnaryOp::Neg, inner) => -inner.eval_inner(t)?,
            ExprAst::Binary(op, lhs, rhs) => {
                let a = lhs.eval_inner(t)?;
                let b = rhs.eval_inner(t)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(ExprError::Domain { op: "/", t });
                        }
                        a / b
                    }
                    BinaryOp::Pow => checked_pow(a, b, t)?,
                }
            }
            ExprAst::Call(func, args) => {
                let a = args[0].eval_inner(t)?;
                match func {
                    Function::Sin => a.sin(),
                    Function::Cos => a.cos(),
                    Function::Exp => a.exp(),
                    Function::Log => {
                        if a <= 0.0 {
                            return Err(ExprError::Domain { op: "log", t });
                        }
                        a.ln()
                    }
                    Function::Abs => a.abs(),
                    Function::Sqrt => {
                        if a < 0.0 {
                            return Err(ExprError::Domain { op: "sqrt", t });
                        }
                        a.sqrt()
                    }
                    Function::Min => a.min(args[1].eval_inner(t)?),
                    Function::Max => a.max(args[1].eval_inner(t)?),
                    Function::Pow => checked_pow(a, args[1].eval_inner(t)?, t)?,
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::NonFinite { t })
        }
    }

    /// Evaluates the expression at `t`. Non-finite intermediate values are
    /// reported as errors.
    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        self.eval_inner(t)
    }

    /// True when the tree never references `t`.
    pub fn is_constant(&self) -> bool {
        match self {
            ExprAst::Constant(_) => true,
            ExprAst::Variable => false,
            ExprAst::Unary(_, inner) => inner.is_constant(),
            ExprAst::Binary(_, a, b) => a.is_constant() && b.is_constant(),
            ExprAst::Call(_, args) => args.iter().all(ExprAst::is_constant),
        }
    }
}

/// Fully parenthesized rendering; reparsing it yields an equivalent tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Constant(c) => write!(f, "{c:?}"),
            ExprAst::Variable => write!(f, "t"),
            ExprAst::Unary(UnaryOp::Neg, inner) => write!(f, "(-{inner})"),
            ExprAst::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ExprAst::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn eval_expr(ast: &ExprAst, t: f64) -> Result<f64, ExprError> {
    ast.eval(t)
}

/// Central difference `(f(t+h) - f(t-h)) / 2h`.
pub fn fd_derivative(ast: &ExprAst, t: f64, step: f64) -> Result<f64, ExprError> {
    if !(step > 0.0) {
        return Err(ExprError::Invalid(format!("step must be positive, got {step}")));
    }
    let hi = ast.eval(t + step)?;
    let lo = ast.eval(t - step)?;
    Ok((hi - lo) / (2.0 * step))
}

/// A parsed model function together with its source text and the interval
/// on which it is declared.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncSpec {
    source: String,
    ast: ExprAst,
    domain: (f64, f64),
}

impl FuncSpec {
    pub fn parse(source: &str, domain: (f64, f64)) -> Result<Self, ExprError> {
        if !(domain.0 < domain.1) || !domain.0.is_finite() || !domain.1.is_finite() {
            return Err(ExprError::Invalid(format!(
                "domain ({}, {}) is not a finite nonempty interval",
                domain.0, domain.1
            )));
        }
        Ok(FuncSpec {
            source: source.to_string(),
            ast: parse_expr(source)?,
            domain,
        })
    }

    pub fn constant(value: f64, domain: (f64, f64)) -> Self {
        FuncSpec {
            source: format!("{value:?}"),
            ast: ExprAst::Constant(value),
            domain,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &ExprAst {
        &self.ast
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        self.ast.eval(t)
    }

    pub fn is_constant(&self) -> bool {
        self.ast.is_constant()
    }

    /// Uniform grid of `n` points on the closed declared domain.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.domain;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }

    /// Largest |f'| seen by central differences on a grid.
    pub fn max_abs_derivative(&self, grid_n: usize, step: f64) -> Result<f64, ExprError> {
        let (lo, hi) = self.domain;
        let mut best = 0.0f64;
        for t in self.grid(grid_n) {
            let t = t.clamp(lo + step, hi - step);
            let d = fd_derivative(&self.ast, t, step).map_err(|e| ExprError::AtPoint {
                t,
                source: Box::new(e),
            })?;
            best = best.max(d.abs());
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeReport {
    pub lo: f64,
    pub hi: f64,
    pub min: f64,
    pub max: f64,
    pub argmin: f64,
    pub argmax: f64,
    pub passed: bool,
}

/// Evaluates `fs` on `grid_n` points over its domain and checks that every
/// value lies in `[lo, hi]`.
pub fn validate_range(
    fs: &FuncSpec,
    lo: f64,
    hi: f64,
    grid_n: usize,
) -> Result<RangeReport, ExprError> {
    if grid_n < 2 {
        return Err(ExprError::Invalid(format!("grid_n must be at least 2, got {grid_n}")));
    }
    let mut report = RangeReport {
        lo,
        hi,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: f64::NAN,
        argmax: f64::NAN,
        passed: false,
    };
    for t in fs.grid(grid_n) {
        let v = fs.eval(t).map_err(|e| ExprError::AtPoint {
            t,
            source: Box::new(e),
        })?;
        if v < report.min {
            report.min = v;
            report.argmin = t;
        }
        if v > report.max {
            report.max = v;
            report.argmax = t;
        }
    }
    report.passed = report.min >= lo && report.max <= hi;
    Ok(report)
}
