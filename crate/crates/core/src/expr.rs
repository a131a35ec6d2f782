//! Expressions in one or more variables, evaluated over a numeric tower of
//! reals and field elements.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' factor)?
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Precedence is `^` > unary `-` > `*` `/` > `+` `-`, with `^`
//! right-associative. Numbers are decimal literals with an optional
//! exponent; there is no implicit multiplication.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::analytic;
use crate::error::{Error, Result};
use crate::field::Laurent;
use crate::microscope;

/// Functions callable from expressions. The first six are analytic and are
/// dispatched through Taylor composition for field arguments; the last
/// three are pointwise real functions.
pub const FUNCTIONS: &[&str] = &[
    "sin",
    "cos",
    "exp",
    "log",
    "sqrt",
    "asin",
    "abs",
    "sign",
    "blancmange",
];

/// Binary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// An immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

/// A value in the numeric tower.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Field(Laurent),
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(r) => Some(*r),
            Value::Field(_) => None,
        }
    }

    fn to_field(&self, order: usize) -> Result<Laurent> {
        match self {
            Value::Real(r) => Laurent::from_real(*r, order),
            Value::Field(x) => Ok(x.clone()),
        }
    }
}

/// Variable bindings for evaluation.
pub type Env = HashMap<String, Value>;

impl Expr {
    /// Parses the grammar above; errors carry the byte position.
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        parser.expect_end()?;
        Ok(expr)
    }

    /// Free variables, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(e) => e.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Recursive evaluation over the tower. Mixed real/field operands
    /// promote the real side into the field of the other operand.
    pub fn eval(&self, env: &Env) -> Result<Value> {
        match self {
            Expr::Num(c) => Ok(Value::Real(*c)),
            Expr::Var(name) => env
                .get(name)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(name.clone())),
            Expr::Neg(e) => match e.eval(env)? {
                Value::Real(r) => Ok(Value::Real(-r)),
                Value::Field(x) => Ok(Value::Field(x.neg())),
            },
            Expr::Bin(op, l, r) => {
                let lv = l.eval(env)?;
                let rv = r.eval(env)?;
                apply_bin(*op, lv, rv)
            }
            Expr::Call(name, args) => {
                let first = args
                    .first()
                    .ok_or_else(|| Error::InvalidArgument(format!("{name} takes 1 argument")))?;
                apply_call(name, first.eval(env)?)
            }
        }
    }

    /// Fast single-variable evaluation over the reals; used by the sequence
    /// and microscope scans. Errors on any other unbound variable.
    pub fn eval_real(&self, var: &str, x: f64) -> Result<f64> {
        match self {
            Expr::Num(c) => Ok(*c),
            Expr::Var(name) => {
                if name == var {
                    Ok(x)
                } else {
                    Err(Error::UnboundVariable(name.clone()))
                }
            }
            Expr::Neg(e) => Ok(-e.eval_real(var, x)?),
            Expr::Bin(op, l, r) => {
                let a = l.eval_real(var, x)?;
                let b = r.eval_real(var, x)?;
                real_bin(*op, a, b)
            }
            Expr::Call(name, args) => {
                let first = args
                    .first()
                    .ok_or_else(|| Error::InvalidArgument(format!("{name} takes 1 argument")))?;
                real_call(name, first.eval_real(var, x)?)
            }
        }
    }

    /// Canonical minimal-parentheses form; `parse(print(e))` is
    /// structurally equal to `e` for parser-shaped trees (in particular,
    /// non-negative numeric literals).
    pub fn print(&self) -> String {
        let mut out = String::new();
        self.print_into(&mut out);
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn print_into(&self, out: &mut String) {
        match self {
            Expr::Num(c) => out.push_str(&format!("{c}")),
            Expr::Var(v) => out.push_str(v),
            Expr::Neg(e) => {
                out.push('-');
                // A negated sum or product needs parentheses; unary minus
                // binds tighter than '*' but looser than '^'.
                self.print_child(e, e.precedence() <= 2, out);
            }
            Expr::Bin(op, l, r) => {
                let p = self.precedence();
                match op {
                    BinOp::Add | BinOp::Sub => {
                        self.print_child(l, l.precedence() < p, out);
                        out.push(' ');
                        out.push_str(op.symbol());
                        out.push(' ');
                        self.print_child(r, r.precedence() <= p, out);
                    }
                    BinOp::Mul | BinOp::Div => {
                        self.print_child(l, l.precedence() < p, out);
                        out.push_str(op.symbol());
                        self.print_child(r, r.precedence() <= p, out);
                    }
                    BinOp::Pow => {
                        // The base must be an atom; the exponent is a factor.
                        self.print_child(l, l.precedence() < 5, out);
                        out.push('^');
                        self.print_child(r, r.precedence() <= 2, out);
                    }
                }
            }
            Expr::Call(name, args) => {
                out.push_str(name);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    a.print_into(out);
                }
                out.push(')');
            }
        }
    }

    fn print_child(&self, child: &Expr, parens: bool, out: &mut String) {
        if parens {
            out.push('(');
            child.print_into(out);
            out.push(')');
        } else {
            child.print_into(out);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.print())
    }
}

fn apply_bin(op: BinOp, l: Value, r: Value) -> Result<Value> {
    match (l, r) {
        (Value::Real(a), Value::Real(b)) => Ok(Value::Real(real_bin(op, a, b)?)),
        (l, r) => {
            let order = match (&l, &r) {
                (Value::Field(x), _) => x.order(),
                (_, Value::Field(x)) => x.order(),
                _ => unreachable!(),
            };
            // Field exponentiation: integer real exponents use repeated
            // multiplication; anything else goes through exp/log.
            if op == BinOp::Pow {
                if let Value::Real(p) = r {
                    return Ok(Value::Field(analytic::pow_value(&l.to_field(order)?, p)?));
                }
            }
            let a = l.to_field(order)?;
            let b = r.to_field(order)?;
            let out = match op {
                BinOp::Add => a.add(&b)?,
                BinOp::Sub => a.sub(&b)?,
                BinOp::Mul => a.mul(&b)?,
                BinOp::Div => a.div(&b)?,
                BinOp::Pow => {
                    // a^b = exp(b * log(a)) for a field exponent.
                    let log_a = analytic::apply_analytic("log", &a)?;
                    analytic::apply_analytic("exp", &b.mul(&log_a)?)?
                }
            };
            Ok(Value::Field(out))
        }
    }
}

fn real_bin(op: BinOp, a: f64, b: f64) -> Result<f64> {
    let out = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return Err(Error::DivisionByZero);
            }
            a / b
        }
        BinOp::Pow => {
            let p = a.powf(b);
            if p.is_nan() && !a.is_nan() && !b.is_nan() {
                return Err(Error::DomainViolation {
                    func: "pow".into(),
                    value: a,
                    domain: "base > 0 for non-integer exponents".into(),
                });
            }
            p
        }
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFiniteResult)
    }
}

fn apply_call(name: &str, arg: Value) -> Result<Value> {
    match arg {
        Value::Real(x) => Ok(Value::Real(real_call(name, x)?)),
        Value::Field(x) => match name {
            // abs and sign are only well-defined away from their kink: a
            // field argument with standard part 0 straddles it.
            "abs" => {
                let st = x.standard_part()?;
                if st > 0.0 {
                    Ok(Value::Field(x))
                } else if st < 0.0 {
                    Ok(Value::Field(x.neg()))
                } else {
                    Err(Error::NonAnalytic("abs".into(), 0.0))
                }
            }
            "sign" => {
                let st = x.standard_part()?;
                if st == 0.0 {
                    Err(Error::NonAnalytic("sign".into(), 0.0))
                } else {
                    Ok(Value::Field(Laurent::from_real(st.signum(), x.order())?))
                }
            }
            "blancmange" => {
                // Nowhere differentiable: no Taylor expansion exists at any
                // point, so field arguments are rejected outright.
                Err(Error::NonAnalytic(
                    "blancmange".into(),
                    x.standard_part().unwrap_or(f64::NAN),
                ))
            }
            _ => Ok(Value::Field(analytic::apply_analytic(name, &x)?)),
        },
    }
}

fn real_call(name: &str, x: f64) -> Result<f64> {
    let out = match name {
        "sin" => x.sin(),
        "cos" => x.cos(),
        "exp" => x.exp(),
        "log" => {
            if x <= 0.0 {
                return Err(Error::DomainViolation {
                    func: "log".into(),
                    value: x,
                    domain: "(0, inf)".into(),
                });
            }
            x.ln()
        }
        "sqrt" => {
            if x < 0.0 {
                return Err(Error::DomainViolation {
                    func: "sqrt".into(),
                    value: x,
                    domain: "[0, inf)".into(),
                });
            }
            x.sqrt()
        }
        "asin" => {
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::DomainViolation {
                    func: "asin".into(),
                    value: x,
                    domain: "[-1, 1]".into(),
                });
            }
            x.asin()
        }
        "abs" => x.abs(),
        "sign" => {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            }
        }
        "blancmange" => microscope::blancmange(x, microscope::DEFAULT_DEPTH),
        _ => return Err(Error::UnknownFunction(name.to_string())),
    };
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFiniteResult)
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
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
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn syntax(pos: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position: pos,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let pos = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => tokens.push(Token {
                kind: TokenKind::Plus,
                pos,
            }),
            b'-' => tokens.push(Token {
                kind: TokenKind::Minus,
                pos,
            }),
            b'*' => tokens.push(Token {
                kind: TokenKind::Star,
                pos,
            }),
            b'/' => tokens.push(Token {
                kind: TokenKind::Slash,
                pos,
            }),
            b'^' => tokens.push(Token {
                kind: TokenKind::Caret,
                pos,
            }),
            b'(' => tokens.push(Token {
                kind: TokenKind::LParen,
                pos,
            }),
            b')' => tokens.push(Token {
                kind: TokenKind::RParen,
                pos,
            }),
            b',' => tokens.push(Token {
                kind: TokenKind::Comma,
                pos,
            }),
            b'0'..=b'9' | b'.' => {
                let (value, end) = lex_number(bytes, i)?;
                tokens.push(Token {
                    kind: TokenKind::Num(value),
                    pos,
                });
                i = end;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let name = std::str::from_utf8(&bytes[i..j]).unwrap().to_string();
                tokens.push(Token {
                    kind: TokenKind::Ident(name),
                    pos,
                });
                i = j;
                continue;
            }
            _ => return Err(syntax(pos, format!("unexpected character {:?}", b as char))),
        }
        i += 1;
    }
    Ok(tokens)
}

/// Lexes a decimal literal starting at `start`. A trailing `e`/`E` is taken
/// as scientific notation only when immediately followed by a digit or a
/// signed digit, so `2e-5` is one number while `2*e - 5` involves the
/// identifier `e`.
fn lex_number(bytes: &[u8], start: usize) -> Result<(f64, usize)> {
    let mut i = start;
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
        let next = bytes.get(i + 1).copied();
        let after = bytes.get(i + 2).copied();
        let scientific = match next {
            Some(d) if d.is_ascii_digit() => true,
            Some(b'+') | Some(b'-') => after.is_some_and(|d| d.is_ascii_digit()),
            _ => false,
        };
        if scientific {
            i += 2;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    let text = std::str::from_utf8(&bytes[start..i]).unwrap();
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok((v, i)),
        _ => Err(syntax(start, format!("malformed number {text:?}"))),
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|t| t.pos)
            .unwrap_or_else(|| self.tokens.last().map(|t| t.pos + 1).unwrap_or(0))
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_end(&self) -> Result<()> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(syntax(self.here(), "unexpected trailing input"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.advance();
                    let rhs = self.term()?;
                    lhs = Expr::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(TokenKind::Minus) => {
                    self.advance();
                    let rhs = self.term()?;
                    lhs = Expr::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(TokenKind::Star) => {
                    self.advance();
                    let rhs = self.factor()?;
                    lhs = Expr::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(TokenKind::Slash) => {
                    self.advance();
                    let rhs = self.factor()?;
                    lhs = Expr::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(TokenKind::Minus)) {
            self.advance();
            let inner = self.factor()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(TokenKind::Caret)) {
            self.advance();
            let exponent = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.advance().map(|t| t.kind) {
            Some(TokenKind::Num(v)) => Ok(Expr::Num(v)),
            Some(TokenKind::Ident(name)) => {
                if matches!(self.peek(), Some(TokenKind::LParen)) {
                    self.advance();
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(TokenKind::Comma)) {
                        self.advance();
                        args.push(self.expr()?);
                    }
                    match self.advance().map(|t| t.kind) {
                        Some(TokenKind::RParen) => {}
                        _ => return Err(syntax(self.here(), "unbalanced parenthesis")),
                    }
                    if !FUNCTIONS.contains(&name.as_str()) {
                        return Err(syntax(pos, format!("unknown function `{name}`")));
                    }
                    if args.len() != 1 {
                        return Err(syntax(
                            pos,
                            format!("{name} takes 1 argument, got {}", args.len()),
                        ));
                    }
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Var(name))
                }
            }
            Some(TokenKind::LParen) => {
                let inner = self.expr()?;
                match self.advance().map(|t| t.kind) {
                    Some(TokenKind::RParen) => Ok(inner),
                    _ => Err(syntax(self.here(), "unbalanced parenthesis")),
                }
            }
            Some(other) => Err(syntax(pos, format!("unexpected token {other:?}"))),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}
