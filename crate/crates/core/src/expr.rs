//! A tiny closed-form expression language for inline maps and candidate
//! distances.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'x' | 'y' | 'e' | 'pi' | func '(' sum (',' sum)* ')' | '(' sum ')'
//! func    := exp | ln | log | sqrt | abs | pow
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`. `log` is the natural logarithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" | "log" => Some(Func::Ln),
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            "pow" => Some(Func::Pow),
            _ => None,
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    Y,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Node::Num(c) => *c,
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval(x, y),
            Node::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Node::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Node::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Node::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Node::Pow(a, b) => pow(a.eval(x, y), b.eval(x, y)),
            Node::Call(f, args) => match f {
                Func::Exp => args[0].eval(x, y).exp(),
                Func::Ln => args[0].eval(x, y).ln(),
                Func::Sqrt => args[0].eval(x, y).sqrt(),
                Func::Abs => args[0].eval(x, y).abs(),
                Func::Pow => pow(args[0].eval(x, y), args[1].eval(x, y)),
            },
        }
    }

    /// `ln` of the value, pushing the log through exp, powers and products
    /// where that is exact, so `e^((x-y)^2)` never overflows.
    fn ln_eval(&self, x: f64, y: f64) -> f64 {
        let through = match self {
            Node::Call(Func::Exp, args) => args[0].eval(x, y),
            Node::Call(Func::Sqrt, args) => 0.5 * args[0].ln_eval(x, y),
            Node::Call(Func::Pow, args) => args[1].eval(x, y) * args[0].ln_eval(x, y),
            Node::Pow(a, b) => b.eval(x, y) * a.ln_eval(x, y),
            Node::Mul(a, b) => a.ln_eval(x, y) + b.ln_eval(x, y),
            Node::Div(a, b) => a.ln_eval(x, y) - b.ln_eval(x, y),
            _ => f64::NAN,
        };
        if through.is_nan() {
            self.eval(x, y).ln()
        } else {
            through
        }
    }

    fn uses_y(&self) -> bool {
        match self {
            Node::Y => true,
            Node::Num(_) | Node::X => false,
            Node::Neg(a) => a.uses_y(),
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => a.uses_y() || b.uses_y(),
            Node::Call(_, args) => args.iter().any(Node::uses_y),
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= i32::MAX as f64 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{text}` at {start}")))?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` at {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected `{op}` at {}",
                self.offset()
            )))
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(Error::Parse("unexpected end of expression".into()));
        };
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Node::Num(v)),
            Token::Op('(') => {
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected `{c}` at {at}"))),
            Token::Ident(name) => match name.as_str() {
                "x" => Ok(Node::X),
                "y" => Ok(Node::Y),
                "e" => Ok(Node::Num(std::f64::consts::E)),
                "pi" => Ok(Node::Num(std::f64::consts::PI)),
                _ => {
                    let f = Func::lookup(&name)
                        .ok_or_else(|| Error::Parse(format!("unknown name `{name}` at {at}")))?;
                    self.expect('(')?;
                    let mut args = vec![self.sum()?];
                    while self.eat(',') {
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    if args.len() != f.arity() {
                        return Err(Error::Parse(format!(
                            "`{name}` takes {} argument(s), got {}",
                            f.arity(),
                            args.len()
                        )));
                    }
                    Ok(Node::Call(f, args))
                }
            },
        }
    }
}

/// A parsed expression in `x` and optionally `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = tokenize(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            end: src.len(),
        };
        let root = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Parse(format!("trailing input at {}", p.offset())));
        }
        Ok(Expr {
            source: src.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True if the expression mentions `y`, i.e. is a two-point function.
    pub fn is_binary(&self) -> bool {
        self.root.uses_y()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.root.eval(x, 0.0)
    }

    pub fn eval2(&self, x: f64, y: f64) -> f64 {
        self.root.eval(x, y)
    }

    /// `ln` of [`Expr::eval2`], computed without forming large intermediates
    /// where the structure allows.
    pub fn ln_eval2(&self, x: f64, y: f64) -> f64 {
        self.root.ln_eval(x, y)
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl TryFrom<String> for Expr {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Expr::parse(&s)
    }
}

impl From<Expr> for String {
    fn from(e: Expr) -> String {
        e.source
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("(1 - x) / 4", 5.0), -1.0);
        assert_eq!(ev("x/4", 8.0), 2.0);
        assert_eq!(ev("1e-3 * 2E2", 0.0), 0.2);
    }

    #[test]
    fn functions_and_constants() {
        assert_eq!(ev("sqrt(x)", 16.0), 4.0);
        assert_eq!(ev("ln(e)", 0.0), 1.0);
        assert_eq!(ev("log(1)", 0.0), 0.0);
        assert_eq!(ev("pow(x, 3)", 2.0), 8.0);
        assert_eq!(ev("abs(-x)", 2.0), 2.0);
        assert_eq!(ev("pi", 0.0), std::f64::consts::PI);
        let f = |x: f64| (x - 1.0 - x.powi(3) / 10.0).exp();
        assert!((ev("exp(x - 1 - x^3/10)", 0.3) - f(0.3)).abs() < 1e-15);
    }

    #[test]
    fn log_domain_is_stable() {
        let d = Expr::parse("e^((x-y)^2)").unwrap();
        assert!(d.is_binary());
        assert_eq!(d.ln_eval2(0.0, 2.0), 4.0);
        assert_eq!(d.ln_eval2(0.0, 40.0), 1600.0);
        assert!(d.eval2(0.0, 40.0).is_infinite());
        let s = Expr::parse("sqrt(x) * y").unwrap();
        assert!((s.ln_eval2(4.0, 3.0) - 6f64.ln()).abs() < 1e-15);
        let neg = Expr::parse("(x - 3) * (y - 3)").unwrap();
        assert_eq!(neg.ln_eval2(1.0, 2.0), 2f64.ln());
    }

    #[test]
    fn errors() {
        for bad in ["", "1 +", "foo(x)", "sqrt(1, 2)", "(x", "x)", "2 $ 3", "z"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn serde_uses_source() {
        let e = Expr::parse("sqrt(x)").unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, "\"sqrt(x)\"");
        let back: Expr = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
        assert!(!e.is_binary());
    }
}
