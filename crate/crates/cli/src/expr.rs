//! Arithmetic expression language for user-defined right-hand sides.
//!
//! Grammar (precedence climbing): `+ -` < `* /` < unary `-` < `^`, with
//! `^` right-associative, so `-x^2` is `-(x^2)` and `2^3^2` is `2^(3^2)`.
//! Functions `sin cos abs sqrt exp sech` take exactly one parenthesized
//! argument; `pi` and `e` are named literals. Implicit multiplication is
//! rejected. Evaluation is total on finite inputs except division by zero,
//! which is reported as an error.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Function {
    Sin,
    Cos,
    Abs,
    Sqrt,
    Exp,
    Sech,
}

impl Function {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Function::Sin,
            "cos" => Function::Cos,
            "abs" => Function::Abs,
            "sqrt" => Function::Sqrt,
            "exp" => Function::Exp,
            "sech" => Function::Sech,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Function::Sin => x.sin(),
            Function::Cos => x.cos(),
            Function::Abs => x.abs(),
            Function::Sqrt => x.sqrt(),
            Function::Exp => x.exp(),
            Function::Sech => 1.0 / x.cosh(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(f64),
    /// Slot index into the evaluation variable table.
    Var(usize),
    Neg(Box<Expr>),
    Call(Function, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.position, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalError {
    pub message: String,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                tokens.push((i, Token::Plus));
                i += 1;
            }
            b'-' => {
                tokens.push((i, Token::Minus));
                i += 1;
            }
            b'*' => {
                tokens.push((i, Token::Star));
                i += 1;
            }
            b'/' => {
                tokens.push((i, Token::Slash));
                i += 1;
            }
            b'^' => {
                tokens.push((i, Token::Caret));
                i += 1;
            }
            b'(' => {
                tokens.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                tokens.push((i, Token::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
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
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let slice = &text[start..i];
                let value: f64 = slice.parse().map_err(|_| ParseError {
                    position: start,
                    message: format!("invalid number literal `{slice}`"),
                })?;
                tokens.push((start, Token::Number(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Token::Name(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character `{}`", &text[i..i + 1]),
                })
            }
        }
    }
    Ok(tokens)
}

/// Resolves identifiers while parsing: variables get a slot, named
/// parameters become constants.
pub struct NameTable {
    /// Variable names in slot order (t, then state components).
    pub variables: Vec<String>,
    /// Constant parameters usable by name.
    pub params: BTreeMap<String, f64>,
}

impl NameTable {
    /// Variables `t`, `y1..yn` and `y{k}_re` / `y{k}_im`. The plain `yk`
    /// slot carries the real part of component k; the `_im` slots follow
    /// all `_re` slots, so the table length is 1 + 2n.
    pub fn for_state(dim: usize, params: BTreeMap<String, f64>) -> Self {
        let mut variables = vec!["t".to_string()];
        for k in 1..=dim {
            variables.push(format!("y{k}"));
        }
        for k in 1..=dim {
            variables.push(format!("y{k}_im"));
        }
        Self { variables, params }
    }

    fn resolve(&self, name: &str) -> Option<Expr> {
        match name {
            "pi" => return Some(Expr::Number(std::f64::consts::PI)),
            "e" => return Some(Expr::Number(std::f64::consts::E)),
            _ => {}
        }
        if let Some(stripped) = name.strip_suffix("_re") {
            if let Some(slot) = self.variables.iter().position(|v| v == stripped) {
                return Some(Expr::Var(slot));
            }
        }
        if let Some(slot) = self.variables.iter().position(|v| v == name) {
            return Some(Expr::Var(slot));
        }
        self.params.get(name).map(|&v| Expr::Number(v))
    }
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    names: &'a NameTable,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.len)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.here(),
            message: message.into(),
        }
    }

    fn parse_expression(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let (op, prec, right_assoc) = match self.peek() {
                Some(Token::Plus) => (BinOp::Add, 10, false),
                Some(Token::Minus) => (BinOp::Sub, 10, false),
                Some(Token::Star) => (BinOp::Mul, 20, false),
                Some(Token::Slash) => (BinOp::Div, 20, false),
                Some(Token::Caret) => (BinOp::Pow, 30, true),
                Some(Token::RParen) | None => break,
                Some(other) => {
                    let other = other.clone();
                    return Err(self.error(format!(
                        "expected an operator, found {} (implicit multiplication is not supported)",
                        describe(&other)
                    )));
                }
            };
            if prec < min_prec {
                break;
            }
            self.next();
            let next_min = if right_assoc { prec } else { prec + 1 };
            let rhs = self.parse_expression(next_min)?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<Expr, ParseError> {
        match self.next() {
            Some((_, Token::Minus)) => {
                // Unary minus binds tighter than * but looser than ^.
                let inner = self.parse_expression(25)?;
                Ok(Expr::Neg(Box::new(inner)))
            }
            Some((_, Token::Number(v))) => Ok(Expr::Number(v)),
            Some((pos, Token::Name(name))) => {
                if let Some(function) = Function::from_name(&name) {
                    match self.next() {
                        Some((_, Token::LParen)) => {}
                        _ => {
                            return Err(ParseError {
                                position: pos,
                                message: format!("function `{name}` requires a parenthesized argument"),
                            })
                        }
                    }
                    let arg = self.parse_expression(0)?;
                    match self.next() {
                        Some((_, Token::RParen)) => Ok(Expr::Call(function, Box::new(arg))),
                        _ => Err(ParseError {
                            position: pos,
                            message: format!("unclosed argument of `{name}`"),
                        }),
                    }
                } else if let Some(expr) = self.names.resolve(&name) {
                    Ok(expr)
                } else {
                    Err(ParseError {
                        position: pos,
                        message: format!("unknown identifier `{name}`"),
                    })
                }
            }
            Some((_, Token::LParen)) => {
                let inner = self.parse_expression(0)?;
                match self.next() {
                    Some((_, Token::RParen)) => Ok(inner),
                    _ => Err(self.error("expected `)`")),
                }
            }
            Some((pos, other)) => Err(ParseError {
                position: pos,
                message: format!("expected a value, found {}", describe(&other)),
            }),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

fn describe(token: &Token) -> String {
    match token {
        Token::Number(v) => format!("number `{v}`"),
        Token::Name(n) => format!("identifier `{n}`"),
        Token::Plus => "`+`".into(),
        Token::Minus => "`-`".into(),
        Token::Star => "`*`".into(),
        Token::Slash => "`/`".into(),
        Token::Caret => "`^`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
    }
}

/// Parses one expression against the given name table.
pub fn parse(text: &str, names: &NameTable) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(ParseError {
            position: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        names,
        len: text.len(),
    };
    let expr = parser.parse_expression(0)?;
    if let Some((pos, tok)) = parser.next() {
        return Err(ParseError {
            position: pos,
            message: format!("trailing input starting at {}", describe(&tok)),
        });
    }
    Ok(expr)
}

impl Expr {
    pub fn eval(&self, vars: &[f64]) -> Result<f64, EvalError> {
        match self {
            Expr::Number(v) => Ok(*v),
            Expr::Var(slot) => Ok(vars[*slot]),
            Expr::Neg(inner) => Ok(-inner.eval(vars)?),
            Expr::Call(function, arg) => Ok(function.apply(arg.eval(vars)?)),
            Expr::Bin(op, lhs, rhs) => {
                let a = lhs.eval(vars)?;
                let b = rhs.eval(vars)?;
                Ok(match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError {
                                message: format!("division by zero ({a} / 0)"),
                            });
                        }
                        a / b
                    }
                    BinOp::Pow => a.powf(b),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> NameTable {
        let mut params = BTreeMap::new();
        params.insert("a".to_string(), 0.25);
        NameTable::for_state(2, params)
    }

    fn eval(text: &str, vars: &[f64]) -> f64 {
        parse(text, &table()).unwrap().eval(vars).unwrap()
    }

    const V: [f64; 5] = [0.5, 1.5, -2.0, 0.0, 0.0]; // t, y1, y2, y1_im, y2_im

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", &V), 7.0);
        assert_eq!(eval("2 ^ 3 ^ 2", &V), 512.0); // right-assoc
        assert_eq!(eval("10 - 4 - 3", &V), 3.0); // left-assoc
        assert_eq!(eval("-2 ^ 2", &V), -4.0); // -(2^2)
        assert_eq!(eval("(-2) ^ 2", &V), 4.0);
        assert_eq!(eval("2 ^ -1", &V), 0.5);
        assert_eq!(eval("6 / 2 / 3", &V), 1.0);
    }

    #[test]
    fn variables_params_and_literals() {
        assert_eq!(eval("t", &V), 0.5);
        assert_eq!(eval("y1 + y2", &V), -0.5);
        assert_eq!(eval("y1_re - y2_im", &V), 1.5);
        assert_eq!(eval("a * 4", &V), 1.0);
        assert!((eval("pi", &V) - std::f64::consts::PI).abs() < 1e-15);
        assert!((eval("e", &V) - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn functions() {
        assert!((eval("sin(pi / 2)", &V) - 1.0).abs() < 1e-15);
        assert!((eval("cos(0)", &V) - 1.0).abs() < 1e-15);
        assert_eq!(eval("abs(y2)", &V), 2.0);
        assert_eq!(eval("sqrt(16)", &V), 4.0);
        assert!((eval("exp(1)", &V) - std::f64::consts::E).abs() < 1e-15);
        assert!((eval("sech(0)", &V) - 1.0).abs() < 1e-15);
        let x = 0.7f64;
        assert!((eval("sech(0.7)", &V) - 1.0 / x.cosh()).abs() < 1e-15);
    }

    #[test]
    fn example_expression_vanishes_at_zero() {
        // sin 0 = 0 wipes out the whole product.
        assert_eq!(eval("a*sin(t)*cos(y1+y2)", &[0.0, 0.3, 0.4, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn implicit_multiplication_rejected() {
        for bad in ["2 t", "2t", "(1)(2)", "y1 y2", "2 pi"] {
            let err = parse(bad, &table()).unwrap_err();
            assert!(
                err.message.contains("implicit multiplication")
                    || err.message.contains("trailing"),
                "{bad}: {err}"
            );
        }
    }

    #[test]
    fn parse_errors_are_reported() {
        assert!(parse("", &table()).is_err());
        assert!(parse("1 +", &table()).is_err());
        assert!(parse("sin 1", &table()).is_err());
        assert!(parse("(1 + 2", &table()).is_err());
        assert!(parse("nope + 1", &table()).is_err());
        assert!(parse("1 $ 2", &table()).is_err());
        assert!(parse("y3", &table()).is_err()); // arity 2 table
    }

    #[test]
    fn division_by_zero_is_an_eval_error() {
        let expr = parse("1 / y1", &table()).unwrap();
        assert!(expr.eval(&[0.0, 0.0, 1.0, 0.0, 0.0]).is_err());
        assert_eq!(expr.eval(&[0.0, 2.0, 1.0, 0.0, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn scientific_notation() {
        assert_eq!(eval("1e3", &V), 1000.0);
        assert_eq!(eval("2.5e-2", &V), 0.025);
        assert_eq!(eval("1.5E2", &V), 150.0);
    }
}
