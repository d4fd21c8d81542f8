//! Boundary selector expressions such as `"x==1"` or
//! `"y<0 & x>-sin(pi/3)"`, evaluated at edge midpoints.
//!
//! Grammar (Matlab-flavoured, elementwise operators accepted as synonyms):
//!
//! ```text
//! or    := and ('|' and)*
//! and   := cmp ('&' cmp)*
//! cmp   := sum (('=='|'<='|'>='|'<'|'>') sum)?
//! sum   := prod (('+'|'-') prod)*
//! prod  := unary (('*'|'/'|'.*'|'./') unary)*
//! unary := '-' unary | pow
//! pow   := atom (('^'|'.^') unary)?
//! atom  := number | 'x' | 'y' | 'pi' | func '(' or ')' | '(' or ')'
//! ```

use std::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Sqrt,
    Abs,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Or,
    And,
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
enum Expr {
    Num(f64),
    X,
    Y,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let truth = |v: bool| if v { 1.0 } else { 0.0 };
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Call(f, e) => {
                let v = e.eval(x, y);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => v.sqrt(),
                    Func::Abs => v.abs(),
                    Func::Exp => v.exp(),
                }
            }
            Expr::Bin(BinOp::And, l, r) => truth(l.eval(x, y) != 0.0 && r.eval(x, y) != 0.0),
            Expr::Bin(BinOp::Or, l, r) => truth(l.eval(x, y) != 0.0 || r.eval(x, y) != 0.0),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(x, y), r.eval(x, y));
                match op {
                    BinOp::Eq => truth(a == b),
                    BinOp::Le => truth(a <= b),
                    BinOp::Ge => truth(a >= b),
                    BinOp::Lt => truth(a < b),
                    BinOp::Gt => truth(a > b),
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        }
    }
}

/// A parsed selector, usable as a predicate over points.
#[derive(Clone, PartialEq)]
pub struct Selector {
    source: String,
    expr: Expr,
}

impl fmt::Debug for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Selector").field(&self.source).finish()
    }
}

impl Selector {
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Raw value of the expression (comparisons yield 0 or 1).
    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.expr.eval(x, y)
    }

    pub fn matches(&self, x: f64, y: f64) -> bool {
        self.value(x, y) != 0.0
    }
}

pub fn parse_selector(src: &str) -> Result<Selector> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, pos: 0, len: src.len() };
    let expr = p.or()?;
    if let Some((tok, at)) = p.tokens.get(p.pos) {
        return Err(syntax(*at, format!("unexpected `{tok}`")));
    }
    Ok(Selector {
        source: src.to_string(),
        expr,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Op(s) => f.write_str(s),
            Tok::LParen => f.write_str("("),
            Tok::RParen => f.write_str(")"),
        }
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::SelectorSyntax {
        pos,
        msg: msg.into(),
    }
}

const OPERATORS: [&str; 16] = [
    "==", "<=", ">=", "&&", "||", ".*", "./", ".^", "<", ">", "&", "|", "+", "-", "*", "/",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
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
                .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
        } else if c == b'(' {
            out.push((Tok::LParen, i));
            i += 1;
        } else if c == b')' {
            out.push((Tok::RParen, i));
            i += 1;
        } else if c == b'^' {
            out.push((Tok::Op("^"), i));
            i += 1;
        } else if let Some(op) = OPERATORS.iter().find(|op| src[i..].starts_with(**op)) {
            out.push((Tok::Op(op), i));
            i += op.len();
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(syntax(i, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |(_, p)| *p)
    }

    fn eat_op(&mut self, ops: &[&str]) -> Option<&'static str> {
        match self.peek() {
            Some(Tok::Op(op)) if ops.contains(op) => {
                let op = *op;
                self.pos += 1;
                Some(op)
            }
            _ => None,
        }
    }

    fn or(&mut self) -> Result<Expr> {
        let mut lhs = self.and()?;
        while self.eat_op(&["|", "||"]).is_some() {
            lhs = Expr::Bin(BinOp::Or, Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut lhs = self.cmp()?;
        while self.eat_op(&["&", "&&"]).is_some() {
            lhs = Expr::Bin(BinOp::And, Box::new(lhs), Box::new(self.cmp()?));
        }
        Ok(lhs)
    }

    fn cmp(&mut self) -> Result<Expr> {
        let lhs = self.sum()?;
        let op = match self.eat_op(&["==", "<=", ">=", "<", ">"]) {
            Some("==") => BinOp::Eq,
            Some("<=") => BinOp::Le,
            Some(">=") => BinOp::Ge,
            Some("<") => BinOp::Lt,
            Some(">") => BinOp::Gt,
            _ => return Ok(lhs),
        };
        Ok(Expr::Bin(op, Box::new(lhs), Box::new(self.sum()?)))
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.prod()?;
        while let Some(op) = self.eat_op(&["+", "-"]) {
            let op = if op == "+" { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.prod()?));
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&["*", ".*", "/", "./"]) {
            let op = if op.ends_with('*') { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&["-"]).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.pow()
    }

    fn pow(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op(&["^", ".^"]).is_some() {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(syntax(self.at(), "expected `)`")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.at();
        let Some((tok, _)) = self.tokens.get(self.pos).cloned() else {
            return Err(syntax(at, "unexpected end of input"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.or()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "y" => return Ok(Expr::Y),
                    "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    "abs" => Func::Abs,
                    "exp" => Func::Exp,
                    _ => return Err(Error::UnknownIdentifier(name)),
                };
                if self.peek() != Some(&Tok::LParen) {
                    return Err(syntax(self.at(), format!("expected `(` after `{name}`")));
                }
                self.pos += 1;
                let arg = self.or()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            other => Err(syntax(at, format!("unexpected `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(s: &str) -> Selector {
        parse_selector(s).unwrap()
    }

    #[test]
    fn equality_on_side() {
        let s = sel("x==1");
        assert!(s.matches(1.0, 0.25));
        assert!(!s.matches(0.5, 0.0));
    }

    #[test]
    fn elementwise_power() {
        let s = sel("x.^2 + y.^2 > 3.8^2");
        assert!(s.matches(4.0, 0.0));
        assert!(!s.matches(3.0, 0.0));
    }

    #[test]
    fn conjunction_with_function() {
        let s = sel("y<0 & x>-sin(pi/3)");
        assert!(s.matches(0.0, -1.0));
        assert!(!s.matches(-0.9, -1.0));
        assert!(!s.matches(0.0, 1.0));
    }

    #[test]
    fn precedence() {
        // '|' binds looser than '&'
        let s = sel("x==0 | x==1 & y==1");
        assert!(s.matches(0.0, 0.5));
        assert!(!s.matches(1.0, 0.5));
        assert!(s.matches(1.0, 1.0));
        assert_eq!(sel("-2^2").value(0.0, 0.0), -4.0);
        assert_eq!(sel("2^-1").value(0.0, 0.0), 0.5);
        assert_eq!(sel("1 - 2 - 3").value(0.0, 0.0), -4.0);
        assert_eq!(sel("8 ./ 2 .* 2").value(0.0, 0.0), 8.0);
        assert!(sel("y==0 | x==1").matches(1.0, 0.3));
        assert!(sel("abs(x-0.5) <= 1e-1").matches(0.55, 0.0));
        assert!(sel("x > .5").matches(0.6, 0.0));
    }

    #[test]
    fn errors() {
        match parse_selector("x == (1") {
            Err(Error::SelectorSyntax { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_selector("z > 1"), Err(Error::UnknownIdentifier(s)) if s == "z"));
        assert!(matches!(parse_selector("tan(x)"), Err(Error::UnknownIdentifier(_))));
        assert!(matches!(parse_selector("x $ 1"), Err(Error::SelectorSyntax { pos: 2, .. })));
        assert!(parse_selector("").is_err());
        assert!(parse_selector("x 1").is_err());
    }
}
