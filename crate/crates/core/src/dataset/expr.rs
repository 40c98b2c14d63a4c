//! Tiny arithmetic language for custom utility functions.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, decimal literals,
//! attributes `a0..a{d-1}` and the functions `sqrt abs ln exp min max pow`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Attr(usize),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Abs,
    Ln,
    Exp,
    Min,
    Max,
    Pow,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "ln" => (Func::Ln, 1),
            "exp" => (Func::Exp, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "pow" => (Func::Pow, 2),
            _ => return None,
        })
    }
}

impl Expr {
    pub fn parse(src: &str, dims: usize) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            dims,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, attrs: &[u32]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Attr(i) => f64::from(attrs[*i]),
            Expr::Neg(e) => -e.eval(attrs),
            Expr::Bin(op, l, r) => {
                let (l, r) = (l.eval(attrs), r.eval(attrs));
                match op {
                    Op::Add => l + r,
                    Op::Sub => l - r,
                    Op::Mul => l * r,
                    Op::Div => l / r,
                    Op::Pow => l.powf(r),
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(attrs);
                match f {
                    Func::Sqrt => a.sqrt(),
                    Func::Abs => a.abs(),
                    Func::Ln => a.ln(),
                    Func::Exp => a.exp(),
                    Func::Min => a.min(args[1].eval(attrs)),
                    Func::Max => a.max(args[1].eval(attrs)),
                    Func::Pow => a.powf(args[1].eval(attrs)),
                }
            }
        }
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    dims: usize,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Expression(format!("{what} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            // right associative
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::Expression(format!("bad number `{text}`")))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if let Some((func, arity)) = Func::lookup(name) {
            if !self.eat(b'(') {
                return Err(self.error("expected `(` after function name"));
            }
            let mut args = vec![self.expr()?];
            while self.eat(b',') {
                args.push(self.expr()?);
            }
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            if args.len() != arity {
                return Err(Error::Expression(format!("{name} takes {arity} argument(s), got {}", args.len())));
            }
            return Ok(Expr::Call(func, args));
        }
        let idx = name
            .strip_prefix('a')
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::Expression(format!("unknown identifier `{name}`")))?;
        if idx >= self.dims {
            return Err(Error::Expression(format!("attribute a{idx} out of range for d={}", self.dims)));
        }
        Ok(Expr::Attr(idx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, attrs: &[u32]) -> f64 {
        Expr::parse(src, attrs.len()).unwrap().eval(attrs)
    }

    #[test]
    fn precedence() {
        assert_eq!(eval("1 + 2 * 3", &[]), 7.0);
        assert_eq!(eval("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(eval("-2^2", &[]), -4.0);
        assert_eq!(eval("2^3^2", &[]), 512.0);
        assert_eq!(eval("10 - 4 - 3", &[]), 3.0);
    }

    #[test]
    fn attributes_and_functions() {
        assert_eq!(eval("sqrt(a0*a0 + a1*a1)", &[3, 4]), 5.0);
        assert_eq!(eval("max(a0, a1) - min(a0, a1)", &[3, 9]), 6.0);
        assert_eq!(eval("pow(a0, 2) / 2", &[6]), 18.0);
        assert_eq!(eval("1.5e1", &[]), 15.0);
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("a2", 2).is_err());
        assert!(Expr::parse("foo(1)", 1).is_err());
        assert!(Expr::parse("min(1)", 1).is_err());
        assert!(Expr::parse("(1 + 2", 1).is_err());
        assert!(Expr::parse("1 2", 1).is_err());
        assert!(Expr::parse("", 1).is_err());
    }
}
