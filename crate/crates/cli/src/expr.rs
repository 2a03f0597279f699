//! A small expression language for `--fn`.
//!
//! Variables `z` and `w`, the constant `i`, decimal and rational constants
//! (`1/2` is just division), `+ - * /`, integer powers `^`, `|x|` and the
//! functions `conj`, `abs`, `abs2`, `re`, `im`, `exp`.

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot parse expression at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Func {
    Conj,
    Abs,
    Abs2,
    Re,
    Im,
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(C64),
    Z,
    W,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, z: C64, w: C64) -> C64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Z => z,
            Expr::W => w,
            Expr::Neg(a) => -a.eval(z, w),
            Expr::Add(a, b) => a.eval(z, w) + b.eval(z, w),
            Expr::Sub(a, b) => a.eval(z, w) - b.eval(z, w),
            Expr::Mul(a, b) => a.eval(z, w) * b.eval(z, w),
            Expr::Div(a, b) => a.eval(z, w) / b.eval(z, w),
            Expr::Pow(a, n) => a.eval(z, w).powi(*n),
            Expr::Call(f, a) => {
                let v = a.eval(z, w);
                match f {
                    Func::Conj => v.conj(),
                    Func::Abs => C64::new(v.norm(), 0.0),
                    Func::Abs2 => C64::new(v.norm_sqr(), 0.0),
                    Func::Re => C64::new(v.re, 0.0),
                    Func::Im => C64::new(v.im, 0.0),
                    Func::Exp => v.exp(),
                }
            }
        }
    }

    pub fn uses_w(&self) -> bool {
        match self {
            Expr::W => true,
            Expr::Const(_) | Expr::Z => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.uses_w(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_w() || b.uses_w(),
        }
    }

    /// Every divisor, including bases raised to negative powers.
    pub fn denominators(&self) -> Vec<Expr> {
        let mut out = vec![];
        self.collect_denominators(&mut out);
        out
    }

    fn collect_denominators(&self, out: &mut Vec<Expr>) {
        match self {
            Expr::Const(_) | Expr::Z | Expr::W => {}
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_denominators(out),
            Expr::Pow(a, n) => {
                if *n < 0 {
                    out.push((**a).clone());
                }
                a.collect_denominators(out);
            }
            Expr::Div(a, b) => {
                out.push((**b).clone());
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_denominators(out);
                b.collect_denominators(out);
            }
        }
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, in_bars: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    in_bars: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.to_string() })
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

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let Ok(n) = digits.parse::<i32>() else {
            return self.err("exponent must be an integer");
        };
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(b'|') if self.in_bars == 0 || !self.closing_bar_ahead() => {
                self.pos += 1;
                self.in_bars += 1;
                let e = self.expr()?;
                self.in_bars -= 1;
                if !self.eat(b'|') {
                    return self.err("expected closing '|'");
                }
                Ok(Expr::Call(Func::Abs, Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }

    /// Inside `|…|` a bar closes the group; a new group only opens on a bar
    /// that cannot be a closer, i.e. one directly after an operator.
    fn closing_bar_ahead(&self) -> bool {
        let before = self.src[..self.pos].iter().rev().find(|c| !c.is_ascii_whitespace());
        !matches!(before, None | Some(b'+' | b'-' | b'*' | b'/' | b'(' | b'|' | b'^'))
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(x) => Ok(Expr::Const(C64::new(x, 0.0))),
            Err(_) => {
                self.pos = start;
                self.err("malformed number")
            }
        }
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let func = match name {
            "z" => return Ok(Expr::Z),
            "w" => return Ok(Expr::W),
            "i" => return Ok(Expr::Const(C64::new(0.0, 1.0))),
            "zbar" => return Ok(Expr::Call(Func::Conj, Box::new(Expr::Z))),
            "wbar" => return Ok(Expr::Call(Func::Conj, Box::new(Expr::W))),
            "conj" => Func::Conj,
            "abs" => Func::Abs,
            "abs2" => Func::Abs2,
            "re" => Func::Re,
            "im" => Func::Im,
            "exp" => Func::Exp,
            _ => {
                self.pos = start;
                return self.err(&format!("unknown name '{name}'"));
            }
        };
        if !self.eat(b'(') {
            return self.err("expected '(' after function name");
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return self.err("expected ')'");
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
