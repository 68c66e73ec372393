use super::ast::{Expr, SMOOTH_NAMES};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

/// Parses `+ - * / ^int`, unary minus, parentheses, numbers, identifiers
/// (letters followed by letters, digits or `_`), and the built-in functions
/// `smoothstep`, `smoothstep_d1..3` and `sqrt`.
///
/// `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            message: message.to_string(),
        }
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

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = Expr::add(acc, self.term()?);
            } else if self.eat(b'-') {
                acc = Expr::sub(acc, self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = Expr::mul(acc, self.unary()?);
            } else if self.eat(b'/') {
                acc = Expr::div(acc, self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::neg(self.unary()?))
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let k = self.exponent()?;
            Ok(Expr::pow(base, k))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.eat(b'(');
        let neg = paren && self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("exponent must be an integer literal"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let k: i32 = text.parse().map_err(|_| self.error("exponent out of range"))?;
        if paren {
            self.expect(b')')?;
        }
        Ok(if neg { -k } else { k })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(order) = SMOOTH_NAMES.iter().position(|&n| n == name) {
                    let arg = self.call_arg()?;
                    Ok(Expr::smooth(order as u8, arg))
                } else if name == "sqrt" {
                    Ok(Expr::sqrt(self.call_arg()?))
                } else if self.peek() == Some(b'(') {
                    Err(ParseError {
                        pos: start,
                        message: format!("unknown function {name:?}"),
                    })
                } else {
                    Ok(Expr::var(name))
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn call_arg(&mut self) -> Result<Expr, ParseError> {
        self.expect(b'(')?;
        let e = self.expr()?;
        self.expect(b')')?;
        Ok(e)
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ParseError {
                pos: start,
                message: format!("bad number {text:?}"),
            })
    }
}
