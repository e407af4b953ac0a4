//! Recursive-descent parser for polynomial expressions: `+ - * / ^`,
//! parentheses, integer literals and ring variables. No implicit
//! multiplication (`2x` is an error; write `2*x`). Division is supported
//! only by nonzero constant subexpressions (`x/2`, `1/3*(x+y)`), which
//! keeps parsing total over the free cover — inverses of ring elements
//! are a localization concern, not a syntax one.
//!
//! Errors carry the byte offset into the expression; the CLI layer adds
//! file/line context.

use super::poly::{Poly, PolyRing};
use crate::{Error, Result};

pub fn parse_poly(ring: &PolyRing, src: &str) -> Result<Poly> {
    let mut p = Parser { ring, bytes: src.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.pos == p.bytes.len() {
        return Err(p.err("empty expression"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err(&format!("unexpected character '{}'", p.bytes[p.pos] as char)));
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a PolyRing,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::InvalidInput(format!("at byte {}: {}", self.pos, msg))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        self.skip_ws();
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.ring.add(&acc, &t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = self.ring.sub(&acc, &t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.ring.mul(&acc, &f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.factor()?;
                    let c = f.as_constant(self.ring.field).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "at byte {at}: division is only supported by nonzero constants"
                        ))
                    })?;
                    let inv = c.inv().ok_or_else(|| {
                        Error::InvalidInput(format!("at byte {at}: division by zero"))
                    })?;
                    acc = self.ring.scale(&acc, &inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.base()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.nat()?;
            if n > 4096 {
                return Err(self.err("exponent too large"));
            }
            return Ok(self.ring.pow(&base, n as u32));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(self.ring.neg(&f))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.nat()?;
                Ok(self.ring.constant(self.ring.field.from_i64(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|c| c.is_ascii_alphanumeric() || c == b'_')
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                match self.ring.var_index(name) {
                    Some(i) => Ok(self.ring.var(i)),
                    None => Err(Error::InvalidInput(format!(
                        "at byte {start}: unknown variable '{name}' (ring vars: {})",
                        self.ring.vars.join(", ")
                    ))),
                }
            }
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn nat(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .map_err(|_| Error::InvalidInput(format!("at byte {start}: integer literal too large")))
    }
}
