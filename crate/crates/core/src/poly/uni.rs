use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use crate::error::{FieldError, PolyError};
use crate::field::{parse_hex, Embedding, FieldCtx, FieldElement};

/// Sparse univariate polynomial over a [`FieldCtx`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    ctx: FieldCtx,
    terms: BTreeMap<u32, FieldElement>,
}

/// Largest exponent accepted from text.
pub const MAX_UNI_DEGREE: u32 = 1 << 24;

impl UniPoly {
    pub fn zero(ctx: FieldCtx) -> Self {
        UniPoly {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    /// `x^d`.
    pub fn monomial(ctx: FieldCtx, d: u32) -> Self {
        Self::from_terms(ctx, [(d, FieldElement::ONE)])
    }

    pub fn from_terms(ctx: FieldCtx, terms: impl IntoIterator<Item = (u32, FieldElement)>) -> Self {
        let mut p = Self::zero(ctx);
        for (d, c) in terms {
            p.add_term(d, c);
        }
        p
    }

    /// Sum of `x^d` over the given exponents (characteristic 2, so repeats
    /// cancel).
    pub fn from_exponents(ctx: FieldCtx, exps: &[u32]) -> Self {
        Self::from_terms(ctx, exps.iter().map(|&d| (d, FieldElement::ONE)))
    }

    pub fn add_term(&mut self, d: u32, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        debug_assert!(self.ctx.contains(c));
        let e = self.terms.entry(d).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&d);
        }
    }

    #[inline]
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (u32, FieldElement)> + '_ {
        self.terms.iter().map(|(d, c)| (*d, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`Self::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, d: u32) -> FieldElement {
        self.terms.get(&d).copied().unwrap_or_default()
    }

    pub fn leading_coeff(&self) -> Option<FieldElement> {
        self.terms.values().next_back().copied()
    }

    /// `self` without its leading term.
    pub fn without_leading(&self) -> UniPoly {
        let mut out = self.clone();
        out.terms.pop_last();
        out
    }

    pub fn eval(&self, a: FieldElement) -> FieldElement {
        let k = &self.ctx;
        self.terms
            .iter()
            .fold(FieldElement::ZERO, |acc, (d, c)| acc + k.mul(*c, k.pow(a, *d as u64)))
    }

    /// `f(a)` for every `a` in bit-pattern order.
    pub fn value_table(&self) -> Vec<FieldElement> {
        let k = self.ctx;
        let terms: Vec<(u32, FieldElement)> = self.terms().collect();
        k.elements()
            .map(|a| {
                terms
                    .iter()
                    .fold(FieldElement::ZERO, |acc, (d, c)| acc + k.mul(*c, k.pow(a, *d as u64)))
            })
            .collect()
    }

    pub fn embed(&self, emb: &Embedding) -> UniPoly {
        UniPoly::from_terms(*emb.target(), self.terms().map(|(d, c)| (d, emb.map(c))))
    }

    /// Parses `term ('+' term)*` with `term := [coeff '*'] 'x' ['^' exp]`,
    /// `coeff` a `0x` hex literal. A bare `coeff` is read as a constant term.
    pub fn parse(text: &str, ctx: FieldCtx) -> Result<Self, PolyError> {
        Parser::new(text, ctx).parse()
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;

    /// # Panics
    /// If the operands live over different fields.
    fn add(self, rhs: &UniPoly) -> UniPoly {
        assert_eq!(self.ctx, rhs.ctx, "UniPoly addition across fields");
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c);
        }
        out
    }
}

/// Leading term first: `x^17+0x3*x^10+x^5`; constants as hex; zero as `0x0`.
impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0x0");
        }
        for (i, (d, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match (*d, c.bits()) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, _) => write!(f, "{c}*x")?,
                (d, 1) => write!(f, "x^{d}")?,
                (d, _) => write!(f, "{c}*x^{d}")?,
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    ctx: FieldCtx,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, ctx: FieldCtx) -> Self {
        Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            ctx,
        }
    }

    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<UniPoly, PolyError> {
        let mut out = UniPoly::zero(self.ctx);
        loop {
            let (d, c) = self.term()?;
            out.add_term(d, c);
            if self.peek().is_none() {
                return Ok(out);
            }
            if !self.eat(b'+') {
                return Err(self.err("expected '+' or end of input"));
            }
        }
    }

    fn term(&mut self) -> Result<(u32, FieldElement), PolyError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok((self.exponent()?, FieldElement::ONE))
            }
            Some(b'0') => {
                let c = self.coefficient()?;
                if self.eat(b'*') {
                    if !self.eat(b'x') {
                        return Err(self.err("expected 'x' after '*'"));
                    }
                    let d = self.exponent()?;
                    Ok((d, c))
                } else {
                    Ok((0, c))
                }
            }
            Some(_) => Err(self.err("expected a term ('x' or a 0x coefficient)")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn exponent(&mut self) -> Result<u32, PolyError> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a decimal exponent"));
        }
        let value: u64 = self.src[start..self.pos]
            .parse()
            .map_err(|_| PolyError::Syntax {
                pos: start,
                msg: "exponent overflow".into(),
            })?;
        if value > MAX_UNI_DEGREE as u64 {
            return Err(PolyError::DegreeCap(value));
        }
        Ok(value as u32)
    }

    fn coefficient(&mut self) -> Result<FieldElement, PolyError> {
        self.skip_ws();
        let start = self.pos;
        if !self.src[start..].starts_with("0x") && !self.src[start..].starts_with("0X") {
            return Err(self.err("coefficients are 0x-prefixed hex literals"));
        }
        self.pos += 2;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_hexdigit() {
            self.pos += 1;
        }
        let bits = parse_hex(&self.src[start..self.pos]).map_err(|source| {
            PolyError::Coefficient { pos: start, source }
        })?;
        self.ctx
            .element(bits)
            .map_err(|source: FieldError| PolyError::Coefficient { pos: start, source })
    }
}
