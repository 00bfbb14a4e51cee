//! Ket-string mini-grammar.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := [coef '*'] factor+          juxtaposition is the tensor product
//! factor := digit | '[' int ']' | '(' expr ')'
//! coef   := int ['/' int] | 'i' | int 'i'
//! ```
//!
//! Digits are computational-basis indices, one per party, read against the dimensions
//! supplied at elaboration time: `0(00+01+10-11)` in `3⊗2⊗3` is `|0⟩⊗|00+01+10−11⟩`.
//! Whitespace is ignored and the Unicode minus sign is accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::algebra::{CVec, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KetError {
    #[error("unexpected character {found:?} at position {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("unexpected end of input")]
    Eof,
    #[error("terms of a sum span different numbers of parties ({0} vs {1})")]
    RaggedSum(usize, usize),
    #[error("ket spans {found} parties but {expected} were supplied")]
    Width { expected: usize, found: usize },
    #[error("basis index {index} out of range for local dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("zero denominator in coefficient")]
    ZeroDenominator,
}

#[derive(Debug, Clone)]
enum Factor {
    Basis(usize),
    Group(Expr),
}

#[derive(Debug, Clone)]
struct Term {
    coef: Scalar,
    factors: Vec<Factor>,
}

#[derive(Debug, Clone)]
struct Expr {
    terms: Vec<Term>,
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        let chars = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .map(|(i, c)| (i, if c == '−' { '-' } else { c }))
            .collect();
        Parser { chars, pos: 0, _src: src }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn error_here(&self) -> KetError {
        match self.chars.get(self.pos) {
            Some(&(pos, found)) => KetError::Unexpected { pos, found },
            None => KetError::Eof,
        }
    }

    fn expr(&mut self) -> Result<Expr, KetError> {
        let mut terms = Vec::new();
        let mut sign = 1;
        match self.peek() {
            Some('+') => {
                self.bump();
            }
            Some('-') => {
                self.bump();
                sign = -1;
            }
            _ => {}
        }
        loop {
            let mut t = self.term()?;
            if sign < 0 {
                t.coef = -t.coef;
            }
            terms.push(t);
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => break,
            }
            self.bump();
        }
        Ok(Expr { terms })
    }

    fn int(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        s.parse().ok()
    }

    /// Looks ahead for an explicit coefficient, which is always followed by `*`.
    fn coef(&mut self) -> Result<Option<Scalar>, KetError> {
        let save = self.pos;
        let mut value = match self.peek() {
            Some('i') => {
                self.bump();
                Some(Scalar::i())
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.int().expect("digit present");
                let mut r = BigRational::from_integer(num);
                if self.peek() == Some('/') {
                    self.bump();
                    let den = self.int().ok_or_else(|| self.error_here())?;
                    if den == BigInt::from(0) {
                        return Err(KetError::ZeroDenominator);
                    }
                    r /= BigRational::from_integer(den);
                }
                let mut s = Scalar::real(r);
                if self.peek() == Some('i') {
                    self.bump();
                    s = &s * &Scalar::i();
                }
                Some(s)
            }
            _ => None,
        };
        if value.is_some() && self.peek() == Some('*') {
            self.bump();
        } else {
            self.pos = save;
            value = None;
        }
        Ok(value)
    }

    fn term(&mut self) -> Result<Term, KetError> {
        let coef = self.coef()?.unwrap_or_else(Scalar::one);
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    self.bump();
                    factors.push(Factor::Basis(c.to_digit(10).expect("digit") as usize));
                }
                Some('[') => {
                    self.bump();
                    let n = self.int().ok_or_else(|| self.error_here())?;
                    if self.bump() != Some(']') {
                        self.pos -= 1;
                        return Err(self.error_here());
                    }
                    let n: usize = n.try_into().map_err(|_| KetError::IndexOutOfRange { index: usize::MAX, dim: 0 })?;
                    factors.push(Factor::Basis(n));
                }
                Some('(') => {
                    self.bump();
                    let e = self.expr()?;
                    if self.bump() != Some(')') {
                        self.pos -= 1;
                        return Err(self.error_here());
                    }
                    factors.push(Factor::Group(e));
                }
                _ => break,
            }
        }
        if factors.is_empty() {
            return Err(self.error_here());
        }
        Ok(Term { coef, factors })
    }
}

impl Expr {
    fn width(&self) -> Result<usize, KetError> {
        let mut w = None;
        for t in &self.terms {
            let tw = t.width()?;
            match w {
                None => w = Some(tw),
                Some(prev) if prev != tw => return Err(KetError::RaggedSum(prev, tw)),
                _ => {}
            }
        }
        Ok(w.unwrap_or(0))
    }

    fn eval(&self, dims: &[usize]) -> Result<CVec, KetError> {
        let mut acc: Option<CVec> = None;
        for t in &self.terms {
            let v = t.eval(dims)?;
            acc = Some(match acc {
                None => v,
                Some(a) => a.add(&v).expect("same width"),
            });
        }
        Ok(acc.expect("at least one term"))
    }
}

impl Term {
    fn width(&self) -> Result<usize, KetError> {
        let mut w = 0;
        for f in &self.factors {
            w += match f {
                Factor::Basis(_) => 1,
                Factor::Group(e) => e.width()?,
            };
        }
        Ok(w)
    }

    fn eval(&self, dims: &[usize]) -> Result<CVec, KetError> {
        let mut offset = 0;
        let mut parts = Vec::new();
        for f in &self.factors {
            match f {
                Factor::Basis(i) => {
                    let d = dims[offset];
                    if *i >= d {
                        return Err(KetError::IndexOutOfRange { index: *i, dim: d });
                    }
                    parts.push(CVec::basis(d, *i));
                    offset += 1;
                }
                Factor::Group(e) => {
                    let w = e.width()?;
                    parts.push(e.eval(&dims[offset..offset + w])?);
                    offset += w;
                }
            }
        }
        let v = CVec::tensor_all(&parts).expect("non-empty term");
        Ok(if self.coef.is_one() { v } else { v.scale(&self.coef) })
    }
}

/// Parses a ket string and elaborates it in `dims[0] ⊗ dims[1] ⊗ …`.
pub fn parse_ket(src: &str, dims: &[usize]) -> Result<CVec, KetError> {
    let mut p = Parser::new(src);
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error_here());
    }
    let w = e.width()?;
    if w != dims.len() {
        return Err(KetError::Width { expected: dims.len(), found: w });
    }
    e.eval(dims)
}

/// One element of a PVM written as `0,1` (projector onto a span) or `*` (the remainder).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementSpec {
    Span(Vec<CVec>),
    Rest,
}

/// Parses `"0,1;2"` style PVM strings: `;` separates elements, top-level commas
/// separate spanning kets of one element, `*` stands for the complement of the others.
pub fn parse_pvm_spec(src: &str, dims: &[usize]) -> Result<Vec<ElementSpec>, KetError> {
    let mut out = Vec::new();
    for element in split_top_level(src, ';') {
        if element.trim() == "*" {
            out.push(ElementSpec::Rest);
            continue;
        }
        let kets = split_top_level(&element, ',')
            .into_iter()
            .map(|k| parse_ket(&k, dims))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(ElementSpec::Span(kets));
    }
    Ok(out)
}

fn split_top_level(src: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in src.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            parts.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    parts.push(cur);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_sum() {
        let v = parse_ket("0(00+01+10-11)", &[3, 2, 3]).unwrap();
        assert_eq!(v.dim(), 18);
        assert_eq!(v.get(0), &Scalar::one());
        assert_eq!(v.get(4), &Scalar::from_int(-1));
        assert_eq!(v.nonzeros().count(), 4);
    }

    #[test]
    fn grouped_superposition() {
        let v = parse_ket("(0+1)(0−1)", &[2, 2]).unwrap();
        assert_eq!(v, CVec::from_ints(&[1, -1, 1, -1]));
        let w = parse_ket("0-1", &[2]).unwrap();
        assert_eq!(w, CVec::from_ints(&[1, -1]));
    }

    #[test]
    fn coefficients_and_brackets() {
        let v = parse_ket("2*[10] - i*3", &[11]).unwrap();
        assert_eq!(v.get(10), &Scalar::from_int(2));
        assert_eq!(v.get(3), &Scalar::from_gaussian(0, -1));
        let h = parse_ket("1/2*0", &[2]).unwrap();
        assert_eq!(h.get(0), &Scalar::from_ratio(1, 2));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_ket("0+01", &[2, 2]), Err(KetError::RaggedSum(1, 2))));
        assert!(matches!(parse_ket("3", &[2]), Err(KetError::IndexOutOfRange { .. })));
        assert!(matches!(parse_ket("01", &[2]), Err(KetError::Width { .. })));
        assert!(matches!(parse_ket("0+", &[2]), Err(KetError::Eof)));
        assert!(matches!(parse_ket("0x", &[2]), Err(KetError::Unexpected { .. })));
    }

    #[test]
    fn pvm_spec() {
        let spec = parse_pvm_spec("0,1;2", &[3]).unwrap();
        assert_eq!(spec.len(), 2);
        let spec = parse_pvm_spec("0+1;*", &[2]).unwrap();
        assert_eq!(spec[1], ElementSpec::Rest);
        let joint = parse_pvm_spec("00,02,11;01,10,12", &[2, 3]).unwrap();
        assert!(matches!(&joint[0], ElementSpec::Span(v) if v.len() == 3));
    }
}
