//! Parser for `max(c + k1*x1 + …, …)` expressions.

use num_traits::{One, Zero};

use super::{Term, TropicalPolynomial};
use crate::error::{Error, Result};
use crate::rational::Q;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos, message: message.into() })
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn number(&mut self) -> Result<Q> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || b"./".contains(&self.src[self.pos])) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match crate::rational::parse(text) {
            Some(x) => Ok(x),
            None => {
                self.pos = start;
                self.err(format!("malformed number '{text}'"))
            }
        }
    }

    fn variable(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        if !self.eat(b'x') {
            return self.err("expected a variable x1, x2, …");
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            return self.err("variable needs an index");
        }
        let index: usize = std::str::from_utf8(&self.src[digits..self.pos]).expect("ascii").parse().unwrap_or(usize::MAX);
        if index == 0 || index > self.n {
            self.pos = start;
            return Err(Error::VariableIndex { index, n: self.n });
        }
        Ok(index - 1)
    }

    fn term(&mut self) -> Result<Term> {
        let mut alpha = vec![0i64; self.n];
        let mut constant = Q::zero();
        let mut first = true;
        loop {
            let sign = if self.eat(b'-') {
                -Q::one()
            } else if self.eat(b'+') || first {
                Q::one()
            } else {
                break;
            };
            first = false;
            match self.peek() {
                Some(b'x') => {
                    let i = self.variable()?;
                    alpha[i] += if sign.is_one() { 1 } else { -1 };
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    let at = self.pos;
                    let c = self.number()? * sign;
                    if self.eat(b'*') {
                        if !c.is_integer() {
                            self.pos = at;
                            return self.err("variable coefficients must be integers");
                        }
                        let k: i64 = c.to_integer().try_into().or_else(|_| self.err("coefficient too large"))?;
                        let i = self.variable()?;
                        alpha[i] += k;
                    } else {
                        constant += c;
                    }
                }
                _ => return self.err("expected a number or a variable"),
            }
        }
        Ok(Term::new(alpha, -constant))
    }

    fn polynomial(&mut self) -> Result<TropicalPolynomial> {
        let mut terms: Vec<(usize, Term)> = Vec::new();
        let wrapped = self.src[self.pos..].iter().skip_while(|c| c.is_ascii_whitespace()).take(3).eq(b"max".iter());
        if wrapped {
            self.skip_ws();
            self.pos += 3;
            self.expect(b'(')?;
            loop {
                self.skip_ws();
                terms.push((self.pos, self.term()?));
                if !self.eat(b',') {
                    break;
                }
            }
            self.expect(b')')?;
        } else {
            self.skip_ws();
            terms.push((self.pos, self.term()?));
        }
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        for (i, (_, t)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|(_, s)| s.alpha == t.alpha) {
                return Err(Error::DuplicateSupport(t.alpha.clone()));
            }
        }
        TropicalPolynomial::new(self.n, terms.into_iter().map(|(_, t)| t).collect())
    }
}

/// Parses `max(term, …)`; a term `c + k1*x1 + …` contributes `α = (k1, …)` and `υ(α) = −c`.
pub fn parse_tropical(text: &str, n: usize) -> Result<TropicalPolynomial> {
    Parser { src: text.as_bytes(), pos: 0, n }.polynomial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn grammar_examples() {
        let f = parse_tropical("max(0, x1, x2)", 2).unwrap();
        assert_eq!(f.support(), vec![vec![0, 0], vec![1, 0], vec![0, 1]]);
        assert!(f.terms().iter().all(|t| t.upsilon.is_zero()));
        let g = parse_tropical(" max( -3 + 2*x1 ,1+x2 ) ", 2).unwrap();
        assert_eq!(g.upsilon(&[2, 0]), Some(&q(3)));
        assert_eq!(g.upsilon(&[0, 1]), Some(&q(-1)));
        let h = parse_tropical("max(x1 - x2 - 1/2, -2*x1 + 0.25)", 2).unwrap();
        assert_eq!(h.upsilon(&[1, -1]), Some(&qf(1, 2)));
        assert_eq!(h.upsilon(&[-2, 0]), Some(&qf(-1, 4)));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_tropical("max(0, x1, x1)", 2), Err(Error::DuplicateSupport(vec![1, 0])));
        assert_eq!(parse_tropical("max(0, x3)", 2), Err(Error::VariableIndex { index: 3, n: 2 }));
        assert_eq!(parse_tropical("max(0, x0)", 2), Err(Error::VariableIndex { index: 0, n: 2 }));
        assert!(matches!(parse_tropical("max(0, x1", 2), Err(Error::Syntax { position: 9, .. })));
        assert!(matches!(parse_tropical("max(0,, x1)", 2), Err(Error::Syntax { position: 6, .. })));
        assert!(matches!(parse_tropical("max(1/2*x1)", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_tropical("max(0) junk", 2), Err(Error::Syntax { position: 7, .. })));
    }
}
