//! Text form of free-algebra elements.
//!
//! Grammar:
//!
//! ```text
//! poly  := ['-'] term (('+'|'-') term)*
//! term  := coeff | [coeff] mono
//! coeff := int | int '/' int
//! mono  := '1' | var (['*'] var)*
//! var   := 'x' int
//! ```
//!
//! Whitespace-separated juxtaposition of variables is multiplication. The
//! printer (`Display` on `FreePoly`) emits this grammar deterministically,
//! terms sorted by word in lexicographic order; parse-print-parse is the
//! identity on canonical forms.

use super::{FreeAlgebraError, FreePoly, Word};
use crate::rat::Rat;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Slash,
    Int(BigInt),
    Var(u32),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(pos: usize, msg: impl Into<String>) -> FreeAlgebraError {
        FreeAlgebraError::Parse {
            pos,
            msg: msg.into(),
        }
    }

    fn read_int(&mut self) -> Result<BigInt, FreeAlgebraError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Self::err(start, "expected digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse as integer"))
    }

    /// Next token with its starting byte position, or `None` at end.
    fn next(&mut self) -> Result<Option<(usize, Tok)>, FreeAlgebraError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let tok = match self.src[self.pos] {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'x' => {
                self.pos += 1;
                let idx = self
                    .read_int()
                    .map_err(|_| Self::err(start, "variable needs an index, e.g. `x1`"))?;
                let idx = u32::try_from(&idx)
                    .ok()
                    .filter(|&i| i >= 1)
                    .ok_or_else(|| Self::err(start, "variable index out of range"))?;
                Tok::Var(idx)
            }
            c if c.is_ascii_digit() => Tok::Int(self.read_int()?),
            c => {
                return Err(Self::err(
                    start,
                    format!("unexpected character `{}`", c as char),
                ))
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<(usize, Tok)>>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(src),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<Option<&(usize, Tok)>, FreeAlgebraError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next()?);
        }
        Ok(self.peeked.as_ref().unwrap().as_ref())
    }

    fn bump(&mut self) -> Result<Option<(usize, Tok)>, FreeAlgebraError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next(),
        }
    }

    fn here(&mut self) -> usize {
        match self.peek() {
            Ok(Some((p, _))) => *p,
            _ => self.lexer.src.len(),
        }
    }

    /// coeff := int ['/' int]
    fn parse_coeff(&mut self) -> Result<Rat, FreeAlgebraError> {
        let (pos, tok) = self.bump()?.expect("caller checked for Int");
        let Tok::Int(num) = tok else {
            return Err(Lexer::err(pos, "expected a coefficient"));
        };
        if matches!(self.peek()?, Some((_, Tok::Slash))) {
            self.bump()?;
            let dpos = self.here();
            match self.bump()? {
                Some((_, Tok::Int(den))) => {
                    if den.is_zero() {
                        return Err(Lexer::err(dpos, "zero denominator"));
                    }
                    Ok(Rat::new(num, den))
                }
                _ => Err(Lexer::err(dpos, "expected denominator after `/`")),
            }
        } else {
            Ok(Rat::from_integer(num))
        }
    }

    /// mono := '1' | var (['*'] var)*; returns `None` when no monomial
    /// follows (bare-constant term).
    fn parse_mono(&mut self) -> Result<Option<Word>, FreeAlgebraError> {
        match self.peek()? {
            Some((_, Tok::Int(v))) if *v == BigInt::from(1) => {
                self.bump()?;
                Ok(Some(Word::unity()))
            }
            Some((pos, Tok::Int(_))) => Err(Lexer::err(
                *pos,
                "expected monomial (`1` or variables) after coefficient",
            )),
            Some((_, Tok::Var(_))) => {
                let mut letters = Vec::new();
                loop {
                    match self.peek()? {
                        Some((_, Tok::Var(i))) => {
                            letters.push(*i);
                            self.bump()?;
                        }
                        Some((_, Tok::Star)) => {
                            let (pos, _) = self.bump()?.unwrap();
                            match self.peek()? {
                                Some((_, Tok::Var(_))) => {}
                                _ => return Err(Lexer::err(pos, "expected variable after `*`")),
                            }
                        }
                        _ => break,
                    }
                }
                Ok(Some(Word::new(letters)))
            }
            _ => Ok(None),
        }
    }

    /// term := coeff | [coeff] mono
    fn parse_term(&mut self) -> Result<(Word, Rat), FreeAlgebraError> {
        match self.peek()? {
            Some((_, Tok::Int(_))) => {
                let coeff = self.parse_coeff()?;
                match self.parse_mono()? {
                    Some(word) => Ok((word, coeff)),
                    None => Ok((Word::unity(), coeff)),
                }
            }
            Some((_, Tok::Var(_))) => {
                let word = self.parse_mono()?.expect("peeked a variable");
                Ok((word, Rat::from_integer(1.into())))
            }
            Some((pos, tok)) => Err(Lexer::err(*pos, format!("unexpected token {tok:?}"))),
            None => Err(Lexer::err(self.lexer.src.len(), "expected a term")),
        }
    }

    fn parse_poly(&mut self) -> Result<FreePoly, FreeAlgebraError> {
        let mut terms: Vec<(Word, Rat)> = Vec::new();
        let mut negate = false;
        if matches!(self.peek()?, Some((_, Tok::Minus))) {
            self.bump()?;
            negate = true;
        }
        loop {
            let (word, coeff) = self.parse_term()?;
            terms.push((word, if negate { -coeff } else { coeff }));
            match self.bump()? {
                None => break,
                Some((_, Tok::Plus)) => negate = false,
                Some((_, Tok::Minus)) => negate = true,
                Some((pos, tok)) => {
                    return Err(Lexer::err(
                        pos,
                        format!("expected `+`, `-`, or end of input, found {tok:?}"),
                    ))
                }
            }
        }
        Ok(FreePoly::from_terms(terms))
    }
}

/// Parses the polynomial grammar into a canonical [`FreePoly`].
pub fn parse_poly(text: &str) -> Result<FreePoly, FreeAlgebraError> {
    let mut parser = Parser::new(text);
    if parser.peek()?.is_none() {
        return Err(FreeAlgebraError::Parse {
            pos: 0,
            msg: "empty input".into(),
        });
    }
    parser.parse_poly()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn parse_fixtures() {
        let comm = parse_poly("x1 x2 - x2 x1").unwrap();
        assert_eq!(comm.num_terms(), 2);
        assert_eq!(comm.coeff(&Word::new(vec![1, 2])), rat_int(1));
        assert_eq!(comm.coeff(&Word::new(vec![2, 1])), rat_int(-1));

        let unity = parse_poly("1").unwrap();
        assert_eq!(unity.num_terms(), 1);
        assert_eq!(unity.coeff(&Word::unity()), rat_int(1));

        let f = parse_poly("3/2 x1 x2 x3 + x3 x1 x2").unwrap();
        assert_eq!(f.num_terms(), 2);
        assert_eq!(f.coeff(&Word::new(vec![1, 2, 3])), rat(3, 2));
        assert_eq!(f.coeff(&Word::new(vec![3, 1, 2])), rat_int(1));
    }

    #[test]
    fn star_and_leading_sign() {
        assert_eq!(
            parse_poly("x1*x2 - x2*x1").unwrap(),
            parse_poly("x1 x2 - x2 x1").unwrap()
        );
        assert_eq!(
            parse_poly("-x1 x2").unwrap(),
            parse_poly("0 1 - x1 x2").unwrap()
        );
        assert_eq!(parse_poly("2 1").unwrap(), parse_poly("2").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_poly("x1 !") {
            Err(FreeAlgebraError::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_poly("x") {
            Err(FreeAlgebraError::Parse { pos, .. }) => assert_eq!(pos, 0),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_poly("").is_err());
        assert!(parse_poly("1/0 x1").is_err());
        assert!(parse_poly("2 3 x1").is_err());
        assert!(parse_poly("x1 +").is_err());
        // non-integer coefficients are rejected by the grammar
        assert!(parse_poly("1.5 x1").is_err());
    }

    #[test]
    fn printer_is_deterministic_and_round_trips() {
        let f = parse_poly("x3 x1 x2 + 3/2 x1 x2 x3 - x2 x1 x3").unwrap();
        let printed = f.to_string();
        assert_eq!(printed, "3/2 x1 x2 x3 - x2 x1 x3 + x3 x1 x2");
        assert_eq!(parse_poly(&printed).unwrap(), f);

        let g = parse_poly("-2 1 + x1 - x2 x1").unwrap();
        let printed = g.to_string();
        assert_eq!(printed, "-2 + x1 - x2 x1");
        assert_eq!(parse_poly(&printed).unwrap(), g);

        assert_eq!(FreePoly::zero().to_string(), "0");
        assert_eq!(parse_poly("0").unwrap(), FreePoly::zero());
        assert_eq!(parse_poly("x1 - x1").unwrap().to_string(), "0");
    }
}
