//! Words in the commuting-free variables `y1, y2, ...` and sparse rational
//! polynomials over them.
//!
//! Words print in run-length form, `y1 y2 y1^3`.  A packed `u64` encoding
//! (four bits per letter, so length at most 16 and letters at most 15) is
//! used by the rank pipelines; the limits cover every case this crate
//! computes and are asserted, not silently truncated.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A word over `y1, y2, ...`, stored one letter per byte (`1` = `y1`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.iter().any(|&l| l == 0) {
            return Err(Error::Parse("letter index 0 in word".into()));
        }
        Ok(Word { letters })
    }

    pub fn empty() -> Self {
        Word::default()
    }

    /// `y_letter^count`.
    pub fn run(letter: u8, count: usize) -> Self {
        assert!(letter > 0);
        Word {
            letters: vec![letter; count],
        }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Maximal runs as `(letter, start, len)` with 1-based `start`.
    pub fn runs(&self) -> Vec<(u8, usize, usize)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut j = i + 1;
            while j < self.letters.len() && self.letters[j] == l {
                j += 1;
            }
            out.push((l, i + 1, j - i));
            i = j;
        }
        out
    }

    /// Occurrence counts of `y1..=yk` where `k` is the largest letter.
    pub fn multidegree(&self) -> Vec<u32> {
        let k = self.letters.iter().copied().max().unwrap_or(0) as usize;
        let mut h = vec![0u32; k];
        for &l in &self.letters {
            h[l as usize - 1] += 1;
        }
        h
    }

    /// Packs into 4-bit nibbles, least significant nibble first.
    pub fn pack(&self) -> u64 {
        pack_letters(&self.letters)
    }

    pub fn unpack(packed: u64, len: usize) -> Word {
        let mut letters = Vec::with_capacity(len);
        for i in 0..len {
            letters.push(((packed >> (4 * i)) & 0xF) as u8);
        }
        Word { letters }
    }
}

/// See [`Word::pack`].
#[inline]
pub fn pack_letters(letters: &[u8]) -> u64 {
    assert!(letters.len() <= 16, "packed words hold at most 16 letters");
    let mut acc = 0u64;
    for (i, &l) in letters.iter().enumerate() {
        debug_assert!(l > 0 && l <= 15);
        acc |= (l as u64) << (4 * i);
    }
    acc
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (letter, _, len) in self.runs() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if len == 1 {
                write!(f, "y{letter}")?;
            } else {
                write!(f, "y{letter}^{len}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses run-length form: `y1 y2 y1^3`; `1` is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let body = tok
                .strip_prefix('y')
                .ok_or_else(|| Error::Parse(format!("expected y<i> factor, got {tok:?}")))?;
            let (idx, exp) = match body.split_once('^') {
                Some((i, e)) => (
                    i,
                    e.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?,
                ),
                None => (body, 1),
            };
            let letter: u8 = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter index in {tok:?}")))?;
            if letter == 0 {
                return Err(Error::Parse("letter index 0".into()));
            }
            letters.extend(std::iter::repeat(letter).take(exp));
        }
        Ok(Word { letters })
    }
}

/// Sparse polynomial in the `y` variables with exact rational coefficients.
/// Terms are kept in a sorted map so iteration order is deterministic.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct YPolynomial {
    terms: BTreeMap<Word, BigRational>,
}

impl YPolynomial {
    pub fn zero() -> Self {
        YPolynomial::default()
    }

    pub fn monomial(w: Word, coeff: BigRational) -> Self {
        let mut p = YPolynomial::zero();
        p.add_term(w, coeff);
        p
    }

    pub fn add_term(&mut self, w: Word, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, w: &Word) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &YPolynomial) -> YPolynomial {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &YPolynomial) -> YPolynomial {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> YPolynomial {
        if c.is_zero() {
            return YPolynomial::zero();
        }
        YPolynomial {
            terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect(),
        }
    }

    /// All terms must share one total degree; returns it.  Errors on mixed
    /// degrees (the linearization domain is homogeneous polynomials).
    pub fn homogeneous_degree(&self) -> Result<usize> {
        let mut degs = self.terms.keys().map(Word::len);
        let Some(d) = degs.next() else {
            return Ok(0);
        };
        if degs.all(|e| e == d) {
            Ok(d)
        } else {
            Err(Error::NotHomogeneous(format!("{self}")))
        }
    }
}

impl fmt::Display for YPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    write!(f, "- ")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if !mag.is_one() || w.is_empty() {
                write!(f, "{mag}")?;
                if !w.is_empty() {
                    write!(f, " ")?;
                }
            }
            if !w.is_empty() {
                write!(f, "{w}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for YPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["y1 y2 y1^3", "y2 y1^2 y2 y1", "y1", "y12^2 y3"] {
            let word = w(s);
            assert_eq!(word.to_string(), s);
            assert_eq!(w(&word.to_string()), word);
        }
        assert_eq!(w("y1^3").letters(), &[1, 1, 1]);
        assert_eq!(w("1"), Word::empty());
        assert!("x1".parse::<Word>().is_err());
        assert!("y0".parse::<Word>().is_err());
        assert!("y1^x".parse::<Word>().is_err());
    }

    #[test]
    fn runs_and_multidegree() {
        let word = w("y1 y2^2 y1^3");
        assert_eq!(word.runs(), vec![(1, 1, 1), (2, 2, 2), (1, 4, 3)]);
        assert_eq!(word.multidegree(), vec![4, 2]);
        assert_eq!(Word::empty().runs(), vec![]);
    }

    #[test]
    fn pack_round_trip() {
        for s in ["y1 y2 y1^3", "y15^16", "y3 y1 y4 y1 y5"] {
            let word = w(s);
            assert_eq!(Word::unpack(word.pack(), word.len()), word);
        }
    }

    #[test]
    fn polynomial_arithmetic_and_cancellation() {
        let mut p = YPolynomial::zero();
        p.add_term(w("y1 y2"), rat(2));
        p.add_term(w("y2 y1"), rat(-1));
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.to_string(), "2 y1 y2 - y2 y1");
        let q = p.sub(&p);
        assert!(q.is_zero());
        assert_eq!(p.coeff(&w("y1 y2")), rat(2));
        assert_eq!(p.coeff(&w("y1")), rat(0));
        assert_eq!(p.scale(&rat(3)).coeff(&w("y2 y1")), rat(-3));
    }

    #[test]
    fn homogeneous_degree_detects_mixed_terms() {
        let mut p = YPolynomial::zero();
        p.add_term(w("y1 y2"), rat(1));
        assert_eq!(p.homogeneous_degree().unwrap(), 2);
        p.add_term(w("y1"), rat(1));
        assert!(p.homogeneous_degree().is_err());
        assert_eq!(YPolynomial::zero().homogeneous_degree().unwrap(), 0);
    }
}
