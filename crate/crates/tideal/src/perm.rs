//! Permutations of `{1, ..., m}` in one-line image form.
//!
//! Composition follows `(στ)(i) = σ(τ(i))`: apply the right factor first.
//! Under the identification of the monomial `x_{σ(1)}···x_{σ(m)}` with `σ`,
//! the left action on variable indices is left multiplication and the right
//! action on positions is right multiplication, and the two commute.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation stored as its one-line image vector: `images[i]` is the
/// image of `i+1`, a value in `1..=m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let m = images.len();
        let mut seen = vec![false; m + 1];
        for &v in &images {
            if v == 0 || v as usize > m || seen[v as usize] {
                return Err(Error::InvalidPermutation(format!(
                    "images {images:?} are not a bijection on 1..={m}"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            images: (1..=m as u32).collect(),
        }
    }

    /// Builds the permutation from a list of disjoint cycles over `1..=m`.
    pub fn from_cycles(cycles: &[Vec<u32>], m: usize) -> Result<Self> {
        let mut images: Vec<u32> = (1..=m as u32).collect();
        let mut moved = vec![false; m + 1];
        for cyc in cycles {
            for (k, &a) in cyc.iter().enumerate() {
                let b = cyc[(k + 1) % cyc.len()];
                if a == 0 || a as usize > m {
                    return Err(Error::InvalidPermutation(format!(
                        "cycle entry {a} out of range 1..={m}"
                    )));
                }
                if moved[a as usize] {
                    return Err(Error::InvalidPermutation(format!(
                        "entry {a} appears in two cycles"
                    )));
                }
                moved[a as usize] = true;
                images[a as usize - 1] = b;
            }
        }
        Permutation::from_images(images)
    }

    /// Parses cycle notation such as `(1 2)(3 4)`; `e` and `()` denote the
    /// identity.  The degree cannot be read off the cycles, so it is given.
    pub fn parse_cycles(s: &str, m: usize) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s == "()" || s.is_empty() {
            return Ok(Permutation::identity(m));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let Some(start) = rest.find('(') else {
                return Err(Error::Parse(format!("expected '(' in {s:?}")));
            };
            let Some(end) = rest[start..].find(')') else {
                return Err(Error::Parse(format!("unbalanced parentheses in {s:?}")));
            };
            let inner = &rest[start + 1..start + end];
            let cyc: Vec<u32> = inner
                .split_whitespace()
                .map(|t| {
                    t.parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad cycle entry {t:?}")))
                })
                .collect::<Result<_>>()?;
            if cyc.len() < 2 {
                return Err(Error::Parse(format!("cycle {inner:?} too short")));
            }
            cycles.push(cyc);
            rest = rest[start + end + 1..].trim_start();
        }
        Permutation::from_cycles(&cycles, m)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of `i` (1-based).
    #[inline]
    pub fn image(&self, i: u32) -> u32 {
        self.images[i as usize - 1]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: other.images.iter().map(|&v| self.images[v as usize - 1]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v as usize - 1] = i as u32 + 1;
        }
        Permutation { images }
    }

    /// Sign via cycle structure.
    pub fn sign(&self) -> i32 {
        let m = self.degree();
        let mut seen = vec![false; m];
        let mut transpositions = 0usize;
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut len = 0usize;
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                cur = self.images[cur] as usize - 1;
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Cycles of length at least two, each starting at its minimum, sorted
    /// by that minimum.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let m = self.degree();
        let mut seen = vec![false; m + 1];
        let mut out = Vec::new();
        for start in 1..=m as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start as usize] = true;
            let mut cur = self.image(start);
            while cur != start {
                seen[cur as usize] = true;
                cyc.push(cur);
                cur = self.image(cur);
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    /// Factorial-number rank of the one-line form; total order compatible
    /// with lexicographic order on images.  Requires `m <= 20` to fit `u64`.
    pub fn lehmer_rank(&self) -> u64 {
        let m = self.degree();
        assert!(m <= 20, "lehmer rank overflows u64 beyond m = 20");
        // Factorials up to 20! fit in u64.
        let mut fact = vec![1u64; m + 1];
        for i in 1..=m {
            fact[i] = fact[i - 1] * i as u64;
        }
        let mut rank = 0u64;
        for i in 0..m {
            let smaller_later = self.images[i + 1..]
                .iter()
                .filter(|&&v| v < self.images[i])
                .count() as u64;
            rank += smaller_later * fact[m - 1 - i];
        }
        rank
    }

    pub fn from_lehmer_rank(m: usize, mut rank: u64) -> Permutation {
        assert!(m <= 20);
        let mut fact = vec![1u64; m + 1];
        for i in 1..=m {
            fact[i] = fact[i - 1] * i as u64;
        }
        let mut pool: Vec<u32> = (1..=m as u32).collect();
        let mut images = Vec::with_capacity(m);
        for i in 0..m {
            let f = fact[m - 1 - i];
            let idx = (rank / f) as usize;
            rank %= f;
            images.push(pool.remove(idx));
        }
        Permutation { images }
    }

    pub fn random<R: Rng>(m: usize, rng: &mut R) -> Permutation {
        let mut images: Vec<u32> = (1..=m as u32).collect();
        // Fisher-Yates.
        for i in (1..m).rev() {
            let j = rng.gen_range(0..=i);
            images.swap(i, j);
        }
        Permutation { images }
    }

    /// All of `S_m` in Lehmer-rank order.  Only sensible for small `m`.
    pub fn all(m: usize) -> Vec<Permutation> {
        let mut count = 1u64;
        for i in 2..=m as u64 {
            count *= i;
        }
        (0..count).map(|r| Permutation::from_lehmer_rank(m, r)).collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "e");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (i, e) in cyc.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn composition_applies_right_factor_first() {
        let s = Permutation::parse_cycles("(1 2)", 3).unwrap();
        let t = Permutation::parse_cycles("(2 3)", 3).unwrap();
        // (st)(i) = s(t(i)): 1 -> 1 -> 2, 2 -> 3 -> 3, 3 -> 2 -> 1.
        assert_eq!(s.compose(&t).images(), &[2, 3, 1]);
        assert_eq!(t.compose(&s).images(), &[3, 1, 2]);
    }

    #[test]
    fn parse_and_display_cycles() {
        let s = Permutation::parse_cycles("(1 2)(3 4)", 5).unwrap();
        assert_eq!(s.images(), &[2, 1, 4, 3, 5]);
        assert_eq!(s.to_string(), "(1 2)(3 4)");
        assert_eq!(Permutation::identity(4).to_string(), "e");
        assert_eq!(Permutation::parse_cycles("e", 3).unwrap(), Permutation::identity(3));
        let round = Permutation::parse_cycles(&s.to_string(), 5).unwrap();
        assert_eq!(round, s);
        assert!(Permutation::parse_cycles("(1 2", 3).is_err());
        assert!(Permutation::parse_cycles("(1 1)", 3).is_err());
        assert!(Permutation::parse_cycles("(1 9)", 3).is_err());
    }

    #[test]
    fn inverse_and_identity() {
        let s = Permutation::parse_cycles("(1 2 3)", 4).unwrap();
        assert_eq!(s.compose(&s.inverse()), Permutation::identity(4));
        assert_eq!(s.inverse().compose(&s), Permutation::identity(4));
    }

    #[test]
    fn sign_basic_and_multiplicative() {
        assert_eq!(Permutation::parse_cycles("(1 2)", 4).unwrap().sign(), -1);
        assert_eq!(Permutation::parse_cycles("(1 2 3)", 4).unwrap().sign(), 1);
        assert_eq!(Permutation::identity(6).sign(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = Permutation::random(7, &mut rng);
            let b = Permutation::random(7, &mut rng);
            assert_eq!(a.compose(&b).sign(), a.sign() * b.sign());
        }
    }

    #[test]
    fn lehmer_rank_is_a_bijection() {
        for m in 0..=5usize {
            let mut seen = std::collections::HashSet::new();
            let count: u64 = (1..=m as u64).product();
            for r in 0..count.max(1) {
                let p = Permutation::from_lehmer_rank(m, r);
                assert_eq!(p.lehmer_rank(), r);
                assert!(seen.insert(p.images().to_vec()));
            }
            assert_eq!(seen.len() as u64, count.max(1));
        }
    }

    #[test]
    fn from_images_validates() {
        assert!(Permutation::from_images(vec![1, 1]).is_err());
        assert!(Permutation::from_images(vec![0, 2]).is_err());
        assert!(Permutation::from_images(vec![3, 2]).is_err());
        assert!(Permutation::from_images(vec![2, 1, 3]).is_ok());
    }

    #[test]
    fn cycles_of_identity_are_empty() {
        assert!(Permutation::identity(5).cycles().is_empty());
    }
}
