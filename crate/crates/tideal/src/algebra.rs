//! The group algebra of `S_m`, viewed as the space of multilinear
//! polynomials of degree `m`.
//!
//! An element is a sparse rational combination of permutations; the
//! permutation `σ` stands for the monomial `x_{σ(1)}x_{σ(2)}···x_{σ(m)}`.
//! Left multiplication permutes variable names, right multiplication
//! permutes positions, and the two actions commute.  Row and column
//! symmetrizers of a tableau and their product, the Young symmetrizer, are
//! built here; `idempotent_scalar` recovers the proportionality constant of
//! `e_T² = β e_T` and refuses to continue if proportionality fails.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

use crate::combinatorics::Tableau;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Sparse element of the degree-`m` multilinear space, keyed by the Lehmer
/// rank of the underlying permutation.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    m: usize,
    terms: FxHashMap<u64, BigRational>,
}

impl AlgebraElement {
    pub fn zero(m: usize) -> Self {
        AlgebraElement {
            m,
            terms: FxHashMap::default(),
        }
    }

    pub fn monomial(p: &Permutation, coeff: BigRational) -> Self {
        let mut el = AlgebraElement::zero(p.degree());
        el.add_term(p, coeff);
        el
    }

    pub fn one(m: usize) -> Self {
        AlgebraElement::monomial(&Permutation::identity(m), BigRational::one())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, p: &Permutation, coeff: BigRational) {
        assert_eq!(p.degree(), self.m, "degree mismatch");
        if coeff.is_zero() {
            return;
        }
        let key = p.lehmer_rank();
        let entry = self.terms.entry(key).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, p: &Permutation) -> BigRational {
        self.terms
            .get(&p.lehmer_rank())
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Terms in Lehmer-rank order: deterministic iteration for printing,
    /// hashing into matrices, and equality-of-output tests.
    pub fn sorted_terms(&self) -> Vec<(Permutation, BigRational)> {
        let mut keys: Vec<u64> = self.terms.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| {
                (
                    Permutation::from_lehmer_rank(self.m, k),
                    self.terms[&k].clone(),
                )
            })
            .collect()
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.m, other.m);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            let entry = out.terms.entry(*k).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(k);
            }
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.scale(&BigRational::from_integer(BigInt::from(-1))))
    }

    pub fn scale(&self, c: &BigRational) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero(self.m);
        }
        AlgebraElement {
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Convolution product: `(Σ aσ σ)(Σ bτ τ) = Σ aσ bτ (στ)`.
    pub fn multiply(&self, other: &AlgebraElement) -> AlgebraElement {
        assert_eq!(self.m, other.m);
        let left = self.sorted_terms();
        let right = other.sorted_terms();
        let mut out = AlgebraElement::zero(self.m);
        for (s, cs) in &left {
            for (t, ct) in &right {
                out.add_term(&s.compose(t), cs * ct);
            }
        }
        out
    }

    /// Left action on variable names: the monomial of `τ` maps to the
    /// monomial of `στ`.
    pub fn act_left(&self, sigma: &Permutation) -> AlgebraElement {
        assert_eq!(sigma.degree(), self.m);
        let mut out = AlgebraElement::zero(self.m);
        for (t, c) in self.sorted_terms() {
            out.add_term(&sigma.compose(&t), c);
        }
        out
    }

    /// Right action on positions: the monomial of `τ` maps to the monomial
    /// of `τσ`.
    pub fn act_right(&self, sigma: &Permutation) -> AlgebraElement {
        assert_eq!(sigma.degree(), self.m);
        let mut out = AlgebraElement::zero(self.m);
        for (t, c) in self.sorted_terms() {
            out.add_term(&t.compose(sigma), c);
        }
        out
    }

    /// `other = c · self` for a single scalar `c`?  Returns the scalar.
    pub fn proportionality(&self, other: &AlgebraElement) -> Option<BigRational> {
        if self.is_zero() {
            return if other.is_zero() {
                Some(BigRational::zero())
            } else {
                None
            };
        }
        if other.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (&k0, c0) = self.terms.iter().next().unwrap();
        let ratio = other.terms.get(&k0)? / c0;
        for (k, c) in &self.terms {
            if other.terms.get(k)? != &(c * &ratio) {
                return None;
            }
        }
        Some(ratio)
    }

    /// Monomial rendering, e.g. `x1x2x3 - x3x2x1`.  Factors are separated
    /// by `.` once two-digit indices appear.
    pub fn to_monomial_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sep = if self.m > 9 { "." } else { "" };
        let mut out = String::new();
        for (i, (p, c)) in self.sorted_terms().iter().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    out.push_str("- ");
                }
            } else if c.is_negative() {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if !mag.is_one() {
                out.push_str(&format!("{mag} "));
            }
            let word: Vec<String> = p.images().iter().map(|v| format!("x{v}")).collect();
            out.push_str(&word.join(sep));
        }
        out
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_monomial_string())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_monomial_string())
    }
}

/// All permutations preserving each row of `T` as a set.
pub fn row_group(t: &Tableau) -> Vec<Permutation> {
    group_from_blocks(t.m(), t.rows())
}

/// All permutations preserving each column of `T` as a set, with signs.
pub fn column_group(t: &Tableau) -> Vec<(i32, Permutation)> {
    group_from_blocks(t.m(), &t.columns())
        .into_iter()
        .map(|p| (p.sign(), p))
        .collect()
}

/// Young subgroup of all permutations mapping each block to itself.
fn group_from_blocks(m: usize, blocks: &[Vec<u32>]) -> Vec<Permutation> {
    let mut result = vec![Permutation::identity(m)];
    for block in blocks {
        if block.len() < 2 {
            continue;
        }
        let k = block.len();
        let mut next = Vec::with_capacity(result.len() * (1..=k).product::<usize>());
        for local in Permutation::all(k) {
            // Bijection of the block induced by a permutation of 1..=k.
            for base in &result {
                let mut images = base.images().to_vec();
                for (slot, &e) in block.iter().enumerate() {
                    images[e as usize - 1] = block[local.image(slot as u32 + 1) as usize - 1];
                }
                next.push(Permutation::from_images(images).expect("block bijection"));
            }
        }
        result = next;
    }
    result
}

/// `a_T`: sum over the row group.
pub fn row_symmetrizer(t: &Tableau) -> AlgebraElement {
    let mut out = AlgebraElement::zero(t.m());
    for p in row_group(t) {
        out.add_term(&p, BigRational::one());
    }
    out
}

/// `b_T`: signed sum over the column group.
pub fn column_symmetrizer(t: &Tableau) -> AlgebraElement {
    let mut out = AlgebraElement::zero(t.m());
    for (sgn, p) in column_group(t) {
        out.add_term(&p, BigRational::from_integer(BigInt::from(sgn)));
    }
    out
}

/// Young symmetrizer `e_T = a_T b_T`.
pub fn young_symmetrizer(t: &Tableau) -> AlgebraElement {
    row_symmetrizer(t).multiply(&column_symmetrizer(t))
}

/// The scalar `β` with `e_T² = β e_T`.  Errors if `e_T²` fails to be
/// proportional to `e_T`, which would mean the symmetrizer machinery is
/// broken; callers must not continue past that.
pub fn idempotent_scalar(t: &Tableau) -> Result<BigRational> {
    let e = young_symmetrizer(t);
    let e2 = e.multiply(&e);
    e.proportionality(&e2).ok_or_else(|| {
        Error::InvariantViolated(format!("e_T^2 not proportional to e_T for T = {t}"))
    })
}

/// Checks `σ e_T σ⁻¹ = e_{σT}`.
pub fn conjugate_tableau_check(sigma: &Permutation, t: &Tableau) -> Result<bool> {
    let e_t = young_symmetrizer(t);
    let lhs = e_t.act_left(sigma).act_right(&sigma.inverse());
    let relabeled = t.relabeled(sigma)?;
    Ok(lhs == young_symmetrizer(&relabeled))
}
