//! GL-side machinery: Schur polynomials, Young's rule, symmetric powers of
//! the graded free algebra, and the resulting multiplicity upper bounds.
//!
//! The degree-`(n+K)` component of the `n`-th symmetric power of the free
//! algebra on `k` generic variables surjects onto `W_{n,n+K}` as a
//! `GL_k`-representation, so its irreducible multiplicities bound the
//! `S_{n+K}`-multiplicities from above (and turn out to be tight at
//! `K = 1`).  Everything here is character arithmetic: exact symmetric
//! functions in the monomial basis, expanded into Schur functions by
//! leading-term subtraction.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::combinatorics::{binomial, irrep_dim, partitions_of, Partition};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};

/// Memory guard for symmetric-power expansions: number of basis multisets.
const SYM_POWER_CAP: u64 = 10_000_000;

// ---------------------------------------------------------------------------
// Symmetric functions in the monomial basis.

/// An exact symmetric polynomial in `nvars` variables, stored in the
/// monomial-symmetric basis: each key is the sorted exponent vector (a
/// partition of length ≤ nvars) of one orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricFunction {
    nvars: usize,
    coeffs: BTreeMap<Partition, BigRational>,
}

impl SymmetricFunction {
    pub fn zero(nvars: usize) -> Self {
        SymmetricFunction {
            nvars,
            coeffs: BTreeMap::new(),
        }
    }

    /// The single orbit `m_λ` (empty λ gives the constant 1).
    pub fn monomial(nvars: usize, lambda: Partition, coeff: BigRational) -> Result<Self> {
        if lambda.len() > nvars {
            return Err(Error::DegreeMismatch(format!(
                "m_{lambda} needs more than {nvars} variables"
            )));
        }
        let mut f = SymmetricFunction::zero(nvars);
        f.add_term(lambda, coeff);
        Ok(f)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, lambda: &Partition) -> BigRational {
        self.coeffs.get(lambda).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &BigRational)> {
        self.coeffs.iter()
    }

    fn add_term(&mut self, lambda: Partition, coeff: BigRational) {
        if coeff.is_zero() || lambda.len() > self.nvars {
            return;
        }
        match self.coeffs.entry(lambda) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &SymmetricFunction) -> SymmetricFunction {
        assert_eq!(self.nvars, other.nvars, "variable counts differ");
        let mut out = self.clone();
        for (lam, c) in &other.coeffs {
            out.add_term(lam.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> SymmetricFunction {
        if c.is_zero() {
            return SymmetricFunction::zero(self.nvars);
        }
        SymmetricFunction {
            nvars: self.nvars,
            coeffs: self
                .coeffs
                .iter()
                .map(|(l, v)| (l.clone(), v * c))
                .collect(),
        }
    }

    /// Exact product, via full orbit expansion of both operands.  Only
    /// sorted exponent sums are collected; by symmetry that recovers every
    /// monomial-basis coefficient of the product.
    pub fn mul(&self, other: &SymmetricFunction) -> SymmetricFunction {
        assert_eq!(self.nvars, other.nvars, "variable counts differ");
        let k = self.nvars;
        let a_full = self.expand_orbits();
        let b_full = other.expand_orbits();
        let mut out = SymmetricFunction::zero(k);
        let mut sum = vec![0u32; k];
        for (beta, cb) in &b_full {
            for (alpha, ca) in &a_full {
                let mut sorted = true;
                for i in 0..k {
                    sum[i] = alpha[i] + beta[i];
                    if i > 0 && sum[i] > sum[i - 1] {
                        sorted = false;
                        break;
                    }
                }
                if !sorted {
                    continue;
                }
                let parts: Vec<u32> = sum.iter().copied().take_while(|&e| e > 0).collect();
                let lam = Partition::new(parts).expect("sorted exponents");
                out.add_term(lam, ca * cb);
            }
        }
        out
    }

    /// All monomials of the function: (exponent vector, coefficient).
    fn expand_orbits(&self) -> Vec<(Vec<u32>, BigRational)> {
        let mut out = Vec::new();
        for (lam, c) in &self.coeffs {
            let mut padded = vec![0u32; self.nvars];
            for (i, &p) in lam.parts().iter().enumerate() {
                padded[i] = p;
            }
            distinct_permutations(&padded, &mut out, c);
        }
        out
    }

    /// Value at `x_1 = ... = x_k = 1`: the dimension when `self` is the
    /// character of a representation.
    pub fn dimension(&self) -> BigRational {
        let mut total = BigRational::zero();
        for (lam, c) in &self.coeffs {
            total += c * BigRational::from(BigInt::from(orbit_size(lam, self.nvars)));
        }
        total
    }
}

/// Number of distinct permutations of `λ` padded to `k` entries.
fn orbit_size(lambda: &Partition, k: usize) -> u64 {
    let mut count = crate::combinatorics::factorial(k as u64);
    let mut run = 1u64;
    let parts = lambda.parts();
    for i in 1..parts.len() {
        if parts[i] == parts[i - 1] {
            run += 1;
        } else {
            count /= crate::combinatorics::factorial(run);
            run = 1;
        }
    }
    count /= crate::combinatorics::factorial(run);
    count /= crate::combinatorics::factorial((k - parts.len()) as u64);
    count.to_u64().expect("orbit size fits u64")
}

/// Pushes every distinct rearrangement of `values` (multiset permutation).
fn distinct_permutations(values: &[u32], out: &mut Vec<(Vec<u32>, BigRational)>, coeff: &BigRational) {
    let mut pool: Vec<u32> = values.to_vec();
    pool.sort_unstable();
    let mut current = Vec::with_capacity(values.len());
    fn rec(
        pool: &mut Vec<u32>,
        current: &mut Vec<u32>,
        out: &mut Vec<(Vec<u32>, BigRational)>,
        coeff: &BigRational,
    ) {
        if pool.is_empty() {
            out.push((current.clone(), coeff.clone()));
            return;
        }
        let mut last: Option<u32> = None;
        for i in 0..pool.len() {
            if last == Some(pool[i]) {
                continue;
            }
            last = Some(pool[i]);
            let v = pool.remove(i);
            current.push(v);
            rec(pool, current, out, coeff);
            current.pop();
            pool.insert(i, v);
        }
    }
    rec(&mut pool, &mut current, out, coeff);
}

impl fmt::Display for SymmetricFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (lam, c)) in self.coeffs.iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a} ")?;
            }
            write!(f, "m_{lam}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Schur functions and Young's rule.

/// Schur polynomial `s_λ(x_1..x_k)` by semistandard tableau enumeration;
/// zero when `λ` has more than `k` rows.
pub fn schur_function(lambda: &Partition, k: usize) -> SymmetricFunction {
    let mut f = SymmetricFunction::zero(k);
    if lambda.len() > k {
        return f;
    }
    if lambda.is_empty() {
        f.add_term(Partition::empty(), BigRational::one());
        return f;
    }
    let shape: Vec<usize> = lambda.parts().iter().map(|&p| p as usize).collect();
    let mut grid: Vec<Vec<u8>> = shape.iter().map(|&w| vec![0u8; w]).collect();
    let mut weight = vec![0u32; k];
    fill_ssyt(&shape, &mut grid, &mut weight, 0, 0, k, &mut f);
    f
}

fn fill_ssyt(
    shape: &[usize],
    grid: &mut Vec<Vec<u8>>,
    weight: &mut Vec<u32>,
    r: usize,
    c: usize,
    k: usize,
    out: &mut SymmetricFunction,
) {
    if r == shape.len() {
        // Coefficient of m_μ is the number of tableaux of weight exactly μ,
        // so only dominant (sorted) weights count.
        if weight.windows(2).all(|w| w[0] >= w[1]) {
            let parts: Vec<u32> = weight.iter().copied().take_while(|&e| e > 0).collect();
            out.add_term(Partition::new(parts).expect("dominant weight"), BigRational::one());
        }
        return;
    }
    let (nr, nc) = if c + 1 == shape[r] { (r + 1, 0) } else { (r, c + 1) };
    let mut lo = if c > 0 { grid[r][c - 1] } else { 1 };
    if r > 0 {
        lo = lo.max(grid[r - 1][c] + 1);
    }
    for v in lo..=k as u8 {
        grid[r][c] = v;
        weight[v as usize - 1] += 1;
        fill_ssyt(shape, grid, weight, nr, nc, k, out);
        weight[v as usize - 1] -= 1;
    }
    grid[r][c] = 0;
}

/// Young's rule: the decomposition of `V^{(l)} ⊗ V^λ`, i.e. multiplicity 1
/// for every `ν` obtained from `λ` by adding `l` boxes with no two in the
/// same column, 0 otherwise.
pub fn young_rule(l: usize, lambda: &Partition) -> Decomposition {
    let m = lambda.size() as usize + l;
    let mut terms: Vec<(Partition, usize)> = Vec::new();
    let rows = lambda.len();
    // nu interlaces lambda: nu_1 ≥ λ_1 ≥ nu_2 ≥ λ_2 ≥ ... ≥ nu_{rows+1} ≥ 0.
    let mut nu: Vec<u32> = Vec::with_capacity(rows + 1);
    fn rec(
        lambda: &Partition,
        nu: &mut Vec<u32>,
        row: usize,
        left: usize,
        terms: &mut Vec<(Partition, usize)>,
    ) {
        let rows = lambda.len();
        if row == rows + 1 {
            if left == 0 {
                let parts: Vec<u32> = nu.iter().copied().take_while(|&e| e > 0).collect();
                terms.push((Partition::new(parts).expect("interlaced"), 1));
            }
            return;
        }
        let floor = lambda.part(row); // 0 beyond the last row
        let ceil_from_prev = if row == 0 { u32::MAX } else { lambda.part(row - 1) };
        let hi = (floor as usize + left).min(ceil_from_prev as usize) as u32;
        for v in floor..=hi {
            nu.push(v);
            rec(lambda, nu, row + 1, left - (v - floor) as usize, terms);
            nu.pop();
        }
    }
    rec(lambda, &mut nu, 0, l, &mut terms);
    Decomposition::from_terms(m, terms).expect("interlaced partitions of m")
}

/// Expands a character into Schur functions by repeated subtraction of the
/// lexicographically leading term.  Fails with `NegativeCoefficient` if the
/// input is not a nonnegative integer combination, i.e. not a polynomial
/// character.
pub fn schur_expand(f: &SymmetricFunction) -> Result<Decomposition> {
    let mut rem = f.clone();
    let mut degree: Option<u32> = None;
    let mut terms: Vec<(Partition, usize)> = Vec::new();
    while let Some(lead) = rem.coeffs.keys().next().cloned() {
        match degree {
            None => degree = Some(lead.size()),
            Some(d) if d != lead.size() => {
                return Err(Error::NotHomogeneous(format!(
                    "schur_expand saw degrees {d} and {}",
                    lead.size()
                )))
            }
            _ => {}
        }
        let c = rem.coeff(&lead);
        if !c.is_integer() || c.is_negative() {
            return Err(Error::NegativeCoefficient(format!(
                "coefficient {c} of leading term m_{lead}"
            )));
        }
        let mult = c
            .to_integer()
            .to_usize()
            .ok_or_else(|| Error::InvariantViolated("schur multiplicity overflow".into()))?;
        let s = schur_function(&lead, f.nvars);
        rem = rem.add(&s.scale(&-c));
        terms.push((lead, mult));
    }
    Decomposition::from_terms(degree.map_or(0, |d| d as usize), terms)
}

// ---------------------------------------------------------------------------
// Symmetric powers of the graded free algebra.

/// One summand `Sym^{a_1}(V^{μ_1}) ⊗ Sym^{a_2}(V^{μ_2}) ⊗ ...` of a
/// symmetric power of the free algebra.  Factors are sorted; a shape can
/// repeat when the corresponding irreducible occurs with multiplicity in
/// the algebra (distinct copies are distinct tensor slots).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SummandDescriptor {
    factors: Vec<(Partition, usize)>,
}

impl SummandDescriptor {
    pub fn new(mut factors: Vec<(Partition, usize)>) -> Result<Self> {
        if factors.iter().any(|(_, a)| *a == 0) {
            return Err(Error::InvariantViolated(
                "zero symmetric power in descriptor".into(),
            ));
        }
        if factors.iter().any(|(p, _)| p.is_empty()) {
            return Err(Error::InvariantViolated(
                "empty shape in descriptor".into(),
            ));
        }
        // Low-degree factors first, canonical order within a degree.
        factors.sort_by_key(|(p, a)| (p.size(), p.clone(), *a));
        Ok(SummandDescriptor { factors })
    }

    pub fn empty() -> Self {
        SummandDescriptor { factors: vec![] }
    }

    pub fn factors(&self) -> &[(Partition, usize)] {
        &self.factors
    }

    /// `Σ a_i`: which symmetric power of the algebra this lives in.
    pub fn total_power(&self) -> usize {
        self.factors.iter().map(|(_, a)| a).sum()
    }

    /// `Σ a_i · |μ_i|`: the graded degree.
    pub fn total_degree(&self) -> usize {
        self.factors
            .iter()
            .map(|(p, a)| p.size() as usize * a)
            .sum()
    }
}

impl fmt::Display for SummandDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, a)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "V^{p} ⊗s {a}")?;
        }
        write!(f, "}}")
    }
}

/// All summands of `[A_k^{⊗s n}]^{(m)}`: assignments of symmetric powers
/// `a_i` to the irreducible slots of the graded algebra with `Σ a_i = n`
/// and `Σ a_i·deg_i = m`.  A slot of shape `μ ⊢ d` exists `dim S^μ` times
/// (copies), so identical descriptors repeat in the list with that
/// combinatorial weight.
pub fn sym_power_component(k: usize, n: usize, m: usize) -> Vec<SummandDescriptor> {
    let mut out = Vec::new();
    if m < n {
        return out;
    }
    let excess = m - n; // Σ a_i (d_i − 1) over degree-≥2 slots
    // Slots of degree ≥ 2, each repeated by its multiplicity in the algebra.
    let mut slots: Vec<Partition> = Vec::new();
    for d in 2..=excess + 1 {
        for lam in partitions_of(d as u32, None) {
            if lam.len() > k {
                continue;
            }
            let copies = irrep_dim(&lam).to_usize().expect("small degree");
            for _ in 0..copies {
                slots.push(lam.clone());
            }
        }
    }
    let mut chosen: Vec<(Partition, usize)> = Vec::new();
    fn rec(
        slots: &[Partition],
        idx: usize,
        excess_left: usize,
        power_used: usize,
        n: usize,
        chosen: &mut Vec<(Partition, usize)>,
        out: &mut Vec<SummandDescriptor>,
    ) {
        if excess_left == 0 {
            if power_used > n {
                return;
            }
            let mut factors = chosen.clone();
            let ones = n - power_used;
            if ones > 0 {
                factors.push((Partition::new(vec![1]).unwrap(), ones));
            }
            out.push(SummandDescriptor::new(factors).expect("positive powers"));
            return;
        }
        if idx == slots.len() {
            return;
        }
        let d = slots[idx].size() as usize;
        let step = d - 1;
        let max_a = excess_left / step;
        for a in 0..=max_a {
            if power_used + a > n {
                break;
            }
            if a > 0 {
                chosen.push((slots[idx].clone(), a));
            }
            rec(slots, idx + 1, excess_left - a * step, power_used + a, n, chosen, out);
            if a > 0 {
                chosen.pop();
            }
        }
    }
    rec(&slots, 0, excess, 0, n, &mut chosen, &mut out);
    out.sort();
    out
}

/// The summands of `[A_k^{⊗s K}]^{(2K)}`, each split as `V^{(c)} ⊗ M` where
/// `c` is the symmetric power of the degree-1 factor and `M` collects the
/// factors of degree ≥ 2.  Repeats carry combinatorial weight.
pub fn m_lemma_summands(k: usize, big_k: usize) -> Vec<(usize, SummandDescriptor)> {
    sym_power_component(k, big_k, 2 * big_k)
        .into_iter()
        .map(|d| {
            let mut c = 0usize;
            let mut rest = Vec::new();
            for (p, a) in d.factors() {
                if p.size() == 1 {
                    c = *a;
                } else {
                    rest.push((p.clone(), *a));
                }
            }
            (c, SummandDescriptor::new(rest).expect("valid residual"))
        })
        .collect()
}

/// Character of one descriptor: the product over factors of the character
/// of `Sym^a(V^μ)`, each expanded by enumerating size-`a` multisets of the
/// weight basis of `V^μ`.
pub fn character_of_descriptor(d: &SummandDescriptor, k: usize) -> Result<SymmetricFunction> {
    let mut result = SymmetricFunction::monomial(k, Partition::empty(), BigRational::one())?;
    for (shape, a) in d.factors() {
        let factor = if shape.size() == 1 {
            complete_homogeneous(*a, k)
        } else {
            sym_power_character(shape, *a, k)?
        };
        if factor.is_zero() {
            return Ok(SymmetricFunction::zero(k));
        }
        result = result.mul(&factor);
    }
    Ok(result)
}

/// `h_a(x_1..x_k)`: every monomial of degree `a`, i.e. `m_λ` summed over
/// all partitions of `a` with at most `k` parts.
pub fn complete_homogeneous(a: usize, k: usize) -> SymmetricFunction {
    let mut f = SymmetricFunction::zero(k);
    for lam in partitions_of(a as u32, Some(k)) {
        f.add_term(lam, BigRational::one());
    }
    f
}

/// Character of `Sym^a(V^μ)` over `GL_k` by multiset enumeration of the
/// weight basis.
fn sym_power_character(shape: &Partition, a: usize, k: usize) -> Result<SymmetricFunction> {
    // Weight basis of V^μ: one exponent vector per semistandard tableau.
    let mut basis: Vec<Vec<u32>> = Vec::new();
    let schur = schur_function(shape, k);
    for (lam, c) in schur.terms() {
        let mut padded = vec![0u32; k];
        for (i, &p) in lam.parts().iter().enumerate() {
            padded[i] = p;
        }
        let mut orbit = Vec::new();
        distinct_permutations(&padded, &mut orbit, c);
        for (vec, mult) in orbit {
            let copies = mult.to_integer().to_usize().expect("Kostka number");
            for _ in 0..copies {
                basis.push(vec.clone());
            }
        }
    }
    let dim = basis.len() as u64;
    let multisets = binomial(dim + a as u64 - 1, a as u64);
    if multisets > BigUint::from(SYM_POWER_CAP) {
        return Err(Error::CapExceeded {
            what: format!("Sym^{a} of a {dim}-dimensional module"),
            needed: multisets.to_usize().unwrap_or(usize::MAX),
            cap: SYM_POWER_CAP as usize,
        });
    }
    let mut out = SymmetricFunction::zero(k);
    let mut acc = vec![0u32; k];
    fn rec(
        basis: &[Vec<u32>],
        idx: usize,
        left: usize,
        acc: &mut Vec<u32>,
        out: &mut SymmetricFunction,
    ) {
        if left == 0 {
            // Only the sorted representative of each weight orbit is kept.
            if acc.windows(2).all(|w| w[0] >= w[1]) {
                let parts: Vec<u32> = acc.iter().copied().take_while(|&e| e > 0).collect();
                out.add_term(Partition::new(parts).expect("sorted"), BigRational::one());
            }
            return;
        }
        if idx == basis.len() {
            return;
        }
        for c in 0..=left {
            if c > 0 {
                for (a, b) in acc.iter_mut().zip(basis[idx].iter()) {
                    *a += b;
                }
            }
            rec(basis, idx + 1, left - c, acc, out);
        }
        for (a, b) in acc.iter_mut().zip(basis[idx].iter()) {
            *a -= b * left as u32;
        }
    }
    rec(&basis, 0, a, &mut acc, &mut out);
    Ok(out)
}

/// Upper bounds for the multiplicities in `W_{n,n+K}`: the decomposition of
/// `[A_k^{⊗s n}]^{(n+K)}`, computed as `schur_expand(Σ_i h_{n−K+c_i} ·
/// char(M_i))` over the degree-`2K` summands.  `nvars` defaults to `2K+2`,
/// one more than the survival bound, so an out-of-bound multiplicity would
/// be visible rather than silently truncated.
pub fn multiplicity_upper_bounds(
    big_k: usize,
    n: usize,
    nvars: Option<usize>,
) -> Result<Decomposition> {
    if n < big_k {
        return Err(Error::DegreeMismatch(format!(
            "need n ≥ K, got n = {n}, K = {big_k}"
        )));
    }
    let k = nvars.unwrap_or(2 * big_k + 2);
    let summands = m_lemma_summands(k, big_k);
    let chars: Result<Vec<SymmetricFunction>> = summands
        .par_iter()
        .map(|(c, m_i)| {
            let h = complete_homogeneous(n - big_k + c, k);
            Ok(h.mul(&character_of_descriptor(m_i, k)?))
        })
        .collect();
    let mut total = SymmetricFunction::zero(k);
    for f in chars? {
        total = total.add(&f);
    }
    schur_expand(&total)
}

/// True iff `U` is `W` with every partition's first row grown by the degree
/// difference (and identical multiplicities).
pub fn is_derived_decomposition(u: &Decomposition, w: &Decomposition) -> bool {
    if u.m() < w.m() {
        return false;
    }
    let delta = (u.m() - w.m()) as u32;
    if u.num_terms() != w.num_terms() {
        return false;
    }
    w.terms()
        .all(|(lam, mult)| u.multiplicity_of(&lam.derive(delta)) == mult)
}
