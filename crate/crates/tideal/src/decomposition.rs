//! Irreducible decomposition of `W_{n,m}`: per-partition multiplicities,
//! the dimension by two independent routes, and the nilpotency-index probe.
//!
//! The multiplicity of `S^λ` equals the rank of the matrix whose rows are
//! the highest-weight images of the spanning elements `P_O`, one row per
//! ordered partition `O ∈ Ω_{n,m}`.  Rows are built by one of two
//! generators that produce identical vectors (cross-checked in tests):
//!
//! * **direct**: expand the signed column-group sum of the canonical
//!   tableau and collapse equal block words; cheap when the column group
//!   is small, i.e. for wide shapes.
//! * **factored**: group the `n!` block arrangements by the sequence of
//!   tableau columns their variables occupy.  Each class contributes a
//!   signed multiple of one antisymmetrized class vector, and classes that
//!   repeat a block of odd size cancel outright; cheap for tall shapes.
//!
//! Each generator feeds either an exact integer echelon or two echelons
//! modulo independent 62-bit primes (the factored one through a dense
//! 256-column random projection).  Modular ranks are certified lower
//! bounds; disagreement between primes escalates to the exact path.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra;
use crate::combinatorics::{canonical_tableau, factorial, irrep_dim, partitions_of, Partition};
use crate::error::{Error, Result};
use crate::linalg::{inv_mod, modular_primes, mul_mod, ExactEchelon, ModularEchelon};
use crate::multilinear::{
    count_ordered_partitions, enumerate_ordered_partitions, spanning_dimension, OrderedPartition,
    SPANNING_CAP,
};

/// Words pack one 4-bit field per position, so degrees beyond 16 (or more
/// than 15 letters/columns, handled per shape) are out of reach.
const PACK_MAX_M: usize = 16;

/// Elementary-operation budget for the factored exact path (`|Ω|·#u·|C_T|`).
const FACTORED_EXACT_OPS: u64 = 400_000_000;

/// Cache expanded class vectors only while `#u·|C_T|` stays below this.
const FACTORED_CACHE_TERMS: u64 = 2_000_000;

/// Elementary-operation budget for the direct exact path (`|Ω|·|C_T|·n!`).
const DIRECT_EXACT_OPS: u64 = 200_000_000;

/// Total per-instance budget accepted by `nilpotency_probe` before it
/// refuses with `CapExceeded` instead of running for hours.
const PROBE_OPS: u64 = 20_000_000_000;

/// Matrix-size budget (`|Ω| · m!`) for the probe's full-rank tests.  The
/// degree-six certificate sits near 10^6; the first hopeless case, degree
/// eight at n = 4, sits near 2·10^9.
const PROBE_SPAN_ENTRIES: u64 = 100_000_000;

/// Width of the random projection used by the factored modular path.
const PROJ_WIDTH: usize = 256;

/// A projected rank this close to the full width means the projection can
/// no longer separate rows; treated as an internal error (real
/// multiplicities are tiny compared to this).
const PROJ_SAFE_RANK: usize = 224;

// ---------------------------------------------------------------------------
// Decomposition type.

/// Multiplicities of the irreducibles `S^λ` in `W_{n,m}`.
///
/// Keys are partitions of `m`; zero multiplicities are omitted.  Iteration
/// and serialization follow the canonical partition order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    m: u32,
    terms: BTreeMap<Partition, usize>,
}

impl Decomposition {
    fn new(m: u32, terms: BTreeMap<Partition, usize>) -> Self {
        debug_assert!(terms.keys().all(|p| p.size() == m));
        debug_assert!(terms.values().all(|&c| c > 0));
        Decomposition { m, terms }
    }

    /// Builds a decomposition from explicit terms; every key must be a
    /// partition of `m`.  Zero multiplicities are dropped, repeated keys add.
    pub fn from_terms(
        m: usize,
        terms: impl IntoIterator<Item = (Partition, usize)>,
    ) -> Result<Decomposition> {
        let mut map: BTreeMap<Partition, usize> = BTreeMap::new();
        for (lam, mult) in terms {
            if lam.size() as usize != m {
                return Err(Error::DegreeMismatch(format!(
                    "{lam} is not a partition of {m}"
                )));
            }
            if mult > 0 {
                *map.entry(lam).or_insert(0) += mult;
            }
        }
        Ok(Decomposition::new(m as u32, map))
    }

    /// Total degree `m` of the ambient space.
    pub fn m(&self) -> usize {
        self.m as usize
    }

    /// The nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Partition, usize)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    /// Multiplicity of `S^λ` (0 when absent).
    pub fn multiplicity_of(&self, lambda: &Partition) -> usize {
        self.terms.get(lambda).copied().unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ_λ m^λ`, the number of irreducible summands with multiplicity.
    pub fn total_multiplicity(&self) -> u64 {
        self.terms.values().map(|&c| c as u64).sum()
    }

    /// `Σ_λ m^λ · dim S^λ`.
    pub fn dim(&self) -> BigUint {
        let mut sum = BigUint::from(0u32);
        for (lam, &mult) in &self.terms {
            sum += irrep_dim(lam) * BigUint::from(mult);
        }
        sum
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (lam, mult)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "S^{lam} x{mult}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    partition: Partition,
    mult: usize,
}

#[derive(Serialize, Deserialize)]
struct DecompositionRepr {
    m: u32,
    terms: Vec<TermRepr>,
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = DecompositionRepr {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(p, &c)| TermRepr {
                    partition: p.clone(),
                    mult: c,
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Decomposition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = DecompositionRepr::deserialize(deserializer)?;
        let mut terms = BTreeMap::new();
        for t in repr.terms {
            if t.partition.size() != repr.m {
                return Err(D::Error::custom(format!(
                    "partition {} is not a partition of {}",
                    t.partition, repr.m
                )));
            }
            if t.mult == 0 {
                continue;
            }
            if terms.insert(t.partition.clone(), t.mult).is_some() {
                return Err(D::Error::custom(format!(
                    "duplicate partition {}",
                    t.partition
                )));
            }
        }
        Ok(Decomposition::new(repr.m, terms))
    }
}

// ---------------------------------------------------------------------------
// Per-shape context shared by both row generators.

fn fact_u64(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Canonical-tableau geometry for one shape.
struct ShapeCtx {
    m: usize,
    /// 1-based variable -> 0-based column of the canonical tableau.
    col_of: Vec<u8>,
    /// 0-based column -> height-class index (columns of equal height).
    class_of_col: Vec<u8>,
    /// Class -> first canonical column id (0-based) within the renaming.
    class_offset: Vec<u8>,
    num_classes: usize,
    /// `|C_T| = Π h_c!`.
    ct: u64,
    /// Number of antisymmetrized class vectors: `m!/Π h_c!/Π s_i!` where
    /// the `s_i` are the class sizes.
    nu: u64,
}

fn shape_ctx(lambda: &Partition) -> ShapeCtx {
    let m = lambda.size() as usize;
    let mut col_of = vec![0u8; m + 1];
    let mut next = 1usize;
    for &r in lambda.parts() {
        for c in 0..r {
            col_of[next] = c as u8;
            next += 1;
        }
    }
    let heights: Vec<usize> = lambda.conjugate().parts().iter().map(|&h| h as usize).collect();
    let mut class_of_col = Vec::with_capacity(heights.len());
    let mut class_offset = Vec::new();
    let mut ct = 1u64;
    let mut nu_den = 1u64;
    let mut run = 0usize;
    for (c, &h) in heights.iter().enumerate() {
        ct = ct.saturating_mul(fact_u64(h));
        if c > 0 && h == heights[c - 1] {
            run += 1;
        } else {
            if c > 0 {
                nu_den = nu_den.saturating_mul(fact_u64(run));
            }
            run = 1;
            class_offset.push(c as u8);
        }
        class_of_col.push((class_offset.len() - 1) as u8);
    }
    nu_den = nu_den.saturating_mul(fact_u64(run));
    let nu = ((fact_u64(m) / ct).max(1) / nu_den).max(1);
    ShapeCtx {
        m,
        col_of,
        class_of_col,
        num_classes: class_offset.len(),
        class_offset,
        ct,
        nu,
    }
}

// ---------------------------------------------------------------------------
// Direct row generator.

/// Signed letter tables: one `(sign, lut)` per element of the column group,
/// where `lut[j]` is the y-letter that `x_j` maps to under that element.
fn direct_luts(lambda: &Partition) -> Vec<(i64, Vec<u8>)> {
    let t = canonical_tableau(lambda);
    let row_of = t.row_of_table();
    let m = t.m();
    algebra::column_group(t.tableau())
        .into_iter()
        .map(|(sgn, tau)| {
            let mut lut = vec![0u8; m + 1];
            for j in 1..=m as u32 {
                lut[j as usize] = row_of[tau.image(j) as usize] + 1;
            }
            (sgn as i64, lut)
        })
        .collect()
}

/// Highest-weight image of `P_O` as packed-word coefficients, built by
/// expanding the column-group sum and collapsing equal block words.
fn direct_row(o: &OrderedPartition, luts: &[(i64, Vec<u8>)], out: &mut FxHashMap<u64, i64>) {
    out.clear();
    let blocks = o.parts();
    let n = blocks.len();
    let mut words: Vec<(u64, u8)> = Vec::with_capacity(n);
    for (sgn, lut) in luts {
        words.clear();
        for b in blocks {
            let mut packed = 0u64;
            for (i, &v) in b.iter().enumerate() {
                packed |= (lut[v as usize] as u64) << (4 * i);
            }
            words.push((packed, b.len() as u8));
        }
        words.sort_unstable();
        // Equal blocks occur in c! of the n! orderings each; collapse them
        // into one multiset arrangement with coefficient sgn·Π c_j!.
        let mut distinct: Vec<(u64, u8, u8)> = Vec::with_capacity(n);
        let mut coeff = *sgn;
        for &(w, l) in words.iter() {
            match distinct.last_mut() {
                Some(d) if d.0 == w => {
                    d.2 += 1;
                    coeff *= d.2 as i64;
                }
                _ => distinct.push((w, l, 1)),
            }
        }
        arrange_words(&mut distinct, n, 0, 0, coeff, out);
    }
    out.retain(|_, v| *v != 0);
}

fn arrange_words(
    distinct: &mut [(u64, u8, u8)],
    left: usize,
    packed: u64,
    shift: u32,
    coeff: i64,
    out: &mut FxHashMap<u64, i64>,
) {
    if left == 0 {
        *out.entry(packed).or_insert(0) += coeff;
        return;
    }
    for i in 0..distinct.len() {
        if distinct[i].2 == 0 {
            continue;
        }
        distinct[i].2 -= 1;
        let (w, l, _) = distinct[i];
        arrange_words(
            distinct,
            left - 1,
            packed | (w << shift),
            shift + 4 * l as u32,
            coeff,
            out,
        );
        distinct[i].2 += 1;
    }
}

// ---------------------------------------------------------------------------
// Factored row generator.

/// Highest-weight image of `P_O` expressed over antisymmetrized class
/// vectors, keyed by the packed canonical column word.
///
/// Blocks with the same column sequence are interchangeable: swapping two
/// of them multiplies the sign by `(−1)^{block size}`, so classes with a
/// repeated odd block vanish and repeated even blocks contribute a factor
/// `g!`.  The remaining multiset arrangements are walked once, tracking
/// the sign (same-column inversion parity) incrementally.
fn factored_row(o: &OrderedPartition, ctx: &ShapeCtx, out: &mut FxHashMap<u64, i64>) {
    out.clear();
    let blocks = o.parts();
    let n = blocks.len();
    let colseqs: Vec<Vec<u8>> = blocks
        .iter()
        .map(|b| b.iter().map(|&v| ctx.col_of[v as usize]).collect())
        .collect();

    let mut groups: Vec<(Vec<u8>, Vec<usize>)> = Vec::new();
    for (i, cs) in colseqs.iter().enumerate() {
        match groups.iter_mut().find(|(g, _)| g == cs) {
            Some((_, members)) => members.push(i),
            None => groups.push((cs.clone(), vec![i])),
        }
    }
    groups.sort();

    let mut base = 1i64;
    for (cs, members) in &groups {
        if members.len() >= 2 {
            if cs.len() % 2 == 1 {
                return; // odd block repeated: the whole row cancels
            }
            for g in 2..=members.len() as i64 {
                base *= g;
            }
        }
    }

    // Same-column inversions inside each block and between ordered pairs.
    let mut inv_internal = vec![0u32; n];
    let mut inv_between = vec![vec![0u32; n]; n];
    for a in 0..n {
        let ba = blocks[a].as_slice();
        for i in 0..ba.len() {
            for j in i + 1..ba.len() {
                if ctx.col_of[ba[i] as usize] == ctx.col_of[ba[j] as usize] && ba[i] > ba[j] {
                    inv_internal[a] += 1;
                }
            }
        }
        for b in 0..n {
            if a == b {
                continue;
            }
            let mut cnt = 0u32;
            for &x in ba {
                for &y in blocks[b].as_slice() {
                    if ctx.col_of[x as usize] == ctx.col_of[y as usize] && x > y {
                        cnt += 1;
                    }
                }
            }
            inv_between[a][b] = cnt;
        }
    }

    let mut used = vec![0usize; groups.len()];
    let mut placed: Vec<usize> = Vec::with_capacity(n);
    let mut rename = vec![0u8; ctx.col_of.iter().map(|&c| c as usize + 1).max().unwrap_or(1)];
    let mut class_count = vec![0u8; ctx.num_classes];
    let mut st = ArrangeState {
        groups: &groups,
        blocks,
        ctx,
        inv_internal: &inv_internal,
        inv_between: &inv_between,
        base,
        out,
    };
    arrange_classes(
        &mut st,
        &mut used,
        &mut placed,
        &mut rename,
        &mut class_count,
        n,
        0,
        0,
        0,
    );
}

struct ArrangeState<'a> {
    groups: &'a [(Vec<u8>, Vec<usize>)],
    blocks: &'a [Vec<u32>],
    ctx: &'a ShapeCtx,
    inv_internal: &'a [u32],
    inv_between: &'a [Vec<u32>],
    base: i64,
    out: &'a mut FxHashMap<u64, i64>,
}

#[allow(clippy::too_many_arguments)]
fn arrange_classes(
    st: &mut ArrangeState<'_>,
    used: &mut [usize],
    placed: &mut Vec<usize>,
    rename: &mut [u8],
    class_count: &mut [u8],
    left: usize,
    parity: u32,
    packed: u64,
    shift: u32,
) {
    if left == 0 {
        let signed = if parity & 1 == 1 { -st.base } else { st.base };
        *st.out.entry(packed).or_insert(0) += signed;
        return;
    }
    for g in 0..st.groups.len() {
        let members = &st.groups[g].1;
        if used[g] == members.len() {
            continue;
        }
        // Representative order within a group is fixed; the g! collapse is
        // already in `base`.
        let b = members[used[g]];
        let mut dp = st.inv_internal[b];
        for &p in placed.iter() {
            dp += st.inv_between[p][b];
        }
        let mut pk = packed;
        let mut sh = shift;
        let mut undo = [0u8; PACK_MAX_M];
        let mut undo_len = 0;
        for &v in &st.blocks[b] {
            let c = st.ctx.col_of[v as usize] as usize;
            if rename[c] == 0 {
                let cls = st.ctx.class_of_col[c] as usize;
                rename[c] = st.ctx.class_offset[cls] + class_count[cls] + 1;
                class_count[cls] += 1;
                undo[undo_len] = c as u8;
                undo_len += 1;
            }
            pk |= (rename[c] as u64) << sh;
            sh += 4;
        }
        used[g] += 1;
        placed.push(b);
        arrange_classes(st, used, placed, rename, class_count, left - 1, parity + dp, pk, sh);
        placed.pop();
        used[g] -= 1;
        for &c in &undo[..undo_len] {
            let cls = st.ctx.class_of_col[c as usize] as usize;
            class_count[cls] -= 1;
            rename[c as usize] = 0;
        }
    }
}

/// Streams the `Π h_c!` signed words of one antisymmetrized class vector.
///
/// Per column id the letters `1..=h` are distributed over its positions in
/// every bijection, signed by inversion parity relative to ascending
/// positions; terms multiply across ids.
fn for_each_u_term(cw: u64, m: usize, f: &mut impl FnMut(u64, i64)) {
    let mut pos: Vec<Vec<u8>> = Vec::new();
    for i in 0..m {
        let id = ((cw >> (4 * i)) & 0xF) as usize;
        debug_assert!(id >= 1);
        if pos.len() < id {
            pos.resize(id, Vec::new());
        }
        pos[id - 1].push(i as u8);
    }
    debug_assert!(pos.iter().all(|p| !p.is_empty()));
    u_product(&pos, 0, 0, 0, f);
}

fn u_product(pos: &[Vec<u8>], level: usize, word: u64, inv: u32, f: &mut impl FnMut(u64, i64)) {
    if level == pos.len() {
        let sign = if inv & 1 == 1 { -1 } else { 1 };
        f(word, sign);
        return;
    }
    let h = pos[level].len();
    let mut remaining: Vec<u8> = (1..=h as u8).collect();
    u_slots(&pos[level], 0, &mut remaining, word, inv, &mut |w, i| {
        u_product(pos, level + 1, w, i, f)
    });
}

fn u_slots(
    positions: &[u8],
    slot: usize,
    remaining: &mut Vec<u8>,
    word: u64,
    inv: u32,
    f: &mut impl FnMut(u64, u32),
) {
    if slot == positions.len() {
        f(word, inv);
        return;
    }
    for i in 0..remaining.len() {
        let letter = remaining.remove(i);
        u_slots(
            positions,
            slot + 1,
            remaining,
            word | ((letter as u64) << (4 * positions[slot])),
            inv + i as u32,
            f,
        );
        remaining.insert(i, letter);
    }
}

// ---------------------------------------------------------------------------
// Rank engines.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Engine {
    DirectExact,
    DirectModular,
    FactoredExact,
    FactoredModular,
}

struct Plan {
    engine: Engine,
    cache_terms: bool,
}

fn plan_engine(n: usize, lambda: &Partition, omega: u64, ctx: &ShapeCtx) -> Plan {
    let narr = fact_u64(n);
    let direct_ok = lambda.len() <= 15;
    let factored_ok = lambda.first() as usize <= 15;
    let nu_ct = ctx.nu.saturating_mul(ctx.ct);
    let c_f_exact = omega.saturating_mul(nu_ct);
    let c_d_exact = omega.saturating_mul(ctx.ct).saturating_mul(narr);
    if factored_ok && c_f_exact <= FACTORED_EXACT_OPS {
        return Plan {
            engine: Engine::FactoredExact,
            cache_terms: nu_ct <= FACTORED_CACHE_TERMS,
        };
    }
    if direct_ok && c_d_exact <= DIRECT_EXACT_OPS {
        return Plan {
            engine: Engine::DirectExact,
            cache_terms: false,
        };
    }
    let row_nnz = ctx.nu.min(narr);
    let c_f_mod = omega
        .saturating_mul(narr + row_nnz.saturating_mul(2 * PROJ_WIDTH as u64))
        .saturating_add(nu_ct.saturating_mul(2));
    if factored_ok && (!direct_ok || c_f_mod < c_d_exact) {
        Plan {
            engine: Engine::FactoredModular,
            cache_terms: false,
        }
    } else {
        Plan {
            engine: Engine::DirectModular,
            cache_terms: false,
        }
    }
}

fn mod_of_i64(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// Interns packed words as dense column ids.
struct Interner {
    ids: FxHashMap<u64, u32>,
}

impl Interner {
    fn new() -> Self {
        Interner {
            ids: FxHashMap::default(),
        }
    }
    fn get(&mut self, key: u64) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }
}

fn sparse_exact_row(buf: &FxHashMap<u64, i64>, interner: &mut Interner) -> Vec<(u32, BigInt)> {
    let mut row: Vec<(u32, BigInt)> = buf
        .iter()
        .map(|(&w, &c)| (interner.get(w), BigInt::from(c)))
        .collect();
    row.sort_unstable_by_key(|e| e.0);
    row
}

fn sparse_mod_row(buf: &FxHashMap<u64, i64>, interner: &mut Interner, p: u64) -> Vec<(u32, u64)> {
    let mut row: Vec<(u32, u64)> = buf
        .iter()
        .filter_map(|(&w, &c)| {
            let r = mod_of_i64(c, p);
            (r != 0).then(|| (interner.get(w), r))
        })
        .collect();
    row.sort_unstable_by_key(|e| e.0);
    row
}

fn rank_direct_exact(omegas: &[OrderedPartition], lambda: &Partition) -> usize {
    let luts = direct_luts(lambda);
    let mut interner = Interner::new();
    let mut ech = ExactEchelon::new();
    let mut buf = FxHashMap::default();
    for o in omegas {
        direct_row(o, &luts, &mut buf);
        if buf.is_empty() {
            continue;
        }
        let row = sparse_exact_row(&buf, &mut interner);
        ech.absorb(row);
    }
    ech.rank()
}

fn rank_direct_modular(omegas: &[OrderedPartition], lambda: &Partition) -> (usize, usize) {
    let primes = modular_primes(2);
    let luts = direct_luts(lambda);
    let mut interner = Interner::new();
    let mut echs: Vec<ModularEchelon> = primes.iter().map(|&p| ModularEchelon::new(p)).collect();
    let mut buf = FxHashMap::default();
    for o in omegas {
        direct_row(o, &luts, &mut buf);
        if buf.is_empty() {
            continue;
        }
        for (ech, &p) in echs.iter_mut().zip(&primes) {
            let row = sparse_mod_row(&buf, &mut interner, p);
            ech.absorb(row);
        }
    }
    (echs[0].rank(), echs[1].rank())
}

fn rank_factored_exact(
    omegas: &[OrderedPartition],
    ctx: &ShapeCtx,
    cache_terms: bool,
) -> Result<usize> {
    let mut interner = Interner::new();
    let mut ech = ExactEchelon::new();
    let mut nrow = FxHashMap::default();
    let mut acc: FxHashMap<u64, i64> = FxHashMap::default();
    let mut cache: FxHashMap<u64, Vec<(u64, i64)>> = FxHashMap::default();
    for o in omegas {
        factored_row(o, ctx, &mut nrow);
        if nrow.is_empty() {
            continue;
        }
        acc.clear();
        for (&cw, &coef) in &nrow {
            if cache_terms {
                let terms = cache.entry(cw).or_insert_with(|| {
                    let mut v = Vec::with_capacity(ctx.ct as usize);
                    for_each_u_term(cw, ctx.m, &mut |w, s| v.push((w, s)));
                    v
                });
                for &(w, s) in terms.iter() {
                    let e = acc.entry(w).or_insert(0);
                    *e = e
                        .checked_add(coef * s)
                        .ok_or_else(|| Error::InvariantViolated("row coefficient overflow".into()))?;
                }
            } else {
                for_each_u_term(cw, ctx.m, &mut |w, s| {
                    *acc.entry(w).or_insert(0) += coef * s;
                });
            }
        }
        acc.retain(|_, v| *v != 0);
        if acc.is_empty() {
            continue;
        }
        let row = sparse_exact_row(&acc, &mut interner);
        ech.absorb(row);
    }
    Ok(ech.rank())
}

/// Deterministic 256-column projection: each word hashes to one column and
/// a nonzero scalar, independently per prime.
fn project_word(word: u64, p: u64) -> (usize, u64) {
    let mut z = word ^ p.rotate_left(17) ^ 0xA5A5_5A5A_C3C3_3C3C;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ((z & 0xFF) as usize, 1 + (z >> 8) % (p - 1))
}

fn project_class(cw: u64, m: usize, p: u64) -> Vec<u64> {
    let mut dense = vec![0u64; PROJ_WIDTH];
    for_each_u_term(cw, m, &mut |word, sign| {
        let (col, scalar) = project_word(word, p);
        let v = if sign < 0 { p - scalar } else { scalar };
        dense[col] = (dense[col] + v) % p;
    });
    dense
}

/// Dense echelon over F_p for projected rows.
struct DenseEchelon {
    p: u64,
    rows: Vec<Vec<u64>>,
    pivot_cols: Vec<usize>,
}

impl DenseEchelon {
    fn new(p: u64) -> Self {
        DenseEchelon {
            p,
            rows: Vec::new(),
            pivot_cols: Vec::new(),
        }
    }

    fn absorb(&mut self, mut v: Vec<u64>) -> bool {
        for (row, &pc) in self.rows.iter().zip(&self.pivot_cols) {
            if v[pc] == 0 {
                continue;
            }
            let f = self.p - v[pc];
            for j in pc..v.len() {
                if row[j] != 0 {
                    v[j] = (v[j] + mul_mod(f, row[j], self.p)) % self.p;
                }
            }
        }
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = inv_mod(v[pc], self.p);
        for x in v[pc..].iter_mut() {
            *x = mul_mod(*x, inv, self.p);
        }
        self.rows.push(v);
        self.pivot_cols.push(pc);
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

fn rank_factored_modular(omegas: &[OrderedPartition], ctx: &ShapeCtx) -> Result<(usize, usize)> {
    let primes = modular_primes(2);
    let mut echs: Vec<DenseEchelon> = primes.iter().map(|&p| DenseEchelon::new(p)).collect();
    let mut proj: Vec<FxHashMap<u64, Vec<u64>>> =
        primes.iter().map(|_| FxHashMap::default()).collect();
    let mut nrow = FxHashMap::default();
    for o in omegas {
        factored_row(o, ctx, &mut nrow);
        if nrow.is_empty() {
            continue;
        }
        for (pi, &p) in primes.iter().enumerate() {
            let mut dense = vec![0u64; PROJ_WIDTH];
            for (&cw, &coef) in &nrow {
                let c = mod_of_i64(coef, p);
                if c == 0 {
                    continue;
                }
                let up = proj[pi]
                    .entry(cw)
                    .or_insert_with(|| project_class(cw, ctx.m, p));
                for (d, &u) in dense.iter_mut().zip(up.iter()) {
                    if u != 0 {
                        *d = (*d + mul_mod(c, u, p)) % p;
                    }
                }
            }
            echs[pi].absorb(dense);
            if echs[pi].rank() > PROJ_SAFE_RANK {
                return Err(Error::InvariantViolated(
                    "projected rank approaching the projection width".into(),
                ));
            }
        }
    }
    Ok((echs[0].rank(), echs[1].rank()))
}

// ---------------------------------------------------------------------------
// Multiplicity driver.

fn multiplicity_for(
    n: usize,
    m: usize,
    lambda: &Partition,
    omegas: &[OrderedPartition],
) -> Result<usize> {
    if omegas.is_empty() {
        return Ok(0);
    }
    let ctx = shape_ctx(lambda);
    let plan = plan_engine(n, lambda, omegas.len() as u64, &ctx);
    match plan.engine {
        Engine::FactoredExact => rank_factored_exact(omegas, &ctx, plan.cache_terms),
        Engine::DirectExact => Ok(rank_direct_exact(omegas, lambda)),
        Engine::FactoredModular => {
            let (r0, r1) = rank_factored_modular(omegas, &ctx)?;
            if r0 == r1 {
                Ok(r0)
            } else {
                escalate_exact(n, m, lambda, omegas, &ctx)
            }
        }
        Engine::DirectModular => {
            let (r0, r1) = rank_direct_modular(omegas, lambda);
            if r0 == r1 {
                Ok(r0)
            } else {
                escalate_exact(n, m, lambda, omegas, &ctx)
            }
        }
    }
}

/// Primes disagreed (astronomically unlikely): redo the rank exactly if any
/// exact path fits a generously relaxed budget.
fn escalate_exact(
    n: usize,
    m: usize,
    lambda: &Partition,
    omegas: &[OrderedPartition],
    ctx: &ShapeCtx,
) -> Result<usize> {
    let omega = omegas.len() as u64;
    let narr = fact_u64(n);
    let c_f = omega.saturating_mul(ctx.nu.saturating_mul(ctx.ct));
    let c_d = omega.saturating_mul(ctx.ct).saturating_mul(narr);
    let relaxed = FACTORED_EXACT_OPS.saturating_mul(100);
    if lambda.first() as usize <= 15 && c_f <= relaxed && c_f <= c_d {
        return rank_factored_exact(omegas, ctx, ctx.nu.saturating_mul(ctx.ct) <= FACTORED_CACHE_TERMS);
    }
    if lambda.len() <= 15 && c_d <= relaxed {
        return Ok(rank_direct_exact(omegas, lambda));
    }
    Err(Error::InvariantViolated(format!(
        "modular ranks disagree for lambda = {lambda} at (n, m) = ({n}, {m}) and exact escalation is out of budget"
    )))
}

/// Multiplicity of `S^λ` in `W_{n,m}`: the rank of the highest-weight
/// matrix of the spanning elements.  `λ` must be a partition of `m`;
/// `n > m` gives 0.
pub fn multiplicity(n: usize, m: usize, lambda: &Partition) -> Result<usize> {
    check_m(m)?;
    if lambda.size() as usize != m {
        return Err(Error::DegreeMismatch(format!(
            "lambda = {lambda} is not a partition of {m}"
        )));
    }
    let omegas: Vec<OrderedPartition> = enumerate_ordered_partitions(n, m, None).collect();
    multiplicity_for(n, m, lambda, &omegas)
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::DegreeMismatch("total degree m must be positive".into()));
    }
    if m > PACK_MAX_M {
        return Err(Error::CapExceeded {
            what: "packed-word decomposition".into(),
            needed: m,
            cap: PACK_MAX_M,
        });
    }
    Ok(())
}

static DECOMP_CACHE: Lazy<Mutex<FxHashMap<(usize, usize, bool), Decomposition>>> =
    Lazy::new(|| Mutex::new(FxHashMap::default()));

/// Full decomposition of `W_{n,m}`.
///
/// With `prune` set, partitions with more than `2(m−n)+1` rows are assigned
/// 0 without computation (they vanish identically); with `prune` unset they
/// are computed and verified zero the hard way.  A result computed without
/// pruning also serves pruned requests from the cache.
pub fn decompose_w(n: usize, m: usize, prune: bool) -> Result<Decomposition> {
    check_m(m)?;
    {
        let cache = DECOMP_CACHE.lock().unwrap();
        if let Some(d) = cache.get(&(n, m, prune)) {
            return Ok(d.clone());
        }
        if prune {
            if let Some(d) = cache.get(&(n, m, false)) {
                return Ok(d.clone());
            }
        }
    }
    let omegas: Vec<OrderedPartition> = enumerate_ordered_partitions(n, m, None).collect();
    let max_len = if m >= n { 2 * (m - n) + 1 } else { 0 };
    let shapes = partitions_of(m as u32, None);
    let computed: Result<Vec<(Partition, usize)>> = shapes
        .into_par_iter()
        .map(|lam| {
            if prune && m >= n && lam.len() > max_len {
                return Ok((lam, 0));
            }
            let mult = multiplicity_for(n, m, &lam, &omegas)?;
            Ok((lam, mult))
        })
        .collect();
    let mut terms = BTreeMap::new();
    for (lam, mult) in computed? {
        if mult > 0 {
            terms.insert(lam, mult);
        }
    }
    let d = Decomposition::new(m as u32, terms);
    DECOMP_CACHE
        .lock()
        .unwrap()
        .insert((n, m, prune), d.clone());
    Ok(d)
}

/// How `dim_w` computes the dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimMethod {
    /// Rank of the spanning matrix (degree capped at `SPANNING_CAP`).
    Direct,
    /// `Σ_λ m^λ · dim S^λ` from the decomposition.
    ViaMultiplicities,
    /// Both, with an equality assertion.
    Both,
}

fn dim_from_decomposition(n: usize, m: usize) -> Result<u64> {
    let d = decompose_w(n, m, true)?;
    d.dim().to_u64().ok_or_else(|| {
        Error::InvariantViolated(format!("dimension of W_{{{n},{m}}} overflows u64"))
    })
}

/// Dimension of `W_{n,m}` by the requested route; `n > m` gives 0.
pub fn dim_w(n: usize, m: usize, method: DimMethod) -> Result<u64> {
    match method {
        DimMethod::Direct => Ok(spanning_dimension(n, m)? as u64),
        DimMethod::ViaMultiplicities => dim_from_decomposition(n, m),
        DimMethod::Both => {
            let direct = spanning_dimension(n, m)? as u64;
            let via = dim_from_decomposition(n, m)?;
            if direct != via {
                return Err(Error::MethodDisagreement(format!(
                    "dim W_{{{n},{m}}}: spanning rank {direct} vs multiplicity sum {via}"
                )));
            }
            Ok(direct)
        }
    }
}

/// Estimated engine cost of a full decomposition, for the probe's budget.
fn decompose_cost(n: usize, m: usize) -> u64 {
    let omega = count_ordered_partitions(n, m)
        .to_u64()
        .unwrap_or(u64::MAX);
    let narr = fact_u64(n);
    let mut total = 0u64;
    for lam in partitions_of(m as u32, None) {
        let ctx = shape_ctx(&lam);
        let nu_ct = ctx.nu.saturating_mul(ctx.ct);
        let c_f_exact = omega.saturating_mul(nu_ct);
        let c_d_exact = omega.saturating_mul(ctx.ct).saturating_mul(narr);
        let row_nnz = ctx.nu.min(narr);
        let c_f_mod = omega
            .saturating_mul(narr + row_nnz.saturating_mul(2 * PROJ_WIDTH as u64))
            .saturating_add(nu_ct.saturating_mul(2));
        total = total.saturating_add(c_f_exact.min(c_d_exact).min(c_f_mod));
    }
    total
}

/// Smallest `m ≤ m_max` with `dim W_{n,m} = m!` (the index where the ideal
/// slice fills all of `V_m`), or None if the cap is reached first.
///
/// `m_max` defaults to `n²`.  Degrees beyond the spanning cap fall back to
/// the multiplicity route; if even that is estimated beyond a generous
/// budget the probe refuses with `CapExceeded` rather than run for hours.
pub fn nilpotency_probe(n: usize, m_max: Option<usize>) -> Result<Option<usize>> {
    if n == 0 {
        return Err(Error::DegreeMismatch("n must be positive".into()));
    }
    let cap = m_max.unwrap_or(n * n);
    for m in n..=cap {
        let dim: BigUint = if m <= SPANNING_CAP {
            // A spanning family smaller than m! can never fill V_m, so the
            // rank is not needed at all at this level.
            let rows = count_ordered_partitions(n, m);
            let fact = factorial(m as u64);
            if rows < fact {
                continue;
            }
            let entries = &rows * &fact;
            if entries > BigUint::from(PROBE_SPAN_ENTRIES) {
                return Err(Error::CapExceeded {
                    what: format!("nilpotency_probe({n}) at degree {m}"),
                    needed: entries.to_usize().unwrap_or(usize::MAX),
                    cap: PROBE_SPAN_ENTRIES as usize,
                });
            }
            BigUint::from(spanning_dimension(n, m)? as u64)
        } else {
            check_m(m)?;
            let est = decompose_cost(n, m);
            if est > PROBE_OPS {
                return Err(Error::CapExceeded {
                    what: format!("nilpotency_probe({n}) at degree {m}"),
                    needed: est as usize,
                    cap: PROBE_OPS as usize,
                });
            }
            decompose_w(n, m, true)?.dim()
        };
        if dim == factorial(m as u64) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn part(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn omegas(n: usize, m: usize) -> Vec<OrderedPartition> {
        enumerate_ordered_partitions(n, m, None).collect()
    }

    /// Expands a factored row back to word coefficients.
    fn expand_factored(o: &OrderedPartition, ctx: &ShapeCtx) -> FxHashMap<u64, i64> {
        let mut nrow = FxHashMap::default();
        factored_row(o, ctx, &mut nrow);
        let mut acc: FxHashMap<u64, i64> = FxHashMap::default();
        for (&cw, &coef) in &nrow {
            for_each_u_term(cw, ctx.m, &mut |w, s| {
                *acc.entry(w).or_insert(0) += coef * s;
            });
        }
        acc.retain(|_, v| *v != 0);
        acc
    }

    #[test]
    fn factored_rows_match_direct_rows() {
        // Both generators must produce the same word vectors, shape by
        // shape, row by row.  Covers tall, flat, and mixed shapes.
        for (n, m) in [(1, 3), (2, 3), (1, 4), (2, 4), (3, 4), (2, 5), (3, 5), (2, 6), (3, 6)] {
            let oms = omegas(n, m);
            for lam in partitions_of(m as u32, None) {
                let ctx = shape_ctx(&lam);
                let luts = direct_luts(&lam);
                let mut dir = FxHashMap::default();
                for o in &oms {
                    direct_row(o, &luts, &mut dir);
                    let fac = expand_factored(o, &ctx);
                    assert_eq!(dir, fac, "row mismatch at (n,m)=({n},{m}), lambda={lam}, O={o}");
                }
            }
        }
    }

    #[test]
    fn engines_agree_on_small_shapes() {
        for (n, m) in [(2, 4), (3, 4), (2, 5), (3, 5), (4, 5)] {
            let oms = omegas(n, m);
            for lam in partitions_of(m as u32, None) {
                let ctx = shape_ctx(&lam);
                let exact_f = rank_factored_exact(&oms, &ctx, true).unwrap();
                let exact_d = rank_direct_exact(&oms, &lam);
                let (m0, m1) = rank_direct_modular(&oms, &lam);
                let (f0, f1) = rank_factored_modular(&oms, &ctx).unwrap();
                assert_eq!(exact_f, exact_d, "exact engines differ for {lam} at ({n},{m})");
                assert_eq!((m0, m1), (exact_d, exact_d), "direct modular differs for {lam}");
                assert_eq!((f0, f1), (exact_d, exact_d), "factored modular differs for {lam}");
            }
        }
    }

    #[test]
    fn degree_one_slice_is_the_whole_group_algebra() {
        // W_{1,m} = V_m, so every multiplicity equals the irreducible
        // dimension: a full-pipeline oracle.
        for m in 1..=5usize {
            let d = decompose_w(1, m, false).unwrap();
            for lam in partitions_of(m as u32, None) {
                let expected = irrep_dim(&lam).to_u64().unwrap() as usize;
                assert_eq!(
                    d.multiplicity_of(&lam),
                    expected,
                    "multiplicity of {lam} in V_{m}"
                );
            }
            assert_eq!(d.dim(), factorial(m as u64));
        }
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(2, 2, &part(&[2])).unwrap(), 1);
        assert_eq!(multiplicity(2, 2, &part(&[1, 1])).unwrap(), 0);
        assert_eq!(multiplicity(4, 5, &part(&[4, 1])).unwrap(), 2);
        assert_eq!(multiplicity(6, 8, &part(&[6, 2])).unwrap(), 5);
    }

    #[test]
    fn multiplicity_rejects_wrong_degree() {
        assert!(matches!(
            multiplicity(2, 4, &part(&[2, 1])),
            Err(Error::DegreeMismatch(_))
        ));
        assert!(matches!(multiplicity(2, 0, &part(&[])), Err(_)));
    }

    #[test]
    fn decomposition_of_w34() {
        let d = decompose_w(3, 4, false).unwrap();
        let expected = [
            (part(&[4]), 1),
            (part(&[3, 1]), 2),
            (part(&[2, 2]), 1),
            (part(&[2, 1, 1]), 1),
        ];
        let got: Vec<(Partition, usize)> =
            d.terms().map(|(p, c)| (p.clone(), c)).collect();
        assert_eq!(got, expected);
        assert_eq!(d.dim().to_u64().unwrap(), 12);
        // (1,1,1,1) has four rows > 2K+1 = 3: vanishes even unpruned.
        assert_eq!(d.multiplicity_of(&part(&[1, 1, 1, 1])), 0);
    }

    #[test]
    fn trivial_slice_at_equal_degree() {
        for n in 1..=5usize {
            let d = decompose_w(n, n, true).unwrap();
            assert_eq!(d.num_terms(), 1);
            assert_eq!(d.multiplicity_of(&part(&[n as u32])), 1);
            assert_eq!(d.dim().to_u64().unwrap(), 1);
        }
    }

    #[test]
    fn pruning_is_lossless() {
        for (n, m) in [(3, 4), (4, 5), (3, 5)] {
            let pruned = decompose_w(n, m, true).unwrap();
            let full = decompose_w(n, m, false).unwrap();
            assert_eq!(pruned, full);
        }
    }

    #[test]
    fn total_multiplicity_stable_along_first_diagonal() {
        let a = decompose_w(3, 4, true).unwrap().total_multiplicity();
        let b = decompose_w(4, 5, true).unwrap().total_multiplicity();
        assert_eq!(a, 5);
        assert_eq!(b, 5);
    }

    #[test]
    fn dim_methods_agree() {
        assert_eq!(dim_w(3, 4, DimMethod::Both).unwrap(), 12);
        assert_eq!(dim_w(2, 4, DimMethod::Both).unwrap(), 24);
        assert_eq!(dim_w(2, 3, DimMethod::Both).unwrap(), 6);
        assert_eq!(
            dim_w(4, 6, DimMethod::Both).unwrap(),
            dim_w(4, 6, DimMethod::Direct).unwrap()
        );
    }

    #[test]
    fn empty_slice_when_blocks_exceed_degree() {
        let d = decompose_w(3, 2, false).unwrap();
        assert!(d.is_zero());
        assert_eq!(d.to_string(), "0");
        assert_eq!(dim_w(3, 2, DimMethod::Both).unwrap(), 0);
    }

    #[test]
    fn rendering_and_json() {
        let d = decompose_w(3, 4, true).unwrap();
        assert_eq!(
            d.to_string(),
            "S^(4) x1 ⊕ S^(3,1) x2 ⊕ S^(2,2) x1 ⊕ S^(2,1,1) x1"
        );
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(
            v,
            json!({
                "m": 4,
                "terms": [
                    {"partition": [4], "mult": 1},
                    {"partition": [3, 1], "mult": 2},
                    {"partition": [2, 2], "mult": 1},
                    {"partition": [2, 1, 1], "mult": 1},
                ]
            })
        );
        let back: Decomposition = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_rejects_wrong_degree_and_duplicates() {
        let bad: std::result::Result<Decomposition, _> = serde_json::from_value(json!({
            "m": 4,
            "terms": [{"partition": [3], "mult": 1}]
        }));
        assert!(bad.is_err());
        let dup: std::result::Result<Decomposition, _> = serde_json::from_value(json!({
            "m": 3,
            "terms": [{"partition": [3], "mult": 1}, {"partition": [3], "mult": 2}]
        }));
        assert!(dup.is_err());
    }

    #[test]
    fn probe_finds_first_full_degree() {
        assert_eq!(nilpotency_probe(1, None).unwrap(), Some(1));
        assert_eq!(nilpotency_probe(2, None).unwrap(), Some(3));
        assert_eq!(nilpotency_probe(2, Some(2)).unwrap(), None);
    }

    #[test]
    fn probe_three_hits_six() {
        assert_eq!(nilpotency_probe(3, None).unwrap(), Some(6));
    }

    #[test]
    fn probe_four_refuses_fast() {
        // The undersized levels are skipped outright and degree eight is
        // over the size budget, so the refusal must be immediate.
        let t0 = std::time::Instant::now();
        let err = nilpotency_probe(4, None).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }), "got {err}");
        assert!(t0.elapsed() < std::time::Duration::from_secs(5));
        // Capping the search below the refusing level reports a clean miss.
        assert_eq!(nilpotency_probe(4, Some(7)).unwrap(), None);
    }
}
