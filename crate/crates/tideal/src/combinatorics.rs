//! Partitions, Young diagrams, hook lengths and standard tableaux.
//!
//! Partitions are kept in weakly decreasing form with positive parts and are
//! ordered canonically: reverse-lexicographic, largest first, so
//! `partitions_of(4)` yields `(4), (3,1), (2,2), (2,1,1), (1,1,1,1)`.
//! Dimensions of the irreducible `S_m`-modules `S^λ` come from the hook
//! length formula; `standard_tableaux` enumerates fillings directly and is
//! the independent cross-check.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Enumerating standard tableaux beyond this total size is refused: the
/// count grows super-exponentially and callers should use hook lengths.
pub const TABLEAU_ENUM_CAP: usize = 12;

/// An integer partition in weakly decreasing form.
///
/// `Ord` is the canonical ordering used everywhere in this crate: largest
/// partition first (reverse-lexicographic with zero padding), matching the
/// order in which decompositions are reported.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "parts not weakly decreasing: {parts:?}"
            )));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!(
                "zero part in {parts:?}"
            )));
        }
        Ok(Partition { parts })
    }

    /// Empty partition of 0.
    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn first(&self) -> u32 {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Part at `i`, zero when out of range.
    pub fn part(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    /// Conjugate partition (transposed diagram).
    pub fn conjugate(&self) -> Partition {
        let mut parts = Vec::new();
        if let Some(&first) = self.parts.first() {
            for col in 0..first {
                let h = self.parts.iter().take_while(|&&p| p > col).count() as u32;
                parts.push(h);
            }
        }
        Partition { parts }
    }

    /// The derived partition `λ^(d)`: the first part grows by `d`, the rest
    /// are unchanged.  For the empty partition this is the single row `(d)`.
    pub fn derive(&self, d: u32) -> Partition {
        if self.parts.is_empty() {
            if d == 0 {
                return Partition::empty();
            }
            return Partition { parts: vec![d] };
        }
        let mut parts = self.parts.clone();
        parts[0] += d;
        Partition { parts }
    }

    /// Canonical comparison by explicit name; identical to `Ord`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        // Reverse-lexicographic with zero padding: compare part by part,
        // larger part first; a longer tail of equal prefix sorts later.
        let n = self.parts.len().max(other.parts.len());
        for i in 0..n {
            match self.part(i).cmp(&other.part(i)) {
                Ordering::Equal => continue,
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_cmp(other)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `(5,2,2,1,1,1)`, `5,2,2,1,1,1` and the exponent form
    /// `1^3,2^2,5` (parts in any order, sorted on construction).
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if inner.is_empty() {
            return Ok(Partition::empty());
        }
        let mut parts = Vec::new();
        for tok in inner.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                return Err(Error::Parse(format!("empty component in partition {s:?}")));
            }
            let (base, count) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e: u32 = e
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in {tok:?}")))?;
                    (b.trim(), e)
                }
                None => (tok, 1),
            };
            let p: u32 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad part in {tok:?}")))?;
            for _ in 0..count {
                parts.push(p);
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(de)?;
        Partition::new(parts).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// All partitions of `m` in canonical order, optionally restricted to at
/// most `max_length` parts.  `partitions_of(0, _)` is the empty partition.
pub fn partitions_of(m: u32, max_length: Option<usize>) -> Vec<Partition> {
    let cap = max_length.unwrap_or(m as usize);
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn rec(rem: u32, limit: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if slots == 0 {
            return;
        }
        let hi = rem.min(limit);
        // Largest next part first keeps the canonical order.
        for p in (1..=hi).rev() {
            // The remaining amount must fit in the remaining slots.
            if (rem - p) as u64 > p as u64 * (slots as u64 - 1) {
                continue;
            }
            cur.push(p);
            rec(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(m, m, cap, &mut cur, &mut out);
    out
}

/// Hook lengths of the diagram of `λ`, row by row.
pub fn hook_table(lambda: &Partition) -> Vec<Vec<u32>> {
    let conj = lambda.conjugate();
    lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &row_len)| {
            (0..row_len as usize)
                .map(|j| row_len - j as u32 + conj.part(j) - i as u32 - 1)
                .collect()
        })
        .collect()
}

/// Dimension of the irreducible `S_m`-module `S^λ` by the hook length
/// formula `m! / Π hooks`.  The division is checked to be exact.
pub fn irrep_dim(lambda: &Partition) -> BigUint {
    let m = lambda.size();
    let mut num = BigUint::one();
    for t in 1..=u64::from(m) {
        num *= t;
    }
    let mut den = BigUint::one();
    for row in hook_table(lambda) {
        for h in row {
            den *= h;
        }
    }
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    assert!(r.is_zero(), "hook product must divide {m}!");
    q
}

/// A filling of a Young diagram with `1..=m`, each entry exactly once.
/// Rows and columns need not increase; see [`StandardTableau`].
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tableau {
    rows: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let lens: Vec<u32> = rows.iter().map(|r| r.len() as u32).collect();
        if lens.windows(2).any(|w| w[0] < w[1]) || lens.iter().any(|&l| l == 0) {
            return Err(Error::InvalidTableau(format!(
                "row lengths {lens:?} do not form a partition"
            )));
        }
        let m: usize = rows.iter().map(Vec::len).sum();
        let mut seen = vec![false; m + 1];
        for &e in rows.iter().flatten() {
            if e == 0 || e as usize > m || seen[e as usize] {
                return Err(Error::InvalidTableau(format!(
                    "entries must be a bijection onto 1..={m}"
                )));
            }
            seen[e as usize] = true;
        }
        Ok(Tableau { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn m(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn shape(&self) -> Partition {
        Partition {
            parts: self.rows.iter().map(|r| r.len() as u32).collect(),
        }
    }

    /// Row index (0-based) of each entry; slot 0 unused.
    pub fn row_of_table(&self) -> Vec<u8> {
        let mut table = vec![0u8; self.m() + 1];
        for (r, row) in self.rows.iter().enumerate() {
            for &e in row {
                table[e as usize] = r as u8;
            }
        }
        table
    }

    /// Entries of each column, top to bottom.
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let width = self.rows.first().map_or(0, Vec::len);
        (0..width)
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|row| row.get(c).copied())
                    .collect()
            })
            .collect()
    }

    /// The tableau `σT`: every entry `e` replaced by `σ(e)`.
    pub fn relabeled(&self, sigma: &crate::perm::Permutation) -> Result<Tableau> {
        if sigma.degree() != self.m() {
            return Err(Error::DegreeMismatch(format!(
                "permutation degree {} vs tableau size {}",
                sigma.degree(),
                self.m()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&e| sigma.image(e)).collect())
            .collect();
        Tableau::new(rows)
    }

    pub fn is_standard(&self) -> bool {
        for row in &self.rows {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        for col in self.columns() {
            if col.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A tableau whose rows increase left to right and whose columns increase
/// top to bottom.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandardTableau(Tableau);

impl StandardTableau {
    pub fn new(t: Tableau) -> Result<Self> {
        if !t.is_standard() {
            return Err(Error::InvalidTableau(format!("not standard: {t}")));
        }
        Ok(StandardTableau(t))
    }

    pub fn tableau(&self) -> &Tableau {
        &self.0
    }

    /// Appends `d` cells to the first row, labelled `m+1..=m+d`.  The result
    /// is standard again because the new labels exceed everything and the
    /// new cells have no neighbours below.
    pub fn extend(&self, d: u32) -> StandardTableau {
        let m = self.0.m() as u32;
        let mut rows = self.0.rows.clone();
        if rows.is_empty() {
            rows.push(Vec::new());
        }
        for t in 1..=d {
            rows[0].push(m + t);
        }
        StandardTableau(Tableau { rows })
    }
}

impl std::ops::Deref for StandardTableau {
    type Target = Tableau;
    fn deref(&self) -> &Tableau {
        &self.0
    }
}

impl fmt::Display for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Debug for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Row-major filling: first row `1..=λ_1`, second row continues, and so on.
pub fn canonical_tableau(lambda: &Partition) -> StandardTableau {
    let mut next = 1u32;
    let rows = lambda
        .parts()
        .iter()
        .map(|&len| {
            let row: Vec<u32> = (next..next + len).collect();
            next += len;
            row
        })
        .collect();
    StandardTableau(Tableau { rows })
}

/// All standard tableaux of shape `λ`, refused above [`TABLEAU_ENUM_CAP`]
/// cells.  Enumeration is by direct backtracking over where each successive
/// entry can sit, which makes it an independent check of the hook formula.
pub fn standard_tableaux(lambda: &Partition) -> Result<Vec<StandardTableau>> {
    standard_tableaux_capped(lambda, TABLEAU_ENUM_CAP)
}

pub fn standard_tableaux_capped(lambda: &Partition, cap: usize) -> Result<Vec<StandardTableau>> {
    let m = lambda.size() as usize;
    if m > cap {
        return Err(Error::CapExceeded {
            what: format!("standard tableau enumeration for {lambda}"),
            needed: m,
            cap,
        });
    }
    let shape: Vec<usize> = lambda.parts().iter().map(|&p| p as usize).collect();
    let mut fill = vec![0usize; shape.len()];
    let mut rows: Vec<Vec<u32>> = shape.iter().map(|&l| Vec::with_capacity(l)).collect();
    let mut out = Vec::new();
    fn rec(
        entry: u32,
        m: usize,
        shape: &[usize],
        fill: &mut [usize],
        rows: &mut Vec<Vec<u32>>,
        out: &mut Vec<StandardTableau>,
    ) {
        if entry as usize > m {
            out.push(StandardTableau(Tableau { rows: rows.clone() }));
            return;
        }
        for r in 0..shape.len() {
            // Next free cell in row r is column fill[r]; placing there keeps
            // columns increasing iff the row above is already longer.
            if fill[r] < shape[r] && (r == 0 || fill[r - 1] > fill[r]) {
                fill[r] += 1;
                rows[r].push(entry);
                rec(entry + 1, m, shape, fill, rows, out);
                rows[r].pop();
                fill[r] -= 1;
            }
        }
    }
    rec(1, m, &shape, &mut fill, &mut rows, &mut out);
    Ok(out)
}

/// `n!` as an exact integer.
pub fn factorial(n: u64) -> BigUint {
    let mut f = BigUint::one();
    for t in 2..=n {
        f *= t;
    }
    f
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
