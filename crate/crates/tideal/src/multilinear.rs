//! Ordered partitions of `{1..m}` into `n` nonempty ordered blocks, and the
//! symmetrized products `P_O` they index.
//!
//! The span of all `P_O` inside the degree-`m` multilinear space is the
//! subspace cut out by substituting into the single power `x^n`; its
//! dimension is computable directly here for small `m` (the spanning matrix
//! has one row per ordered partition) and through the decomposition
//! pipeline beyond that.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::AlgebraElement;
use crate::combinatorics::{binomial, factorial, Partition};
use crate::error::{Error, Result};
use crate::linalg::{rank_certified, SparseMatrix};
use crate::perm::Permutation;

/// Largest `m` for which the direct spanning-rank method is attempted
/// (`m!` columns; beyond this the decomposition pipeline is the tool).
pub const SPANNING_CAP: usize = 8;

/// A partition of `{1..m}` into nonempty blocks, each carrying an internal
/// order; the collection of blocks is unordered and stored sorted by
/// smallest element.  `{[1 2],[3]}` and `{[3],[1 2]}` are the same object;
/// `{[2 1],[3]}` is a different one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    parts: Vec<Vec<u32>>,
    m: usize,
}

impl OrderedPartition {
    pub fn new(parts: Vec<Vec<u32>>) -> Result<Self> {
        let m: usize = parts.iter().map(Vec::len).sum();
        let mut seen = vec![false; m + 1];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::VariableCoverage("empty block".into()));
            }
            for &e in part {
                if e == 0 || e as usize > m || seen[e as usize] {
                    return Err(Error::VariableCoverage(format!(
                        "blocks must cover 1..={m} exactly once (offender {e})"
                    )));
                }
                seen[e as usize] = true;
            }
        }
        let mut parts = parts;
        parts.sort_by_key(|p| *p.iter().min().expect("nonempty"));
        Ok(OrderedPartition { parts, m })
    }

    pub fn n(&self) -> usize {
        self.parts.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    /// Block sizes as a partition (sorted decreasing).
    pub fn shape(&self) -> Partition {
        let mut sizes: Vec<u32> = self.parts.iter().map(|p| p.len() as u32).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(sizes).expect("nonempty blocks")
    }

    /// `σ·O`: every entry relabeled through `σ`, blocks re-canonicalized.
    pub fn relabeled(&self, sigma: &Permutation) -> Result<OrderedPartition> {
        if sigma.degree() != self.m {
            return Err(Error::DegreeMismatch(format!(
                "permutation degree {} vs partition of {}",
                sigma.degree(),
                self.m
            )));
        }
        OrderedPartition::new(
            self.parts
                .iter()
                .map(|p| p.iter().map(|&e| sigma.image(e)).collect())
                .collect(),
        )
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[{}]", part.iter().join(" "))?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for OrderedPartition {
    type Err = Error;

    /// Parses `{[1 2],[3]}`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected {{...}}, got {s:?}")))?;
        let mut parts = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let rest2 = rest
                .strip_prefix('[')
                .ok_or_else(|| Error::Parse(format!("expected [block] in {s:?}")))?;
            let (block, tail) = rest2
                .split_once(']')
                .ok_or_else(|| Error::Parse(format!("unterminated block in {s:?}")))?;
            let entries: Vec<u32> = block
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad entry {t:?} in {s:?}")))
                })
                .collect::<Result<_>>()?;
            parts.push(entries);
            rest = tail.trim().strip_prefix(',').unwrap_or(tail).trim();
        }
        OrderedPartition::new(parts)
    }
}

impl Serialize for OrderedPartition {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OrderedPartition {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<Vec<u32>>::deserialize(de)?;
        OrderedPartition::new(parts).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// All ordered partitions of `{1..m}` into `n` blocks, optionally
/// restricted to block sizes matching `shape`.  Deterministic order; empty
/// when `n > m` or the shape is incompatible.
pub fn enumerate_ordered_partitions(
    n: usize,
    m: usize,
    shape: Option<&Partition>,
) -> impl Iterator<Item = OrderedPartition> {
    let mut out = Vec::new();
    let mut sizes: Option<Vec<u32>> = shape.map(|s| s.parts().to_vec());
    if let Some(s) = &sizes {
        if s.len() != n || s.iter().sum::<u32>() as usize != m {
            sizes = Some(vec![]); // incompatible: exhausted sentinel below
        }
    }
    let feasible = n <= m && n > 0 && sizes.as_ref().map_or(true, |s| !s.is_empty());
    if feasible {
        let remaining: Vec<u32> = (1..=m as u32).collect();
        let mut acc: Vec<Vec<u32>> = Vec::with_capacity(n);
        gen_blocks(&remaining, n, &mut sizes.clone(), &mut acc, &mut out);
    }
    out.into_iter()
}

/// Recursive generator: the next block always contains the smallest
/// remaining element, so each set of blocks is produced exactly once.
fn gen_blocks(
    remaining: &[u32],
    blocks_left: usize,
    sizes: &mut Option<Vec<u32>>,
    acc: &mut Vec<Vec<u32>>,
    out: &mut Vec<OrderedPartition>,
) {
    if blocks_left == 0 {
        if remaining.is_empty() {
            out.push(OrderedPartition {
                parts: acc.clone(),
                m: acc.iter().map(Vec::len).sum(),
            });
        }
        return;
    }
    if remaining.len() < blocks_left {
        return;
    }
    let first = remaining[0];
    let rest = &remaining[1..];
    let max_size = remaining.len() - (blocks_left - 1);
    for size in 1..=max_size {
        if let Some(sizes) = sizes.as_ref() {
            if !sizes.contains(&(size as u32)) {
                continue;
            }
        }
        for combo in rest.iter().copied().combinations(size - 1) {
            let mut block_set = vec![first];
            block_set.extend(combo);
            let next: Vec<u32> = rest
                .iter()
                .copied()
                .filter(|e| !block_set.contains(e))
                .collect();
            if let Some(s) = sizes.as_mut() {
                let pos = s.iter().position(|&x| x == size as u32).unwrap();
                s.swap_remove(pos);
            }
            for ordering in block_set.iter().copied().permutations(size) {
                acc.push(ordering);
                gen_blocks(&next, blocks_left - 1, sizes, acc, out);
                acc.pop();
            }
            if let Some(s) = sizes.as_mut() {
                s.push(size as u32);
            }
        }
    }
}

/// `C(m,n)·(m−1)!/(n−1)!`, the number of ordered partitions of `{1..m}`
/// into `n` blocks.
pub fn count_ordered_partitions(n: usize, m: usize) -> BigUint {
    if n == 0 || n > m {
        return BigUint::from(0u32);
    }
    binomial(m as u64, n as u64) * factorial(m as u64 - 1) / factorial(n as u64 - 1)
}

/// `Σ_{σ ∈ S_n} B_{σ(1)} B_{σ(2)} ··· B_{σ(n)}` where the `B_i` are the
/// given blocks, read as monomials.  The concatenated blocks must cover
/// `x_1..x_m` exactly once.
pub fn symmetric_poly(blocks: &[Vec<u32>]) -> Result<AlgebraElement> {
    // Validation (coverage and nonemptiness) is shared with OrderedPartition.
    let o = OrderedPartition::new(blocks.to_vec())?;
    let m = o.m();
    let mut out = AlgebraElement::zero(m);
    for ordering in (0..blocks.len()).permutations(blocks.len()) {
        let mut images = Vec::with_capacity(m);
        for i in ordering {
            images.extend_from_slice(&blocks[i]);
        }
        out.add_term(
            &Permutation::from_images(images).expect("coverage validated"),
            BigRational::one(),
        );
    }
    Ok(out)
}

/// The spanning polynomial `P_O`: all `n!` block orderings, coefficient 1.
pub fn build_po(o: &OrderedPartition) -> AlgebraElement {
    symmetric_poly(o.parts()).expect("ordered partition is valid by construction")
}

/// `O ↦ O ∪ {[m+1], ..., [m+s]}`.
pub fn extend_ordered_partition(o: &OrderedPartition, s: usize) -> OrderedPartition {
    let mut parts = o.parts.clone();
    for j in 0..s {
        parts.push(vec![(o.m + j + 1) as u32]);
    }
    OrderedPartition {
        parts,
        m: o.m + s,
    }
}

/// One row per ordered partition of Ω_{n,m}, columns indexed by the `m!`
/// monomials (Lehmer rank), entries the coefficients of `P_O`.
pub fn spanning_matrix(n: usize, m: usize) -> SparseMatrix {
    let ncols = if m == 0 {
        1
    } else {
        (1..=m as u64).product::<u64>() as usize
    };
    let mut mat = SparseMatrix::new(ncols);
    for o in enumerate_ordered_partitions(n, m, None) {
        let mut entries = Vec::new();
        for ordering in (0..o.n()).permutations(o.n()) {
            let mut images = Vec::with_capacity(m);
            for i in ordering {
                images.extend_from_slice(&o.parts[i]);
            }
            let rank = Permutation::from_images(images)
                .expect("valid partition")
                .lehmer_rank();
            entries.push((rank as u32, 1i64));
        }
        mat.push_integer_row(entries).expect("columns in range");
    }
    mat
}

/// Rank of the spanning matrix: the dimension of the span of the `P_O`.
/// Refuses above [`SPANNING_CAP`] where the matrix (with its `m!` columns)
/// stops being the right tool; the decomposition pipeline covers that
/// range.
pub fn spanning_dimension(n: usize, m: usize) -> Result<usize> {
    if m > SPANNING_CAP {
        return Err(Error::CapExceeded {
            what: "direct spanning rank (use the decomposition pipeline)".into(),
            needed: m,
            cap: SPANNING_CAP,
        });
    }
    Ok(rank_certified(&spanning_matrix(n, m)).rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rank_exact;
    use num_traits::ToPrimitive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rustc_hash::FxHashSet;

    fn op(s: &str) -> OrderedPartition {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_of_two_blocks_of_three() {
        let got: FxHashSet<String> = enumerate_ordered_partitions(2, 3, None)
            .map(|o| o.to_string())
            .collect();
        // Canonical form lists blocks by smallest element.
        let expected: FxHashSet<String> = [
            "{[1 2],[3]}",
            "{[1 3],[2]}",
            "{[1],[2 3]}",
            "{[2 1],[3]}",
            "{[3 1],[2]}",
            "{[1],[3 2]}",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn enumeration_edge_cases() {
        let all: Vec<OrderedPartition> = enumerate_ordered_partitions(4, 4, None).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].to_string(), "{[1],[2],[3],[4]}");
        assert_eq!(enumerate_ordered_partitions(5, 4, None).count(), 0);
        assert_eq!(enumerate_ordered_partitions(0, 4, None).count(), 0);
    }

    #[test]
    fn typed_enumeration_filters_by_shape() {
        let shape = Partition::new(vec![2, 2]).unwrap();
        let typed: Vec<OrderedPartition> =
            enumerate_ordered_partitions(2, 4, Some(&shape)).collect();
        assert_eq!(typed.len(), 12);
        assert!(typed.iter().all(|o| o.shape() == shape));
        // Typed enumerations partition the full stream.
        let total: usize = crate::combinatorics::partitions_of(4, None)
            .iter()
            .filter(|lam| lam.len() == 2)
            .map(|lam| enumerate_ordered_partitions(2, 4, Some(lam)).count())
            .sum();
        assert_eq!(total, enumerate_ordered_partitions(2, 4, None).count());
        let incompatible = Partition::new(vec![3, 1]).unwrap();
        assert_eq!(
            enumerate_ordered_partitions(2, 3, Some(&incompatible)).count(),
            0
        );
        // Every element of Ω_{2,3} has block sizes {2,1}.
        let only_shape = Partition::new(vec![2, 1]).unwrap();
        assert_eq!(
            enumerate_ordered_partitions(2, 3, Some(&only_shape)).count(),
            6
        );
    }

    #[test]
    fn counts_match_enumeration() {
        for m in 1..=7usize {
            for n in 1..=m {
                let count = count_ordered_partitions(n, m).to_usize().unwrap();
                let listed: Vec<OrderedPartition> =
                    enumerate_ordered_partitions(n, m, None).collect();
                assert_eq!(listed.len(), count, "({n},{m})");
                let distinct: FxHashSet<String> =
                    listed.iter().map(|o| o.to_string()).collect();
                assert_eq!(distinct.len(), count, "duplicates at ({n},{m})");
            }
        }
        assert_eq!(count_ordered_partitions(2, 3), BigUint::from(6u32));
        assert_eq!(count_ordered_partitions(3, 6), BigUint::from(1200u32));
        assert_eq!(count_ordered_partitions(6, 8), BigUint::from(1176u32));
    }

    #[test]
    fn symmetric_poly_examples() {
        let p2 = symmetric_poly(&[vec![1], vec![2]]).unwrap();
        assert_eq!(p2.to_monomial_string(), "x1x2 + x2x1");
        let p1 = symmetric_poly(&[vec![2, 1, 3]]).unwrap();
        assert_eq!(p1.to_monomial_string(), "x2x1x3");
        let mixed = symmetric_poly(&[vec![1, 2], vec![3]]).unwrap();
        assert_eq!(mixed.to_monomial_string(), "x1x2x3 + x3x1x2");

        assert!(symmetric_poly(&[vec![1, 2], vec![2]]).is_err());
        assert!(symmetric_poly(&[vec![1], vec![3]]).is_err());
        assert!(symmetric_poly(&[vec![1], vec![]]).is_err());
    }

    #[test]
    fn build_po_matches_symmetric_poly() {
        let o = op("{[1 2],[3]}");
        assert_eq!(build_po(&o).to_monomial_string(), "x1x2x3 + x3x1x2");
        let full = build_po(&op("{[1],[2],[3]}"));
        assert_eq!(full.num_terms(), 6);
        assert!(full
            .sorted_terms()
            .iter()
            .all(|(_, c)| *c == BigRational::one()));
    }

    #[test]
    fn extension_appends_singletons() {
        let o = op("{[1 2],[3]}");
        assert_eq!(
            extend_ordered_partition(&o, 2).to_string(),
            "{[1 2],[3],[4],[5]}"
        );
        assert_eq!(extend_ordered_partition(&o, 0), o);
        assert_eq!(
            extend_ordered_partition(&op("{[1]}"), 1).to_string(),
            "{[1],[2]}"
        );
    }

    #[test]
    fn parse_display_and_json() {
        let o = op("{[3],[2 1]}");
        // Canonical storage order is by smallest element.
        assert_eq!(o.to_string(), "{[2 1],[3]}");
        assert_eq!(op(&o.to_string()), o);
        assert_eq!(serde_json::to_string(&o).unwrap(), "[[2,1],[3]]");
        let back: OrderedPartition = serde_json::from_str("[[2,1],[3]]").unwrap();
        assert_eq!(back, o);
        assert!(serde_json::from_str::<OrderedPartition>("[[1,1],[2]]").is_err());
        assert!("{[1 2]".parse::<OrderedPartition>().is_err());
        assert!("{[0],[1]}".parse::<OrderedPartition>().is_err());
        assert_ne!(op("{[1 2]}"), op("{[2 1]}"));
    }

    #[test]
    fn spanning_dimensions_small() {
        assert_eq!(spanning_dimension(2, 2).unwrap(), 1);
        assert_eq!(spanning_dimension(2, 3).unwrap(), 6);
        assert_eq!(spanning_dimension(3, 4).unwrap(), 12);
        // Above n^2 the span is everything.
        assert_eq!(spanning_dimension(2, 4).unwrap(), 24);
        assert_eq!(spanning_dimension(1, 3).unwrap(), 6);
        match spanning_dimension(3, 9) {
            Err(Error::CapExceeded { cap, .. }) => assert_eq!(cap, SPANNING_CAP),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn spanning_dimension_bounded_by_count() {
        for (n, m) in [(2, 2), (2, 3), (2, 4), (3, 4), (3, 5)] {
            let dim = spanning_dimension(n, m).unwrap();
            let count = count_ordered_partitions(n, m).to_usize().unwrap();
            assert!(dim <= count, "({n},{m}): {dim} > {count}");
        }
    }

    #[test]
    fn modular_and_exact_spanning_ranks_agree() {
        for (n, m) in [(2, 3), (2, 4), (3, 4), (3, 5)] {
            let mat = spanning_matrix(n, m);
            let exact = rank_exact(&mat);
            let (lower, agreed) = crate::linalg::rank_modular(&mat, 2);
            assert!(agreed, "({n},{m})");
            assert_eq!(lower, exact, "({n},{m})");
        }
    }

    #[test]
    fn left_action_permutes_ordered_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for m in 2..=6usize {
            for _ in 0..5 {
                let sigma = Permutation::random(m, &mut rng);
                let n = 1 + (m / 2);
                for o in enumerate_ordered_partitions(n, m, None).take(8) {
                    let lhs = build_po(&o).act_left(&sigma);
                    let rhs = build_po(&o.relabeled(&sigma).unwrap());
                    assert_eq!(lhs, rhs, "σ={sigma} O={o}");
                }
            }
        }
    }

    #[test]
    fn count_closed_form_sanity() {
        // C(m,n)(m-1)!/(n-1)! equals the other factoring C(m-1,n-1)m!/n!.
        for m in 1..=9u64 {
            for n in 1..=m {
                let a = count_ordered_partitions(n as usize, m as usize);
                let b = binomial(m - 1, n - 1) * factorial(m) / factorial(n);
                assert_eq!(a, b);
            }
        }
    }
}
