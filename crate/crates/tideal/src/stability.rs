//! Stabilization along the diagonals `m = n + K`, and the coefficient
//! polynomials that drive it.
//!
//! Two independent views of the same phenomenon: `stabilization_report`
//! computes the actual decompositions `W_{n,n+K}` for a range of `n` and
//! locates the first one all later ones are derived from, while
//! `coefficient_polynomial` checks the word-level mechanism: the
//! coefficient of a shifted word `u^(s)` in the shifted symmetrization
//! `P^(s)`, divided by `s!`, is eventually a polynomial in `s`.

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::Partition;
use crate::decomposition::{decompose_w, Decomposition};
use crate::error::{Error, Result};
use crate::glk::is_derived_decomposition;
use crate::linalg::{evaluate_polynomial, interpolate_polynomial};
use crate::words::{Word, YPolynomial};

// ---------------------------------------------------------------------------
// Central runs and shifted words.

/// The central part of `u`: the leftmost among the longest runs of `y1`,
/// as 1-based `(start, length)`.  `None` when `y1` does not occur.
pub fn central_part(u: &Word) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (letter, start, len) in u.runs() {
        if letter == 1 && best.map_or(true, |(_, l)| len > l) {
            best = Some((start, len));
        }
    }
    best
}

/// `u^(s)`: `s` copies of `y1` spliced in immediately before the central
/// run, so the central part grows from `|C(u)|` to `|C(u)| + s`.
pub fn shift_word(u: &Word, s: usize) -> Result<Word> {
    let (start, _) = central_part(u).ok_or(Error::NoCentralRun)?;
    let mut letters = u.letters().to_vec();
    letters.splice(start - 1..start - 1, std::iter::repeat(1u8).take(s));
    Word::new(letters)
}

/// `F_s(m_1, ..., m_r)`: the sum over all ways to distribute `s` copies of
/// `y1` into the `r + 1` gaps around the blocks, i.e. `Σ y1^{a_0} m_1
/// y1^{a_1} ... m_r y1^{a_r}` over nonnegative `a` with `Σ a_i = s`.
/// Coinciding words accumulate multiplicity.
pub fn f_s(monomials: &[Word], s: usize) -> YPolynomial {
    let mut out = YPolynomial::zero();
    let r = monomials.len();
    let mut gaps = vec![0usize; r + 1];
    fn rec(monomials: &[Word], gaps: &mut [usize], slot: usize, left: usize, out: &mut YPolynomial) {
        if slot + 1 == gaps.len() {
            gaps[slot] = left;
            let mut w = Word::run(1, gaps[0]);
            for (i, m) in monomials.iter().enumerate() {
                w = w.concat(m).concat(&Word::run(1, gaps[i + 1]));
            }
            out.add_term(w, BigRational::one());
            return;
        }
        for a in 0..=left {
            gaps[slot] = a;
            rec(monomials, gaps, slot + 1, left - a, out);
        }
    }
    rec(monomials, &mut gaps, 0, s, &mut out);
    out
}

/// Full symmetrization `P(w_1, ..., w_t)`: the sum of the concatenations
/// over all `t!` argument orders.
pub fn symmetrized_product(args: &[Word]) -> YPolynomial {
    let mut out = YPolynomial::zero();
    for perm in (0..args.len()).permutations(args.len()) {
        let mut w = Word::empty();
        for i in perm {
            w = w.concat(&args[i]);
        }
        out.add_term(w, BigRational::one());
    }
    out
}

// ---------------------------------------------------------------------------
// Coefficient polynomials.

/// Samples of `c(s) = Coef_{u^(s)}(P^(s)) / s!` together with the exact
/// polynomial fitted through them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffPolyFit {
    samples: Vec<(usize, BigRational)>,
    coefficients: Vec<BigRational>,
    residual: bool,
}

impl CoeffPolyFit {
    pub fn samples(&self) -> &[(usize, BigRational)] {
        &self.samples
    }

    /// Monomial coefficients of the fit, constant term first.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// True when the fitted polynomial failed to reproduce every sample,
    /// i.e. the sequence is not polynomial of the attempted degree.
    pub fn residual(&self) -> bool {
        self.residual
    }

    pub fn evaluate(&self, s: i64) -> BigRational {
        evaluate_polynomial(&self.coefficients, s)
    }
}

impl std::fmt::Display for CoeffPolyFit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "c(s) =")?;
        let mut any = false;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() && self.coefficients.len() > 1 {
                continue;
            }
            any = true;
            match i {
                0 => write!(f, " {c}")?,
                1 => write!(f, " + {c}·s")?,
                _ => write!(f, " + {c}·s^{i}")?,
            }
        }
        if !any {
            write!(f, " 0")?;
        }
        if self.residual {
            write!(f, "  [residual: not polynomial]")?;
        }
        Ok(())
    }
}

/// Coefficient extraction along the shift family: `c(s)` is the coefficient
/// of `u^(s)` in `Σ_σ F_t(m_σ(1), ..., m_σ(r))` with `t = s + offset`,
/// where the offset is the `y1`-degree gap between `u` and the blocks.  By
/// the symmetrization identity this equals `Coef_{u^(s)}(P^(t)) / t!`, so
/// the factorial never materializes.
///
/// The minimal-degree polynomial is fitted through the samples
/// `s = 0 .. s_max−2` and must predict the last two; when it does not, the
/// residual flag is set and the sequence is not polynomial (the central
/// run of `u` is too short for the blocks).
pub fn coefficient_polynomial(
    monomials: &[Word],
    u: &Word,
    s_max: usize,
) -> Result<CoeffPolyFit> {
    central_part(u).ok_or(Error::NoCentralRun)?;
    let y1_of = |w: &Word| w.letters().iter().filter(|&&l| l == 1).count() as i64;
    let offset = y1_of(u) - monomials.iter().map(|m| y1_of(m)).sum::<i64>();
    let orders: Vec<Vec<usize>> = (0..monomials.len())
        .permutations(monomials.len())
        .collect();
    let mut samples = Vec::with_capacity(s_max + 1);
    for s in 0..=s_max {
        let target = shift_word(u, s)?;
        let t = s as i64 + offset;
        let mut c = BigRational::zero();
        if t >= 0 {
            for order in &orders {
                let blocks: Vec<Word> = order.iter().map(|&i| monomials[i].clone()).collect();
                c += f_s(&blocks, t as usize).coeff(&target);
            }
        }
        samples.push((s, c));
    }
    let fit_end = s_max.saturating_sub(2);
    let nodes: Vec<i64> = (0..=fit_end as i64).collect();
    let values: Vec<BigRational> = samples[..=fit_end].iter().map(|(_, v)| v.clone()).collect();
    let coefficients = interpolate_polynomial(&nodes, &values);
    let residual = samples
        .iter()
        .any(|(s, v)| evaluate_polynomial(&coefficients, *s as i64) != *v);
    Ok(CoeffPolyFit {
        samples,
        coefficients,
        residual,
    })
}

// ---------------------------------------------------------------------------
// Stabilization reports.

/// Multiplicity of one irreducible family across the tested range.  The
/// family is named by its shape at the largest tested `n`; at smaller `n`
/// the first row shrinks accordingly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicitySequence {
    pub family: Partition,
    /// One entry per tested `n`, zero when the family is absent.
    pub multiplicities: Vec<usize>,
    /// First `n` at which the multiplicity drops below its predecessor.
    pub first_decrease: Option<usize>,
}

/// Decompositions of `W_{n,n+K}` over a range of `n`, the pairwise derived
/// relation, and the observed stabilization onset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub k: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// `(n, decomposition of W_{n,n+k})` for each computed `n`.
    pub decompositions: Vec<(usize, Decomposition)>,
    /// `derived[i][j]`: decomposition `j` is derived from decomposition `i`
    /// (lower triangle is false; the diagonal is trivially true).
    pub derived: Vec<Vec<bool>>,
    /// Smallest tested `n` from which every later decomposition is derived.
    pub n_obs: Option<usize>,
    pub sequences: Vec<MultiplicitySequence>,
    /// False when the range was cut short by a compute budget.
    pub complete: bool,
}

/// Computes `W_{n,n+K}` for `n_min ≤ n ≤ n_max` and reports where the
/// decompositions stabilize (become derived from one another).  A budget
/// or cap error at some `n` truncates the report there and clears the
/// `complete` flag; any other error aborts.
pub fn stabilization_report(k: usize, n_min: usize, n_max: usize) -> Result<StabilizationReport> {
    if n_min < k.max(1) || n_min > n_max {
        return Err(Error::DegreeMismatch(format!(
            "need max(K,1) ≤ n_min ≤ n_max, got K = {k}, range {n_min}..={n_max}"
        )));
    }
    let results: Vec<(usize, Result<Decomposition>)> = (n_min..=n_max)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| (n, decompose_w(n, n + k, true)))
        .collect();
    let mut decompositions: Vec<(usize, Decomposition)> = Vec::new();
    let mut complete = true;
    for (n, r) in results {
        match r {
            Ok(d) => decompositions.push((n, d)),
            Err(Error::BudgetExceeded(_)) | Err(Error::CapExceeded { .. }) => {
                complete = false;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let t = decompositions.len();
    let mut derived = vec![vec![false; t]; t];
    for i in 0..t {
        for j in i..t {
            derived[i][j] = is_derived_decomposition(&decompositions[j].1, &decompositions[i].1);
        }
    }
    let n_obs = (0..t)
        .find(|&i| (i..t).all(|j| derived[i][j]))
        .map(|i| decompositions[i].0);

    let sequences = family_sequences(&decompositions);

    Ok(StabilizationReport {
        k,
        n_min,
        n_max,
        decompositions,
        derived,
        n_obs,
        sequences,
        complete,
    })
}

/// Aligns multiplicities across levels: the shape `λ` at level `n` belongs
/// to the family of `λ` with its first row grown to the last level.
fn family_sequences(decompositions: &[(usize, Decomposition)]) -> Vec<MultiplicitySequence> {
    let Some(&(n_last, _)) = decompositions.last() else {
        return Vec::new();
    };
    let mut families: Vec<Partition> = Vec::new();
    for (n, d) in decompositions {
        for (lam, _) in d.terms() {
            let rep = lam.derive((n_last - n) as u32);
            if !families.contains(&rep) {
                families.push(rep);
            }
        }
    }
    families.sort();
    families
        .into_iter()
        .map(|rep| {
            let multiplicities: Vec<usize> = decompositions
                .iter()
                .map(|(n, d)| {
                    let delta = (n_last - n) as u32;
                    // The family has no member at this level if its first
                    // row would drop below the second.
                    if rep.first() < delta + rep.part(1) {
                        0
                    } else {
                        let mut parts = rep.parts().to_vec();
                        parts[0] -= delta;
                        let lam = Partition::new(parts).expect("still a partition");
                        d.multiplicity_of(&lam)
                    }
                })
                .collect();
            let first_decrease = multiplicities
                .windows(2)
                .position(|w| w[1] < w[0])
                .map(|i| decompositions[i + 1].0);
            MultiplicitySequence {
                family: rep,
                multiplicities,
                first_decrease,
            }
        })
        .collect()
}
