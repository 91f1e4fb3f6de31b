//! Dimension bounds for the modules `W_{n,m}` and exact polynomial fits
//! along the diagonals `m = n + k`.
//!
//! Three closed-form estimates sandwich the true dimension: the spanning-set
//! count from above, and two representation-theoretic counts from below (one
//! unconditional, one available when `gcd(n, m) = 1`).  The polynomial side
//! turns a single stabilized decomposition into the exact dimension
//! polynomial of its whole diagonal and validates it against computed
//! samples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combinatorics::{binomial, factorial, irrep_dim, partitions_of, Partition};
use crate::decomposition::{decompose_w, Decomposition};
use crate::error::{Error, Result};
use crate::linalg::{evaluate_polynomial, interpolate_polynomial, rank_exact, SparseMatrix};

/// Variable symbol a [`DimPolynomial`] is written in: `d` counts boxes
/// appended to a fixed first row, `n` indexes a diagonal of the `W` family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    D,
    N,
}

impl Variable {
    pub fn symbol(self) -> char {
        match self {
            Variable::D => 'd',
            Variable::N => 'n',
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Polynomial with exact rational coefficients, stored lowest degree first
/// with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimPolynomial {
    variable: Variable,
    coefficients: Vec<BigRational>,
}

impl DimPolynomial {
    pub fn new(variable: Variable, mut coefficients: Vec<BigRational>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        DimPolynomial {
            variable,
            coefficients,
        }
    }

    pub fn constant(variable: Variable, value: BigRational) -> Self {
        DimPolynomial::new(variable, vec![value])
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    /// Coefficients lowest degree first; empty for the zero polynomial.
    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn evaluate(&self, x: i64) -> BigRational {
        evaluate_polynomial(&self.coefficients, x)
    }

    /// Value at `x` when it is an integer, `None` otherwise.
    pub fn evaluate_integer(&self, x: i64) -> Option<BigInt> {
        let v = self.evaluate(x);
        v.is_integer().then(|| v.to_integer())
    }
}

impl fmt::Display for DimPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, coeff) in self.coefficients.iter().enumerate().rev() {
            if coeff.is_zero() {
                continue;
            }
            if first {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = coeff.abs();
            match power {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag} ")?;
                    }
                    if power == 1 {
                        write!(f, "{}", self.variable)?;
                    } else {
                        write!(f, "{}^{power}", self.variable)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename = "DimPolynomial")]
struct DimPolynomialRepr {
    variable: Variable,
    coefficients: Vec<String>,
}

impl Serialize for DimPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DimPolynomialRepr {
            variable: self.variable,
            coefficients: self.coefficients.iter().map(|c| c.to_string()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DimPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = DimPolynomialRepr::deserialize(deserializer)?;
        let coefficients = repr
            .coefficients
            .iter()
            .map(|s| BigRational::from_str(s))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| D::Error::custom(format!("bad rational coefficient: {e}")))?;
        Ok(DimPolynomial::new(repr.variable, coefficients))
    }
}

/// Number of spanning polynomials: `C(m,n) * (m-1)! / (n-1)!`, an upper
/// bound for `dim W_{n,m}`.
pub fn omega_upper_bound(n: usize, m: usize) -> BigUint {
    assert!(n >= 1 && n <= m, "omega_upper_bound needs 1 <= n <= m");
    binomial(m as u64, n as u64) * (factorial(m as u64 - 1) / factorial(n as u64 - 1))
}

/// Sum of squared irreducible dimensions over partitions of `m` with at
/// least `n` rows, a lower bound for `dim W_{n,m}`.
pub fn latyshev_lower_bound(n: usize, m: usize) -> BigUint {
    partitions_of(m as u32, None)
        .iter()
        .filter(|lambda| lambda.len() >= n)
        .map(|lambda| {
            let d = irrep_dim(lambda);
            &d * &d
        })
        .sum()
}

/// Lower bound `m! / (n-1)!` for `dim W_{n,m}`, available exactly when
/// `gcd(n, m) = 1`; `None` otherwise.
pub fn coprime_lower_bound(n: usize, m: usize) -> Option<BigUint> {
    assert!(n >= 1, "coprime_lower_bound needs n >= 1");
    ((n as u64).gcd(&(m as u64)) == 1).then(|| factorial(m as u64) / factorial(n as u64 - 1))
}

/// Invertibility of `e + g + ... + g^k` in the rational group algebra of
/// the cyclic group of order `n`: holds exactly when `gcd(k+1, n) = 1`.
pub fn zeta_invertible(n: usize, k: usize) -> Result<bool> {
    check_zeta_range(n, k)?;
    Ok((k as u64 + 1).gcd(&(n as u64)) == 1)
}

/// Exact rational rank of the `n x n` circulant matrix of multiplication by
/// `e + g + ... + g^k`; full rank is the independent oracle for
/// [`zeta_invertible`].
pub fn zeta_circulant_rank(n: usize, k: usize) -> Result<usize> {
    check_zeta_range(n, k)?;
    let mut m = SparseMatrix::new(n);
    for i in 0..n {
        let entries = (0..=k).map(|t| (((i + t) % n) as u32, 1i64)).collect();
        m.push_integer_row(entries)?;
    }
    Ok(rank_exact(&m))
}

fn check_zeta_range(n: usize, k: usize) -> Result<()> {
    if n == 0 || k >= n {
        return Err(Error::DegreeMismatch(format!(
            "zeta index k = {k} must satisfy 0 <= k < n = {n}"
        )));
    }
    Ok(())
}

/// The polynomial `q` with `q(d) = irrep_dim(lambda.derive(d))` for every
/// `d >= 0`.
///
/// Appending `d` boxes to the first row leaves the hook lengths of all lower
/// rows unchanged, so in the factorial form of the dimension count only the
/// first-row factors move with `d`.  Writing `b_i = lambda_i + len - i`,
/// the dimension is
///
/// ```text
/// |lambda^(d)|! * prod_{i<j} (b_i - b_j) / prod_i b_i!
/// ```
///
/// and isolating the `b_1` terms leaves a constant times a product of linear
/// factors in `d`: the degree equals `|lambda| - lambda_1`.
pub fn derived_dim_polynomial(lambda: &Partition) -> DimPolynomial {
    assert!(
        !lambda.is_empty(),
        "derived_dim_polynomial needs a nonempty shape"
    );
    let ell = lambda.len();
    let total = lambda.size() as u64;
    let l1 = lambda.first() as u64;
    let beta: Vec<u64> = (0..ell)
        .map(|i| lambda.part(i) as u64 + (ell - 1 - i) as u64)
        .collect();

    // Constant part: the lower-row Vandermonde over the lower-row factorials.
    let mut poly = vec![BigRational::one()];
    for i in 1..ell {
        for j in (i + 1)..ell {
            poly[0] *= BigRational::from_integer(BigInt::from(beta[i] - beta[j]));
        }
    }
    for b in &beta[1..] {
        poly[0] /= BigRational::from_integer(BigInt::from(factorial(*b)));
    }

    // |lambda^(d)|! / b_1(d)! is the product of (d + t) for t in this range;
    // it is never empty in the wrong direction because every lower row has
    // at least one box.
    for t in (l1 + ell as u64)..=total {
        poly = mul_linear(&poly, t);
    }
    // b_1(d) - b_j contributes one linear factor per lower row.
    let b1 = l1 + ell as u64 - 1;
    for b in &beta[1..] {
        poly = mul_linear(&poly, b1 - b);
    }
    DimPolynomial::new(Variable::D, poly)
}

/// Multiply by the monic linear factor `x + a`.
fn mul_linear(p: &[BigRational], a: u64) -> Vec<BigRational> {
    let a = BigRational::from_integer(BigInt::from(a));
    let mut out = vec![BigRational::zero(); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i] += c * &a;
        out[i + 1] += c;
    }
    out
}

mod rational_string {
    use super::*;

    pub fn serialize<S: Serializer>(
        v: &BigRational,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(deserializer)?;
        BigRational::from_str(&s).map_err(|e| D::Error::custom(format!("bad rational: {e}")))
    }
}

/// One sample point of a [`PolynomialFit`] and whether the fit reproduced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub n: usize,
    pub expected: u64,
    #[serde(with = "rational_string")]
    pub predicted: BigRational,
    pub matched: bool,
}

/// Result of [`fit_pk`]: the dimension polynomial of a diagonal together
/// with the decomposition it was built from and the per-sample validation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialFit {
    pub k: usize,
    /// Smallest sampled level; the decomposition there seeds the fit.
    pub base_level: usize,
    pub base: Decomposition,
    pub polynomial: DimPolynomial,
    pub checks: Vec<SampleCheck>,
    /// True when every sample matched.  False means the sampled range has
    /// not stabilized yet (the base decomposition does not govern it).
    pub validated: bool,
}

/// Fit the dimension polynomial of the diagonal `m = n + k`.
///
/// The polynomial is not interpolated through the samples: it is assembled
/// from the decomposition at the smallest sampled level by summing, over the
/// constituents found there, the derived-dimension polynomials shifted to
/// that level.  Every sample therefore acts as held-out validation, and a
/// mismatch is reported through `validated = false` rather than an error.
pub fn fit_pk(k: usize, samples: &BTreeMap<usize, u64>) -> Result<PolynomialFit> {
    let (&base_level, _) = samples
        .iter()
        .next()
        .ok_or_else(|| Error::DegreeMismatch("fit_pk needs at least one sample".into()))?;
    if base_level == 0 {
        return Err(Error::DegreeMismatch(
            "fit_pk needs sample levels n >= 1".into(),
        ));
    }

    let base = decompose_w(base_level, base_level + k, true)?;
    let degree = base
        .terms()
        .map(|(shape, _)| (shape.size() - shape.first()) as usize)
        .max()
        .unwrap_or(0);

    // A degree-bounded polynomial is pinned by degree+1 exact values, all of
    // which come from hook-length counts of the derived shapes.
    let nodes: Vec<i64> = (0..=degree).map(|i| (base_level + i) as i64).collect();
    let values: Vec<BigRational> = (0..=degree)
        .map(|i| {
            let total: BigUint = base
                .terms()
                .map(|(shape, mult)| irrep_dim(&shape.derive(i as u32)) * BigUint::from(mult))
                .sum();
            BigRational::from_integer(BigInt::from(total))
        })
        .collect();
    let polynomial = DimPolynomial::new(Variable::N, interpolate_polynomial(&nodes, &values));

    let checks: Vec<SampleCheck> = samples
        .iter()
        .map(|(&n, &dim)| {
            let predicted = polynomial.evaluate(n as i64);
            let matched = predicted == BigRational::from_integer(BigInt::from(dim));
            SampleCheck {
                n,
                expected: dim,
                predicted,
                matched,
            }
        })
        .collect();
    let validated = checks.iter().all(|c| c.matched);

    Ok(PolynomialFit {
        k,
        base_level,
        base,
        polynomial,
        checks,
        validated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{dim_w, DimMethod};
    use crate::multilinear::count_ordered_partitions;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn omega_closed_form() {
        assert_eq!(omega_upper_bound(2, 3), BigUint::from(6u32));
        for n in 1..=7usize {
            assert_eq!(
                omega_upper_bound(n, n + 1),
                BigUint::from((n * (n + 1)) as u64)
            );
            assert_eq!(omega_upper_bound(n, n), BigUint::one());
        }
        for m in 1..=7usize {
            for n in 1..=m {
                assert_eq!(omega_upper_bound(n, m), count_ordered_partitions(n, m));
            }
        }
    }

    #[test]
    fn latyshev_examples() {
        // Partitions of 3 with at least 2 rows: (2,1) and (1,1,1).
        assert_eq!(latyshev_lower_bound(2, 3), BigUint::from(5u32));
        for m in 1..=6usize {
            assert_eq!(latyshev_lower_bound(1, m), factorial(m as u64));
            assert_eq!(latyshev_lower_bound(m + 1, m), BigUint::zero());
        }
    }

    #[test]
    fn coprime_examples() {
        assert_eq!(coprime_lower_bound(2, 3), Some(BigUint::from(6u32)));
        assert_eq!(coprime_lower_bound(3, 4), Some(BigUint::from(12u32)));
        assert_eq!(coprime_lower_bound(2, 4), None);
        for m in 1..=6usize {
            assert_eq!(coprime_lower_bound(1, m), Some(factorial(m as u64)));
        }
    }

    #[test]
    fn bounds_sandwich_small_grid() {
        for m in 1..=5usize {
            for n in 1..=m {
                let dim = BigUint::from(dim_w(n, m, DimMethod::ViaMultiplicities).unwrap());
                assert!(
                    latyshev_lower_bound(n, m) <= dim,
                    "latyshev fails at ({n},{m})"
                );
                assert!(dim <= omega_upper_bound(n, m), "omega fails at ({n},{m})");
                if let Some(lower) = coprime_lower_bound(n, m) {
                    assert!(lower <= dim, "coprime fails at ({n},{m})");
                }
            }
        }
    }

    #[test]
    fn zeta_criterion_and_oracle_agree() {
        assert_eq!(zeta_invertible(4, 1).unwrap(), false);
        assert_eq!(zeta_invertible(5, 1).unwrap(), true);
        for n in 1..=12usize {
            assert!(zeta_invertible(n, 0).unwrap());
            for k in 0..n {
                let invertible = zeta_invertible(n, k).unwrap();
                let rank = zeta_circulant_rank(n, k).unwrap();
                assert_eq!(
                    invertible,
                    rank == n,
                    "criterion vs circulant rank at (n,k) = ({n},{k})"
                );
            }
        }
        assert!(zeta_invertible(5, 5).is_err());
        assert!(zeta_circulant_rank(0, 0).is_err());
    }

    #[test]
    fn derived_dim_small_shapes() {
        assert_eq!(
            derived_dim_polynomial(&p(&[1])),
            DimPolynomial::new(Variable::D, vec![rat(1)])
        );
        assert_eq!(
            derived_dim_polynomial(&p(&[1, 1])),
            DimPolynomial::new(Variable::D, vec![rat(1), rat(1)])
        );
        // (d+1)(d+4)/2 for the two-row square.
        let q = derived_dim_polynomial(&p(&[2, 2]));
        assert_eq!(q.degree(), 2);
        for d in 0..=6u32 {
            assert_eq!(
                q.evaluate(d as i64),
                BigRational::from_integer(BigInt::from(irrep_dim(&p(&[2, 2]).derive(d))))
            );
        }
    }

    #[test]
    fn derived_dim_matches_hook_counts_everywhere() {
        for total in 1..=6u32 {
            for lambda in partitions_of(total, None) {
                let q = derived_dim_polynomial(&lambda);
                assert_eq!(
                    q.degree(),
                    (lambda.size() - lambda.first()) as usize,
                    "degree at {lambda}"
                );
                for d in 0..=8u32 {
                    assert_eq!(
                        q.evaluate(d as i64),
                        BigRational::from_integer(BigInt::from(irrep_dim(&lambda.derive(d)))),
                        "value at {lambda}, d = {d}"
                    );
                }
            }
        }
    }

    #[test]
    fn fit_recovers_quadratic_diagonal() {
        let samples: BTreeMap<usize, u64> = [(3, 12), (4, 20), (5, 30), (6, 42)].into();
        let fit = fit_pk(1, &samples).unwrap();
        assert_eq!(fit.base_level, 3);
        assert!(fit.validated);
        assert_eq!(fit.polynomial.variable(), Variable::N);
        assert_eq!(
            fit.polynomial.coefficients(),
            &[rat(0), rat(1), rat(1)],
            "expected n^2 + n"
        );
        assert_eq!(fit.polynomial.to_string(), "n^2 + n");
        assert_eq!(fit.checks.len(), 4);
        assert!(fit.checks.iter().all(|c| c.matched));
    }

    #[test]
    fn fit_flags_unstabilized_base() {
        // Level 2 is below the onset of the first diagonal's stable range:
        // the fit seeded there predicts 10 at n = 3 instead of 12.
        let samples: BTreeMap<usize, u64> = [(2, 6), (3, 12), (4, 20)].into();
        let fit = fit_pk(1, &samples).unwrap();
        assert!(!fit.validated);
        assert_eq!(
            fit.polynomial.coefficients(),
            &[rat(1), ratio(3, 2), ratio(1, 2)],
            "expected (n+1)(n+2)/2"
        );
        assert!(fit.checks[0].matched);
        assert!(!fit.checks[1].matched);
        assert_eq!(fit.checks[1].predicted, rat(10));
        assert!(!fit.checks[2].matched);
        assert_eq!(fit.checks[2].predicted, rat(15));
    }

    #[test]
    fn fit_constant_on_trivial_diagonal() {
        let samples: BTreeMap<usize, u64> = [(4, 1), (5, 1), (6, 1)].into();
        let fit = fit_pk(0, &samples).unwrap();
        assert!(fit.validated);
        assert_eq!(fit.polynomial.coefficients(), &[rat(1)]);
        assert_eq!(fit.polynomial.to_string(), "1");
    }

    #[test]
    fn fit_rejects_empty_samples() {
        assert!(fit_pk(1, &BTreeMap::new()).is_err());
    }

    #[test]
    fn polynomial_display() {
        let quartic = DimPolynomial::new(
            Variable::N,
            vec![rat(0), rat(-1), ratio(3, 2), rat(2), ratio(1, 2)],
        );
        assert_eq!(quartic.to_string(), "1/2 n^4 + 2 n^3 + 3/2 n^2 - n");
        assert_eq!(
            DimPolynomial::new(Variable::D, vec![rat(1), rat(1)]).to_string(),
            "d + 1"
        );
        assert_eq!(DimPolynomial::new(Variable::N, vec![]).to_string(), "0");
        assert_eq!(
            DimPolynomial::new(Variable::N, vec![rat(-2), rat(0), rat(1)]).to_string(),
            "n^2 - 2"
        );
    }

    #[test]
    fn polynomial_integer_evaluation() {
        let quartic = DimPolynomial::new(
            Variable::N,
            vec![rat(0), rat(-1), ratio(3, 2), rat(2), ratio(1, 2)],
        );
        assert_eq!(quartic.evaluate_integer(6), Some(BigInt::from(1128)));
        assert_eq!(quartic.evaluate_integer(9), Some(BigInt::from(4851)));
        let half = DimPolynomial::new(Variable::N, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(half.evaluate_integer(2), None);
        assert_eq!(half.evaluate_integer(3), Some(BigInt::from(2)));
    }

    #[test]
    fn polynomial_json_round_trip() {
        let quartic = DimPolynomial::new(
            Variable::N,
            vec![rat(0), rat(-1), ratio(3, 2), rat(2), ratio(1, 2)],
        );
        let json = serde_json::to_string(&quartic).unwrap();
        assert_eq!(
            json,
            r#"{"variable":"n","coefficients":["0","-1","3/2","2","1/2"]}"#
        );
        let back: DimPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, quartic);

        let samples: BTreeMap<usize, u64> = [(3, 12), (4, 20), (5, 30), (6, 42)].into();
        let fit = fit_pk(1, &samples).unwrap();
        let json = serde_json::to_string(&fit).unwrap();
        let back: PolynomialFit = serde_json::from_str(&json).unwrap();
        assert_eq!(back.polynomial, fit.polynomial);
        assert_eq!(back.checks, fit.checks);
        assert_eq!(back.validated, fit.validated);
    }
}
