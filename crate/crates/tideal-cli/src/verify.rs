//! The `verify` subcommand: a self-contained property-check corpus.
//!
//! `fast` keeps every check at small degree and finishes in well under a
//! minute; `full` extends the same properties to the largest cases the
//! other subcommands are expected to handle.  All randomness is drawn from
//! per-check streams derived from the one seed, so stdout is byte-identical
//! across runs with the same seed; timings go to stderr.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use clap::ValueEnum;
use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tideal::algebra::{
    conjugate_tableau_check, idempotent_scalar, young_symmetrizer, AlgebraElement,
};
use tideal::bounds::{
    coprime_lower_bound, derived_dim_polynomial, fit_pk, latyshev_lower_bound, omega_upper_bound,
    zeta_circulant_rank, zeta_invertible,
};
use tideal::combinatorics::{
    canonical_tableau, irrep_dim, partitions_of, standard_tableaux, Partition, Tableau,
};
use tideal::decomposition::{
    decompose_w, dim_w, nilpotency_probe, Decomposition, DimMethod,
};
use tideal::glk::{multiplicity_upper_bounds, schur_expand, schur_function, young_rule};
use tideal::linalg::{rank_exact, SparseMatrix};
use tideal::perm::Permutation;
use tideal::stability::{
    central_part, coefficient_polynomial, f_s, shift_word, stabilization_report,
    symmetrized_product,
};
use tideal::substitution::{highest_weight_image, regev_identity_check};
use tideal::words::{Word, YPolynomial};
use tideal::Error;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Small-degree smoke set, < 1 minute.
    Fast,
    /// Extended corpus at the largest supported sizes, ~10 minutes.
    Full,
}

struct Fail {
    instance: String,
    repro: Option<String>,
    budget: bool,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail {
            budget: matches!(e, Error::CapExceeded { .. } | Error::BudgetExceeded(_)),
            instance: e.to_string(),
            repro: None,
        }
    }
}

/// Ok carries extra stdout lines printed under the check's `ok` line.
type CheckResult = Result<Vec<String>, Fail>;

fn fail(instance: impl Into<String>, repro: impl Into<String>) -> CheckResult {
    Err(Fail {
        instance: instance.into(),
        repro: Some(repro.into()),
        budget: false,
    })
}

type Check = (&'static str, Box<dyn FnOnce() -> CheckResult>);

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn small_factorial(m: usize) -> usize {
    (1..=m).product::<usize>().max(1)
}

/// Stream `i` of the run seed: checks stay deterministic even if the corpus
/// is reordered.
fn stream(seed: u64, i: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (i.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn word(s: &str) -> Word {
    Word::from_str(s).expect("verify corpus words parse")
}

fn part(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec()).expect("verify corpus shapes are sorted")
}

pub fn run(suite: Suite, seed: u64) -> u8 {
    let mut checks: Vec<Check> = Vec::new();
    let full = suite == Suite::Full;

    push(&mut checks, "dims-cross-method", move || {
        check_dims_cross_method(if full { 6 } else { 5 })
    });
    push(&mut checks, "one-row-closed-forms", move || {
        check_one_row_closed_forms(if full { 6 } else { 4 })
    });
    push(&mut checks, "length-vanishing", move || {
        check_length_vanishing(if full { 5 } else { 4 })
    });
    push(&mut checks, "symmetrizer-idempotent", || {
        check_symmetrizer_idempotent(5)
    });
    push(&mut checks, "symmetrizer-conjugation", move || {
        check_symmetrizer_conjugation(seed)
    });
    push(&mut checks, "cross-shape-orthogonality", move || {
        check_orthogonality(seed, full)
    });
    push(&mut checks, "principal-line", move || {
        check_principal_line(seed, full)
    });
    push(&mut checks, "highest-weight-identity", move || {
        check_regev_identity(seed)
    });
    push(&mut checks, "rank-transfer", move || {
        if full {
            check_rank_transfer(seed, 5, 50)
        } else {
            check_rank_transfer(seed, 4, 12)
        }
    });
    push(&mut checks, "interleaving-identity", move || {
        check_interleaving_identity(seed, if full { 3 } else { 2 })
    });
    push(&mut checks, "central-run-growth", || check_central_run_growth());
    push(&mut checks, "coefficient-polynomials", move || {
        check_coefficient_polynomials(if full { 8 } else { 6 })
    });
    push(&mut checks, "bounds-sandwich", move || {
        check_bounds_sandwich(if full { 6 } else { 5 })
    });
    push(&mut checks, "zeta-oracle", move || {
        check_zeta_oracle(if full { 12 } else { 8 })
    });
    push(&mut checks, "derived-dim-polynomials", || {
        check_derived_dim(5, 6)
    });
    push(&mut checks, "poly-rep-upper-bounds", || check_gl_bounds());
    push(&mut checks, "young-rule-pieri", || check_young_rule());

    if full {
        push(&mut checks, "nilpotency-degrees", || check_nilpotency_probes());
        push(&mut checks, "dim-w36", || check_dim_w36());
        push(&mut checks, "stabilization-k1", || check_stabilization_k1());
        push(&mut checks, "stabilization-k2", || check_stabilization_k2());
    }

    execute(checks)
}

fn push(checks: &mut Vec<Check>, name: &'static str, f: impl FnOnce() -> CheckResult + 'static) {
    checks.push((name, Box::new(f)));
}

fn execute(checks: Vec<Check>) -> u8 {
    let total = checks.len();
    let mut passed = 0usize;
    let mut skipped = 0usize;
    let mut failed = 0usize;
    let started = Instant::now();
    for (name, check) in checks {
        let t = Instant::now();
        match check() {
            Ok(details) => {
                passed += 1;
                println!("ok   {name}");
                for line in details {
                    println!("     {line}");
                }
            }
            Err(f) if f.budget => {
                skipped += 1;
                println!("SKIP {name}: {}", f.instance);
            }
            Err(f) => {
                failed += 1;
                println!("FAIL {name}: {}", f.instance);
                if let Some(r) = f.repro {
                    println!("     reproduce: {r}");
                }
            }
        }
        eprintln!("[{:>8.2?}] {name}", t.elapsed());
    }
    println!("{passed}/{total} checks passed");
    if skipped > 0 {
        println!("partial: {skipped} checks skipped on compute budget");
    }
    eprintln!("total {:.2?}", started.elapsed());
    if failed > 0 {
        1
    } else if skipped > 0 {
        3
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Dimension and decomposition checks.

fn check_dims_cross_method(m_max: usize) -> CheckResult {
    let mut lines = Vec::new();
    for m in 1..=m_max {
        for n in 1..=m {
            let dim = dim_w(n, m, DimMethod::Both).map_err(|e| lib_fail(e, n, m))?;
            if n == 1 && dim != small_factorial(m) as u64 {
                return fail(
                    format!("dim W(1,{m}) = {dim}, expected {m}! "),
                    format!("tideal dim --n 1 --m {m} --method both"),
                );
            }
            if n == m && dim != 1 {
                return fail(
                    format!("dim W({m},{m}) = {dim}, expected 1"),
                    format!("tideal dim --n {m} --m {m} --method both"),
                );
            }
        }
    }
    let d23 = dim_w(2, 3, DimMethod::Both).map_err(|e| lib_fail(e, 2, 3))?;
    if d23 != 6 {
        return fail(
            format!("dim W(2,3) = {d23}, expected 6"),
            "tideal dim --n 2 --m 3 --method both",
        );
    }
    lines.push(format!(
        "rank and multiplicity methods agree for all n <= m <= {m_max}"
    ));
    Ok(lines)
}

fn lib_fail(e: Error, n: usize, m: usize) -> Fail {
    let mut f = Fail::from(e);
    f.repro = Some(format!("tideal dim --n {n} --m {m} --method both"));
    f
}

fn one_row_above_table(n: u32) -> Decomposition {
    Decomposition::from_terms(
        n as usize + 1,
        [
            (part(&[n + 1]), 1),
            (part(&[n, 1]), 2),
            (part(&[n - 1, 2]), 1),
            (part(&[n - 1, 1, 1]), 1),
        ],
    )
    .expect("closed-form table is well formed")
}

fn check_one_row_closed_forms(n_max: u32) -> CheckResult {
    for n in 3..=n_max {
        let got = decompose_w(n as usize, n as usize + 1, true).map_err(Fail::from)?;
        let want = one_row_above_table(n);
        if got != want {
            return fail(
                format!("decompose W({n},{}) = {got}, expected {want}", n + 1),
                format!("tideal decompose --n {n} --m {}", n + 1),
            );
        }
        if got.dim() != BigUint::from(n * (n + 1)) {
            return fail(
                format!("dim W({n},{}) != n(n+1)", n + 1),
                format!("tideal dim --n {n} --m {}", n + 1),
            );
        }
    }
    Ok(vec![format!(
        "m = n + 1 tables match the four-term closed form for n = 3..{n_max}"
    )])
}

fn check_length_vanishing(n_max: usize) -> CheckResult {
    // K = 1 diagonals with pruning off: every shape longer than 2K + 1 = 3
    // rows must come back with multiplicity zero.
    for n in 3..=n_max {
        let m = n + 1;
        let d = decompose_w(n, m, false).map_err(Fail::from)?;
        for lambda in partitions_of(m as u32, None) {
            if lambda.len() > 3 && d.multiplicity_of(&lambda) != 0 {
                return fail(
                    format!(
                        "W({n},{m}) contains S^{lambda} with multiplicity {}",
                        d.multiplicity_of(&lambda)
                    ),
                    format!("tideal decompose --n {n} --m {m} --no-prune"),
                );
            }
        }
    }
    Ok(vec![format!(
        "rows beyond 3 vanish without pruning on m = n + 1, n = 3..{n_max}"
    )])
}

fn check_nilpotency_probes() -> CheckResult {
    let expected = [(1usize, 1usize), (2, 3), (3, 6)];
    for (n, d) in expected {
        let got = nilpotency_probe(n, None).map_err(Fail::from)?;
        if got != Some(d) {
            return fail(
                format!("nilpotency probe for n = {n} returned {got:?}, expected {d}"),
                format!("tideal dprobe --n {n}"),
            );
        }
    }
    Ok(vec!["d(1) = 1, d(2) = 3, d(3) = 6".to_string()])
}

fn check_dim_w36() -> CheckResult {
    let dim = dim_w(3, 6, DimMethod::Both).map_err(Fail::from)?;
    if dim != 720 {
        return fail(
            format!("dim W(3,6) = {dim}, expected 720"),
            "tideal dim --n 3 --m 6 --method both",
        );
    }
    Ok(vec!["dim W(3,6) = 720 = 6! by both methods".to_string()])
}

// ---------------------------------------------------------------------------
// Group algebra identities.

fn check_symmetrizer_idempotent(m_max: u32) -> CheckResult {
    let mut count = 0usize;
    for m in 1..=m_max {
        let m_fact = rat(small_factorial(m as usize) as i64);
        for lambda in partitions_of(m, None) {
            let dim = BigRational::from_integer(irrep_dim(&lambda).into());
            for st in standard_tableaux(&lambda).map_err(Fail::from)? {
                let t = st.tableau();
                let e = young_symmetrizer(t);
                let square = e.multiply(&e);
                let beta = match e.proportionality(&square) {
                    Some(b) => b,
                    None => {
                        return fail(
                            format!("e_T^2 is not a multiple of e_T for T = {t:?}"),
                            "tideal verify fast",
                        )
                    }
                };
                if !beta.is_integer() || beta.is_zero() || beta.is_negative() {
                    return fail(
                        format!("scalar {beta} for shape {lambda} is not a positive integer"),
                        "tideal verify fast",
                    );
                }
                if idempotent_scalar(t).map_err(Fail::from)? != beta {
                    return fail(
                        format!("closed-form scalar disagrees with e_T^2 at shape {lambda}"),
                        "tideal verify fast",
                    );
                }
                if &beta * &dim != m_fact {
                    return fail(
                        format!("scalar {beta} times dim {dim} misses {m}! at shape {lambda}"),
                        "tideal verify fast",
                    );
                }
                count += 1;
            }
        }
    }
    Ok(vec![format!(
        "e_T^2 = (m!/dim) e_T for all {count} standard tableaux with m <= {m_max}"
    )])
}

fn check_symmetrizer_conjugation(seed: u64) -> CheckResult {
    let mut rng = stream(seed, 1);
    let mut count = 0usize;
    for m in 2..=5usize {
        for lambda in partitions_of(m as u32, None) {
            let t = canonical_tableau(&lambda);
            let sigmas: Vec<Permutation> = if m <= 4 {
                Permutation::all(m)
            } else {
                (0..8).map(|_| Permutation::random(m, &mut rng)).collect()
            };
            for sigma in sigmas {
                if !conjugate_tableau_check(&sigma, t.tableau()).map_err(Fail::from)? {
                    return fail(
                        format!("conjugation by {sigma} fails on shape {lambda}"),
                        format!("tideal verify fast --seed {seed}"),
                    );
                }
                count += 1;
            }
        }
    }
    Ok(vec![format!(
        "sigma e_T sigma^-1 = e_(sigma T) in {count} cases, m <= 5"
    )])
}

/// Random element with `terms` nonzero monomials and small coefficients.
fn random_element(m: usize, terms: usize, rng: &mut ChaCha8Rng) -> AlgebraElement {
    let mut f = AlgebraElement::zero(m);
    while f.num_terms() < terms {
        let p = Permutation::random(m, rng);
        let c = rng.gen_range(-2i64..=2);
        if c != 0 {
            f.add_term(&p, rat(c));
        }
    }
    f
}

fn check_orthogonality(seed: u64, full: bool) -> CheckResult {
    let mut count = 0usize;
    // Exhaustive over sigma at low degree, canonical tableaux.
    let exhaustive_max = if full { 5 } else { 4 };
    for m in 2..=exhaustive_max {
        let shapes = partitions_of(m as u32, None);
        for (u_shape, v_shape) in shapes.iter().cartesian_product(shapes.iter()) {
            if u_shape == v_shape {
                continue;
            }
            let eu = young_symmetrizer(canonical_tableau(u_shape).tableau());
            let ev = young_symmetrizer(canonical_tableau(v_shape).tableau());
            for sigma in Permutation::all(m) {
                if !eu.multiply(&ev.act_left(&sigma)).is_zero() {
                    return fail(
                        format!("e_U sigma e_V != 0 for shapes {u_shape}, {v_shape}, sigma = {sigma}"),
                        "tideal verify fast",
                    );
                }
                count += 1;
            }
        }
    }
    // Seeded samples one degree higher, random standard tableaux.
    let m = exhaustive_max + 1;
    let samples = if full { 120 } else { 40 };
    let mut rng = stream(seed, 2);
    let shapes = partitions_of(m as u32, None);
    let mut sampled = 0usize;
    while sampled < samples {
        let u_shape = &shapes[rng.gen_range(0..shapes.len())];
        let v_shape = &shapes[rng.gen_range(0..shapes.len())];
        if u_shape == v_shape {
            continue;
        }
        let us = standard_tableaux(u_shape).map_err(Fail::from)?;
        let vs = standard_tableaux(v_shape).map_err(Fail::from)?;
        let u = &us[rng.gen_range(0..us.len())];
        let v = &vs[rng.gen_range(0..vs.len())];
        let sigma = Permutation::random(m, &mut rng);
        let eu = young_symmetrizer(u.tableau());
        let ev = young_symmetrizer(v.tableau());
        if !eu.multiply(&ev.act_left(&sigma)).is_zero() {
            return fail(
                format!("e_U sigma e_V != 0 for shapes {u_shape}, {v_shape} at m = {m}"),
                format!("tideal verify fast --seed {seed}"),
            );
        }
        sampled += 1;
        count += 1;
    }
    Ok(vec![format!(
        "e_U R e_V = 0 across distinct shapes in {count} cases (exhaustive m <= {exhaustive_max}, sampled m = {m})"
    )])
}

fn check_principal_line(seed: u64, full: bool) -> CheckResult {
    let mut count = 0usize;
    let exhaustive_max = if full { 5 } else { 4 };
    for m in 2..=exhaustive_max {
        for lambda in partitions_of(m as u32, None) {
            let e = young_symmetrizer(canonical_tableau(&lambda).tableau());
            for sigma in Permutation::all(m) {
                let prod = e.multiply(&e.act_left(&sigma));
                if !prod.is_zero() && prod.proportionality(&e).is_none() {
                    return fail(
                        format!("e_T sigma e_T escapes the line through e_T at shape {lambda}"),
                        "tideal verify fast",
                    );
                }
                count += 1;
            }
        }
    }
    let m = exhaustive_max + 1;
    let mut rng = stream(seed, 3);
    for lambda in partitions_of(m as u32, None) {
        let tableaux = standard_tableaux(&lambda).map_err(Fail::from)?;
        for _ in 0..(if full { 16 } else { 6 }) {
            let t = &tableaux[rng.gen_range(0..tableaux.len())];
            let e = young_symmetrizer(t.tableau());
            let sigma = Permutation::random(m, &mut rng);
            let prod = e.multiply(&e.act_left(&sigma));
            if !prod.is_zero() && prod.proportionality(&e).is_none() {
                return fail(
                    format!("e_T sigma e_T escapes the line through e_T at shape {lambda}, m = {m}"),
                    format!("tideal verify fast --seed {seed}"),
                );
            }
            count += 1;
        }
    }
    Ok(vec![format!(
        "dim e_T R e_T = 1 in {count} cases (exhaustive m <= {exhaustive_max}, sampled m = {m})"
    )])
}

fn check_regev_identity(seed: u64) -> CheckResult {
    let mut rng = stream(seed, 4);
    let mut count = 0usize;
    for m in 1..=4usize {
        for lambda in partitions_of(m as u32, None) {
            for st in standard_tableaux(&lambda).map_err(Fail::from)? {
                for _ in 0..3 {
                    let f = random_element(m, 3.min(small_factorial(m)), &mut rng);
                    if !regev_identity_check(st.tableau(), &f).map_err(Fail::from)? {
                        return fail(
                            format!("highest-weight identity fails on shape {lambda}"),
                            format!("tideal verify fast --seed {seed}"),
                        );
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(vec![format!(
        "substitution identity holds for {count} random elements over all tableaux, m <= 4"
    )])
}

/// Rank of `{e_T f_i}` in the group algebra vs rank of the highest-weight
/// images `{phi_T(f_i)}` in the word module.
fn transfer_ranks(t: &Tableau, family: &[AlgebraElement]) -> Result<(usize, usize), Error> {
    let m = t.m();
    let e = young_symmetrizer(t);
    let mut left = SparseMatrix::new(small_factorial(m));
    for f in family {
        let rows: Vec<(u32, BigRational)> = e
            .multiply(f)
            .sorted_terms()
            .into_iter()
            .map(|(p, c)| (p.lehmer_rank() as u32, c))
            .collect();
        left.push_row(rows)?;
    }
    let images: Vec<YPolynomial> = family
        .iter()
        .map(|f| highest_weight_image(t, f))
        .collect::<Result<_, _>>()?;
    let mut columns: BTreeMap<Word, u32> = BTreeMap::new();
    for img in &images {
        for (w, _) in img.terms() {
            let next = columns.len() as u32;
            columns.entry(w.clone()).or_insert(next);
        }
    }
    let mut right = SparseMatrix::new(columns.len().max(1));
    for img in &images {
        let rows: Vec<(u32, BigRational)> = img
            .terms()
            .map(|(w, c)| (columns[w], c.clone()))
            .collect();
        right.push_row(rows)?;
    }
    Ok((rank_exact(&left), rank_exact(&right)))
}

fn check_rank_transfer(seed: u64, m: usize, families: usize) -> CheckResult {
    let mut rng = stream(seed, 5);
    let shapes = partitions_of(m as u32, None);
    for case in 0..families {
        let lambda = &shapes[rng.gen_range(0..shapes.len())];
        let tableaux = standard_tableaux(lambda).map_err(Fail::from)?;
        let t = &tableaux[rng.gen_range(0..tableaux.len())];
        let size = rng.gen_range(2..=4);
        let family: Vec<AlgebraElement> = (0..size)
            .map(|_| random_element(m, 3, &mut rng))
            .collect();
        let (left, right) = transfer_ranks(t.tableau(), &family).map_err(Fail::from)?;
        if left != right {
            return fail(
                format!(
                    "family {case} on shape {lambda}: symmetrizer rank {left} != image rank {right}"
                ),
                format!("tideal verify fast --seed {seed}"),
            );
        }
    }
    Ok(vec![format!(
        "symmetrizer and highest-weight ranks agree on {families} random families at m = {m}"
    )])
}

// ---------------------------------------------------------------------------
// Word combinatorics.

fn check_interleaving_identity(seed: u64, max_rs: usize) -> CheckResult {
    let mut rng = stream(seed, 6);
    for r in 1..=max_rs {
        for s in 0..=max_rs {
            let blocks: Vec<Word> = (0..r)
                .map(|_| {
                    let len = rng.gen_range(1..=3);
                    Word::new((0..len).map(|_| rng.gen_range(1..=3u8)).collect())
                        .expect("letters are valid")
                })
                .collect();
            let mut args = blocks.clone();
            args.extend(std::iter::repeat(word("y1")).take(s));
            let lhs = symmetrized_product(&args);
            let mut rhs = YPolynomial::zero();
            for order in (0..r).permutations(r) {
                let arranged: Vec<Word> = order.into_iter().map(|i| blocks[i].clone()).collect();
                rhs = rhs.add(&f_s(&arranged, s));
            }
            let s_fact = rat(small_factorial(s) as i64);
            if lhs != rhs.scale(&s_fact) {
                return fail(
                    format!("symmetrization identity fails at r = {r}, s = {s}, blocks {blocks:?}"),
                    format!("tideal verify fast --seed {seed}"),
                );
            }
        }
    }
    Ok(vec![format!(
        "P(blocks, y1 x s) = s! sum of interleavings for r, s <= {max_rs}"
    )])
}

fn check_central_run_growth() -> CheckResult {
    let words = [
        "y1 y2 y1^3",
        "y2 y1^2 y3",
        "y1",
        "y2 y1 y2 y1^4 y2",
        "y3 y1 y3 y1 y3",
    ];
    for w in words {
        let u = word(w);
        let (_, base) = central_part(&u).expect("corpus words contain y1");
        for s in 0..=4usize {
            let shifted = shift_word(&u, s).map_err(Fail::from)?;
            let (_, grown) = central_part(&shifted).expect("shift keeps the run");
            if grown != base + s {
                return fail(
                    format!("|C(u^({s}))| = {grown} for u = {u}, expected {}", base + s),
                    "tideal verify fast",
                );
            }
            if shifted.len() != u.len() + s {
                return fail(
                    format!("u^({s}) has length {} for u = {u}", shifted.len()),
                    "tideal verify fast",
                );
            }
        }
    }
    if shift_word(&word("y2 y3"), 1).is_ok() {
        return fail(
            "shifting a word with no y1 run should error",
            "tideal verify fast",
        );
    }
    Ok(vec![
        "central runs grow by exactly s under shifting".to_string()
    ])
}

fn check_coefficient_polynomials(s_max: usize) -> CheckResult {
    // Worked family: blocks (y2, y1^2) against u = y1 y2 y1^7 give 6 + s.
    let blocks = [word("y2"), word("y1^2")];
    let u = word("y1 y2 y1^7");
    let fit = coefficient_polynomial(&blocks, &u, s_max).map_err(Fail::from)?;
    let repro = format!(
        "tideal coeffpoly --monomial y2 --monomial y1^2 --u \"y1 y2 y1^7\" --s-max {s_max}"
    );
    if fit.residual() || fit.coefficients() != [rat(6), rat(1)] {
        return fail("worked coefficient family is not 6 + s", repro);
    }
    for (s, v) in fit.samples() {
        if *v != rat(6 + *s as i64) {
            return fail(format!("sample c({s}) = {v}, expected {}", 6 + s), repro);
        }
    }
    // A family that is not eventually polynomial must be flagged.
    let bad = coefficient_polynomial(
        &[word("y2 y1 y2"), word("y2")],
        &word("y2 y1 y2^2 y1"),
        5,
    )
    .map_err(Fail::from)?;
    if !bad.residual() {
        return fail(
            "non-polynomial coefficient family was not flagged",
            "tideal coeffpoly --monomial \"y2 y1 y2\" --monomial y2 --u \"y2 y1 y2^2 y1\" --s-max 5",
        );
    }
    Ok(vec![format!(
        "c(s) = 6 + s verified for s = 0..{s_max}; non-polynomial family flagged"
    )])
}

// ---------------------------------------------------------------------------
// Bounds and polynomial checks.

fn check_bounds_sandwich(m_max: usize) -> CheckResult {
    for m in 1..=m_max {
        for n in 1..=m {
            let dim = BigUint::from(dim_w(n, m, DimMethod::ViaMultiplicities).map_err(Fail::from)?);
            let repro = format!("tideal bounds --n {n} --m {m} --with-dim");
            if latyshev_lower_bound(n, m) > dim || dim > omega_upper_bound(n, m) {
                return fail(format!("dim W({n},{m}) escapes its bounds"), repro);
            }
            if let Some(c) = coprime_lower_bound(n, m) {
                if c > dim {
                    return fail(format!("coprime lower bound exceeds dim W({n},{m})"), repro);
                }
            }
        }
    }
    Ok(vec![format!(
        "lower bounds <= dim <= upper bound for all n <= m <= {m_max}"
    )])
}

fn check_zeta_oracle(n_max: usize) -> CheckResult {
    for n in 1..=n_max {
        for k in 0..n {
            let criterion = zeta_invertible(n, k).map_err(Fail::from)?;
            let rank = zeta_circulant_rank(n, k).map_err(Fail::from)?;
            if criterion != (rank == n) {
                return fail(
                    format!("zeta criterion and circulant rank disagree at order {n}, k = {k}"),
                    format!("tideal zeta --order {n} --k {k} --oracle"),
                );
            }
        }
    }
    Ok(vec![format!(
        "gcd criterion matches exact circulant rank for all 0 <= k < n <= {n_max}"
    )])
}

fn check_derived_dim(size_max: u32, d_max: i64) -> CheckResult {
    let mut count = 0usize;
    for m in 1..=size_max {
        for lambda in partitions_of(m, None) {
            let q = derived_dim_polynomial(&lambda);
            for d in 0..=d_max {
                let expected =
                    BigRational::from_integer(irrep_dim(&lambda.derive(d as u32)).into());
                if q.evaluate(d) != expected {
                    return fail(
                        format!("derived dimension polynomial wrong at shape {lambda}, d = {d}"),
                        format!("tideal bounds --derived-dim \"{lambda}\""),
                    );
                }
                count += 1;
            }
        }
    }
    Ok(vec![format!(
        "derived dimension polynomials match hook counts at {count} points"
    )])
}

fn check_gl_bounds() -> CheckResult {
    for n in 3..=4usize {
        let bounds = multiplicity_upper_bounds(1, n, None).map_err(Fail::from)?;
        let actual = decompose_w(n, n + 1, true).map_err(Fail::from)?;
        for (lambda, mult) in actual.terms() {
            if bounds.multiplicity_of(lambda) < mult {
                return fail(
                    format!("upper bound below actual multiplicity at shape {lambda}"),
                    format!("tideal upper --k 1 --n {n}"),
                );
            }
        }
        if bounds != actual {
            return fail(
                format!("K = 1 bounds are not sharp at n = {n}"),
                format!("tideal upper --k 1 --n {n}"),
            );
        }
    }
    Ok(vec![
        "polynomial-side bounds dominate and are sharp at K = 1, n = 3, 4".to_string(),
    ])
}

fn check_young_rule() -> CheckResult {
    for l in 1..=3usize {
        for m in 1..=4u32 {
            for lambda in partitions_of(m, None) {
                let product = young_rule(l, &lambda);
                let nvars = m as usize + l;
                let expanded = schur_expand(
                    &schur_function(&lambda, nvars).mul(&schur_function(&part(&[l as u32]), nvars)),
                )
                .map_err(Fail::from)?;
                if product != expanded {
                    return fail(
                        format!("one-row product disagrees with character expansion at {lambda} x ({l})"),
                        format!("tideal young-rule --l {l} --shape \"{lambda}\""),
                    );
                }
            }
        }
    }
    Ok(vec![
        "one-row products match symmetric function expansion for l <= 3, |shape| <= 4".to_string(),
    ])
}

// ---------------------------------------------------------------------------
// Diagonal stabilization (full suite only).

fn check_stabilization_k1() -> CheckResult {
    let report = stabilization_report(1, 3, 6).map_err(Fail::from)?;
    let repro = "tideal stabilize --k 1 --n-min 3 --n-max 6";
    if report.n_obs != Some(3) {
        return fail(
            format!("K = 1 stabilization observed at {:?}, expected n = 3", report.n_obs),
            repro,
        );
    }
    let mut samples = BTreeMap::new();
    let mut lines = Vec::new();
    for (n, d) in &report.decompositions {
        let dim = d.dim().to_u64().expect("small dims fit u64");
        if dim != (n * (n + 1)) as u64 {
            return fail(format!("dim W({n},{}) != n(n+1)", n + 1), repro);
        }
        samples.insert(*n, dim);
    }
    let fit = fit_pk(1, &samples).map_err(Fail::from)?;
    if !fit.validated || fit.polynomial.to_string() != "n^2 + n" {
        return fail(
            format!("K = 1 diagonal fit is {}", fit.polynomial),
            "tideal bounds --fit-k 1 --from 3 --to 6",
        );
    }
    lines.push("every level 3..6 is the derived table of the one below".to_string());
    lines.push(format!("p_1(n) = {}", fit.polynomial));
    let band: Vec<String> = samples
        .iter()
        .map(|(n, d)| format!("{:.4}", *d as f64 / (*n as f64).powi(2)))
        .collect();
    lines.push(format!("dim / n^2 over n = 3..6: {}", band.join(", ")));
    Ok(lines)
}

fn expected_w68() -> Decomposition {
    Decomposition::from_terms(
        8,
        [
            (part(&[8]), 1),
            (part(&[7, 1]), 4),
            (part(&[6, 2]), 5),
            (part(&[6, 1, 1]), 5),
            (part(&[5, 3]), 3),
            (part(&[5, 2, 1]), 6),
            (part(&[5, 1, 1, 1]), 3),
            (part(&[4, 4]), 1),
            (part(&[4, 3, 1]), 1),
            (part(&[4, 2, 2]), 2),
            (part(&[4, 2, 1, 1]), 1),
            (part(&[4, 1, 1, 1, 1]), 1),
        ],
    )
    .expect("reference table is well formed")
}

fn check_stabilization_k2() -> CheckResult {
    let report = stabilization_report(2, 6, 8).map_err(Fail::from)?;
    let repro = "tideal stabilize --k 2 --n-min 6 --n-max 8";
    if report.n_obs != Some(6) {
        return fail(
            format!("K = 2 stabilization observed at {:?}, expected n = 6", report.n_obs),
            repro,
        );
    }
    let (n0, w68) = &report.decompositions[0];
    if *n0 != 6 || *w68 != expected_w68() {
        return fail("W(6,8) differs from the twelve-term reference table", repro);
    }
    let mut lines = Vec::new();
    lines.push("W(6,8) decomposition:".to_string());
    for (lambda, mult) in w68.terms() {
        lines.push(format!("  S^{lambda} x{mult}"));
    }
    lines.push(format!("  dim = {}", w68.dim()));
    let mut samples = BTreeMap::new();
    for (n, d) in &report.decompositions {
        samples.insert(*n, d.dim().to_u64().expect("small dims fit u64"));
    }
    if samples.get(&6) != Some(&1128) {
        return fail("dim W(6,8) != 1128", repro);
    }
    let fit = fit_pk(2, &samples).map_err(Fail::from)?;
    if !fit.validated {
        return fail(
            "quartic fit fails to reproduce the sampled dimensions",
            "tideal bounds --fit-k 2 --from 6 --to 8",
        );
    }
    lines.push(format!(
        "p_2(n) = {} (validated on n = 6..8)",
        fit.polynomial
    ));
    let band: Vec<String> = samples
        .iter()
        .map(|(n, d)| format!("{:.4}", *d as f64 / (*n as f64).powi(4)))
        .collect();
    lines.push(format!("dim / n^4 over n = 6..8: {}", band.join(", ")));
    Ok(lines)
}
