//! Moving between the multilinear space in `x1..xm` and polynomials in a
//! short alphabet `y1..yk`.
//!
//! `substitute_by_tableau` collapses `x_j` to `y_{r+1}` where `r` is the row
//! of `j` in a tableau, `linearize` is the inverse direction (expand each
//! `y` into a block of fresh `x`'s and keep the multilinear part), and
//! `highest_weight_image` applies the signed column sum of a tableau before
//! collapsing.  `regev_identity_check` confirms that linearizing the
//! highest-weight image of `f` equals `σ·e_T·f`, where `σ` is the
//! relabeling of `T` onto the row-major standard tableau of its shape; that
//! identity is what lets ranks of highest-weight images count irreducible
//! multiplicities.

use num_rational::BigRational;

use crate::algebra::{column_group, young_symmetrizer, AlgebraElement};
use crate::combinatorics::Tableau;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::words::{Word, YPolynomial};

/// `x_i ↦ y_i`.
pub fn substitute(f: &AlgebraElement) -> YPolynomial {
    let mut out = YPolynomial::zero();
    for (sigma, c) in f.sorted_terms() {
        let letters = sigma.images().iter().map(|&j| j as u8).collect();
        out.add_term(Word::new(letters).expect("valid letters"), c);
    }
    out
}

/// `x_j ↦ y_{r+1}` where `r` is the 0-based row of `j` in `t`.
pub fn substitute_by_tableau(t: &Tableau, f: &AlgebraElement) -> Result<YPolynomial> {
    if t.m() != f.m() {
        return Err(Error::DegreeMismatch(format!(
            "tableau size {} vs element degree {}",
            t.m(),
            f.m()
        )));
    }
    let row_of = t.row_of_table();
    let mut out = YPolynomial::zero();
    for (sigma, c) in f.sorted_terms() {
        let letters = sigma
            .images()
            .iter()
            .map(|&j| row_of[j as usize] + 1)
            .collect();
        out.add_term(Word::new(letters).expect("valid letters"), c);
    }
    Ok(out)
}

/// Shared multidegree of every term of `g`, or an error if terms disagree.
/// The blocks of the linearization are only well defined for a fixed
/// multidegree.
fn common_multidegree(g: &YPolynomial) -> Result<Vec<u32>> {
    let mut terms = g.terms();
    let Some((w0, _)) = terms.next() else {
        return Ok(Vec::new());
    };
    let h = w0.multidegree();
    for (w, _) in terms {
        if w.multidegree() != h {
            return Err(Error::NotHomogeneous(format!(
                "mixed multidegrees {:?} and {:?}",
                h,
                w.multidegree()
            )));
        }
    }
    Ok(h)
}

/// Expands `y_l` into the sum of the variables in its block (consecutive
/// blocks of sizes `h_1, h_2, ...` partitioning `1..=m`) and keeps the
/// multilinear part.  Concretely: each occurrence of `y_l` in a word is
/// assigned a distinct variable of block `l`, in all possible ways.
pub fn linearize(g: &YPolynomial, m: usize) -> Result<AlgebraElement> {
    if g.is_zero() {
        return Ok(AlgebraElement::zero(m));
    }
    let h = common_multidegree(g)?;
    let total: u32 = h.iter().sum();
    if total as usize != m {
        return Err(Error::DegreeMismatch(format!(
            "words have total degree {total}, expected {m}"
        )));
    }
    let mut block_start = vec![0u32; h.len() + 1];
    for l in 0..h.len() {
        block_start[l + 1] = block_start[l] + h[l];
    }

    let mut out = AlgebraElement::zero(m);
    for (w, c) in g.terms() {
        // Occurrence positions of each letter, in word order.
        let mut occ: Vec<Vec<usize>> = vec![Vec::new(); h.len()];
        for (p, &l) in w.letters().iter().enumerate() {
            occ[l as usize - 1].push(p);
        }
        let mut images = vec![0u32; m];
        distribute_blocks(&occ, &block_start, 0, &mut images, &mut |images| {
            let p = Permutation::from_images(images.to_vec()).expect("bijective by construction");
            out.add_term(&p, c.clone());
        });
    }
    Ok(out)
}

/// Recursively assigns block variables to the occurrence positions of each
/// letter, one letter at a time, enumerating all bijections.
fn distribute_blocks(
    occ: &[Vec<usize>],
    block_start: &[u32],
    letter: usize,
    images: &mut [u32],
    emit: &mut impl FnMut(&[u32]),
) {
    if letter == occ.len() {
        emit(images);
        return;
    }
    let positions = &occ[letter];
    let vars: Vec<u32> = (block_start[letter] + 1..=block_start[letter + 1]).collect();
    permute_onto(positions, &vars, 0, images, &mut |images| {
        distribute_blocks(occ, block_start, letter + 1, images, emit);
    });
}

fn permute_onto(
    positions: &[usize],
    vars: &[u32],
    depth: usize,
    images: &mut [u32],
    emit: &mut impl FnMut(&mut [u32]),
) {
    if depth == positions.len() {
        emit(images);
        return;
    }
    for &v in vars {
        if positions[..depth].iter().any(|&q| images[q] == v) {
            continue;
        }
        images[positions[depth]] = v;
        permute_onto(positions, vars, depth + 1, images, emit);
        images[positions[depth]] = 0;
    }
}

/// `Σ_{τ ∈ C_T} sgn(τ) · (x_j ↦ y_{row(τ(j))+1})` applied to `f`.
///
/// Every word in the result has multidegree equal to the shape of `t`.
pub fn highest_weight_image(t: &Tableau, f: &AlgebraElement) -> Result<YPolynomial> {
    if t.m() != f.m() {
        return Err(Error::DegreeMismatch(format!(
            "tableau size {} vs element degree {}",
            t.m(),
            f.m()
        )));
    }
    let row_of = t.row_of_table();
    let mut out = YPolynomial::zero();
    for (sign, tau) in column_group(t) {
        let sign_rat = BigRational::from_integer(sign.into());
        for (sigma, c) in f.sorted_terms() {
            let letters = sigma
                .images()
                .iter()
                .map(|&j| row_of[tau.image(j) as usize] + 1)
                .collect();
            out.add_term(Word::new(letters).expect("valid letters"), &c * &sign_rat);
        }
    }
    Ok(out)
}

/// The permutation sending each entry of `t` to the entry occupying the
/// same cell in the row-major standard tableau of the same shape.
pub fn relabel_to_canonical(t: &Tableau) -> Permutation {
    let mut images = vec![0u32; t.m()];
    let mut next = 1u32;
    for row in t.rows() {
        for &e in row {
            images[e as usize - 1] = next;
            next += 1;
        }
    }
    Permutation::from_images(images).expect("bijective by construction")
}

/// Checks `linearize(highest_weight_image(t, f)) == σ e_T f` with `σ`
/// the canonical relabeling of `t`.
pub fn regev_identity_check(t: &Tableau, f: &AlgebraElement) -> Result<bool> {
    let lhs = linearize(&highest_weight_image(t, f)?, f.m())?;
    let sigma = relabel_to_canonical(t);
    let rhs = young_symmetrizer(t).multiply(f).act_left(&sigma);
    Ok(lhs == rhs)
}
