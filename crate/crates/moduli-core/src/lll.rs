//! Lattice basis reduction and integer-relation detection.
//!
//! The reduction is the all-integer LLL variant working on the scaled
//! Gram–Schmidt data `d_i` (leading principal minors of the Gram matrix)
//! and `λ_{i,j} = d_j μ_{i,j}`, so no rationals appear anywhere. On top of
//! it sit the two relation-finding services: `minpoly_numeric`, an
//! algdep-style degree sweep certified by exact divisibility into a known
//! annihilator, and `field_membership`, which expresses one algebraic
//! number in the power basis of another.

use crate::bigfloat::BigFloat;
use crate::complex::AppComplex;
use crate::intpoly::IntPoly;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    /// The input rows are linearly dependent over the rationals.
    DependentRows,
    /// The cooperative cancellation hook requested a stop.
    Cancelled,
    /// No certified result up to the precision ladder cap.
    PrecisionExhausted,
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::DependentRows => write!(f, "basis rows are linearly dependent"),
            LatticeError::Cancelled => write!(f, "reduction cancelled"),
            LatticeError::PrecisionExhausted => write!(f, "precision ladder exhausted"),
        }
    }
}

/// Row basis of an integer lattice. Linear independence over the
/// rationals is an invariant of the type's meaning but is only detected
/// during reduction (as [`LatticeError::DependentRows`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBasis {
    rows: Vec<Vec<BigInt>>,
}

impl IntBasis {
    /// Rows must be nonempty and of equal length.
    pub fn new(rows: Vec<Vec<BigInt>>) -> Self {
        assert!(!rows.is_empty(), "empty basis");
        let len = rows[0].len();
        assert!(len > 0 && rows.iter().all(|r| r.len() == len), "ragged rows");
        IntBasis { rows }
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.rows
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LLL reduction with parameter `delta` in (1/4, 1); all-integer
/// arithmetic on `d_i` and `λ_{i,j}`, swap condition
/// `q·(d_{k−2} d_k + λ²) < p·d_{k−1}²` for `delta = p/q`.
pub fn lll_reduce(basis: &IntBasis, delta: Ratio<i64>) -> Result<IntBasis, LatticeError> {
    lll_reduce_with(basis, delta, &mut || false)
}

/// As [`lll_reduce`], polling `cancel` between reduction steps; a `true`
/// return aborts with [`LatticeError::Cancelled`].
pub fn lll_reduce_with(
    basis: &IntBasis,
    delta: Ratio<i64>,
    cancel: &mut dyn FnMut() -> bool,
) -> Result<IntBasis, LatticeError> {
    assert!(
        *delta.numer() * 4 > *delta.denom() && delta < Ratio::one(),
        "delta must lie in (1/4, 1)"
    );
    let p = BigInt::from(*delta.numer());
    let q = BigInt::from(*delta.denom());
    let mut b = basis.rows.clone();
    let n = b.len();
    if n == 1 {
        if b[0].iter().all(|c| c.is_zero()) {
            return Err(LatticeError::DependentRows);
        }
        return Ok(IntBasis { rows: b });
    }

    // 1-indexed views into d and lam to mirror the classical formulas:
    // d[i] is the Gram determinant of the first i rows, lam[i][j] holds
    // λ_{i,j} for 1 <= j < i <= n.
    let mut d = alloc::vec![BigInt::one(); n + 1];
    let mut lam = alloc::vec![alloc::vec![BigInt::zero(); n + 1]; n + 1];
    d[1] = dot(&b[0], &b[0]);
    if d[1].is_zero() {
        return Err(LatticeError::DependentRows);
    }
    let mut k_max = 1usize;
    let mut k = 2usize;

    while k <= n {
        if cancel() {
            return Err(LatticeError::Cancelled);
        }
        if k > k_max {
            k_max = k;
            for j in 1..=k {
                let mut u = dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                    if d[k].is_zero() {
                        return Err(LatticeError::DependentRows);
                    }
                }
            }
        }
        loop {
            redi(&mut b, &mut lam, &d, k, k - 1);
            let lovasz_lhs = (&d[k - 2] * &d[k] + &lam[k][k - 1] * &lam[k][k - 1]) * &q;
            let lovasz_rhs = &d[k - 1] * &d[k - 1] * &p;
            if lovasz_lhs < lovasz_rhs {
                swapi(&mut b, &mut lam, &mut d, k, k_max);
                k = (k - 1).max(2);
                if k > k_max {
                    break;
                }
            } else {
                for l in (1..k - 1).rev() {
                    redi(&mut b, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    Ok(IntBasis { rows: b })
}

/// Size-reduce row k against row l (1-indexed).
fn redi(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let twice: BigInt = &lam[k][l] * 2;
    if twice.abs() <= d[l] {
        return;
    }
    // nearest integer to λ/d
    let r = nearest_quotient(&lam[k][l], &d[l]);
    let (head, tail) = b.split_at_mut(k - 1);
    let (bk, bl) = (&mut tail[0], &head[l - 1]);
    for (x, y) in bk.iter_mut().zip(bl) {
        *x -= &r * y;
    }
    lam[k][l] -= &r * &d[l];
    for i in 1..l {
        let adj = &r * &lam[l][i];
        lam[k][i] -= adj;
    }
}

/// round(a / b) to nearest, ties away from zero; b > 0.
fn nearest_quotient(a: &BigInt, b: &BigInt) -> BigInt {
    let two_a: BigInt = a * 2;
    let two_b: BigInt = b * 2;
    let (q, r) = (two_a + b).div_rem(&two_b);
    // div_rem truncates toward zero; fix up for negative operands
    if r.is_negative() {
        q - 1
    } else {
        q
    }
}

/// Swap rows k and k−1 (1-indexed), updating the integral GSO data.
fn swapi(
    b: &mut [Vec<BigInt>],
    lam: &mut [Vec<BigInt>],
    d: &mut [BigInt],
    k: usize,
    k_max: usize,
) {
    b.swap(k - 1, k - 2);
    for j in 1..=k - 2 {
        let (a, c) = (lam[k][j].clone(), lam[k - 1][j].clone());
        lam[k][j] = c;
        lam[k - 1][j] = a;
    }
    let lambda = lam[k][k - 1].clone();
    let bb: BigInt = (&d[k - 2] * &d[k] + &lambda * &lambda) / &d[k - 1];
    for i in k + 1..=k_max {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k] * &lam[i][k - 1] - &lambda * &t) / &d[k - 1];
        lam[i][k - 1] = (&bb * &t + &lambda * &lam[i][k]) / &d[k];
    }
    d[k - 1] = bb;
}

/// Outcome of a certified minimal-polynomial search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinPolyResult {
    pub poly: IntPoly,
    /// True when the result divides the annihilator, vanishes at α, and
    /// the annihilator roots were verified pairwise separated.
    pub certified: bool,
    pub precision_used: u32,
}

const LLL_DELTA: (i64, i64) = (99, 100);

/// Minimal polynomial of α by an LLL degree sweep, certified against a
/// known annihilator of α.
///
/// For each candidate degree d the integer-relation lattice on
/// `(1, α, …, α^d)` at scale `2^prec` is reduced; a reduced row is
/// accepted if its polynomial has degree exactly d, divides `annihilator`
/// exactly, and vanishes at α relative to its own term size. Among
/// accepting rows of the same degree the one with the smallest maximal
/// coefficient wins. The sweep result is minimal provided the annihilator
/// roots are pairwise separated by more than `2·2^(−prec/4)`, which is
/// checked numerically; failing that the scale is doubled (twice at most)
/// before giving up.
///
/// α itself should carry comfortably more precision than
/// `prec + degmax·log2(1+|α|)`; the certification tests reject spurious
/// candidates when it does not.
pub fn minpoly_numeric(
    alpha: &AppComplex,
    degmax: usize,
    annihilator: &IntPoly,
    prec: u32,
) -> Result<MinPolyResult, LatticeError> {
    assert!(degmax >= 1, "degmax must be at least 1");
    assert!(
        annihilator.degree().unwrap_or(0) >= 1,
        "annihilator must be nonconstant"
    );
    for step in 0..3 {
        let scale = prec << step;
        let separated = annihilator_roots_separated(annihilator, scale)?;
        let mut powers: Vec<AppComplex> = Vec::with_capacity(degmax + 1);
        let one = AppComplex::from_real(BigFloat::one(), alpha.prec());
        powers.push(one);
        for _ in 0..degmax {
            powers.push(powers.last().unwrap().mul(alpha));
        }
        for d in 1..=degmax {
            let Some(candidate) = relation_candidate(alpha, &powers[..=d], annihilator, scale)?
            else {
                continue;
            };
            if separated {
                return Ok(MinPolyResult {
                    poly: candidate,
                    certified: true,
                    precision_used: scale,
                });
            }
            // found but not certifiably minimal: retry at a larger scale
            break;
        }
    }
    Err(LatticeError::PrecisionExhausted)
}

/// Numerical check that the distinct annihilator roots are pairwise more
/// than `2·2^(−scale/4)` apart.
fn annihilator_roots_separated(annihilator: &IntPoly, scale: u32) -> Result<bool, LatticeError> {
    let sf = annihilator.squarefree_part();
    if sf.degree() == Some(1) {
        return Ok(true);
    }
    let roots = sf
        .complex_roots(scale / 2 + 64)
        .map_err(|_| LatticeError::PrecisionExhausted)?;
    let tol = BigFloat::one().ldexp(1 - (scale as i64) / 4);
    for (i, a) in roots.iter().enumerate() {
        for b in roots.iter().skip(i + 1) {
            if a.dist(b).cmp_value(&tol) != Ordering::Greater {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One degree stage of the sweep: reduce the relation lattice for the
/// power tail `powers = (1, α, …, α^d)` and return the best certified
/// row, if any.
fn relation_candidate(
    alpha: &AppComplex,
    powers: &[AppComplex],
    annihilator: &IntPoly,
    scale: u32,
) -> Result<Option<IntPoly>, LatticeError> {
    let d = powers.len() - 1;
    let rows: Vec<Vec<BigInt>> = powers
        .iter()
        .enumerate()
        .map(|(i, pw)| {
            let mut row = alloc::vec![BigInt::zero(); d + 3];
            row[i] = BigInt::one();
            row[d + 1] = pw.re().ldexp(scale as i64).to_integer_rounded();
            row[d + 2] = pw.im().ldexp(scale as i64).to_integer_rounded();
            row
        })
        .collect();
    let reduced = lll_reduce(
        &IntBasis::new(rows),
        Ratio::new(LLL_DELTA.0, LLL_DELTA.1),
    )?;
    let mut best: Option<(BigInt, IntPoly)> = None;
    for row in reduced.rows() {
        let poly = IntPoly::new(row[..=d].to_vec());
        if poly.degree() != Some(d) {
            continue;
        }
        let poly = poly.primitive_part().normalize_sign();
        if annihilator.exact_divide(&poly).is_none() {
            continue;
        }
        if !vanishes_at(&poly, alpha, scale) {
            continue;
        }
        let size = poly.coeffs().iter().map(|c| c.abs()).max().unwrap();
        if best.as_ref().map_or(true, |(s, _)| size < *s) {
            best = Some((size, poly));
        }
    }
    Ok(best.map(|(_, p)| p))
}

/// `|p(z)|` small relative to the largest Horner term, with margin
/// `2^(−scale/2)`.
fn vanishes_at(p: &IntPoly, z: &AppComplex, scale: u32) -> bool {
    let value = p.eval_complex(z).abs();
    if value.is_zero() {
        return true;
    }
    let growth = z.abs().add(&BigFloat::one()).log2_floor().unwrap_or(0).max(0);
    let term_bits = p.coeffs().iter().map(|c| c.bits()).max().unwrap() as i64
        + growth * p.degree().unwrap() as i64;
    value.log2_floor().unwrap() < term_bits - (scale as i64) / 2
}

/// Bit bound on the common denominator accepted by [`field_membership`].
pub const MEMBERSHIP_DENOM_BITS: u64 = 256;

/// Expresses β as a rational combination of `1, γ, …, γ^(d−1)` by an
/// integer-relation lattice at scale `2^prec`: returns `(c_0, …, c_{d−1})`
/// with `|β − Σ c_k γ^k| < 2^(−prec/2)` relative to the term size, or
/// `None` when no relation surfaces. `None` reports "no membership
/// detected at this precision"; it is not a proof of non-membership.
pub fn field_membership(
    beta: &AppComplex,
    gamma: &AppComplex,
    d: usize,
    prec: u32,
) -> Option<Vec<BigRational>> {
    assert!(d >= 1, "basis must contain at least 1");
    let work = beta.prec().min(gamma.prec());
    let mut powers: Vec<AppComplex> = Vec::with_capacity(d + 1);
    powers.push(AppComplex::from_real(BigFloat::one(), work));
    for _ in 1..d {
        powers.push(powers.last().unwrap().mul(gamma));
    }
    powers.push(beta.clone());
    let rows: Vec<Vec<BigInt>> = powers
        .iter()
        .enumerate()
        .map(|(i, pw)| {
            let mut row = alloc::vec![BigInt::zero(); d + 3];
            row[i] = BigInt::one();
            row[d + 1] = pw.re().ldexp(prec as i64).to_integer_rounded();
            row[d + 2] = pw.im().ldexp(prec as i64).to_integer_rounded();
            row
        })
        .collect();
    let reduced = lll_reduce(
        &IntBasis::new(rows),
        Ratio::new(LLL_DELTA.0, LLL_DELTA.1),
    )
    .ok()?;
    for row in reduced.rows() {
        let denom = &row[d];
        if denom.is_zero() || denom.bits() > MEMBERSHIP_DENOM_BITS {
            continue;
        }
        // Detectability cutoff: a relation of coefficient height H is only
        // distinguishable from lattice noise at scale 2^prec when
        // H·(d+1) is well below prec.  Noise vectors concentrate near
        // height prec/(d+1), so anything past half that is discarded.
        let height_bits = row[..=d].iter().map(|c| c.bits()).max().unwrap_or(0);
        if height_bits * 2 * (d as u64 + 1) > prec as u64 {
            continue;
        }
        // candidate: β = −(Σ row_k γ^k)/denom
        let mut approx = AppComplex::zero(work);
        for (k, pw) in powers[..d].iter().enumerate() {
            approx = approx.add(&pw.scale(&BigFloat::from_bigint(&row[k])));
        }
        let lhs = approx.scale(&BigFloat::from_ratio(-1, 1, work)).div(
            &AppComplex::from_real(BigFloat::from_bigint(denom), work),
        );
        let err = lhs.dist(beta);
        let scale_bits = beta.abs().add(&BigFloat::one()).log2_floor().unwrap_or(0);
        let ok = err.is_zero()
            || err.log2_floor().unwrap() < scale_bits - (prec as i64) / 2;
        if ok {
            return Some(
                (0..d)
                    .map(|k| BigRational::new(-row[k].clone(), denom.clone()))
                    .collect(),
            );
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(rows: &[&[i64]]) -> IntBasis {
        IntBasis::new(
            rows.iter()
                .map(|r| r.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
    }

    fn delta99() -> Ratio<i64> {
        Ratio::new(99, 100)
    }

    /// Exact rational Gram–Schmidt verification of the LLL conditions.
    fn assert_lll_reduced(b: &IntBasis, delta: Ratio<i64>) {
        let n = b.rows().len();
        let rows: Vec<Vec<BigRational>> = b
            .rows()
            .iter()
            .map(|r| r.iter().map(|c| BigRational::from(c.clone())).collect())
            .collect();
        let mut star: Vec<Vec<BigRational>> = Vec::new();
        let mut mu = alloc::vec![alloc::vec![BigRational::zero(); n]; n];
        for i in 0..n {
            let mut v = rows[i].clone();
            for j in 0..i {
                let num: BigRational = rows[i]
                    .iter()
                    .zip(&star[j])
                    .map(|(a, c)| a * c)
                    .sum();
                let den: BigRational = star[j].iter().map(|c| c * c).sum();
                mu[i][j] = num / den;
                for (vk, sk) in v.iter_mut().zip(&star[j]) {
                    *vk -= &mu[i][j] * sk;
                }
            }
            star.push(v);
        }
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for i in 0..n {
            for j in 0..i {
                assert!(
                    mu[i][j].abs() <= half,
                    "size reduction fails at ({i},{j}): {}",
                    mu[i][j]
                );
            }
        }
        let delta_r = BigRational::new(BigInt::from(*delta.numer()), BigInt::from(*delta.denom()));
        for k in 1..n {
            let norm_k: BigRational = star[k].iter().map(|c| c * c).sum();
            let norm_prev: BigRational = star[k - 1].iter().map(|c| c * c).sum();
            let lhs = norm_k + &mu[k][k - 1] * &mu[k][k - 1] * &norm_prev;
            assert!(
                lhs >= delta_r.clone() * norm_prev,
                "Lovász condition fails at row {k}"
            );
        }
    }

    /// Row-style Hermite normal form for lattice-equality checking.
    fn hnf(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
        let rows = m.len();
        let cols = m[0].len();
        let mut pivot = 0usize;
        for col in 0..cols {
            if pivot >= rows {
                break;
            }
            loop {
                let best = (pivot..rows)
                    .filter(|&r| !m[r][col].is_zero())
                    .min_by_key(|&r| m[r][col].abs());
                let Some(best) = best else { break };
                m.swap(pivot, best);
                let mut all_zero = true;
                for r in pivot + 1..rows {
                    if m[r][col].is_zero() {
                        continue;
                    }
                    let q = &m[r][col] / &m[pivot][col];
                    if !q.is_zero() {
                        for c in 0..cols {
                            let sub = &q * &m[pivot][c];
                            m[r][c] -= sub;
                        }
                    }
                    if !m[r][col].is_zero() {
                        all_zero = false;
                    }
                }
                if all_zero {
                    break;
                }
            }
            if m[pivot][col].is_zero() {
                continue;
            }
            if m[pivot][col].is_negative() {
                for c in 0..cols {
                    m[pivot][c] = -m[pivot][c].clone();
                }
            }
            for r in 0..pivot {
                let q = m[r][col].div_floor(&m[pivot][col]);
                if !q.is_zero() {
                    for c in 0..cols {
                        let sub = &q * &m[pivot][c];
                        m[r][c] -= sub;
                    }
                }
            }
            pivot += 1;
        }
        m.truncate(pivot);
        m
    }

    fn gram_det(b: &IntBasis) -> BigInt {
        // Bareiss elimination of the Gram matrix
        let n = b.rows().len();
        let mut g = alloc::vec![alloc::vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = dot(&b.rows()[i], &b.rows()[j]);
            }
        }
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            assert!(!g[k][k].is_zero(), "needs pivoting, use a nicer basis");
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &g[k][k] * &g[i][j] - &g[i][k] * &g[k][j];
                    let (q, r) = num.div_rem(&prev);
                    assert!(r.is_zero());
                    g[i][j] = q;
                }
            }
            prev = g[k][k].clone();
        }
        g[n - 1][n - 1].clone()
    }

    #[test]
    fn identity_basis_is_fixed() {
        let id = basis(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let out = lll_reduce(&id, delta99()).unwrap();
        assert_eq!(out, id);
    }

    #[test]
    fn finds_the_classic_relation_vector() {
        let b = basis(&[
            &[1, 0, 0, 10000],
            &[0, 1, 0, 10001],
            &[0, 0, 1, 20001],
        ]);
        let out = lll_reduce(&b, delta99()).unwrap();
        assert_lll_reduced(&out, delta99());
        let target: Vec<BigInt> = [1i64, 1, -1, 0].iter().map(|&c| BigInt::from(c)).collect();
        let neg: Vec<BigInt> = target.iter().map(|c| -c).collect();
        assert!(
            out.rows().iter().any(|r| r == &target || r == &neg),
            "missing relation row in {:?}",
            out.rows()
        );
    }

    #[test]
    fn reduction_preserves_the_lattice() {
        let b = basis(&[
            &[12, -3, 7, 1],
            &[4, 9, -2, 0],
            &[-8, 1, 1, 5],
        ]);
        let out = lll_reduce(&b, delta99()).unwrap();
        assert_lll_reduced(&out, delta99());
        assert_eq!(gram_det(&b), gram_det(&out));
        assert_eq!(
            hnf(b.rows().to_vec()),
            hnf(out.rows().to_vec()),
            "row lattices differ"
        );
    }

    #[test]
    fn first_vector_close_to_exhaustive_shortest() {
        // instances small enough to enumerate the shortest vector
        let cases = [
            basis(&[&[101, 3, -2], &[47, 51, 9], &[-30, 40, 77]]),
            basis(&[&[999, 1, 0], &[351, 2, 1], &[113, 0, 3]]),
            basis(&[&[5, 8, 13, 21], &[34, 55, 89, 144], &[7, 0, -7, 14], &[1, 2, 4, 8]]),
        ];
        for b in cases {
            let n = b.rows().len();
            let out = lll_reduce(&b, delta99()).unwrap();
            assert_lll_reduced(&out, delta99());
            let mut shortest: Option<BigInt> = None;
            let bound = 8i64;
            let mut coeffs = alloc::vec![-bound; n];
            'outer: loop {
                if coeffs.iter().any(|&c| c != 0) {
                    let mut v = alloc::vec![BigInt::zero(); b.rows()[0].len()];
                    for (c, row) in coeffs.iter().zip(b.rows()) {
                        for (vi, ri) in v.iter_mut().zip(row) {
                            *vi += BigInt::from(*c) * ri;
                        }
                    }
                    let norm = dot(&v, &v);
                    if shortest.as_ref().map_or(true, |s| &norm < s) {
                        shortest = Some(norm);
                    }
                }
                for i in 0..n {
                    coeffs[i] += 1;
                    if coeffs[i] <= bound {
                        continue 'outer;
                    }
                    coeffs[i] = -bound;
                }
                break;
            }
            let shortest = shortest.unwrap();
            let first_norm = dot(&out.rows()[0], &out.rows()[0]);
            // ||b_1||^2 <= 2^(n−1) ||shortest||^2
            assert!(
                first_norm <= shortest.clone() << (n - 1),
                "first vector too long: {first_norm} vs {shortest}"
            );
        }
    }

    #[test]
    fn dependent_rows_are_reported() {
        let b = basis(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(lll_reduce(&b, delta99()), Err(LatticeError::DependentRows));
        let z = basis(&[&[0, 0]]);
        assert_eq!(lll_reduce(&z, delta99()), Err(LatticeError::DependentRows));
    }

    #[test]
    fn cancellation_hook_fires() {
        let b = basis(&[
            &[1, 0, 0, 10000],
            &[0, 1, 0, 10001],
            &[0, 0, 1, 20001],
        ]);
        let mut calls = 0u32;
        let res = lll_reduce_with(&b, delta99(), &mut || {
            calls += 1;
            calls > 1
        });
        assert_eq!(res, Err(LatticeError::Cancelled));
    }

    fn real(v: &BigFloat, prec: u32) -> AppComplex {
        AppComplex::from_real(v.clone(), prec)
    }

    #[test]
    fn minpoly_of_a_rational_value() {
        let alpha = real(&BigFloat::from_i64(1728), 512);
        let ann = IntPoly::from_i64s(&[-1728, 1]).mul(&IntPoly::from_i64s(&[-5, 1]));
        let res = minpoly_numeric(&alpha, 4, &ann, 128).unwrap();
        assert_eq!(res.poly, IntPoly::from_i64s(&[-1728, 1]));
        assert!(res.certified);
    }

    #[test]
    fn minpoly_of_the_golden_ratio() {
        let prec = 512;
        let phi = BigFloat::from_i64(5)
            .sqrt(prec)
            .add(&BigFloat::one())
            .div(&BigFloat::from_i64(2), prec);
        let ann = IntPoly::from_i64s(&[-1, -1, 1]);
        let res = minpoly_numeric(&real(&phi, prec), 3, &ann, 160).unwrap();
        assert_eq!(res.poly, ann);
        assert!(res.certified);
    }

    #[test]
    fn minpoly_of_a_degree_four_surd() {
        let prec = 640;
        let alpha = BigFloat::from_i64(2)
            .sqrt(prec)
            .add(&BigFloat::from_i64(3).sqrt(prec));
        let ann = IntPoly::from_i64s(&[1, 0, -10, 0, 1]);
        let res = minpoly_numeric(&real(&alpha, prec), 4, &ann, 160).unwrap();
        assert_eq!(res.poly, ann);
        assert!(res.certified);
        // idempotent under precision doubling
        let res2 = minpoly_numeric(&real(&alpha, prec), 4, &ann, 320).unwrap();
        assert_eq!(res2.poly, res.poly);
    }

    #[test]
    fn minpoly_rejects_too_low_degmax_budget() {
        // annihilator of degree 2 irreducible, degmax 1: no certified
        // candidate of degree 1 exists
        let prec = 512;
        let phi = BigFloat::from_i64(5)
            .sqrt(prec)
            .add(&BigFloat::one())
            .div(&BigFloat::from_i64(2), prec);
        let ann = IntPoly::from_i64s(&[-1, -1, 1]);
        assert_eq!(
            minpoly_numeric(&real(&phi, prec), 1, &ann, 160),
            Err(LatticeError::PrecisionExhausted)
        );
    }

    #[test]
    fn minpoly_picks_the_factor_containing_alpha() {
        // α = √2 against the product annihilator (X²−2)(X²−3)
        let prec = 512;
        let ann = IntPoly::from_i64s(&[-2, 0, 1]).mul(&IntPoly::from_i64s(&[-3, 0, 1]));
        let alpha = real(&BigFloat::from_i64(2).sqrt(prec), prec);
        let res = minpoly_numeric(&alpha, 4, &ann, 160).unwrap();
        assert_eq!(res.poly, IntPoly::from_i64s(&[-2, 0, 1]));
    }

    #[test]
    fn minpoly_of_a_complex_value() {
        // α = i + 1, minimal polynomial X² − 2X + 2
        let prec = 512;
        let alpha = AppComplex::new(BigFloat::one(), BigFloat::one(), prec);
        let ann = IntPoly::from_i64s(&[2, -2, 1]).mul(&IntPoly::from_i64s(&[-7, 1]));
        let res = minpoly_numeric(&alpha, 3, &ann, 160).unwrap();
        assert_eq!(res.poly, IntPoly::from_i64s(&[2, -2, 1]));
    }

    #[test]
    fn membership_square_of_sqrt2() {
        let prec = 512;
        let gamma = real(&BigFloat::from_i64(2).sqrt(prec), prec);
        let beta = gamma.mul(&gamma);
        let coeffs = field_membership(&beta, &gamma, 2, 160).unwrap();
        assert_eq!(coeffs[0], BigRational::from(BigInt::from(2)));
        assert_eq!(coeffs[1], BigRational::zero());
    }

    #[test]
    fn membership_of_rationals_in_degree_one() {
        let beta = real(&BigFloat::from_i64(-3375), 512);
        let gamma = real(&BigFloat::from_i64(1728), 512);
        let coeffs = field_membership(&beta, &gamma, 1, 128).unwrap();
        assert_eq!(coeffs, alloc::vec![BigRational::from(BigInt::from(-3375))]);
    }

    #[test]
    fn membership_of_the_conjugate_root() {
        // roots of X²−X−1: β = 1 − γ
        let prec = 512;
        let s5 = BigFloat::from_i64(5).sqrt(prec);
        let gamma = real(
            &s5.add(&BigFloat::one()).div(&BigFloat::from_i64(2), prec),
            prec,
        );
        let beta = real(
            &BigFloat::one().sub(&s5).div(&BigFloat::from_i64(2), prec),
            prec,
        );
        let coeffs = field_membership(&beta, &gamma, 2, 160).unwrap();
        assert_eq!(coeffs[0], BigRational::from(BigInt::from(1)));
        assert_eq!(coeffs[1], BigRational::from(BigInt::from(-1)));
    }

    #[test]
    fn membership_with_fractional_coefficients() {
        // γ = √2+√3: √2 = (γ³ − 9γ)/2
        let prec = 768;
        let s2 = BigFloat::from_i64(2).sqrt(prec);
        let gamma = real(&s2.add(&BigFloat::from_i64(3).sqrt(prec)), prec);
        let beta = real(&s2, prec);
        let coeffs = field_membership(&beta, &gamma, 4, 200).unwrap();
        let half = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(2));
        assert_eq!(coeffs[0], BigRational::zero());
        assert_eq!(coeffs[1], half(-9));
        assert_eq!(coeffs[2], BigRational::zero());
        assert_eq!(coeffs[3], half(1));
    }

    #[test]
    fn membership_not_found_across_incompatible_fields() {
        let prec = 512;
        let beta = real(&BigFloat::from_i64(3).sqrt(prec), prec);
        let gamma = real(&BigFloat::from_i64(2).sqrt(prec), prec);
        assert!(field_membership(&beta, &gamma, 2, 160).is_none());
    }
}
