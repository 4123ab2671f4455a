//! Evaluation of the modular j-function and singular moduli.
//!
//! The j-function is computed from q-series: `j = E4^3 / Δ` with
//! `E4 = 1 + 240 Σ σ3(n) q^n` and the discriminant form
//! `Δ = q Π (1-q^n)^24` expanded by Euler's pentagonal number theorem, so
//! the denominator is a 24th power of a sparse alternating series rather
//! than the difference `E4^3 - E6^2` (which cancels catastrophically for
//! large `Im τ`). Arguments are reduced to the usual fundamental domain
//! first; `|q| <= e^(-π√3)` then makes the tail bound straightforward.
//!
//! A singular modulus is `j` evaluated at the root
//! `τ = (-b + i sqrt(|Δ|)) / (2a)` of a quadratic form `(a, b, c)`. The
//! envelope check `| |j(z)| - e^(2π Im z) | <= 2079` guards every such
//! evaluation; a violation means the numerics are broken, not the input.

use crate::bigfloat::{BigFloat, FloatCtx};
use crate::complex::AppComplex;
use crate::forms::QuadForm;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::BigInt;

/// Hard cap on the number of q-series terms a single evaluation may use.
pub const TERM_CAP: u64 = 200_000;

/// Envelope constant: `| |j(z)| - e^(2π Im z) |` never exceeds this on the
/// fundamental domain.
pub const ENVELOPE_BOUND: u32 = 2079;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumericsError {
    /// The argument must lie in the upper half plane.
    NonPositiveImaginary,
    /// The requested precision needs more q-series terms than [`TERM_CAP`].
    PrecisionInfeasible { needed_terms: u64 },
    /// Fundamental-domain reduction failed to settle (degenerate input).
    ReductionDiverged,
    /// The envelope bound failed at a reduced point: a numerics bug.
    EnvelopeViolation,
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::NonPositiveImaginary => write!(f, "Im τ must be positive"),
            NumericsError::PrecisionInfeasible { needed_terms } => {
                write!(f, "q-series needs {needed_terms} terms, over the cap {TERM_CAP}")
            }
            NumericsError::ReductionDiverged => write!(f, "fundamental domain reduction diverged"),
            NumericsError::EnvelopeViolation => {
                write!(f, "envelope bound violated at a reduced point")
            }
        }
    }
}

/// `τ = (-b + i sqrt(|Δ|)) / (2a)` for the form `(a, b, c)`: the root of
/// `a τ^2 + b τ + c` in the upper half plane. For a reduced form this lies
/// in the fundamental domain.
pub fn tau_of_form(form: &QuadForm, prec: u32) -> AppComplex {
    let two_a = BigFloat::from_i64(2 * form.a());
    let re = BigFloat::from_i64(-form.b()).div(&two_a, prec + 8);
    let abs_disc = BigFloat::from_i64(-form.discriminant());
    let im = abs_disc.sqrt(prec + 8).div(&two_a, prec + 8);
    AppComplex::new(re, im, prec)
}

/// Translate-and-invert reduction into the fundamental domain
/// `|Re| <= 1/2, |z| >= 1`. j is invariant under these moves.
pub fn reduce_to_fundamental(z: &AppComplex, prec: u32) -> Result<AppComplex, NumericsError> {
    if !is_upper_half(z) {
        return Err(NumericsError::NonPositiveImaginary);
    }
    let work = prec + 16;
    let mut z = AppComplex::new(z.re().clone(), z.im().clone(), work);
    // Points whose orbit touches the unit circle exactly (possible for
    // rational inputs) would oscillate z <-> -1/z under a strict |z| < 1
    // test once rounding noise enters; a band around the circle is
    // terminal since both representatives are equivalent.
    let near_one = BigFloat::one().sub(&BigFloat::one().ldexp(-((work / 2) as i64)));
    let minus_one = AppComplex::new(BigFloat::from_i64(-1), BigFloat::zero(), work);
    for _ in 0..100_000 {
        let t = z.re().to_integer_rounded();
        if t.bits() != 0 {
            let shift = BigFloat::from_bigint(&t);
            z = AppComplex::new(z.re().sub(&shift), z.im().clone(), work);
        }
        if z.norm_sqr().cmp_value(&near_one) == Ordering::Less {
            z = minus_one.div(&z);
        } else {
            return Ok(AppComplex::new(z.re().clone(), z.im().clone(), prec));
        }
    }
    Err(NumericsError::ReductionDiverged)
}

fn is_upper_half(z: &AppComplex) -> bool {
    !z.im().is_zero() && !z.im().is_negative()
}

/// σ3 for 1..=n by a divisor sieve.
fn sigma3_table(n: u64) -> Vec<u64> {
    let mut tab = alloc::vec![0u64; n as usize + 1];
    for d in 1..=n {
        let d3 = d * d * d;
        let mut m = d;
        while m <= n {
            tab[m as usize] += d3;
            m += d;
        }
    }
    tab
}

/// σ5 for 1..=n by a divisor sieve (`u128`: σ5 outgrows `u64` quickly).
#[cfg(test)]
fn sigma5_table(n: u64) -> Vec<u128> {
    let mut tab = alloc::vec![0u128; n as usize + 1];
    for d in 1..=n as u128 {
        let d5 = d * d * d * d * d;
        let mut m = d;
        while m <= n as u128 {
            tab[m as usize] += d5;
            m += d;
        }
    }
    tab
}

/// `2π Im τ log2(e)` in 1024ths, rounded to nearest: the number of bits
/// by which consecutive q-series terms shrink, and equally the bit size
/// of `e^(2π Im τ)`.
fn bits_per_term_1024(im: &BigFloat) -> Result<u64, NumericsError> {
    let ctx = FloatCtx::new(64);
    let rate = ctx.pi().mul(&im.round(96)).ldexp(1).div(&ctx.ln2(), 64);
    let rate_1024 = rate.ldexp(10).to_integer_rounded();
    if rate_1024.sign() == num_bigint::Sign::Minus {
        return Err(NumericsError::NonPositiveImaginary);
    }
    Ok(u64::try_from(&rate_1024).unwrap_or(u64::MAX))
}

/// Number of q-series terms for the target precision at this `Im τ`:
/// smallest `n` with `|q|^n` comfortably below `2^-(prec+40)` including
/// coefficient growth (σ5(n) < n^6 for the series used here).
fn series_length(im: &BigFloat, prec: u32) -> Result<u64, NumericsError> {
    let rate_1024 = bits_per_term_1024(im)?;
    if rate_1024 == 0 {
        return Err(NumericsError::PrecisionInfeasible {
            needed_terms: u64::MAX,
        });
    }
    let mut n = ((prec as u64 + 40) * 1024).div_ceil(rate_1024) + 1;
    // One refinement for coefficient growth.
    let log2n = 64 - n.leading_zeros() as u64;
    n += ((6 * log2n + 8) * 1024).div_ceil(rate_1024);
    if n > TERM_CAP {
        return Err(NumericsError::PrecisionInfeasible { needed_terms: n });
    }
    Ok(n)
}

/// `q = e^(2πiτ)`.
fn q_from_tau(ctx: &FloatCtx, tau: &AppComplex) -> AppComplex {
    let two_pi = ctx.pi().ldexp(1);
    let modulus = ctx.exp(&two_pi.mul(tau.im()).neg());
    let (s, c) = ctx.sin_cos(&two_pi.mul(tau.re()));
    AppComplex::new(modulus.mul(&c), modulus.mul(&s), ctx.prec())
}

fn add_real(z: &AppComplex, r: &BigFloat) -> AppComplex {
    AppComplex::new(z.re().add(r), z.im().clone(), z.prec())
}

/// `E4(q) = 1 + 240 Σ σ3(n) q^n` by Horner.
fn eisenstein_e4(q: &AppComplex, n_terms: u64) -> AppComplex {
    let sigma = sigma3_table(n_terms);
    let mut acc = AppComplex::zero(q.prec());
    for n in (1..=n_terms).rev() {
        acc = add_real(&acc, &BigFloat::from_bigint(&BigInt::from(sigma[n as usize])));
        acc = acc.mul(q);
    }
    add_real(&acc.scale(&BigFloat::from_i64(240)), &BigFloat::one())
}

/// `E6(q) = 1 - 504 Σ σ5(n) q^n` by Horner.
#[cfg(test)]
fn eisenstein_e6(q: &AppComplex, n_terms: u64) -> AppComplex {
    let sigma = sigma5_table(n_terms);
    let mut acc = AppComplex::zero(q.prec());
    for n in (1..=n_terms).rev() {
        acc = add_real(&acc, &BigFloat::from_bigint(&BigInt::from(sigma[n as usize])));
        acc = acc.mul(q);
    }
    add_real(&acc.scale(&BigFloat::from_i64(-504)), &BigFloat::one())
}

fn pow_u64(z: &AppComplex, mut e: u64) -> AppComplex {
    let mut base = z.clone();
    let mut acc = AppComplex::new(BigFloat::one(), BigFloat::zero(), z.prec());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    acc
}

/// `Δ(q) = q Π (1-q^n)^24`, with the product expanded by the pentagonal
/// number theorem: `Π (1-q^n) = Σ_k (-1)^k q^(k(3k∓1)/2)`.
fn discriminant_form(q: &AppComplex, n_terms: u64) -> AppComplex {
    // Sparse exponent/sign list up to n_terms, ascending.
    let mut terms: Vec<(u64, i64)> = alloc::vec![(0, 1)];
    let mut k = 1u64;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        let g2 = k * (3 * k + 1) / 2;
        let sign = if k % 2 == 1 { -1 } else { 1 };
        if g1 > n_terms {
            break;
        }
        terms.push((g1, sign));
        if g2 <= n_terms {
            terms.push((g2, sign));
        }
        k += 1;
    }
    terms.sort();
    // Sparse Horner from the top exponent down.
    let mut acc = AppComplex::zero(q.prec());
    let mut prev_exp = None;
    for &(e, c) in terms.iter().rev() {
        if let Some(p) = prev_exp {
            acc = acc.mul(&pow_u64(q, p - e));
        }
        acc = add_real(&acc, &BigFloat::from_i64(c));
        prev_exp = Some(e);
    }
    if let Some(p) = prev_exp {
        if p > 0 {
            acc = acc.mul(&pow_u64(q, p));
        }
    }
    // acc = Π(1-q^n); raise to the 24th power and multiply by q.
    let p2 = acc.mul(&acc);
    let p4 = p2.mul(&p2);
    let p8 = p4.mul(&p4);
    let p16 = p8.mul(&p8);
    p16.mul(&p8).mul(q)
}

/// j at a point already inside (or near) the fundamental domain; no
/// reduction is applied, so this is also the evaluator behind the envelope
/// check, where translating the argument would change `e^(2π Im z)`.
fn j_eval_unreduced(tau: &AppComplex, prec: u32) -> Result<AppComplex, NumericsError> {
    if !is_upper_half(tau) {
        return Err(NumericsError::NonPositiveImaginary);
    }
    let work = prec + 64;
    let n_terms = series_length(tau.im(), work)?;
    let ctx = FloatCtx::new(work);
    let tau_w = AppComplex::new(tau.re().clone(), tau.im().clone(), work);
    let q = q_from_tau(&ctx, &tau_w);
    let e4 = eisenstein_e4(&q, n_terms);
    let delta = discriminant_form(&q, n_terms);
    let j = e4.mul(&e4).mul(&e4).div(&delta);
    Ok(AppComplex::new(j.re().clone(), j.im().clone(), prec))
}

/// The modular j-function, accurate to roughly `prec` bits (relative).
/// The argument is reduced into the fundamental domain first; j is
/// invariant under the reduction moves.
pub fn j_eval(tau: &AppComplex, prec: u32) -> Result<AppComplex, NumericsError> {
    let reduced = reduce_to_fundamental(tau, prec + 16)?;
    j_eval_unreduced(&reduced, prec)
}

/// Outcome of the envelope test at one point.
#[derive(Debug, Clone)]
pub struct EnvelopeCheck {
    /// `| |j(z)| - e^(2π Im z) |`.
    pub gap: BigFloat,
    /// `2079 - gap`; nonnegative iff the bound holds.
    pub slack: BigFloat,
    pub holds: bool,
}

/// Checks `| |j(z)| - e^(2π Im z) | <= 2079` at `z` itself (no reduction:
/// the comparison envelope depends on `Im z`). Intended for points of the
/// fundamental domain.
///
/// Both sides of the gap are of size `e^(2π Im z)`, so resolving their
/// O(1000) difference needs roughly `2π Im z log2(e)` extra working bits;
/// the check escalates internally and `prec` is only a floor.
pub fn check_j_envelope(z: &AppComplex, prec: u32) -> Result<EnvelopeCheck, NumericsError> {
    if !is_upper_half(z) {
        return Err(NumericsError::NonPositiveImaginary);
    }
    let growth_bits = u32::try_from(bits_per_term_1024(z.im())? / 1024).unwrap_or(u32::MAX / 2);
    let work = prec.max(growth_bits + 96);
    let j = j_eval_unreduced(z, work)?;
    let ctx = FloatCtx::new(work);
    let envelope = ctx.exp(&ctx.pi().ldexp(1).mul(z.im()));
    let gap = j.abs().sub(&envelope).abs().round(prec);
    let bound = BigFloat::from_i64(ENVELOPE_BOUND as i64);
    let slack = bound.sub(&gap).round(prec);
    Ok(EnvelopeCheck {
        holds: gap.cmp_value(&bound) != Ordering::Greater,
        gap,
        slack,
    })
}

/// The singular modulus `j(τ_form)`, with the envelope bound asserted at
/// the form's root as a numerics self-check.
pub fn singular_modulus(form: &QuadForm, prec: u32) -> Result<AppComplex, NumericsError> {
    let tau = tau_of_form(&form.reduce(), prec + 16);
    let check = check_j_envelope(&tau, prec.max(64))?;
    if !check.holds {
        return Err(NumericsError::EnvelopeViolation);
    }
    j_eval_unreduced(&tau, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Discriminant;

    fn assert_close(x: &BigFloat, y: &BigFloat, bits: i64) {
        let diff = x.sub(y);
        if diff.is_zero() {
            return;
        }
        let scale = x.log2_floor().or(y.log2_floor()).unwrap_or(0);
        assert!(
            diff.log2_floor().unwrap() <= scale - bits,
            "difference 2^{} too large vs scale 2^{scale}",
            diff.log2_floor().unwrap()
        );
    }

    fn tau(re_num: i64, re_den: i64, im_num: i64, im_den: i64, prec: u32) -> AppComplex {
        AppComplex::new(
            BigFloat::from_ratio(re_num, re_den, prec),
            BigFloat::from_ratio(im_num, im_den, prec),
            prec,
        )
    }

    #[test]
    fn sigma_tables_match_direct_sums() {
        let s3 = sigma3_table(50);
        let s5 = sigma5_table(50);
        for n in 1..=50u64 {
            let direct3: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum();
            let direct5: u128 = (1..=n as u128)
                .filter(|d| n as u128 % d == 0)
                .map(|d| d * d * d * d * d)
                .sum();
            assert_eq!(s3[n as usize], direct3);
            assert_eq!(s5[n as usize], direct5);
        }
        assert_eq!(s3[1], 1);
        assert_eq!(s3[6], 1 + 8 + 27 + 216);
    }

    #[test]
    fn tau_of_principal_forms() {
        let d4 = Discriminant::new(-4).unwrap();
        let t = tau_of_form(&QuadForm::principal(&d4), 128);
        assert!(t.re().is_zero());
        assert_close(t.im(), &BigFloat::one(), 120);

        let f = QuadForm::new(2, 1, 3).unwrap(); // Δ = -23
        let t = tau_of_form(&f, 128);
        assert_close(t.re(), &BigFloat::from_ratio(-1, 4, 128), 126);
        let expected_im = BigFloat::from_i64(23).sqrt(140).div(&BigFloat::from_i64(4), 140);
        assert_close(t.im(), &expected_im, 124);
    }

    #[test]
    fn j_at_cm_points_hits_classical_integers() {
        // (Δ, expected j) for the nine class number one discriminants and a
        // few non-maximal orders; all are classical.
        let cases: [(i64, i64); 13] = [
            (-3, 0),
            (-4, 1728),
            (-7, -3375),
            (-8, 8000),
            (-11, -32768),
            (-12, 54000),
            (-16, 287496),
            (-19, -884736),
            (-27, -12288000),
            (-28, 16581375),
            (-43, -884736000),
            (-67, -147197952000),
            (-163, -262537412640768000),
        ];
        for (disc, expected) in cases {
            let d = Discriminant::new(disc).unwrap();
            let f = QuadForm::principal(&d);
            let j = singular_modulus(&f, 320).expect("evaluation succeeds");
            assert!(
                j.im().is_zero() || j.im().log2_floor().unwrap() < -120,
                "imaginary residue at Δ = {disc}"
            );
            let err = j.re().sub(&BigFloat::from_i64(expected)).abs();
            assert!(
                err.is_zero() || err.log2_floor().unwrap() < -120,
                "Δ = {disc}: err 2^{:?}",
                err.log2_floor()
            );
        }
    }

    #[test]
    fn j_at_163_at_contract_precision() {
        let d = Discriminant::new(-163).unwrap();
        let j = singular_modulus(&QuadForm::principal(&d), 512).unwrap();
        let n = j.re().to_integer_rounded();
        assert_eq!(n, BigInt::from(-262537412640768000i64));
        // residual below 1e-10 comfortably; at 512 bits the rounding often
        // lands exactly on the integer, since the true value is one.
        let resid = j.re().dist_to_integer();
        assert!(resid.is_zero() || resid.log2_floor().unwrap() < -300);
    }

    #[test]
    fn generic_point_matches_reference_evaluator() {
        // j(0.3 + 1.1i), reference digits from an independent evaluator.
        let t = tau(3, 10, 11, 10, 256);
        let j = j_eval(&t, 256).unwrap();
        let re_ref = decimal(
            "356.6479117587322428343082181421985951852",
            300,
        );
        let im_ref = decimal(
            "-781.1038124900531291167332654812109371012",
            300,
        );
        assert_close(j.re(), &re_ref, 115);
        assert_close(j.im(), &im_ref, 115);
    }

    fn decimal(s: &str, prec: u32) -> BigFloat {
        let (sign, s) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1, s),
        };
        let (i, f) = s.split_once('.').unwrap_or((s, ""));
        let digits: BigInt = alloc::format!("{i}{f}").parse().unwrap();
        let den = BigInt::from(10u8).pow(f.len() as u32);
        BigFloat::from_bigint(&(digits * sign)).div(&BigFloat::from_bigint(&den), prec)
    }

    #[test]
    fn conjugation_symmetry() {
        let z = tau(3, 10, 11, 10, 200);
        let w = z.neg().conj(); // -conj(z) = -0.3 + 1.1i
        let jz = j_eval(&z, 200).unwrap();
        let jw = j_eval(&w, 200).unwrap();
        assert_close(jw.re(), jz.re(), 180);
        assert_close(&jw.im().neg(), jz.im(), 180);
    }

    #[test]
    fn modular_invariance() {
        let z = tau(3, 10, 11, 10, 220);
        let j0 = j_eval(&z, 200).unwrap();
        // z + 3
        let shifted = AppComplex::new(
            z.re().add(&BigFloat::from_i64(3)),
            z.im().clone(),
            220,
        );
        let j1 = j_eval(&shifted, 200).unwrap();
        // -1/z
        let inv = AppComplex::new(BigFloat::from_i64(-1), BigFloat::zero(), 220).div(&z);
        let j2 = j_eval(&inv, 200).unwrap();
        for other in [&j1, &j2] {
            assert_close(j0.re(), other.re(), 180);
            assert_close(j0.im(), other.im(), 180);
        }
    }

    #[test]
    fn e4_cubed_minus_e6_squared_is_1728_delta() {
        // The classical identity ties the two Eisenstein series to the
        // pentagonal-product discriminant; this cross-checks all three
        // evaluators on an interior point.
        let prec = 256;
        let t = tau(1, 5, 9, 8, prec);
        let ctx = FloatCtx::new(prec);
        let n = series_length(t.im(), prec).unwrap();
        let q = q_from_tau(&ctx, &t);
        let e4 = eisenstein_e4(&q, n);
        let e6 = eisenstein_e6(&q, n);
        let delta = discriminant_form(&q, n);
        let lhs = e4.mul(&e4).mul(&e4).sub(&e6.mul(&e6));
        let rhs = delta.scale(&BigFloat::from_i64(1728));
        assert_close(lhs.re(), rhs.re(), 200);
        assert!(lhs.im().sub(rhs.im()).log2_floor().unwrap_or(i64::MIN) < rhs.re().log2_floor().unwrap() - 200);
    }

    #[test]
    fn fundamental_domain_reduction() {
        let z = tau(53, 10, 1, 100, 300); // 5.3 + 0.01i
        let r = reduce_to_fundamental(&z, 280).unwrap();
        assert!(r.re().abs().cmp_value(&BigFloat::from_ratio(1, 2, 64)) != Ordering::Greater);
        assert!(r.norm_sqr().cmp_value(&BigFloat::from_ratio(99, 100, 64)) == Ordering::Greater);
        // j agrees between the raw and reduced points.
        let j0 = j_eval(&z, 200).unwrap();
        let j1 = j_eval(&r, 200).unwrap();
        assert_close(j0.re(), j1.re(), 150);
        assert_close(j0.im(), j1.im(), 150);
    }

    #[test]
    fn envelope_holds_across_fundamental_domain() {
        // Corners and interior points, including large Im where j blows up.
        let pts = [
            tau(0, 1, 1, 1, 200),       // i
            tau(1, 2, 7, 8, 200),       // near the corner 1/2 + i√3/2
            tau(-1, 2, 9, 10, 200),
            tau(1, 3, 3, 2, 200),
            tau(0, 1, 30, 1, 200),      // high in the cusp
            tau(2, 5, 40, 1, 200),
        ];
        for z in pts {
            let chk = check_j_envelope(&z, 200).unwrap();
            assert!(chk.holds, "envelope fails at {z}: gap {}", chk.gap);
        }
    }

    #[test]
    fn infeasible_precision_is_reported() {
        let z = tau(0, 1, 1, 2000, 64); // Im = 1/2000
        match j_eval_unreduced(&z, 4096) {
            Err(NumericsError::PrecisionInfeasible { needed_terms }) => {
                assert!(needed_terms > TERM_CAP);
            }
            other => panic!("expected infeasible precision, got {other:?}"),
        }
        // The public entry point reduces first and therefore succeeds.
        assert!(j_eval(&z, 256).is_ok());
    }

    #[test]
    fn rejects_lower_half_plane() {
        let z = AppComplex::new(BigFloat::one(), BigFloat::from_i64(-1), 64);
        assert_eq!(j_eval(&z, 64), Err(NumericsError::NonPositiveImaginary));
        let r = AppComplex::from_real(BigFloat::one(), 64);
        assert_eq!(j_eval(&r, 64), Err(NumericsError::NonPositiveImaginary));
    }
}
