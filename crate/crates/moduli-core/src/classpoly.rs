//! Hilbert class polynomials with certified integer rounding, and the
//! modular polynomials of level 2 and 4 built by interpolation.
//!
//! A class polynomial is assembled as the product of one factor per
//! reduced form: a real linear factor for each ambiguous form and a real
//! quadratic factor for each conjugate pair. Coefficients are rounded to
//! the nearest integers and the construction is accepted only when every
//! rounding residual stays below 1/4; otherwise the whole computation is
//! retried at doubled precision. The modular polynomials are recovered by
//! interpolating their coefficients in `Y` at sample points `j(it)` along
//! the imaginary axis, with two extra nodes held back as an
//! overdetermined consistency check.

use alloc::format;
use alloc::string::String;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::bigfloat::BigFloat;
use crate::complex::AppComplex;
use crate::forms::{class_number, reduced_forms, Discriminant, QuadForm};
use crate::intpoly::{IntPoly, IntPoly2};
use crate::jfun::{j_eval, singular_modulus, NumericsError};

/// Errors from class polynomial and modular polynomial construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassPolyError {
    /// Rounding residuals stayed at or above 1/4 through the whole
    /// precision ladder.
    PrecisionExhausted,
    /// Modular polynomials are only built for levels 2 and 4.
    UnsupportedLevel(u32),
    /// The discriminant is not congruent to 1 modulo 8.
    WrongCongruence(i64),
    /// The discriminant does not carry two subdominant forms.
    MissingSubdominantPair(i64),
    /// A cache line failed to parse back into a class polynomial.
    CacheFormat,
    /// Evaluation of a singular modulus failed.
    Numerics(NumericsError),
}

impl fmt::Display for ClassPolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassPolyError::PrecisionExhausted => {
                write!(f, "rounding residual above 1/4 at every ladder step")
            }
            ClassPolyError::UnsupportedLevel(n) => {
                write!(f, "modular polynomial level {n} not supported")
            }
            ClassPolyError::WrongCongruence(d) => {
                write!(f, "discriminant {d} is not 1 mod 8")
            }
            ClassPolyError::MissingSubdominantPair(d) => {
                write!(f, "discriminant {d} has no subdominant pair")
            }
            ClassPolyError::CacheFormat => write!(f, "malformed cache line"),
            ClassPolyError::Numerics(e) => write!(f, "numerics failure: {e}"),
        }
    }
}

impl From<NumericsError> for ClassPolyError {
    fn from(e: NumericsError) -> Self {
        ClassPolyError::Numerics(e)
    }
}

/// Number of precision-doubling attempts before giving up.
const LADDER_STEPS: u32 = 3;

/// A monic integer polynomial whose roots are the singular moduli of one
/// discriminant, together with the rounding evidence.
#[derive(Debug, Clone)]
pub struct ClassPoly {
    disc: Discriminant,
    poly: IntPoly,
    residual: BigFloat,
    prec_used: u32,
}

impl ClassPoly {
    pub fn disc(&self) -> &Discriminant {
        &self.disc
    }

    pub fn poly(&self) -> &IntPoly {
        &self.poly
    }

    /// Largest distance of any assembled coefficient from its nearest
    /// integer; zero for polynomials read back from a cache line.
    pub fn residual(&self) -> &BigFloat {
        &self.residual
    }

    /// Working precision of the accepted construction; zero for
    /// polynomials read back from a cache line.
    pub fn prec_used(&self) -> u32 {
        self.prec_used
    }

    /// Serialize as `Δ h c_0 c_1 ... c_h` in decimal, coefficients in
    /// ascending order.
    pub fn cache_line(&self) -> String {
        let h = self.poly.degree().unwrap_or(0);
        let mut line = format!("{} {}", self.disc.value(), h);
        for k in 0..=h {
            line.push(' ');
            line.push_str(&self.poly.coeff(k).to_string());
        }
        line
    }

    /// Parse a `cache_line` string, validating the discriminant, the
    /// class number, and monicity.
    pub fn from_cache_line(line: &str) -> Result<Self, ClassPolyError> {
        let mut it = line.split_whitespace();
        let d: i64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(ClassPolyError::CacheFormat)?;
        let h: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(ClassPolyError::CacheFormat)?;
        let disc = Discriminant::new(d).map_err(|_| ClassPolyError::CacheFormat)?;
        let mut coeffs = Vec::with_capacity(h + 1);
        for _ in 0..=h {
            let c: BigInt = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or(ClassPolyError::CacheFormat)?;
            coeffs.push(c);
        }
        if it.next().is_some() {
            return Err(ClassPolyError::CacheFormat);
        }
        let poly = IntPoly::new(coeffs);
        if poly.degree() != Some(h)
            || !poly.is_monic()
            || h != class_number(&disc)
        {
            return Err(ClassPolyError::CacheFormat);
        }
        Ok(ClassPoly {
            disc,
            poly,
            residual: BigFloat::zero(),
            prec_used: 0,
        })
    }
}

/// Working precision for assembling the class polynomial of `disc`:
/// `1.45 · π√|Δ| · Σ 1/a` bits of coefficient growth plus margin, with a
/// floor of 256 bits.
pub fn policy_precision(disc: &Discriminant) -> u32 {
    let forms = reduced_forms(disc);
    let sum_inv_a: BigRational = forms
        .iter()
        .map(|f| BigRational::new(BigInt::one(), BigInt::from(f.a())))
        .sum();
    let s = sqrt_ceil(disc.abs());
    // 1.45 · π < 4.5554
    let bits = BigRational::new(BigInt::from(45_554), BigInt::from(10_000))
        * BigRational::from(BigInt::from(s))
        * sum_inv_a;
    let bits = bits.ceil().to_integer().to_u32().unwrap_or(u32::MAX / 2);
    (bits + 64).max(256)
}

fn sqrt_ceil(n: i64) -> i64 {
    let mut s = num_integer::Roots::sqrt(&n);
    if s * s < n {
        s += 1;
    }
    s
}

/// Class polynomial of `disc`: the monic integer polynomial whose roots
/// are exactly the singular moduli of that discriminant.
pub fn hilbert_class_poly(disc: &Discriminant) -> Result<ClassPoly, ClassPolyError> {
    let base = policy_precision(disc);
    for step in 0..LADDER_STEPS {
        let prec = base << step;
        let (poly, residual) = assemble_class_poly(disc, prec)?;
        if below_quarter(&residual) {
            return Ok(ClassPoly {
                disc: disc.clone(),
                poly,
                residual,
                prec_used: prec,
            });
        }
    }
    Err(ClassPolyError::PrecisionExhausted)
}

fn below_quarter(residual: &BigFloat) -> bool {
    residual.cmp_value(&BigFloat::from_ratio(1, 4, 8)) == core::cmp::Ordering::Less
}

/// One assembly pass at fixed precision: real linear factors for
/// ambiguous forms, real quadratic factors for conjugate pairs.
fn assemble_class_poly(
    disc: &Discriminant,
    prec: u32,
) -> Result<(IntPoly, BigFloat), ClassPolyError> {
    let work = prec + 64;
    let mut product = alloc::vec![BigFloat::one()];
    for form in reduced_forms(disc) {
        if form.b() < 0 {
            // conjugate of the matching b > 0 form, already covered
            continue;
        }
        let x = singular_modulus(&form, work)?;
        let factor = if form.is_ambiguous() {
            alloc::vec![x.re().neg(), BigFloat::one()]
        } else {
            let two_re = x.re().ldexp(1);
            alloc::vec![x.norm_sqr(), two_re.neg(), BigFloat::one()]
        };
        product = rpoly_mul(&product, &factor, work);
    }
    let mut coeffs = Vec::with_capacity(product.len());
    let mut residual = BigFloat::zero();
    for c in &product {
        let r = c.dist_to_integer();
        if r.cmp_value(&residual) == core::cmp::Ordering::Greater {
            residual = r;
        }
        coeffs.push(c.to_integer_rounded());
    }
    Ok((IntPoly::new(coeffs), residual))
}

/// Schoolbook product of dense real polynomials, rounded to `prec`.
fn rpoly_mul(p: &[BigFloat], q: &[BigFloat], prec: u32) -> Vec<BigFloat> {
    let mut out = alloc::vec![BigFloat::zero(); p.len() + q.len() - 1];
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        for (j, qj) in q.iter().enumerate() {
            out[i + j] = out[i + j].add(&pi.mul_round(qj, prec));
        }
    }
    for c in &mut out {
        *c = c.round(prec);
    }
    out
}

/// The factor arguments of `Φ_level(X, j(τ))` as fractional-linear images
/// of `τ`: `(τ+b)/level` for `0 ≤ b < level`, `level·τ`, and for level 4
/// additionally `τ + 1/2`.
fn factor_arguments(level: u32, tau: &AppComplex, work: u32) -> Vec<AppComplex> {
    let mut args = Vec::new();
    let inv = BigFloat::from_ratio(1, level as i64, work);
    for b in 0..level {
        let shifted = tau.add(&AppComplex::from_real(BigFloat::from_i64(b as i64), work));
        args.push(shifted.scale(&inv));
    }
    args.push(tau.scale(&BigFloat::from_i64(level as i64)));
    if level == 4 {
        args.push(tau.add(&AppComplex::from_real(BigFloat::from_ratio(1, 2, work), work)));
    }
    args
}

fn level_degree(level: u32) -> Result<usize, ClassPolyError> {
    match level {
        2 => Ok(3),
        4 => Ok(6),
        n => Err(ClassPolyError::UnsupportedLevel(n)),
    }
}

fn level_base_precision(level: u32) -> u32 {
    match level {
        2 => 320,
        _ => 768,
    }
}

/// Modular polynomial of level 2 or 4, a symmetric integer polynomial in
/// two variables that vanishes at `(j(level·τ), j(τ))`.
pub fn modular_poly(level: u32) -> Result<IntPoly2, ClassPolyError> {
    let degree = level_degree(level)?;
    let base = level_base_precision(level);
    for step in 0..LADDER_STEPS {
        let prec = base << step;
        if let Some(phi) = modular_poly_attempt(level, degree, prec)? {
            return Ok(phi);
        }
    }
    Err(ClassPolyError::PrecisionExhausted)
}

/// One interpolation pass at fixed precision. Returns `None` when any
/// certification step fails, so the caller can climb the ladder.
fn modular_poly_attempt(
    level: u32,
    degree: usize,
    prec: u32,
) -> Result<Option<IntPoly2>, ClassPolyError> {
    let work = prec + 64;
    let nodes = degree + 3;
    // nodes τ_k = i·(1 + k/4): low enough to keep values small, spaced
    // enough that the j values are well separated
    let mut ys = Vec::with_capacity(nodes);
    let mut polys = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let t = BigFloat::from_ratio(4 + k as i64, 4, work);
        let tau = AppComplex::new(BigFloat::zero(), t, work);
        ys.push(j_eval(&tau, work)?.re().clone());
        let mut p = alloc::vec![AppComplex::from_real(BigFloat::one(), work)];
        for arg in factor_arguments(level, &tau, work) {
            let root = j_eval(&arg, work)?;
            p = cpoly_mul_linear(&p, &root, work);
        }
        polys.push(p);
    }
    let tol_exp = -(prec as i64) / 4;
    let mut phi = IntPoly2::new();
    let mut max_residual = BigFloat::zero();
    for m in 0..=degree {
        let mut vals = Vec::with_capacity(nodes);
        for p in &polys {
            let c = &p[m];
            // the product collapses to a real number; treat visible
            // imaginary mass as a precision failure
            let bound = c.re().abs().add(&BigFloat::one()).ldexp(tol_exp);
            if c.im().abs().cmp_value(&bound) == core::cmp::Ordering::Greater {
                return Ok(None);
            }
            vals.push(c.re().clone());
        }
        let coef = newton_coefficients(&ys[..=degree], &vals[..=degree], work);
        let monomial = newton_to_monomial(&ys[..=degree], &coef, work);
        for extra in degree + 1..nodes {
            let predicted = rpoly_eval(&monomial, &ys[extra], work);
            let err = predicted.sub(&vals[extra]).abs();
            let bound = vals[extra].abs().add(&BigFloat::one()).ldexp(tol_exp);
            if err.cmp_value(&bound) == core::cmp::Ordering::Greater {
                return Ok(None);
            }
        }
        for (ypow, c) in monomial.iter().enumerate() {
            let r = c.dist_to_integer();
            if r.cmp_value(&max_residual) == core::cmp::Ordering::Greater {
                max_residual = r;
            }
            phi.insert(m as u32, ypow as u32, c.to_integer_rounded());
        }
    }
    let shape_ok = below_quarter(&max_residual)
        && phi.is_symmetric()
        && phi.x_degree() as usize == degree
        && phi.y_degree() as usize == degree
        && phi.coeff(degree as u32, 0).is_one();
    Ok(if shape_ok { Some(phi) } else { None })
}

/// Multiply a dense complex polynomial by `(X − root)`.
fn cpoly_mul_linear(p: &[AppComplex], root: &AppComplex, work: u32) -> Vec<AppComplex> {
    let mut out = alloc::vec![AppComplex::zero(work); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] = out[i + 1].add(c);
        out[i] = out[i].sub(&c.mul(root));
    }
    out
}

/// Divided-difference coefficients of the Newton interpolant through
/// `(ys[i], vals[i])`.
fn newton_coefficients(ys: &[BigFloat], vals: &[BigFloat], prec: u32) -> Vec<BigFloat> {
    let n = ys.len();
    let mut table = vals.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = table[i].sub(&table[i - 1]);
            let den = ys[i].sub(&ys[i - level]);
            table[i] = num.div(&den, prec);
        }
    }
    table
}

/// Expand a Newton-form interpolant to monomial coefficients.
fn newton_to_monomial(ys: &[BigFloat], coef: &[BigFloat], prec: u32) -> Vec<BigFloat> {
    let n = coef.len();
    let mut acc = alloc::vec![coef[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = alloc::vec![BigFloat::zero(); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&c.mul_round(&ys[i], prec)).round(prec);
        }
        next[0] = next[0].add(&coef[i]).round(prec);
        acc = next;
    }
    acc
}

fn rpoly_eval(p: &[BigFloat], y: &BigFloat, prec: u32) -> BigFloat {
    let mut acc = BigFloat::zero();
    for c in p.iter().rev() {
        acc = acc.mul_round(y, prec).add(c).round(prec);
    }
    acc
}

/// Reduced forms of `disc` with leading coefficient 2.
pub fn subdominant_forms(disc: &Discriminant) -> Vec<QuadForm> {
    reduced_forms(disc).into_iter().filter(|f| f.a() == 2).collect()
}

/// Evaluate a two-variable integer polynomial at `(x, y)` along with the
/// largest term magnitude, for relative smallness tests.
pub fn eval_with_scale(
    phi: &IntPoly2,
    x: &AppComplex,
    y: &AppComplex,
) -> (AppComplex, BigFloat) {
    let prec = x.prec().min(y.prec());
    let xs = complex_powers(x, phi.x_degree() as usize, prec);
    let yscale = complex_powers(y, phi.y_degree() as usize, prec);
    let mut sum = AppComplex::zero(prec);
    let mut scale = BigFloat::one();
    for (&(i, j), c) in phi.terms() {
        let term = xs[i as usize]
            .mul(&yscale[j as usize])
            .scale(&BigFloat::from_bigint(c));
        let mag = term.abs();
        if mag.cmp_value(&scale) == core::cmp::Ordering::Greater {
            scale = mag;
        }
        sum = sum.add(&term);
    }
    (sum, scale)
}

fn complex_powers(z: &AppComplex, up_to: usize, prec: u32) -> Vec<AppComplex> {
    let mut out = Vec::with_capacity(up_to + 1);
    out.push(AppComplex::from_real(BigFloat::one(), prec));
    for k in 1..=up_to {
        let next = out[k - 1].mul(z);
        out.push(next);
    }
    out
}

/// Whether the two subdominant singular moduli of `disc` form a point on
/// the level-4 modular curve, testing `|Φ₄(x', y')|` against
/// `2^{−prec/2}` relative to the largest term.
pub fn subdominant_pair_on_y04(
    disc: &Discriminant,
    prec: u32,
) -> Result<bool, ClassPolyError> {
    let phi4 = modular_poly(4)?;
    subdominant_pair_with(&phi4, disc, prec)
}

/// Same test with a caller-provided `Φ₄`, so one interpolation can serve
/// many discriminants.
pub fn subdominant_pair_with(
    phi4: &IntPoly2,
    disc: &Discriminant,
    prec: u32,
) -> Result<bool, ClassPolyError> {
    if disc.value().rem_euclid(8) != 1 {
        return Err(ClassPolyError::WrongCongruence(disc.value()));
    }
    let subs = subdominant_forms(disc);
    if subs.len() != 2 {
        return Err(ClassPolyError::MissingSubdominantPair(disc.value()));
    }
    let work = prec + 64;
    let x = singular_modulus(&subs[0], work)?;
    let y = singular_modulus(&subs[1], work)?;
    let (value, scale) = eval_with_scale(phi4, &x, &y);
    let bound = scale.ldexp(-(prec as i64) / 2);
    Ok(value.abs().cmp_value(&bound) == core::cmp::Ordering::Less)
}
