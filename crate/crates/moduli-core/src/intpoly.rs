//! Exact integer polynomial arithmetic.
//!
//! The central service is annihilator construction: given `P` and `Q` with
//! algebraic roots `{x_i}` and `{y_j}`, produce integer polynomials whose
//! roots are exactly `{x_i + ε y_j}` or `{x_i y_j^ε}`. Both are resultants,
//! `Res_Z(P(Z), Q̃(X − Z))` and kin, and are computed by exact
//! evaluation–interpolation: the resultant is evaluated at integer nodes
//! `X = t`, each value obtained modulo several 62-bit primes, and the
//! coefficients recovered by Lagrange interpolation plus CRT under a
//! rigorous coefficient bound derived from Cauchy root bounds. A slow
//! Bareiss determinant of the Sylvester matrix over `Z[X]` serves as the
//! independent reference implementation in the tests.

use crate::arith;
use crate::bigfloat::{BigFloat, FloatCtx};
use crate::complex::AppComplex;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    /// ε = −1 requires that zero is not a root of the divisor polynomial.
    ZeroRootDenominator,
    /// Root iteration failed to converge at the requested precision.
    RootsNotConverged,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::ZeroRootDenominator => write!(f, "zero is a root of the denominator"),
            PolyError::RootsNotConverged => write!(f, "root iteration did not converge"),
        }
    }
}

/// Sign parameter ε ∈ {+1, −1} selecting `x + y` vs `x − y`, or
/// `x · y` vs `x / y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn as_i64(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }
}

/// Dense integer polynomial, coefficients lowest degree first; the leading
/// coefficient is nonzero and the zero polynomial is the empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(alloc::vec![c])
    }

    /// The monomial X.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of X^k (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = alloc::vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn mul_bigint(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * BigInt::from(k + 1))
                .collect(),
        )
    }

    pub fn eval_bigint(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation at a complex point, at the point's precision.
    pub fn eval_complex(&self, z: &AppComplex) -> AppComplex {
        let mut acc = AppComplex::zero(z.prec());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc = AppComplex::new(
                acc.re().add(&BigFloat::from_bigint(c)),
                acc.im().clone(),
                acc.prec(),
            );
        }
        acc
    }

    /// gcd of all coefficients, nonnegative; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `self / content`, keeping the sign of the leading coefficient.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    /// Self negated if the leading coefficient is negative.
    pub fn normalize_sign(&self) -> Self {
        if self.leading().is_some_and(|c| c.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Quotient iff `q · quotient == self` holds exactly over the
    /// integers. `None` (not divisible) is a normal outcome.
    pub fn exact_divide(&self, q: &Self) -> Option<Self> {
        assert!(!q.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dq = q.degree().unwrap();
        let dp = self.degree()?;
        if dp < dq {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = alloc::vec![BigInt::zero(); dp - dq + 1];
        let lead = q.leading().unwrap();
        for k in (dq..=dp).rev() {
            let top = core::mem::take(&mut rem[k]);
            if top.is_zero() {
                continue;
            }
            let (c, r) = top.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (i, qc) in q.coeffs.iter().take(dq).enumerate() {
                rem[k - dq + i] -= &c * qc;
            }
            quot[k - dq] = c;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(quot))
    }

    /// Pseudo-remainder: `lc(q)^(deg p − deg q + 1) · p = Q·q + R` with
    /// `deg R < deg q`; returns R.
    fn pseudo_rem(&self, q: &Self) -> Self {
        let dq = q.degree().expect("nonzero divisor");
        let Some(dp) = self.degree() else {
            return Self::zero();
        };
        if dp < dq {
            return self.clone();
        }
        let lead = q.leading().unwrap().clone();
        let mut r = self.clone();
        let mut e = (dp - dq + 1) as u32;
        while let Some(dr) = r.degree() {
            if dr < dq {
                break;
            }
            let top = r.leading().unwrap().clone();
            let mut shifted = alloc::vec![BigInt::zero(); dr - dq];
            shifted.extend(q.coeffs.iter().map(|c| c * &top));
            r = r.mul_bigint(&lead).sub(&Self::new(shifted));
            e -= 1;
        }
        if e > 0 {
            r = r.mul_bigint(&lead.pow(e));
        }
        r
    }

    /// Polynomial gcd over the integers (content included), with positive
    /// leading coefficient; subresultant pseudo-remainder sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.normalize_sign();
        }
        if other.is_zero() {
            return self.normalize_sign();
        }
        let cont = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            core::mem::swap(&mut a, &mut b);
        }
        let mut g = BigInt::one();
        let mut h = BigInt::one();
        loop {
            let delta = (a.degree().unwrap() - b.degree().unwrap()) as u32;
            let r = a.pseudo_rem(&b);
            if r.is_zero() {
                break;
            }
            if r.degree() == Some(0) {
                b = Self::one();
                break;
            }
            a = b;
            let denom = &g * h.pow(delta);
            b = r
                .exact_divide(&Self::constant(denom))
                .expect("subresultant chain divides exactly");
            g = a.leading().unwrap().clone();
            h = if delta == 0 {
                h
            } else {
                let (q, rem) = g.pow(delta).div_rem(&h.pow(delta - 1));
                debug_assert!(rem.is_zero());
                q
            };
        }
        b.primitive_part().normalize_sign().mul_bigint(&cont)
    }

    /// The product of the distinct irreducible factors: `p / gcd(p, p')`,
    /// primitive with positive leading coefficient.
    pub fn squarefree_part(&self) -> Self {
        assert!(!self.is_zero(), "squarefree part of the zero polynomial");
        let p = self.primitive_part().normalize_sign();
        if p.degree() == Some(0) {
            return Self::one();
        }
        let g = p.gcd(&p.derivative()).primitive_part().normalize_sign();
        p.exact_divide(&g)
            .expect("gcd divides the polynomial")
            .primitive_part()
            .normalize_sign()
    }

    /// The polynomial whose roots are `m · (roots of self)`: coefficient
    /// of X^k is scaled by m^(deg − k).
    pub fn scale_roots(&self, m: &BigInt) -> Self {
        let Some(n) = self.degree() else {
            return Self::zero();
        };
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * m.pow((n - k) as u32))
                .collect(),
        )
    }

    /// Monic polynomial whose roots are `lc · (roots of self)`, together
    /// with the leading coefficient lc: coefficient of X^k becomes
    /// `c_k · lc^(deg − 1 − k)` (and the leading one exactly 1).
    pub fn monic_scaled(&self) -> (Self, BigInt) {
        let n = self.degree().expect("nonzero polynomial");
        let lc = self.leading().unwrap().clone();
        if lc.is_one() || n == 0 {
            return (self.clone(), BigInt::one());
        }
        let mut out = Vec::with_capacity(n + 1);
        for (k, c) in self.coeffs.iter().enumerate() {
            if k == n {
                out.push(BigInt::one());
            } else {
                out.push(c * lc.pow((n - 1 - k) as u32));
            }
        }
        (Self::new(out), lc)
    }

    /// Splits off the power of X dividing self: `(v, q)` with
    /// `self = X^v · q` and `q(0) ≠ 0`.
    pub(crate) fn split_zero_roots(&self) -> (usize, Self) {
        let v = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0);
        (v, Self::new(self.coeffs[v..].to_vec()))
    }

    fn mul_xpow(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = alloc::vec![BigInt::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        IntPoly { coeffs }
    }

    /// All complex roots by the Durand–Kerner simultaneous iteration.
    /// Intended for squarefree input (pass through [`squarefree_part`]
    /// first); multiple roots stall the iteration.
    ///
    /// [`squarefree_part`]: IntPoly::squarefree_part
    pub fn complex_roots(&self, prec: u32) -> Result<Vec<AppComplex>, PolyError> {
        let n = self.degree().expect("nonzero polynomial");
        if n == 0 {
            return Ok(Vec::new());
        }
        // evaluation near a root cancels down from the coefficient scale,
        // so the iteration must run with headroom above the target
        let height = self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(1) as u32;
        let work = prec + 48 + height + 2 * n as u32;
        let ctx = FloatCtx::new(work);
        let radius = BigFloat::one().ldexp(root_bound_bits(self) as i64);
        let mut z: Vec<AppComplex> = (0..n)
            .map(|k| {
                // angles 2π(k + 0.3405)/n, spread to avoid symmetry locks
                let theta = ctx
                    .pi()
                    .ldexp(1)
                    .mul(&BigFloat::from_ratio(10_000 * k as i64 + 3405, 10_000 * n as i64, work));
                let (s, c) = ctx.sin_cos(&theta);
                AppComplex::new(radius.mul(&c), radius.mul(&s), work)
            })
            .collect();
        let lead = BigFloat::from_bigint(self.leading().unwrap());
        let target_shift = -2 * (prec as i64 + 8);
        for _ in 0..500 {
            let mut worst_ok = true;
            for k in 0..n {
                let zk = z[k].clone();
                let mut denom = AppComplex::from_real(lead.clone(), work);
                for (j, zj) in z.iter().enumerate() {
                    if j != k {
                        denom = denom.mul(&zk.sub(zj));
                    }
                }
                if denom.is_zero() {
                    // coincident iterates: nudge and keep going
                    z[k] = AppComplex::new(
                        zk.re().add(&BigFloat::one().ldexp(-8)),
                        zk.im().clone(),
                        work,
                    );
                    worst_ok = false;
                    continue;
                }
                let delta = self.eval_complex(&zk).div(&denom);
                z[k] = zk.sub(&delta);
                let scale = z[k]
                    .norm_sqr()
                    .add(&BigFloat::one())
                    .ldexp(target_shift);
                if delta.norm_sqr().cmp_value(&scale) == Ordering::Greater {
                    worst_ok = false;
                }
            }
            if worst_ok {
                return Ok(z
                    .into_iter()
                    .map(|r| AppComplex::new(r.re().clone(), r.im().clone(), prec))
                    .collect());
            }
        }
        Err(PolyError::RootsNotConverged)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "X")?;
                    } else {
                        write!(f, "X^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// ceil(log2) of a Fujiwara bound on the root magnitudes:
/// `|root| <= 2 · max_k |c_{n−k} / c_n|^{1/k}`.
fn root_bound_bits(p: &IntPoly) -> u64 {
    let n = p.degree().expect("nonzero polynomial") as u64;
    let lead_bits = p.leading().unwrap().bits();
    let mut bound = 2u64;
    for k in 1..=n {
        let c = p.coeff((n - k) as usize);
        if c.is_zero() {
            continue;
        }
        // |c / lead| < 2^{bits(c) − bits(lead) + 1}
        let ratio_bits = (c.bits() + 1).saturating_sub(lead_bits);
        bound = bound.max(ratio_bits.div_ceil(k) + 2);
    }
    bound
}

/// Annihilator of `x + εy` over all root pairs: an integer polynomial of
/// degree `deg P · deg Q` whose roots are exactly `{x_i + ε y_j}` with
/// multiplicity, computed as `Res_Z(P(Z), Q̃(X − Z))` with `Q̃` the
/// ε-reflected Q. Monic inputs give a monic output.
pub fn sum_annihilator(p: &IntPoly, q: &IntPoly, eps: Epsilon) -> IntPoly {
    assert!(
        p.degree().unwrap_or(0) >= 1 && q.degree().unwrap_or(0) >= 1,
        "annihilator inputs must be nonconstant"
    );
    let q_tilde = reflect(q, eps);
    annihilator_multimodular(p, &q_tilde, AnnKind::Sum)
}

/// Annihilator of `x · y^ε` over all root pairs; degree `deg P · deg Q`.
/// For ε = −1, zero must not be a root of Q.
pub fn product_annihilator(
    p: &IntPoly,
    q: &IntPoly,
    eps: Epsilon,
) -> Result<IntPoly, PolyError> {
    assert!(
        p.degree().unwrap_or(0) >= 1 && q.degree().unwrap_or(0) >= 1,
        "annihilator inputs must be nonconstant"
    );
    let n = p.degree().unwrap();
    let m = q.degree().unwrap();
    let (vp, p1) = p.split_zero_roots();
    match eps {
        Epsilon::Plus => {
            let (vq, q1) = q.split_zero_roots();
            // every pair with a zero factor contributes a zero root
            let zeros = n * m - (n - vp) * (m - vq);
            Ok(product_core(&p1, &q1).mul_xpow(zeros))
        }
        Epsilon::Minus => {
            if q.coeff(0).is_zero() {
                return Err(PolyError::ZeroRootDenominator);
            }
            // the raw resultant carries content ±Q(0)^n lc(P)^m; strip it
            // so that e.g. roots {2} yield X − 2 rather than 3X − 6
            let core = if p1.is_constant() {
                IntPoly::one()
            } else {
                annihilator_multimodular(&p1, q, AnnKind::Ratio)
                    .primitive_part()
                    .normalize_sign()
            };
            Ok(core.mul_xpow(vp * m))
        }
    }
}

/// Annihilator of the nonzero-root products, following the resultant
/// convention for degenerate (constant) factors: an empty root set
/// contributes only the opposing leading power.
fn product_core(p1: &IntPoly, q1: &IntPoly) -> IntPoly {
    match (p1.degree().unwrap(), q1.degree().unwrap()) {
        (0, 0) => IntPoly::one(),
        (0, m1) => IntPoly::constant(p1.coeff(0).pow(m1 as u32)),
        (n1, 0) => IntPoly::constant(q1.coeff(0).pow(n1 as u32)),
        _ => annihilator_multimodular(p1, q1, AnnKind::Product),
    }
}

/// `Q̃(W) = ε^m Q(εW)`, whose roots are ε times the roots of Q and whose
/// leading coefficient equals lc(Q).
fn reflect(q: &IntPoly, eps: Epsilon) -> IntPoly {
    match eps {
        Epsilon::Plus => q.clone(),
        Epsilon::Minus => {
            let m = q.degree().unwrap();
            IntPoly::new(
                q.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if (m + k) % 2 == 1 { -c } else { c.clone() })
                    .collect(),
            )
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum AnnKind {
    /// `Res_Z(P(Z), Q(X − Z))`: roots x + y (Q already ε-reflected).
    Sum,
    /// `Res_Z(P(Z), Σ_k q_k X^k Z^(m−k))`: roots x·y; requires nonzero
    /// constant terms in both inputs.
    Product,
    /// `Res_Z(Q(Z), P(X·Z))`: roots x/y; requires Q(0) ≠ 0. Non-monic in
    /// general: the leading coefficient is ±lc(P)^m Q(0)^n.
    Ratio,
}

/// Interpolation nodes 1, −1, 2, −2, …
fn interp_nodes(count: usize) -> Vec<i64> {
    (0..count)
        .map(|k| {
            let v = (k / 2 + 1) as i64;
            if k % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Upper bound, in bits, for the coefficients of the annihilator:
/// `|lc| · 2^N · (root bound)^N` over the N-subsets.
fn annihilator_bound_bits(p: &IntPoly, q: &IntPoly, kind: AnnKind) -> u64 {
    let n = p.degree().unwrap() as u64;
    let m = q.degree().unwrap() as u64;
    let big_n = n * m;
    let rp = root_bound_bits(p);
    let rq = root_bound_bits(q);
    let lc_p_bits = p.leading().unwrap().bits();
    let lc_q_bits = q.leading().unwrap().bits();
    let (root_bits, lc_bits) = match kind {
        AnnKind::Sum => (rp.max(rq) + 1, m * lc_p_bits + n * lc_q_bits),
        AnnKind::Product => (rp + rq, m * lc_p_bits + n * lc_q_bits),
        AnnKind::Ratio => {
            // 1/|y| <= |lc(Q)/Q(0)| · (root bound of Q)^(m−1)
            let q0_bits = q.coeff(0).bits();
            let inv_root = (lc_q_bits + 1).saturating_sub(q0_bits.saturating_sub(1))
                + (m - 1) * rq;
            (rp + inv_root, m * lc_p_bits + n * q0_bits)
        }
    };
    lc_bits + big_n * (root_bits + 1) + 64
}

pub(crate) fn bigint_mod_u64(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    u64::try_from(&r).expect("residue fits u64")
}

pub(crate) fn poly_mod_u64(poly: &IntPoly, p: u64) -> Vec<u64> {
    poly.coeffs().iter().map(|c| bigint_mod_u64(c, p)).collect()
}

fn trim_mod(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Resultant of two polynomials over F_p via the Euclidean remainder
/// sequence, tracking leading-coefficient and swap factors.
fn resultant_mod_p(a: &[u64], b: &[u64], p: u64) -> u64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim_mod(&mut a);
    trim_mod(&mut b);
    let mut res = 1u64;
    loop {
        if b.is_empty() {
            return if a.len() == 1 { res } else { 0 };
        }
        let n = a.len() - 1;
        let m = b.len() - 1;
        if m == 0 {
            return arith::mul_mod(res, arith::pow_mod(b[0], n as u64, p), p);
        }
        // a mod b
        let inv_lead = arith::inv_mod(b[m], p);
        let mut r = a.clone();
        for k in (m..=n).rev() {
            let c = arith::mul_mod(r[k], inv_lead, p);
            if c == 0 {
                continue;
            }
            for i in 0..m {
                let sub = arith::mul_mod(c, b[i], p);
                r[k - m + i] = (r[k - m + i] + p - sub) % p;
            }
            r[k] = 0;
        }
        trim_mod(&mut r);
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        if (n * m) % 2 == 1 {
            res = p - res;
        }
        res = arith::mul_mod(res, arith::pow_mod(b[m], (n - dr) as u64, p), p);
        a = b;
        b = r;
    }
}

/// Taylor shift over F_p: coefficients of `f(t + W)` by nested Horner.
fn shift_mod_p(f: &[u64], t: u64, p: u64) -> Vec<u64> {
    let mut out = f.to_vec();
    let n = out.len();
    for k in 0..n {
        for i in (k + 1..n).rev() {
            let add = arith::mul_mod(out[i], t, p);
            out[i - 1] = (out[i - 1] + add) % p;
        }
    }
    out
}

/// Coefficients of the inner polynomial in Z at node `t`, mod p.
fn inner_poly_at_node(kind: AnnKind, other_mod: &[u64], t: u64, p: u64) -> Vec<u64> {
    let m = other_mod.len() - 1;
    match kind {
        AnnKind::Sum => {
            // Q(t − Z): shift to Q(t + W), then W = −Z negates odd terms
            let mut s = shift_mod_p(other_mod, t, p);
            for (k, c) in s.iter_mut().enumerate() {
                if k % 2 == 1 && *c != 0 {
                    *c = p - *c;
                }
            }
            s
        }
        AnnKind::Product => {
            // Σ_k q_k t^k Z^(m−k)
            let mut out = alloc::vec![0u64; m + 1];
            let mut tk = 1u64;
            for (k, &c) in other_mod.iter().enumerate() {
                out[m - k] = arith::mul_mod(c, tk, p);
                tk = arith::mul_mod(tk, t, p);
            }
            out
        }
        AnnKind::Ratio => {
            // P(tZ): p_k t^k Z^k
            let mut out = Vec::with_capacity(m + 1);
            let mut tk = 1u64;
            for &c in other_mod {
                out.push(arith::mul_mod(c, tk, p));
                tk = arith::mul_mod(tk, t, p);
            }
            out
        }
    }
}

/// Lagrange interpolation over F_p through `(nodes[i], values[i])`.
fn lagrange_interp_mod_p(nodes: &[u64], values: &[u64], p: u64) -> Vec<u64> {
    let n = nodes.len();
    // full = Π (X − t_i)
    let mut full = Vec::with_capacity(n + 1);
    full.push(1u64);
    for &t in nodes {
        let mut next = alloc::vec![0u64; full.len() + 1];
        for (k, &c) in full.iter().enumerate() {
            next[k + 1] = (next[k + 1] + c) % p;
            let sub = arith::mul_mod(c, t, p);
            next[k] = (next[k] + p - sub) % p;
        }
        full = next;
    }
    let mut acc = alloc::vec![0u64; n];
    for (&t, &v) in nodes.iter().zip(values) {
        // quotient q = full / (X − t) by synthetic division
        let mut q = alloc::vec![0u64; n];
        q[n - 1] = full[n];
        for k in (1..n).rev() {
            q[k - 1] = (full[k] + arith::mul_mod(t, q[k], p)) % p;
        }
        // denominator Π_{j≠i} (t_i − t_j) = q(t_i)
        let mut denom = 0u64;
        for &c in q.iter().rev() {
            denom = (arith::mul_mod(denom, t, p) + c) % p;
        }
        let scale = arith::mul_mod(v, arith::inv_mod(denom, p), p);
        for (a, &c) in acc.iter_mut().zip(&q) {
            *a = (*a + arith::mul_mod(scale, c, p)) % p;
        }
    }
    acc
}

/// Per-prime leading coefficients that must stay nonzero mod p for the
/// resultant degree structure to survive reduction.
fn prime_is_usable(p: u64, outer: &IntPoly, other: &IntPoly, kind: AnnKind) -> bool {
    if bigint_mod_u64(outer.leading().unwrap(), p) == 0 {
        return false;
    }
    match kind {
        // lc_Z of Q(X − Z) is ±q_m
        AnnKind::Sum => bigint_mod_u64(other.leading().unwrap(), p) != 0,
        // lc_Z is q_0
        AnnKind::Product => bigint_mod_u64(&other.coeff(0), p) != 0,
        // lc_Z of P(tZ) is p_n t^n with t ≠ 0 small
        AnnKind::Ratio => bigint_mod_u64(other.leading().unwrap(), p) != 0,
    }
}

/// The evaluation–interpolation engine: for each 62-bit prime, evaluate
/// the defining resultant at integer nodes, interpolate the coefficients
/// mod p, and CRT-combine until the rigorous coefficient bound is passed;
/// one further prime re-derives the result independently as a guard.
fn annihilator_multimodular(p: &IntPoly, q: &IntPoly, kind: AnnKind) -> IntPoly {
    // outer polynomial of the resultant and the "other" input
    let (outer, other) = match kind {
        AnnKind::Sum | AnnKind::Product => (p, q),
        AnnKind::Ratio => (q, p),
    };
    let n_deg = p.degree().unwrap();
    let m_deg = q.degree().unwrap();
    let big_n = n_deg * m_deg;
    let bound_bits = annihilator_bound_bits(p, q, kind);
    let prime_count = (bound_bits / 61 + 2) as usize;
    let nodes = interp_nodes(big_n + 1);
    let check_nodes = interp_nodes(big_n + 3)[big_n + 1..].to_vec();

    let mut modulus = BigInt::one();
    let mut residues = alloc::vec![BigInt::zero(); big_n + 1];
    let mut primes_used = 0usize;
    let mut prime_iter = arith::primes_above_2_62(prime_count * 2 + 8).into_iter();
    while primes_used < prime_count + 1 {
        let prime = prime_iter.next().expect("prime supply is ample");
        if !prime_is_usable(prime, outer, other, kind) {
            continue;
        }
        let coeffs_p = annihilator_mod_p(outer, other, kind, &nodes, &check_nodes, prime);
        if primes_used < prime_count {
            crt_fold(&mut residues, &mut modulus, &coeffs_p, prime);
        } else {
            // verification prime: the balanced lift must reduce back
            let lifted = balanced(&residues, &modulus);
            for (c, &r) in lifted.iter().zip(&coeffs_p) {
                assert_eq!(
                    bigint_mod_u64(c, prime),
                    r,
                    "CRT reconstruction failed its verification prime"
                );
            }
        }
        primes_used += 1;
    }
    IntPoly::new(balanced(&residues, &modulus))
}

/// All coefficients of the annihilator mod p, with two extra evaluation
/// nodes checked against the interpolated polynomial.
fn annihilator_mod_p(
    outer: &IntPoly,
    other: &IntPoly,
    kind: AnnKind,
    nodes: &[i64],
    check_nodes: &[i64],
    p: u64,
) -> Vec<u64> {
    let outer_mod = poly_mod_u64(outer, p);
    let other_mod = poly_mod_u64(other, p);
    let value_at = |t: i64| -> u64 {
        let t_mod = if t >= 0 {
            t as u64 % p
        } else {
            p - ((-t) as u64 % p)
        };
        let inner = inner_poly_at_node(kind, &other_mod, t_mod, p);
        resultant_mod_p(&outer_mod, &inner, p)
    };
    let node_vals: Vec<u64> = nodes.iter().map(|&t| value_at(t)).collect();
    let nodes_mod: Vec<u64> = nodes
        .iter()
        .map(|&t| if t >= 0 { t as u64 % p } else { p - ((-t) as u64 % p) })
        .collect();
    let coeffs = lagrange_interp_mod_p(&nodes_mod, &node_vals, p);
    for &t in check_nodes {
        let t_mod = if t >= 0 { t as u64 % p } else { p - ((-t) as u64 % p) };
        let mut horner = 0u64;
        for &c in coeffs.iter().rev() {
            horner = (arith::mul_mod(horner, t_mod, p) + c) % p;
        }
        assert_eq!(
            horner,
            value_at(t),
            "interpolated resultant disagrees at a control node"
        );
    }
    coeffs
}

pub(crate) fn crt_fold(residues: &mut [BigInt], modulus: &mut BigInt, vals: &[u64], p: u64) {
    if modulus.is_one() {
        for (r, &v) in residues.iter_mut().zip(vals) {
            *r = BigInt::from(v);
        }
        *modulus = BigInt::from(p);
        return;
    }
    let m_mod_p = bigint_mod_u64(modulus, p);
    let inv = arith::inv_mod(m_mod_p, p);
    for (r, &v) in residues.iter_mut().zip(vals) {
        let cur = bigint_mod_u64(r, p);
        let diff = (v + p - cur) % p;
        let t = arith::mul_mod(diff, inv, p);
        *r += &*modulus * BigInt::from(t);
    }
    *modulus *= BigInt::from(p);
}

fn balanced(residues: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
    let half = modulus / 2;
    residues
        .iter()
        .map(|r| {
            if r > &half {
                r - modulus
            } else {
                r.clone()
            }
        })
        .collect()
}

/// Sparse integer polynomial in two variables: map `(i, j)` to the
/// coefficient of `X^i Y^j`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntPoly2 {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl IntPoly2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: u32, j: u32, c: BigInt) {
        if c.is_zero() {
            self.terms.remove(&(i, j));
        } else {
            self.terms.insert((i, j), c);
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn y_degree(&self) -> u32 {
        self.terms.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(&(i, j), c)| &self.coeff(j, i) == c)
    }

    /// Evaluation at a complex point pair, Horner in Y of Horner in X.
    pub fn eval(&self, x: &AppComplex, y: &AppComplex) -> AppComplex {
        let prec = x.prec().min(y.prec());
        let dy = self.y_degree();
        let mut acc = AppComplex::zero(prec);
        for j in (0..=dy).rev() {
            acc = acc.mul(y);
            let row = IntPoly::new(
                (0..=self.x_degree()).map(|i| self.coeff(i, j)).collect(),
            );
            acc = acc.add(&row.eval_complex(x));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[i64]) -> IntPoly {
        IntPoly::from_i64s(cs)
    }

    /// Small deterministic generator for randomized cases.
    struct Lcg(u64);

    impl Lcg {
        fn next_u64(&mut self) -> u64 {
            self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            self.0 >> 11
        }

        fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
            lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
        }

        fn poly(&mut self, deg: usize, coeff_max: i64) -> IntPoly {
            loop {
                let mut cs: Vec<i64> =
                    (0..=deg).map(|_| self.int_in(-coeff_max, coeff_max)).collect();
                if cs[deg] == 0 {
                    cs[deg] = 1;
                }
                let p = IntPoly::from_i64s(&cs);
                if p.degree() == Some(deg) {
                    return p;
                }
            }
        }
    }

    // Reference route: the annihilator resultants computed as Bareiss
    // determinants of the Sylvester matrix over Z[X].

    /// Bivariate polynomial in Z with IntPoly (in X) coefficients.
    type Bivar = Vec<IntPoly>;

    fn bv_mul(a: &Bivar, b: &Bivar) -> Bivar {
        let mut out = alloc::vec![IntPoly::zero(); a.len() + b.len() - 1];
        for (i, pa) in a.iter().enumerate() {
            for (j, pb) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&pa.mul(pb));
            }
        }
        out
    }

    fn bv_trim(mut v: Bivar) -> Bivar {
        while v.last().is_some_and(|p| p.is_zero()) {
            v.pop();
        }
        v
    }

    fn inner_bivar(kind: AnnKind, other: &IntPoly) -> Bivar {
        let m = other.degree().unwrap();
        match kind {
            AnnKind::Sum => {
                // Q(X − Z) by Horner in (X − Z)
                let step = alloc::vec![IntPoly::x(), IntPoly::from_i64s(&[-1])];
                let mut cur = alloc::vec![IntPoly::constant(other.coeff(m))];
                for k in (0..m).rev() {
                    cur = bv_mul(&cur, &step);
                    cur[0] = cur[0].add(&IntPoly::constant(other.coeff(k)));
                }
                bv_trim(cur)
            }
            AnnKind::Product => (0..=m)
                .map(|zk| IntPoly::constant(other.coeff(m - zk)).mul(&IntPoly::x().pow_x(m - zk)))
                .collect(),
            AnnKind::Ratio => (0..=m)
                .map(|k| IntPoly::constant(other.coeff(k)).mul(&IntPoly::x().pow_x(k)))
                .collect(),
        }
    }

    impl IntPoly {
        /// X^k helper for test construction.
        fn pow_x(&self, k: usize) -> IntPoly {
            let mut acc = IntPoly::one();
            for _ in 0..k {
                acc = acc.mul(self);
            }
            acc
        }
    }

    /// det of the Sylvester matrix of (outer in Z, inner in Z with IntPoly
    /// coefficients) by fraction-free Bareiss elimination.
    fn resultant_bivar(outer: &IntPoly, inner: &Bivar) -> IntPoly {
        let n = outer.degree().unwrap();
        let m = inner.len() - 1;
        let s = n + m;
        let mut mat = alloc::vec![alloc::vec![IntPoly::zero(); s]; s];
        for row in 0..m {
            for k in 0..=n {
                mat[row][row + k] = IntPoly::constant(outer.coeff(n - k));
            }
        }
        for row in 0..n {
            for k in 0..=m {
                mat[m + row][row + k] = inner[m - k].clone();
            }
        }
        let mut sign = false;
        let mut prev = IntPoly::one();
        for k in 0..s - 1 {
            if mat[k][k].is_zero() {
                let swap = (k + 1..s).find(|&i| !mat[i][k].is_zero());
                match swap {
                    Some(i) => {
                        mat.swap(k, i);
                        sign = !sign;
                    }
                    None => return IntPoly::zero(),
                }
            }
            for i in k + 1..s {
                for j in k + 1..s {
                    let num = mat[k][k].mul(&mat[i][j]).sub(&mat[i][k].mul(&mat[k][j]));
                    mat[i][j] = num.exact_divide(&prev).expect("Bareiss division is exact");
                }
                mat[i][k] = IntPoly::zero();
            }
            prev = mat[k][k].clone();
        }
        let det = mat[s - 1][s - 1].clone();
        if sign {
            det.neg()
        } else {
            det
        }
    }

    fn sum_annihilator_reference(p: &IntPoly, q: &IntPoly, eps: Epsilon) -> IntPoly {
        let qt = reflect(q, eps);
        resultant_bivar(p, &inner_bivar(AnnKind::Sum, &qt))
    }

    fn product_annihilator_reference(p: &IntPoly, q: &IntPoly, eps: Epsilon) -> IntPoly {
        match eps {
            Epsilon::Plus => {
                let (vp, p1) = p.split_zero_roots();
                let (vq, q1) = q.split_zero_roots();
                let zeros =
                    p.degree().unwrap() * q.degree().unwrap()
                        - (p.degree().unwrap() - vp) * (q.degree().unwrap() - vq);
                let core = match (p1.degree().unwrap(), q1.degree().unwrap()) {
                    (0, 0) => IntPoly::one(),
                    (0, m1) => IntPoly::constant(p1.coeff(0).pow(m1 as u32)),
                    (n1, 0) => IntPoly::constant(q1.coeff(0).pow(n1 as u32)),
                    _ => resultant_bivar(&p1, &inner_bivar(AnnKind::Product, &q1)),
                };
                core.mul_xpow(zeros)
            }
            Epsilon::Minus => {
                let (vp, p1) = p.split_zero_roots();
                let m = q.degree().unwrap();
                let core = if p1.is_constant() {
                    IntPoly::one()
                } else {
                    resultant_bivar(q, &inner_bivar(AnnKind::Ratio, &p1))
                        .primitive_part()
                        .normalize_sign()
                };
                core.mul_xpow(vp * m)
            }
        }
    }

    #[test]
    fn canonical_representation() {
        let p = IntPoly::new(alloc::vec![
            BigInt::from(1),
            BigInt::from(2),
            BigInt::from(0),
            BigInt::from(0)
        ]);
        assert_eq!(p.degree(), Some(1));
        assert!(IntPoly::zero().is_zero());
        assert_eq!(IntPoly::zero().degree(), None);
        assert_eq!(poly(&[7]).degree(), Some(0));
    }

    #[test]
    fn ring_operations() {
        let a = poly(&[-1, 0, 1]); // X^2 - 1
        let b = poly(&[1, 1]); // X + 1
        let c = poly(&[-1, 1]); // X - 1
        assert_eq!(b.mul(&c), a);
        assert_eq!(a.add(&b), poly(&[0, 1, 1]));
        assert_eq!(a.sub(&a), IntPoly::zero());
        assert_eq!(a.mul(&IntPoly::zero()), IntPoly::zero());
        assert_eq!(a.derivative(), poly(&[0, 2]));
        assert_eq!(poly(&[5]).derivative(), IntPoly::zero());
    }

    #[test]
    fn evaluation() {
        let p = poly(&[-5, 1]); // X - 5
        assert_eq!(p.eval_bigint(&BigInt::from(5)), BigInt::zero());
        assert_eq!(p.eval_bigint(&BigInt::from(7)), BigInt::from(2));

        let i = AppComplex::new(BigFloat::zero(), BigFloat::one(), 128);
        let x_at_i = IntPoly::x().eval_complex(&i);
        assert!(x_at_i.re().is_zero());
        assert_eq!(x_at_i.im().cmp_value(&BigFloat::one()), Ordering::Equal);

        // (X^4 - 10X^2 + 1) at sqrt(2) + sqrt(3) vanishes
        let p = poly(&[1, 0, -10, 0, 1]);
        let s = BigFloat::from_i64(2)
            .sqrt(280)
            .add(&BigFloat::from_i64(3).sqrt(280));
        let v = p.eval_complex(&AppComplex::from_real(s, 256));
        assert!(v.abs().log2_floor().unwrap_or(i64::MIN) < -133); // < 1e-40
    }

    #[test]
    fn display_formatting() {
        assert_eq!(alloc::format!("{}", poly(&[-5, 0, 3])), "3*X^2 - 5");
        assert_eq!(alloc::format!("{}", poly(&[1, -1])), "-X + 1");
        assert_eq!(alloc::format!("{}", IntPoly::zero()), "0");
    }

    #[test]
    fn content_and_primitive() {
        let p = poly(&[6, -9, 12]);
        assert_eq!(p.content(), BigInt::from(3));
        assert_eq!(p.primitive_part(), poly(&[2, -3, 4]));
        let n = poly(&[-6, 0, -12]);
        assert_eq!(n.content(), BigInt::from(6));
        assert_eq!(n.primitive_part(), poly(&[-1, 0, -2]));
    }

    #[test]
    fn exact_division() {
        let p = poly(&[-1, 0, 1]);
        assert_eq!(p.exact_divide(&poly(&[-1, 1])), Some(poly(&[1, 1])));
        assert_eq!(poly(&[1, 0, 1]).exact_divide(&poly(&[-1, 1])), None);
        // quartic against a non-factor quadratic
        let quartic = poly(&[1, 0, -10, 0, 1]);
        assert_eq!(quartic.exact_divide(&poly(&[-1, -2, 1])), None);
        // non-monic divisor dividing exactly
        let prod = poly(&[1, 2]).mul(&poly(&[3, -1, 5]));
        assert_eq!(prod.exact_divide(&poly(&[1, 2])), Some(poly(&[3, -1, 5])));
        // non-monic divisor whose leading coefficient blocks division
        assert_eq!(poly(&[0, 0, 1]).exact_divide(&poly(&[1, 2])), None);
        assert_eq!(IntPoly::zero().exact_divide(&poly(&[1, 2])), Some(IntPoly::zero()));
    }

    #[test]
    fn gcd_subresultant() {
        let a = poly(&[1, 1]).pow_x(2).mul(&poly(&[-2, 1]));
        let b = poly(&[1, 1]).mul(&poly(&[5, 0, 0, 1]));
        assert_eq!(a.gcd(&b), poly(&[1, 1]));
        // content factors participate
        let a6 = poly(&[6, 6]);
        let b4 = poly(&[4, 8, 4]);
        assert_eq!(a6.gcd(&b4), poly(&[2, 2]));
        // coprime
        assert_eq!(poly(&[-1, 1]).gcd(&poly(&[1, 1])), IntPoly::one());
        // sign normalization
        assert_eq!(poly(&[-1, -1]).gcd(&poly(&[-1, -1])), poly(&[1, 1]));
        assert_eq!(IntPoly::zero().gcd(&poly(&[-2, -4])), poly(&[2, 4]));
    }

    #[test]
    fn squarefree_part_drops_multiplicity() {
        let p = poly(&[1, 1]).pow_x(2).mul(&poly(&[-2, 1]));
        assert_eq!(p.squarefree_part(), poly(&[1, 1]).mul(&poly(&[-2, 1])));
        let q = poly(&[0, 0, 0, 2]); // 2X^3
        assert_eq!(q.squarefree_part(), poly(&[0, 1]));
        assert_eq!(poly(&[4]).squarefree_part(), IntPoly::one());
    }

    #[test]
    fn root_transforms() {
        // roots of X^2 - 2 scaled by 3: X^2 - 18
        assert_eq!(poly(&[-2, 0, 1]).scale_roots(&BigInt::from(3)), poly(&[-18, 0, 1]));
        // 3X^2 - 2 made monic by scaling roots by 3: X^2 - 6
        let (m, lc) = poly(&[-2, 0, 3]).monic_scaled();
        assert_eq!(m, poly(&[-6, 0, 1]));
        assert_eq!(lc, BigInt::from(3));
        let (m, lc) = poly(&[-7, 0, 0, 1]).monic_scaled();
        assert_eq!(m, poly(&[-7, 0, 0, 1]));
        assert!(lc.is_one());
    }

    #[test]
    fn sum_annihilator_linear_and_quadratic() {
        let a = sum_annihilator(&poly(&[-2, 1]), &poly(&[-3, 1]), Epsilon::Plus);
        assert_eq!(a, poly(&[-5, 1]));
        let d = sum_annihilator(&poly(&[-2, 1]), &poly(&[-3, 1]), Epsilon::Minus);
        assert_eq!(d, poly(&[1, 1]));
        let q = sum_annihilator(&poly(&[-2, 0, 1]), &poly(&[-3, 0, 1]), Epsilon::Plus);
        assert_eq!(q, poly(&[1, 0, -10, 0, 1]));
        // ε = −1 gives the same quartic by the ± symmetry of the roots
        let q2 = sum_annihilator(&poly(&[-2, 0, 1]), &poly(&[-3, 0, 1]), Epsilon::Minus);
        assert_eq!(q2, poly(&[1, 0, -10, 0, 1]));
    }

    #[test]
    fn product_annihilator_linear_and_quadratic() {
        let a = product_annihilator(&poly(&[-2, 1]), &poly(&[-3, 1]), Epsilon::Plus).unwrap();
        assert_eq!(a, poly(&[-6, 1]));
        let r = product_annihilator(&poly(&[-6, 1]), &poly(&[-3, 1]), Epsilon::Minus).unwrap();
        assert_eq!(r, poly(&[-2, 1]));
        let q = product_annihilator(&poly(&[-2, 0, 1]), &poly(&[-3, 0, 1]), Epsilon::Plus).unwrap();
        assert_eq!(q, poly(&[36, 0, -12, 0, 1]));
        assert_eq!(q, poly(&[-6, 0, 1]).mul(&poly(&[-6, 0, 1])));
    }

    #[test]
    fn annihilators_with_rational_roots_track_leading_coefficients() {
        // P = 2X − 1 (root 1/2), Q = 3X − 1 (root 1/3)
        let p = poly(&[-1, 2]);
        let q = poly(&[-1, 3]);
        assert_eq!(sum_annihilator(&p, &q, Epsilon::Plus), poly(&[-5, 6]));
        assert_eq!(sum_annihilator(&p, &q, Epsilon::Minus), poly(&[-1, 6]));
        assert_eq!(
            product_annihilator(&p, &q, Epsilon::Plus).unwrap(),
            poly(&[-1, 6])
        );
        // (1/2)/(1/3) = 3/2
        assert_eq!(
            product_annihilator(&p, &q, Epsilon::Minus).unwrap(),
            poly(&[-3, 2])
        );
    }

    #[test]
    fn annihilators_preserve_multiplicity() {
        let p = poly(&[-1, 1]).pow_x(2); // (X−1)^2
        let q = poly(&[-1, 1]);
        let s = sum_annihilator(&p, &q, Epsilon::Plus);
        assert_eq!(s, poly(&[-2, 1]).pow_x(2));
    }

    #[test]
    fn annihilators_handle_zero_roots() {
        let p = poly(&[0, -1, 1]); // X(X−1)
        let q = poly(&[-3, 1]);
        let prod = product_annihilator(&p, &q, Epsilon::Plus).unwrap();
        assert_eq!(prod, poly(&[0, -3, 1])); // roots {0, 3}
        let ratio = product_annihilator(&p, &q, Epsilon::Minus).unwrap();
        assert_eq!(ratio, poly(&[0, -1, 3])); // roots {0, 1/3}
        assert_eq!(
            product_annihilator(&q, &p, Epsilon::Minus),
            Err(PolyError::ZeroRootDenominator)
        );
        // all roots zero
        let xn = poly(&[0, 0, 1]);
        assert_eq!(
            product_annihilator(&xn, &q, Epsilon::Plus).unwrap(),
            poly(&[0, 0, 1])
        );
    }

    #[test]
    fn annihilator_degree_is_always_the_product() {
        let mut rng = Lcg(0x5eed_1);
        for _ in 0..12 {
            let (dp, dq) = (rng.int_in(1, 4) as usize, rng.int_in(1, 4) as usize);
            let p = rng.poly(dp, 30);
            let q = rng.poly(dq, 30);
            let s = sum_annihilator(&p, &q, Epsilon::Plus);
            assert_eq!(s.degree(), Some(dp * dq));
            let pr = product_annihilator(&p, &q, Epsilon::Plus).unwrap();
            assert_eq!(pr.degree(), Some(dp * dq));
            if !q.coeff(0).is_zero() {
                let ra = product_annihilator(&p, &q, Epsilon::Minus).unwrap();
                assert_eq!(ra.degree(), Some(dp * dq));
            }
        }
    }

    #[test]
    fn interpolation_route_agrees_with_sylvester_route() {
        // the differential test: fast evaluation–interpolation vs the
        // Bareiss determinant over Z[X], on random inputs
        let mut rng = Lcg(0xd1ff);
        for round in 0..14 {
            let (dmax, cmax) = if round < 10 { (5, 1_000_000) } else { (8, 1_000_000) };
            let dp = rng.int_in(1, dmax) as usize;
            let dq = rng.int_in(1, dmax) as usize;
            let p = rng.poly(dp, cmax);
            let q = rng.poly(dq, cmax);
            for eps in [Epsilon::Plus, Epsilon::Minus] {
                assert_eq!(
                    sum_annihilator(&p, &q, eps),
                    sum_annihilator_reference(&p, &q, eps),
                    "sum ε={} p={p} q={q}",
                    eps.as_i64()
                );
            }
            assert_eq!(
                product_annihilator(&p, &q, Epsilon::Plus).unwrap(),
                product_annihilator_reference(&p, &q, Epsilon::Plus),
                "prod p={p} q={q}"
            );
            if !q.coeff(0).is_zero() {
                assert_eq!(
                    product_annihilator(&p, &q, Epsilon::Minus).unwrap(),
                    product_annihilator_reference(&p, &q, Epsilon::Minus),
                    "ratio p={p} q={q}"
                );
            }
        }
    }

    #[test]
    fn annihilators_vanish_at_numeric_root_combinations() {
        let mut rng = Lcg(0xace5);
        let prec = 192;
        for _ in 0..6 {
            let dp = rng.int_in(1, 4) as usize;
            let dq = rng.int_in(1, 4) as usize;
            let p = rng.poly(dp, 40).squarefree_part();
            let q = rng.poly(dq, 40).squarefree_part();
            if p.is_constant() || q.is_constant() {
                continue;
            }
            let xr = p.complex_roots(prec).unwrap();
            let yr = q.complex_roots(prec).unwrap();
            let sum_p = sum_annihilator(&p, &q, Epsilon::Plus);
            let sum_m = sum_annihilator(&p, &q, Epsilon::Minus);
            let prod = product_annihilator(&p, &q, Epsilon::Plus).unwrap();
            for x in &xr {
                for y in &yr {
                    assert_vanishes(&sum_p, &x.add(y));
                    assert_vanishes(&sum_m, &x.sub(y));
                    assert_vanishes(&prod, &x.mul(y));
                }
            }
        }
    }

    /// Relative vanishing: |A(z)| is tiny against the scale of the
    /// largest term of the Horner sum.
    fn assert_vanishes(a: &IntPoly, z: &AppComplex) {
        let value = a.eval_complex(z).abs();
        // scale: Σ |a_k| |z|^k, crudely via |lead| (1+|z|)^deg
        let growth = z
            .abs()
            .add(&BigFloat::one())
            .log2_floor()
            .unwrap_or(0)
            .max(0) as u64;
        let scale_bits = a.coeffs().iter().map(|c| c.bits()).max().unwrap()
            + growth * a.degree().unwrap() as u64;
        let vanish = value.log2_floor().unwrap_or(i64::MIN);
        assert!(
            vanish < scale_bits as i64 - 60,
            "residual 2^{vanish} too large for scale 2^{scale_bits} at {z}"
        );
    }

    #[test]
    fn complex_roots_of_known_polynomials() {
        let r = poly(&[-2, 0, 1]).complex_roots(160).unwrap();
        assert_eq!(r.len(), 2);
        let sqrt2 = BigFloat::from_i64(2).sqrt(200);
        for root in &r {
            assert!(root.im().is_zero() || root.im().log2_floor().unwrap() < -150);
            let gap = root.re().abs().sub(&sqrt2).abs();
            assert!(gap.is_zero() || gap.log2_floor().unwrap() < -150);
        }
        // mixed real and complex roots
        let p = poly(&[1, 0, 1]).mul(&poly(&[-5, 1]));
        let roots = p.complex_roots(160).unwrap();
        assert_eq!(roots.len(), 3);
        let mut found_five = false;
        for root in &roots {
            let v = p.eval_complex(root);
            assert!(v.abs().log2_floor().unwrap_or(i64::MIN) < -140);
            if root.re().sub(&BigFloat::from_i64(5)).abs().cmp_value(&BigFloat::from_ratio(1, 2, 64)) == Ordering::Less {
                found_five = true;
            }
        }
        assert!(found_five);
    }

    #[test]
    fn complex_roots_match_quartic_surds() {
        let p = poly(&[1, 0, -10, 0, 1]);
        let roots = p.complex_roots(200).unwrap();
        let s2 = BigFloat::from_i64(2).sqrt(240);
        let s3 = BigFloat::from_i64(3).sqrt(240);
        let expected = [
            s2.add(&s3),
            s2.sub(&s3),
            s3.sub(&s2),
            s2.add(&s3).neg(),
        ];
        for e in &expected {
            assert!(
                roots.iter().any(|r| {
                    r.im().log2_floor().unwrap_or(i64::MIN) < -150
                        && r.re().sub(e).abs().log2_floor().unwrap_or(i64::MIN) < -150
                }),
                "missing root near {e}"
            );
        }
    }

    #[test]
    fn bivariate_sparse_map() {
        let mut phi = IntPoly2::new();
        phi.insert(3, 0, BigInt::one());
        phi.insert(0, 3, BigInt::one());
        phi.insert(2, 2, BigInt::from(-1));
        phi.insert(1, 1, BigInt::from(40));
        assert_eq!(phi.x_degree(), 3);
        assert_eq!(phi.y_degree(), 3);
        assert!(phi.is_symmetric());
        phi.insert(2, 0, BigInt::from(7));
        assert!(!phi.is_symmetric());
        phi.insert(2, 0, BigInt::zero());
        assert!(phi.is_symmetric());
        assert_eq!(phi.coeff(2, 0), BigInt::zero());
        assert_eq!(phi.terms().count(), 4);

        // evaluation: X^3 + Y^3 − X^2Y^2 + 40XY at (2, 3)
        let x = AppComplex::from_real(BigFloat::from_i64(2), 128);
        let y = AppComplex::from_real(BigFloat::from_i64(3), 128);
        let v = phi.eval(&x, &y);
        let expected = BigFloat::from_i64(8 + 27 - 36 + 240);
        assert_eq!(v.re().cmp_value(&expected), Ordering::Equal);
        assert!(v.im().is_zero());
    }
}
