//! Arbitrary precision binary floating point on `BigInt` mantissas.
//!
//! A [`BigFloat`] is `mant * 2^exp` with the mantissa kept odd (or zero), so
//! every value has exactly one representation and `==` is value equality.
//! Addition, subtraction and multiplication are exact; callers bound growth
//! with [`BigFloat::round`], which rounds to a requested number of mantissa
//! bits (nearest, ties away from zero). Division and square root take the
//! target precision explicitly.
//!
//! [`FloatCtx`] caches `π` and `ln 2` at a working precision and provides
//! the transcendental kernels (`exp`, `sin_cos`) built from them. All
//! routines keep a generous internal guard, so results are accurate to a
//! few ulps at the context precision; callers that need certified
//! comparisons recompute at higher precision rather than tracking exact
//! error bounds.

use alloc::string::{String, ToString};
use core::cmp::Ordering;
use core::fmt;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Roots;
use num_traits::{Signed, ToPrimitive, Zero};

/// A dyadic float `mant * 2^exp`, mantissa odd or zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

impl BigFloat {
    fn normalized(mut mant: BigInt, mut exp: i64) -> Self {
        if mant.is_zero() {
            return BigFloat {
                mant,
                exp: 0,
            };
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            mant >>= tz;
            exp += tz as i64;
        }
        BigFloat { mant, exp }
    }

    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        BigFloat::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::normalized(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::normalized(v.clone(), 0)
    }

    /// `v * 2^exp`.
    pub fn from_scaled(v: BigInt, exp: i64) -> Self {
        Self::normalized(v, exp)
    }

    /// `n / d` to `prec` bits.
    pub fn from_ratio(n: i64, d: i64, prec: u32) -> Self {
        BigFloat::from_i64(n).div(&BigFloat::from_i64(d), prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// Number of mantissa bits.
    pub fn mant_bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |self|)`, or `None` for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.mant.bits() as i64 - 1 + self.exp)
        }
    }

    /// Rounds to at most `prec` mantissa bits, nearest, ties away from zero.
    pub fn round(&self, prec: u32) -> Self {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let k = bits - prec as u64;
        let (sign, mag) = (self.mant.sign(), self.mant.magnitude());
        let half = BigUint::from(1u8) << (k - 1);
        let rounded = (mag + half) >> k;
        Self::normalized(
            BigInt::from_biguint(sign, rounded),
            self.exp + k as i64,
        )
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// `self * 2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Exact sum. Exponents are aligned in full, so adding values of wildly
    /// different scale is costly; round afterwards.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (lo, hi) = if self.exp <= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = (hi.exp - lo.exp) as u64;
        Self::normalized((&hi.mant << shift) + &lo.mant, lo.exp)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::normalized(&self.mant * &other.mant, self.exp + other.exp)
    }

    /// Product rounded to `prec` bits.
    pub fn mul_round(&self, other: &Self, prec: u32) -> Self {
        self.mul(other).round(prec)
    }

    /// Quotient, accurate to `prec` bits (relative error below `2^(1-prec)`).
    pub fn div(&self, other: &Self, prec: u32) -> Self {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let nb = self.mant.bits() as i64;
        let db = other.mant.bits() as i64;
        let s = (prec as i64 + 2 + db - nb).max(0) as u64;
        let t = (&self.mant << s) / &other.mant;
        Self::normalized(t, self.exp - other.exp - s as i64).round(prec)
    }

    /// Square root to `prec` bits. Panics on negative input.
    pub fn sqrt(&self, prec: u32) -> Self {
        assert!(!self.is_negative(), "sqrt of negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let bits = self.mant.bits() as i64;
        // Scale the mantissa to >= 2*prec+4 bits with an even exponent shift.
        let mut t = (2 * prec as i64 + 4 - bits).max(0);
        if (self.exp - t) % 2 != 0 {
            t += 1;
        }
        let scaled: BigUint = self.mant.magnitude() << (t as u64);
        let root = scaled.sqrt();
        Self::normalized(BigInt::from(root), (self.exp - t) / 2).round(prec)
    }

    /// Nearest integer (ties away from zero).
    pub fn to_integer_rounded(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mant << self.exp as u64;
        }
        let k = (-self.exp) as u64;
        let (sign, mag) = (self.mant.sign(), self.mant.magnitude());
        if mag.bits() <= k {
            // |self| < 1; round the single remaining bit.
            let half = BigUint::from(1u8) << (k - 1);
            let r = (mag + &half) >> k;
            return BigInt::from_biguint(sign, r);
        }
        let half = BigUint::from(1u8) << (k - 1);
        BigInt::from_biguint(sign, (mag + half) >> k)
    }

    /// Distance to the nearest integer, exact.
    pub fn dist_to_integer(&self) -> BigFloat {
        let n = self.to_integer_rounded();
        self.sub(&BigFloat::from_bigint(&n)).abs()
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        let ls = self.mant.sign();
        let rs = other.mant.sign();
        if ls != rs {
            return if ls == Sign::Minus || rs == Sign::Plus {
                Ordering::Less
            } else {
                Ordering::Greater
            };
        }
        if ls == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes via log2 bounds first to
        // avoid aligning wildly different exponents.
        let lm = self.mant.bits() as i64 + self.exp;
        let rm = other.mant.bits() as i64 + other.exp;
        let mag = if lm != rm {
            (lm.cmp(&rm) == Ordering::Greater) ^ (ls == Sign::Minus)
        } else {
            let diff = self.sub(other);
            if diff.is_zero() {
                return Ordering::Equal;
            }
            !diff.is_negative()
        };
        if mag {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// Scientific decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        use alloc::format;
        if self.is_zero() {
            return String::from("0");
        }
        let digits = digits.max(1) as i64;
        // e10 ~ floor(log10 |self|)
        let log2 = self.mant.bits() as i64 - 1 + self.exp;
        let mut e10 = (log2 as i128 * 30103 / 100000) as i64;
        if log2 < 0 {
            e10 -= 1;
        }
        loop {
            // D = round(|self| * 10^(digits-1-e10)), should have `digits` digits.
            let k = digits - 1 - e10;
            let mag = BigFloat {
                mant: BigInt::from_biguint(Sign::Plus, self.mant.magnitude().clone()),
                exp: self.exp,
            };
            let pow10 = BigInt::from(10u8).pow(k.unsigned_abs() as u32);
            let scaled = if k >= 0 {
                mag.mul(&BigFloat::from_bigint(&pow10))
            } else {
                mag.div(&BigFloat::from_bigint(&pow10), (self.mant.bits() as u32).max(64) + 64)
            };
            let d = scaled.to_integer_rounded();
            let s = d.to_string();
            if s.len() as i64 > digits {
                e10 += 1;
                continue;
            }
            if (s.len() as i64) < digits {
                e10 -= 1;
                continue;
            }
            let sign = if self.is_negative() { "-" } else { "" };
            let (head, tail) = s.split_at(1);
            return if tail.is_empty() {
                format!("{sign}{head}e{e10}")
            } else {
                format!("{sign}{head}.{tail}e{e10}")
            };
        }
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(12))
    }
}

/// Working context for transcendental evaluation: a precision plus cached
/// `π` and `ln 2` at that precision (with internal guard bits).
pub struct FloatCtx {
    prec: u32,
    pi: BigFloat,
    ln2: BigFloat,
}

/// Guard bits used by the context kernels.
const GUARD: u32 = 64;

impl FloatCtx {
    pub fn new(prec: u32) -> Self {
        let prec = prec.max(32);
        let work = prec + GUARD;
        FloatCtx {
            prec,
            pi: compute_pi(work),
            ln2: compute_ln2(work),
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// π rounded to the context precision.
    pub fn pi(&self) -> BigFloat {
        self.pi.round(self.prec)
    }

    /// `ln 2` rounded to the context precision.
    pub fn ln2(&self) -> BigFloat {
        self.ln2.round(self.prec)
    }

    /// `e^x`, accurate to a few ulps at the context precision.
    pub fn exp(&self, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return BigFloat::one();
        }
        let p = self.prec + GUARD;
        // x = n ln2 + r with |r| <= (ln2 + eps)/2
        let n_f = x.div(&self.ln2, 64);
        let n = n_f.to_integer_rounded();
        let n_i64 = n.to_i64().expect("exponent of e^x out of range");
        let r = x.sub(&self.ln2.mul(&BigFloat::from_bigint(&n))).round(p);
        // Halve the argument s times, run the Taylor series, square s times.
        let s = halving_steps(p);
        let t = r.ldexp(-(s as i64));
        let mut acc = BigFloat::one();
        let mut term = BigFloat::one();
        let mut j = 1i64;
        loop {
            term = term.mul(&t).div(&BigFloat::from_i64(j), p);
            acc = acc.add(&term).round(p);
            if term.is_zero() || term.log2_floor().unwrap() < -(p as i64) {
                break;
            }
            j += 1;
        }
        for _ in 0..s {
            acc = acc.mul(&acc).round(p);
        }
        acc.ldexp(n_i64).round(self.prec)
    }

    /// `(sin x, cos x)`, accurate to a few ulps at the context precision.
    /// Intended for arguments within a few multiples of 2π; the range
    /// reduction is exact but loses relative accuracy for huge inputs.
    pub fn sin_cos(&self, x: &BigFloat) -> (BigFloat, BigFloat) {
        let s = halving_steps(self.prec + GUARD);
        let p = self.prec + GUARD + s;
        let two_pi = self.pi.ldexp(1);
        let q = x.div(&two_pi, 64).to_integer_rounded();
        let r = x.sub(&two_pi.mul(&BigFloat::from_bigint(&q))).round(p);
        let t = r.ldexp(-(s as i64));
        // Taylor for sin and cos of the reduced argument.
        let t2 = t.mul(&t).round(p);
        let mut sin = t.clone();
        let mut cos = BigFloat::one();
        let mut term_s = t;
        let mut term_c = BigFloat::one();
        let mut k = 1i64;
        loop {
            // term_c: (-1)^k t^(2k) / (2k)!, term_s: (-1)^k t^(2k+1) / (2k+1)!
            term_c = term_c
                .mul(&t2)
                .div(&BigFloat::from_i64((2 * k - 1) * (2 * k)), p)
                .neg();
            term_s = term_s
                .mul(&t2)
                .div(&BigFloat::from_i64((2 * k) * (2 * k + 1)), p)
                .neg();
            cos = cos.add(&term_c).round(p);
            sin = sin.add(&term_s).round(p);
            let done = |t: &BigFloat| t.is_zero() || t.log2_floor().unwrap() < -(p as i64);
            if done(&term_c) && done(&term_s) {
                break;
            }
            k += 1;
        }
        // Double the angle back: sin 2t = 2 sin t cos t, cos 2t = 1 - 2 sin^2 t.
        let one = BigFloat::one();
        for _ in 0..s {
            let new_sin = sin.mul(&cos).ldexp(1).round(p);
            let new_cos = one.sub(&sin.mul(&sin).ldexp(1)).round(p);
            sin = new_sin;
            cos = new_cos;
        }
        (sin.round(self.prec), cos.round(self.prec))
    }

    /// `e^(π sqrt(n))` for integer `n >= 0`.
    pub fn exp_pi_sqrt(&self, n: i64) -> BigFloat {
        let root = BigFloat::from_i64(n).sqrt(self.prec + GUARD);
        self.exp(&self.pi.mul(&root).round(self.prec + GUARD))
    }
}

fn halving_steps(p: u32) -> u32 {
    (p as i64).sqrt().clamp(16, 64) as u32
}

/// Machin's formula `π = 16 atan(1/5) - 4 atan(1/239)` in fixed point.
fn compute_pi(prec: u32) -> BigFloat {
    let p = prec + 32;
    let acc = atan_inv_fixed(5, p).ldexp(4).sub(&atan_inv_fixed(239, p).ldexp(2));
    acc.round(prec)
}

/// `atan(1/k)` as a fixed-point sum, `k >= 2`.
fn atan_inv_fixed(k: i64, p: u32) -> BigFloat {
    let one = BigInt::from(1u8) << p;
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut power = &one / BigInt::from(k);
    let mut acc = power.clone();
    let mut j = 1i64;
    loop {
        power = &power / &k2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * j + 1);
        if j % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
        j += 1;
    }
    BigFloat::from_scaled(acc, -(p as i64))
}

/// `ln 2 = 2 atanh(1/3)` as a fixed-point sum.
fn compute_ln2(prec: u32) -> BigFloat {
    let p = prec + 32;
    let one = BigInt::from(1u8) << p;
    let mut power = &one / BigInt::from(3);
    let mut acc = power.clone();
    let mut j = 1i64;
    loop {
        power = &power / BigInt::from(9);
        if power.is_zero() {
            break;
        }
        acc += &power / BigInt::from(2 * j + 1);
        j += 1;
    }
    BigFloat::from_scaled(acc, -(p as i64) + 1).round(prec)
}
