//! Complex arithmetic over [`BigFloat`] with explicit precision tracking.
//!
//! An [`AppComplex`] is an approximation to a complex number, tagged with
//! the working precision in bits at which it was produced. Binary
//! operations carry the minimum of the operand precisions, so the tag is a
//! conservative record of how many bits of the value can be trusted
//! (up to the usual few-ulp slack of the underlying float kernels).

use crate::bigfloat::BigFloat;
use core::fmt;

#[derive(Debug, Clone)]
pub struct AppComplex {
    re: BigFloat,
    im: BigFloat,
    prec: u32,
}

impl AppComplex {
    pub fn new(re: BigFloat, im: BigFloat, prec: u32) -> Self {
        AppComplex {
            re: re.round(prec),
            im: im.round(prec),
            prec,
        }
    }

    pub fn from_real(re: BigFloat, prec: u32) -> Self {
        Self::new(re, BigFloat::zero(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(BigFloat::zero(), BigFloat::zero(), prec)
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        Self::new(self.re.add(&other.re), self.im.add(&other.im), prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        Self::new(self.re.sub(&other.re), self.im.sub(&other.im), prec)
    }

    pub fn neg(&self) -> Self {
        AppComplex {
            re: self.re.neg(),
            im: self.im.neg(),
            prec: self.prec,
        }
    }

    pub fn conj(&self) -> Self {
        AppComplex {
            re: self.re.clone(),
            im: self.im.neg(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        Self::new(re, im, prec)
    }

    pub fn div(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let n = other.re.mul(&other.re).add(&other.im.mul(&other.im));
        let re = self.re.mul(&other.re).add(&self.im.mul(&other.im));
        let im = self.im.mul(&other.re).sub(&self.re.mul(&other.im));
        Self::new(re.div(&n, prec + 8), im.div(&n, prec + 8), prec)
    }

    /// Multiply by a real scalar.
    pub fn scale(&self, k: &BigFloat) -> Self {
        Self::new(self.re.mul(k), self.im.mul(k), self.prec)
    }

    /// Multiply by `2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Self {
        AppComplex {
            re: self.re.ldexp(k),
            im: self.im.ldexp(k),
            prec: self.prec,
        }
    }

    /// `|self|^2`, exact in the parts.
    pub fn norm_sqr(&self) -> BigFloat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// `|self|` at the tracked precision.
    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt(self.prec)
    }

    /// `|self - other|` at the joint precision.
    pub fn dist(&self, other: &Self) -> BigFloat {
        self.sub(other).abs()
    }
}

impl PartialEq for AppComplex {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

impl fmt::Display for AppComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, self.im.abs())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}
