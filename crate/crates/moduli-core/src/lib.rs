//! Class groups of imaginary quadratic discriminants, singular moduli, and
//! certified computations with the number fields they generate.
//!
//! The crate is organised bottom-up:
//!
//! - [`forms`]: positive definite binary quadratic forms, Gauss reduction,
//!   Dirichlet composition, class numbers.
//! - [`bigfloat`] / [`complex`]: arbitrary precision binary floating point
//!   and complex arithmetic with explicit precision tracking.
//! - [`jfun`]: evaluation of the modular j-function by q-series, singular
//!   moduli, and the exponential envelope bound.
//! - [`intpoly`]: exact integer polynomial arithmetic, resultant-based
//!   annihilators for sums, differences, products and ratios of algebraic
//!   numbers, and numeric root finding.
//! - [`lll`]: all-integer LLL reduction, numeric minimal polynomials, and
//!   field membership tests.
//! - [`classpoly`]: Hilbert class polynomials and small modular polynomials,
//!   with certified integer rounding.
//! - [`orbits`]: partition of the roots of an exact annihilator into
//!   Galois orbits, certified by exact divisibility.
//! - [`degrees`]: degrees of the fields generated by pairs of singular
//!   moduli and by their sums, differences, products and ratios.
//! - [`verify`]: sweep drivers, explicit threshold inequalities, and the
//!   dihedral-type group checks.
//!
//! Everything here is `no_std` (with `alloc`); IO, parallel drivers and the
//! command line live in the companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub(crate) mod arith;

pub mod bigfloat;
pub mod classpoly;
pub mod complex;
pub mod degrees;
pub mod forms;
pub mod intpoly;
pub mod jfun;
pub mod lll;
pub(crate) mod membership;
pub mod orbits;
pub mod verify;
