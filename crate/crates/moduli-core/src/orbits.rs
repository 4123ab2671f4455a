//! Partition of an integer polynomial's roots into rational orbits.
//!
//! Given an exact annihilator, the squarefree part is factored over the
//! rationals by a knapsack lattice: a subset of roots multiplies out to
//! an integer polynomial exactly when all its power sums are integers,
//! so the integer vectors whose weighted power sums are near-integral
//! form a lattice spanned by the orbit indicators. LLL recovers that
//! lattice from one reduction; each resulting part is then certified by
//! expanding its factor, rounding, and exact division back into the
//! input. Certification failures climb a precision ladder.
//!
//! A caller that already knows a candidate grouping (for example from a
//! group action on the roots) can pass it as a hint. The hint skips the
//! lattice step and its steep precision demands; the expand-round-divide
//! certification still runs in full, so a wrong hint is rejected rather
//! than trusted.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::bigfloat::BigFloat;
use crate::complex::AppComplex;
use crate::intpoly::IntPoly;
use crate::lll::{lll_reduce, IntBasis, LatticeError};

/// Errors from root partitioning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitError {
    /// No attempt on the precision ladder produced a certified partition.
    PrecisionExhausted,
    /// The lattice reduction was cancelled or failed structurally.
    Lattice(LatticeError),
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitError::PrecisionExhausted => {
                write!(f, "no certified partition within the precision ladder")
            }
            OrbitError::Lattice(e) => write!(f, "lattice failure: {e}"),
        }
    }
}

/// The distinct roots of a polynomial's squarefree part, grouped into
/// rational orbits, with one certified integer factor per group.
#[derive(Debug, Clone)]
pub struct RootPartition {
    roots: Vec<AppComplex>,
    parts: Vec<Vec<usize>>,
    factors: Vec<IntPoly>,
    prec_used: u32,
}

impl RootPartition {
    /// Distinct roots, in the order referenced by [`parts`].
    ///
    /// [`parts`]: RootPartition::parts
    pub fn roots(&self) -> &[AppComplex] {
        &self.roots
    }

    /// Disjoint index sets covering every root exactly once.
    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    /// Primitive integer factor with positive leading coefficient whose
    /// roots are exactly the corresponding part.
    pub fn factors(&self) -> &[IntPoly] {
        &self.factors
    }

    pub fn prec_used(&self) -> u32 {
        self.prec_used
    }

    /// Index of the part whose root is nearest to `w`, provided the
    /// match is unambiguous: the distance must be below
    /// `2^{-prec/8}` relative to the value's size.
    pub fn part_of_value(&self, w: &AppComplex) -> Option<usize> {
        let mut best: Option<(usize, BigFloat)> = None;
        for (i, r) in self.roots.iter().enumerate() {
            let d = w.dist(r);
            if best
                .as_ref()
                .map_or(true, |(_, b)| d.cmp_value(b) == Ordering::Less)
            {
                best = Some((i, d));
            }
        }
        let (idx, dist) = best?;
        let prec = w.prec().min(self.prec_used);
        let bound = w
            .abs()
            .add(&BigFloat::one())
            .ldexp(-((prec / 8) as i64));
        if dist.cmp_value(&bound) != Ordering::Less {
            return None;
        }
        self.parts.iter().position(|p| p.contains(&idx))
    }

    /// Certified factor vanishing at `w`, when `w` matches a root.
    pub fn factor_containing(&self, w: &AppComplex) -> Option<&IntPoly> {
        self.part_of_value(w).map(|p| &self.factors[p])
    }
}

/// Ladder steps of precision doubling before giving up.
const LADDER_STEPS: u32 = 3;

/// Largest squarefree degree attempted by the knapsack lattice. Above
/// this the lattice dimension and entry sizes make LLL impractical, so
/// unhinted partitions fail fast instead of stalling.
const KNAPSACK_DEGREE_LIMIT: usize = 24;

/// Partition the roots of `a` (nonzero, any leading coefficient) into
/// rational orbits at working precision `prec` or higher.
pub fn partition_roots(a: &IntPoly, prec: u32) -> Result<RootPartition, OrbitError> {
    assert!(!a.is_zero(), "cannot partition the zero polynomial");
    let sf = a.squarefree_part();
    if sf.degree() == Some(0) {
        return Ok(RootPartition {
            roots: Vec::new(),
            parts: Vec::new(),
            factors: Vec::new(),
            prec_used: prec,
        });
    }
    let (zeros, core) = sf.split_zero_roots();
    // squarefree, so at most one zero root
    debug_assert!(zeros <= 1);
    let target = sf.primitive_part().normalize_sign();
    let mut extra_constraints = 0;
    for step in 0..LADDER_STEPS {
        let base = prec << step;
        match partition_attempt(&core, &target, zeros == 1, base, extra_constraints, None, None) {
            Ok(Some(partition)) => return Ok(partition),
            Ok(None) => {
                // one widened retry per ladder step before raising precision
                extra_constraints = 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(OrbitError::PrecisionExhausted)
}

/// Working precision that the root approximations must carry for
/// [`partition_with_values`] to accept them.
pub fn partition_precision(a: &IntPoly) -> u32 {
    assert!(!a.is_zero(), "cannot partition the zero polynomial");
    let (_, core) = a.squarefree_part().split_zero_roots();
    let (monic, _) = core.monic_scaled();
    let n = monic.degree().unwrap_or(0);
    let (c_bits, k_count) = knapsack_shape(n, 4);
    let root_bits = scaled_root_bits(&monic, n);
    (c_bits + k_count as u64 * root_bits + 96).min(u32::MAX as u64) as u32
}

/// Partition the roots of `a` when approximations of all of them are
/// already known, skipping the internal root finder. `values` must
/// cover every root of `a` (repeats are fine) at precision at least
/// [`partition_precision`]`'s` answer for `a`.
pub fn partition_with_values(
    a: &IntPoly,
    values: &[AppComplex],
) -> Result<RootPartition, OrbitError> {
    partition_with_values_hinted(a, values, None)
}

/// [`partition_with_values`] with an optional candidate grouping of the
/// `values` indices into orbits. A valid hint replaces the knapsack
/// lattice, which lowers the precision requirement from
/// [`partition_precision`] to what the rounding of each expanded factor
/// needs. Hints are candidates only: every factor is still certified by
/// exact division, and a hint that fails falls back to the lattice.
pub fn partition_with_values_hinted(
    a: &IntPoly,
    values: &[AppComplex],
    hint: Option<&[Vec<usize>]>,
) -> Result<RootPartition, OrbitError> {
    assert!(!a.is_zero(), "cannot partition the zero polynomial");
    let sf = a.squarefree_part();
    if sf.degree() == Some(0) {
        let prec = values.iter().map(|v| v.prec()).min().unwrap_or(64);
        return Ok(RootPartition {
            roots: Vec::new(),
            parts: Vec::new(),
            factors: Vec::new(),
            prec_used: prec,
        });
    }
    let (zeros, core) = sf.split_zero_roots();
    debug_assert!(zeros <= 1);
    let target = sf.primitive_part().normalize_sign();
    let prec = values
        .iter()
        .map(|v| v.prec())
        .min()
        .ok_or(OrbitError::PrecisionExhausted)?;
    // collapse repeated values into one representative per distinct root,
    // remembering which representative each value landed on
    let tol_shift = -((prec / 4) as i64);
    let mut reps: Vec<AppComplex> = Vec::new();
    let mut rep_of: Vec<Option<usize>> = Vec::with_capacity(values.len());
    let mut saw_zero = false;
    for v in values {
        let bound = v.abs().add(&BigFloat::one()).ldexp(tol_shift);
        if v.abs().cmp_value(&bound) == Ordering::Less {
            saw_zero = true;
            rep_of.push(None);
            continue;
        }
        match reps
            .iter()
            .position(|r| v.dist(r).cmp_value(&bound) == Ordering::Less)
        {
            Some(k) => rep_of.push(Some(k)),
            None => {
                rep_of.push(Some(reps.len()));
                reps.push(v.clone());
            }
        }
    }
    // the distinct values must match the squarefree root count exactly;
    // anything else means the supplied precision cannot separate them
    if reps.len() != core.degree().unwrap_or(0) || saw_zero != (zeros == 1) {
        return Err(OrbitError::PrecisionExhausted);
    }

    if let Some(groups) = hint {
        if let Some(rep_groups) = hint_to_rep_groups(groups, &rep_of, reps.len()) {
            if prec >= hinted_precision_floor(&core, &reps, &rep_groups) {
                match partition_attempt(
                    &core,
                    &target,
                    zeros == 1,
                    prec,
                    0,
                    Some(&reps),
                    Some(&rep_groups),
                ) {
                    Ok(Some(partition)) => return Ok(partition),
                    Ok(None) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }

    if prec < partition_precision(a) || core.degree().unwrap_or(0) > KNAPSACK_DEGREE_LIMIT {
        return Err(OrbitError::PrecisionExhausted);
    }
    for extra_constraints in [0usize, 2, 4] {
        match partition_attempt(
            &core,
            &target,
            zeros == 1,
            prec,
            extra_constraints,
            Some(&reps),
            None,
        ) {
            Ok(Some(partition)) => return Ok(partition),
            Ok(None) => {}
            Err(e) => return Err(e),
        }
    }
    Err(OrbitError::PrecisionExhausted)
}

/// Translate a hint over value indices into disjoint groups of
/// representative indices. Values that collapsed to one representative
/// may appear in several hint groups as long as those groups agree as
/// representative sets; zero values are carried by the separate zero
/// factor and drop out. `None` means the hint does not describe a
/// partition of the representatives.
fn hint_to_rep_groups(
    groups: &[Vec<usize>],
    rep_of: &[Option<usize>],
    rep_count: usize,
) -> Option<Vec<Vec<usize>>> {
    let mut rep_groups: Vec<Vec<usize>> = Vec::new();
    for group in groups {
        let mut set: Vec<usize> = Vec::new();
        for &vi in group {
            let &mapped = rep_of.get(vi)?;
            if let Some(r) = mapped {
                if !set.contains(&r) {
                    set.push(r);
                }
            }
        }
        if set.is_empty() {
            continue;
        }
        set.sort_unstable();
        if !rep_groups.contains(&set) {
            rep_groups.push(set);
        }
    }
    // disjointness and full coverage of the representatives
    let mut seen = alloc::vec![false; rep_count];
    for group in &rep_groups {
        for &r in group {
            if core::mem::replace(&mut seen[r], true) {
                return None;
            }
        }
    }
    if seen.iter().all(|&s| s) {
        Some(rep_groups)
    } else {
        None
    }
}

/// Precision needed to round the expanded factors of a hinted grouping:
/// the largest group size times the bit size of the scaled roots, plus
/// headroom. Far below [`partition_precision`] because no lattice is
/// involved.
fn hinted_precision_floor(core: &IntPoly, reps: &[AppComplex], groups: &[Vec<usize>]) -> u32 {
    let (_, lc) = core.monic_scaled();
    let root_bits = reps
        .iter()
        .filter_map(|v| v.abs().add(&BigFloat::one()).log2_floor())
        .max()
        .unwrap_or(0)
        .max(0) as u64
        + lc.bits()
        + 3;
    let max_group = groups.iter().map(Vec::len).max().unwrap_or(1) as u64;
    (max_group * root_bits + 96).min(u32::MAX as u64) as u32
}

/// Constraint count and scaling bits of the knapsack lattice for an
/// `n`-root instance.
fn knapsack_shape(n: usize, extra_constraints: usize) -> (u64, usize) {
    let c_bits = 64 + n as u64;
    // Pseudo-relations (simultaneous approximations) live near norm
    // C^{2K/(n+2K)}; keeping K of order n/6 puts that floor well above
    // the detection threshold 2^{c_bits/4}.
    let k_count = 3usize
        .max(n.div_ceil(6) + 1)
        .max((5 * n + 128).div_ceil(c_bits as usize))
        + extra_constraints;
    (c_bits, k_count)
}

/// Bit bound on the scaled roots via the Cauchy bound of the monic poly.
fn scaled_root_bits(monic: &IntPoly, n: usize) -> u64 {
    (0..n).map(|k| monic.coeff(k).bits()).max().unwrap_or(0) + 2
}

/// One partition attempt. `Ok(None)` asks the caller to escalate.
/// `supplied` carries known roots of the original polynomial, if any;
/// `grouping_override` carries a hinted orbit candidate over their
/// indices, bypassing the knapsack lattice but not the certification.
fn partition_attempt(
    core: &IntPoly,
    target: &IntPoly,
    has_zero_root: bool,
    prec: u32,
    extra_constraints: usize,
    supplied: Option<&[AppComplex]>,
    grouping_override: Option<&[Vec<usize>]>,
) -> Result<Option<RootPartition>, OrbitError> {
    let (monic, lc) = core.monic_scaled();
    let n = monic.degree().unwrap_or(0);
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut factors: Vec<IntPoly> = Vec::new();
    let mut roots: Vec<AppComplex> = Vec::new();

    let (c_bits, k_count) = knapsack_shape(n, extra_constraints);
    let work = if grouping_override.is_some() {
        prec
    } else {
        let root_bits = scaled_root_bits(&monic, n);
        (prec as u64)
            .max(c_bits + k_count as u64 * root_bits + 96)
            .min(u32::MAX as u64) as u32
    };

    let scaled_roots = if n == 0 {
        Vec::new()
    } else if let Some(values) = supplied {
        let lc_float = BigFloat::from_bigint(&lc);
        values.iter().map(|v| v.scale(&lc_float)).collect()
    } else {
        match monic.complex_roots(work) {
            Ok(r) => r,
            Err(_) => return Ok(None),
        }
    };

    if n > 0 {
        let grouping = if let Some(g) = grouping_override {
            g.to_vec()
        } else if n == 1 {
            alloc::vec![alloc::vec![0usize]]
        } else {
            match knapsack_grouping(&scaled_roots, n, c_bits, k_count)? {
                Some(g) => g,
                None => return Ok(None),
            }
        };
        // expand each group over the scaled roots, then undo the scaling
        for group in grouping {
            let mut poly = alloc::vec![AppComplex::from_real(BigFloat::one(), work)];
            for &i in &group {
                poly = mul_linear(&poly, &scaled_roots[i], work);
            }
            let Some(scaled_factor) = round_to_int_poly(&poly) else {
                return Ok(None);
            };
            factors.push(unscale_roots(&scaled_factor, &lc));
            parts.push(group);
        }
        let inv_lc = BigFloat::one().div(&BigFloat::from_bigint(&lc), work);
        roots = scaled_roots.iter().map(|r| r.scale(&inv_lc)).collect();
    }

    if has_zero_root {
        parts.push(alloc::vec![roots.len()]);
        roots.push(AppComplex::zero(work));
        factors.push(IntPoly::from_i64s(&[0, 1]));
    }

    // completeness: the certified factors must multiply back to the
    // squarefree part exactly
    let mut quotient = target.clone();
    for f in &factors {
        match quotient.exact_divide(f) {
            Some(q) => quotient = q,
            None => return Ok(None),
        }
    }
    if quotient != IntPoly::from_i64s(&[1]) {
        return Ok(None);
    }
    Ok(Some(RootPartition {
        roots,
        parts,
        factors,
        prec_used: work,
    }))
}

/// Build and reduce the knapsack lattice; group root indices by the
/// column patterns of the recovered relation space.
fn knapsack_grouping(
    roots: &[AppComplex],
    n: usize,
    c_bits: u64,
    k_count: usize,
) -> Result<Option<Vec<Vec<usize>>>, OrbitError> {
    let width = n + 2 * k_count;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + k_count);
    for (i, root) in roots.iter().enumerate() {
        let mut row = alloc::vec![BigInt::zero(); width];
        row[i] = BigInt::one();
        let mut power = root.clone();
        for k in 0..k_count {
            row[n + 2 * k] = power.re().ldexp(c_bits as i64).to_integer_rounded();
            row[n + 2 * k + 1] = power.im().ldexp(c_bits as i64).to_integer_rounded();
            power = power.mul(root);
        }
        rows.push(row);
    }
    // real power sums of a rational orbit land near arbitrary integers,
    // so those columns are reduced modulo the scale; imaginary power
    // sums must vanish outright and get no such slack
    let c = BigInt::one() << c_bits;
    for k in 0..k_count {
        let mut row = alloc::vec![BigInt::zero(); width];
        row[n + 2 * k] = c.clone();
        rows.push(row);
    }
    let reduced = lll_reduce(&IntBasis::new(rows), Ratio::new(99, 100))
        .map_err(OrbitError::Lattice)?;

    // genuine relations reduce to rows of a few bits; everything else
    // (pseudo-relations included) stays above 2^{c_bits/4} by the choice
    // of K. Misclassification is caught downstream by certification.
    let t_low = BigInt::one() << (c_bits / 4);
    let mut relations: Vec<&[BigInt]> = Vec::new();
    for row in reduced.rows() {
        let magnitude = row.iter().map(|e| e.abs()).max().unwrap();
        if magnitude <= t_low {
            relations.push(&row[..n]);
        }
    }
    if relations.is_empty() {
        return Ok(None);
    }
    let rref = rref_rational(&relations, n);
    // group columns with identical coordinate patterns
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut patterns: Vec<Vec<BigRational>> = Vec::new();
    for col in 0..n {
        let pattern: Vec<BigRational> = rref.iter().map(|r| r[col].clone()).collect();
        if pattern.iter().all(|e| e.is_zero()) {
            // uncovered root: even the all-ones relation is missing
            return Ok(None);
        }
        if let Some(p) = patterns.iter().position(|q| *q == pattern) {
            parts[p].push(col);
        } else {
            patterns.push(pattern);
            parts.push(alloc::vec![col]);
        }
    }
    Ok(Some(parts))
}

/// Reduced row echelon form over the rationals, zero rows dropped.
fn rref_rational(rows: &[&[BigInt]], n: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|c| BigRational::from(c.clone())).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        let Some(src) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, src);
        let inv = m[pivot_row][col].recip();
        for e in &mut m[pivot_row] {
            *e *= &inv;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c2 in 0..n {
                    let sub = &f * &m[pivot_row][c2];
                    m[r][c2] -= sub;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == m.len() {
            break;
        }
    }
    m.truncate(pivot_row);
    m
}

/// Multiply a dense complex polynomial by `(X − root)`.
fn mul_linear(p: &[AppComplex], root: &AppComplex, work: u32) -> Vec<AppComplex> {
    let mut out = alloc::vec![AppComplex::zero(work); p.len() + 1];
    for (i, c) in p.iter().enumerate() {
        out[i + 1] = out[i + 1].add(c);
        out[i] = out[i].sub(&c.mul(root));
    }
    out
}

/// Round a complex coefficient vector to an integer polynomial; `None`
/// when any coefficient strays from the integers by 1/4 or more.
fn round_to_int_poly(coeffs: &[AppComplex]) -> Option<IntPoly> {
    let quarter = BigFloat::from_ratio(1, 4, 8);
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if c.im().abs().cmp_value(&quarter) != Ordering::Less
            || c.re().dist_to_integer().cmp_value(&quarter) != Ordering::Less
        {
            return None;
        }
        out.push(c.re().to_integer_rounded());
    }
    Some(IntPoly::new(out))
}

/// Undo `monic_scaled`: substitute `lc·X` and strip the content, turning
/// a monic factor in the scaled variable into the primitive factor of
/// the original polynomial.
fn unscale_roots(factor: &IntPoly, lc: &BigInt) -> IntPoly {
    let n = factor.degree().unwrap_or(0);
    let coeffs: Vec<BigInt> = (0..=n)
        .map(|k| factor.coeff(k) * lc.pow(k as u32))
        .collect();
    IntPoly::new(coeffs).primitive_part().normalize_sign()
}
