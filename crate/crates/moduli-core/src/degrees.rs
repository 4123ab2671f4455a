//! Degrees of the number fields generated by singular moduli.
//!
//! For singular moduli `x`, `y` with class polynomials `H_x`, `H_y`, the
//! compositum `Q(x,y)` is reached through a primitive element `x + M·y`
//! for a separating integer `M`, and the subfield `Q(x∘y)` through the
//! exact annihilator of the chosen binary operation. Both degrees come
//! from certified factors of those annihilators; the index
//! `[Q(x,y) : Q(x∘y)]` is their exact quotient, cross-checked by an
//! exact membership test of `x` and `y` in `Q(x∘y)` carried out in the
//! pair algebra modulo many primes.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::arith::{jacobi, prime_divisors};
use crate::bigfloat::BigFloat;
use crate::classpoly::{hilbert_class_poly, policy_precision, ClassPoly, ClassPolyError};
use crate::complex::AppComplex;
use crate::forms::{is_two_elementary, reduced_forms, Discriminant, FormsError, QuadForm};
use crate::intpoly::{product_annihilator, sum_annihilator, Epsilon, IntPoly, PolyError};
use crate::jfun::{singular_modulus, NumericsError};
use crate::lll::field_membership;
use crate::membership::member_in_generated;
use crate::orbits::{
    partition_precision, partition_with_values, partition_with_values_hinted, OrbitError,
    RootPartition,
};

/// Errors from field-degree computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreesError {
    /// No precision on the internal ladder settled the computation.
    PrecisionExhausted,
    /// No separating integer `M ≤ 1000` was found for the compositum.
    NoSeparatingM,
    /// A product or ratio was requested for the zero singular modulus.
    ZeroModulus,
    /// Certified degrees failed the exact divisibility they must satisfy.
    Inconsistent,
    Forms(FormsError),
    Numerics(NumericsError),
    ClassPoly(ClassPolyError),
    Poly(PolyError),
    Orbit(OrbitError),
}

impl fmt::Display for DegreesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreesError::PrecisionExhausted => {
                write!(f, "no precision on the ladder settled the computation")
            }
            DegreesError::NoSeparatingM => {
                write!(f, "no separating integer M <= 1000 for the compositum")
            }
            DegreesError::ZeroModulus => {
                write!(f, "zero singular modulus excluded for products and ratios")
            }
            DegreesError::Inconsistent => {
                write!(f, "certified degrees violate exact divisibility")
            }
            DegreesError::Forms(e) => write!(f, "form error: {e}"),
            DegreesError::Numerics(e) => write!(f, "numeric error: {e}"),
            DegreesError::ClassPoly(e) => write!(f, "class polynomial error: {e}"),
            DegreesError::Poly(e) => write!(f, "polynomial error: {e}"),
            DegreesError::Orbit(e) => write!(f, "orbit error: {e}"),
        }
    }
}

impl From<FormsError> for DegreesError {
    fn from(e: FormsError) -> Self {
        DegreesError::Forms(e)
    }
}

impl From<NumericsError> for DegreesError {
    fn from(e: NumericsError) -> Self {
        DegreesError::Numerics(e)
    }
}

impl From<ClassPolyError> for DegreesError {
    fn from(e: ClassPolyError) -> Self {
        DegreesError::ClassPoly(e)
    }
}

impl From<PolyError> for DegreesError {
    fn from(e: PolyError) -> Self {
        DegreesError::Poly(e)
    }
}

impl From<OrbitError> for DegreesError {
    fn from(e: OrbitError) -> Self {
        DegreesError::Orbit(e)
    }
}

/// Binary operation combining two singular moduli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairOp {
    Sum,
    Diff,
    Prod,
    Ratio,
}

impl PairOp {
    pub const ALL: [PairOp; 4] = [PairOp::Sum, PairOp::Diff, PairOp::Prod, PairOp::Ratio];

    pub fn symbol(&self) -> &'static str {
        match self {
            PairOp::Sum => "+",
            PairOp::Diff => "-",
            PairOp::Prod => "*",
            PairOp::Ratio => "/",
        }
    }

    /// True for the operations that cannot accept the zero modulus.
    pub fn excludes_zero(&self) -> bool {
        matches!(self, PairOp::Prod | PairOp::Ratio)
    }
}

impl fmt::Display for PairOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PairOp::Sum => "sum",
            PairOp::Diff => "diff",
            PairOp::Prod => "prod",
            PairOp::Ratio => "ratio",
        };
        write!(f, "{name}")
    }
}

/// Memoising store of Hilbert class polynomials keyed by discriminant.
#[derive(Debug, Default, Clone)]
pub struct ClassPolyStore {
    cache: BTreeMap<i64, ClassPoly>,
}

impl ClassPolyStore {
    pub fn new() -> Self {
        Self {
            cache: BTreeMap::new(),
        }
    }

    /// Pre-seed the store, e.g. from an on-disk cache.
    pub fn insert(&mut self, poly: ClassPoly) {
        self.cache.insert(poly.disc().value(), poly);
    }

    /// Class polynomial for `disc`, computing and memoising on a miss.
    pub fn get(&mut self, disc: &Discriminant) -> Result<&ClassPoly, DegreesError> {
        if !self.cache.contains_key(&disc.value()) {
            let cp = hilbert_class_poly(disc)?;
            self.cache.insert(disc.value(), cp);
        }
        Ok(&self.cache[&disc.value()])
    }

    pub fn polys(&self) -> impl Iterator<Item = &ClassPoly> {
        self.cache.values()
    }
}

/// Largest primitive-element multiplier tried before giving up.
const MAX_SEPARATING_M: i64 = 1000;

/// Ladder steps for value-precision escalation.
const VALUE_LADDER: u32 = 3;

/// The compositum `Q(x_i, y_j)` for all conjugate pairs of two
/// discriminants, realised by the primitive elements `x_i + M·y_j` with
/// one separating `M` shared by every pair.
#[derive(Debug)]
pub struct PairField {
    m: i64,
    annihilator: IntPoly,
    partition: RootPartition,
    values: Vec<Vec<AppComplex>>,
}

impl PairField {
    /// The separating multiplier, smallest first.
    pub fn separating_m(&self) -> i64 {
        self.m
    }

    pub fn annihilator(&self) -> &IntPoly {
        &self.annihilator
    }

    pub fn partition(&self) -> &RootPartition {
        &self.partition
    }

    /// Certified degree of `Q(x_i, y_j)` over `Q`.
    pub fn degree_of(&self, i: usize, j: usize) -> Result<usize, DegreesError> {
        factor_degree(&self.partition, &self.values[i][j])
    }

    /// Certified minimal polynomial of the primitive element `x_i + M·y_j`.
    pub fn minimal_poly_of(&self, i: usize, j: usize) -> Result<&IntPoly, DegreesError> {
        self.partition
            .factor_containing(&self.values[i][j])
            .ok_or(DegreesError::PrecisionExhausted)
    }
}

/// The fields `Q(x_i ∘ y_j)` for all conjugate pairs under one binary
/// operation, carried by the certified factors of its annihilator.
#[derive(Debug)]
pub struct GeneratedField {
    op: PairOp,
    annihilator: IntPoly,
    partition: RootPartition,
    values: Vec<Vec<AppComplex>>,
}

impl GeneratedField {
    pub fn op(&self) -> PairOp {
        self.op
    }

    pub fn annihilator(&self) -> &IntPoly {
        &self.annihilator
    }

    pub fn partition(&self) -> &RootPartition {
        &self.partition
    }

    /// The combined value `x_i ∘ y_j` at the partition's precision.
    pub fn value(&self, i: usize, j: usize) -> &AppComplex {
        &self.values[i][j]
    }

    /// Certified degree of `Q(x_i ∘ y_j)` over `Q`.
    pub fn degree_of(&self, i: usize, j: usize) -> Result<usize, DegreesError> {
        factor_degree(&self.partition, &self.values[i][j])
    }

    /// Certified minimal polynomial of `x_i ∘ y_j`.
    pub fn minimal_poly_of(&self, i: usize, j: usize) -> Result<&IntPoly, DegreesError> {
        self.partition
            .factor_containing(&self.values[i][j])
            .ok_or(DegreesError::PrecisionExhausted)
    }
}

/// One conjugate pair's degree data under one operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDegreeReport {
    pub disc_x: i64,
    pub disc_y: i64,
    pub form_x: QuadForm,
    pub form_y: QuadForm,
    pub op: PairOp,
    pub deg_x: usize,
    pub deg_y: usize,
    pub deg_pair: usize,
    pub deg_generated: usize,
    pub index: usize,
    /// True when the membership cross-check agreed with the index.
    pub certified: bool,
}

fn combine(x: &AppComplex, y: &AppComplex, op: PairOp) -> AppComplex {
    match op {
        PairOp::Sum => x.add(y),
        PairOp::Diff => x.sub(y),
        PairOp::Prod => x.mul(y),
        PairOp::Ratio => x.div(y),
    }
}

fn factor_degree(partition: &RootPartition, value: &AppComplex) -> Result<usize, DegreesError> {
    let factor = partition
        .factor_containing(value)
        .ok_or(DegreesError::PrecisionExhausted)?;
    factor.degree().ok_or(DegreesError::PrecisionExhausted)
}

fn conjugate_values(
    forms: &[QuadForm],
    prec: u32,
) -> Result<Vec<AppComplex>, DegreesError> {
    forms
        .iter()
        .map(|f| singular_modulus(f, prec).map_err(DegreesError::from))
        .collect()
}

/// Partition the annihilator's roots using directly computed pair
/// values, escalating the value precision until the partition certifies.
/// With an orbit hint the starting precision comes from what the hinted
/// factors need to round, probed at low precision, instead of from the
/// much larger knapsack requirement.
fn assemble_partition(
    annihilator: &IntPoly,
    forms_x: &[QuadForm],
    forms_y: &[QuadForm],
    base: u32,
    hint: Option<&[Vec<usize>]>,
    value: impl Fn(&AppComplex, &AppComplex) -> AppComplex,
) -> Result<(RootPartition, Vec<Vec<AppComplex>>), DegreesError> {
    let floor = match hint {
        None => base.max(partition_precision(annihilator)),
        Some(groups) => {
            let xs = conjugate_values(forms_x, 128)?;
            let ys = conjugate_values(forms_y, 128)?;
            let vb = xs
                .iter()
                .flat_map(|x| ys.iter().map(|y| value_bits(&value(x, y))))
                .max()
                .unwrap_or(2);
            let lc_bits = annihilator
                .coeff(annihilator.degree().unwrap_or(0))
                .bits() as u32;
            let max_group = groups.iter().map(Vec::len).max().unwrap_or(1) as u32;
            base.max(max_group * (vb + lc_bits + 3) + 96)
        }
    };
    for step in 0..VALUE_LADDER {
        let prec = floor << step;
        let xs = conjugate_values(forms_x, prec)?;
        let ys = conjugate_values(forms_y, prec)?;
        let values: Vec<Vec<AppComplex>> = xs
            .iter()
            .map(|x| ys.iter().map(|y| value(x, y)).collect())
            .collect();
        let flat: Vec<AppComplex> = values.iter().flatten().cloned().collect();
        match partition_with_values_hinted(annihilator, &flat, hint) {
            Ok(partition) => return Ok((partition, values)),
            Err(OrbitError::PrecisionExhausted) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(DegreesError::PrecisionExhausted)
}

fn base_precision(dx: &Discriminant, dy: &Discriminant) -> u32 {
    policy_precision(dx).max(policy_precision(dy)).max(320)
}

/// Fundamental discriminant of the quadratic field `Q(√n)`, or `1` when
/// `n` is a square.
fn fundamental_of_square_class(n: i64) -> i64 {
    debug_assert!(n != 0);
    let mut kernel: i64 = if n < 0 { -1 } else { 1 };
    let mut m = n.abs();
    let mut p = 2;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            kernel *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    kernel *= m;
    if kernel.rem_euclid(4) == 1 {
        kernel
    } else {
        4 * kernel
    }
}

/// Quadratic subfields of the genus field of `d`, as sorted fundamental
/// discriminants. By genus theory for form discriminants these are the
/// fields `Q(√D₁)` over all splittings `Δ = D₁·D₂` of the discriminant
/// into two discriminants, and their compositum is the largest subfield
/// of the ring class field abelian over `Q`.
fn genus_quadratics(d: &Discriminant) -> Vec<i64> {
    let abs = d.abs();
    let mut out = Vec::new();
    let mut t = 1;
    while t * t <= abs {
        if abs % t == 0 {
            for div in [t, abs / t] {
                for d1 in [div, -div] {
                    let d2 = d.value() / d1;
                    if d1.rem_euclid(4) > 1 || d2.rem_euclid(4) > 1 {
                        continue;
                    }
                    let f = fundamental_of_square_class(d1);
                    if f != 1 && !out.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        t += 1;
    }
    out.sort_unstable();
    out
}

/// Square-class support of a fundamental discriminant: the sorted prime
/// divisors of its squarefree core, with `-1` prepended for the sign.
fn square_class_support(fund: i64) -> Vec<i64> {
    let m = if fund.rem_euclid(4) == 1 { fund } else { fund / 4 };
    let mut sup = Vec::new();
    if m < 0 {
        sup.push(-1);
    }
    sup.extend(prime_divisors(m));
    sup
}

/// Symmetric difference of two sorted support vectors.
fn support_xor(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// An `F₂`-basis of a set of fundamental discriminants under products
/// modulo squares, by Gaussian elimination on their supports.
fn square_class_basis(discs: &[i64]) -> Vec<i64> {
    let mut pivots: Vec<Vec<i64>> = Vec::new();
    let mut basis = Vec::new();
    for &d in discs {
        let mut v = square_class_support(d);
        loop {
            let Some(&p) = v.first() else { break };
            match pivots.iter().find(|bv| bv[0] == p) {
                Some(bv) => v = support_xor(&v, bv),
                None => {
                    pivots.push(v);
                    basis.push(d);
                    break;
                }
            }
        }
    }
    basis
}

/// Genus character of a form class for the quadratic subfield with
/// fundamental discriminant `fund`: the Kronecker symbol `(fund / v)`
/// at any represented value `v > 0` coprime to twice the form
/// discriminant. Well defined on classes because represented values
/// coprime to the discriminant agree on every assigned character.
fn genus_character(form: &QuadForm, fund: i64) -> Option<i64> {
    let n = 2 * form.discriminant().abs();
    for x in 0..=n {
        for y in 0..=n {
            let v = form.eval(x, y);
            if v <= 0 {
                continue;
            }
            let v = i64::try_from(v).ok()?;
            if num_integer::gcd(v, n) == 1 {
                return Some(jacobi(fund, v));
            }
        }
    }
    None
}

/// Candidate partition of the `h_x × h_y` grid of conjugate pairs into
/// Galois orbits, as groups of flattened indices `i·h_y + j`, for the
/// shapes where the class-group action settles the orbits exactly.
///
/// * Equal discriminants: the Galois group of the ring class field over
///   `Q` acts on pairs by `(a, b) ↦ (ca, cb)` and `(ca⁻¹, cb⁻¹)`, so
///   the orbit of `(a, b)` is the set of pairs whose ratio `b·a⁻¹` lies
///   in `{r, r⁻¹}`.
/// * Distinct fundamental discriminants: any common subfield of the two
///   ring class fields is abelian over `Q` (a nonabelian one would have
///   a unique abelian index-2 subgroup of exponent above two on both
///   sides, forcing the two imaginary quadratic base fields to agree),
///   hence lies in both genus fields, so the intersection is exactly
///   the compositum of the shared genus quadratics. The Galois group of
///   the compositum of the class fields is the fiber product over that
///   intersection, and its orbits on pairs are the level sets of
///   `(i, j) ↦ χ_D(a_i)·χ_D(b_j)` over a basis of shared quadratics
///   `D`, merged along the sign flip at imaginary `D` when one is
///   present (complex conjugation pairs those level sets).
///
/// Same fundamental discriminant with different conductors is left to
/// the knapsack lattice, which certifies everything itself.
fn pair_orbit_hint(dx: &Discriminant, dy: &Discriminant) -> Option<Vec<Vec<usize>>> {
    let forms_x = reduced_forms(dx);
    let forms_y = reduced_forms(dy);
    let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    if dx.value() == dy.value() {
        for (i, fi) in forms_x.iter().enumerate() {
            let inv = fi.inverse();
            for (j, fj) in forms_y.iter().enumerate() {
                let r = fj.compose(&inv).ok()?;
                let (a, b, c) = r.coefficients();
                let (ia, ib, ic) = r.inverse().coefficients();
                let key = if (a, b, c) <= (ia, ib, ic) {
                    alloc::vec![a, b, c]
                } else {
                    alloc::vec![ia, ib, ic]
                };
                groups.entry(key).or_default().push(i * forms_y.len() + j);
            }
        }
    } else if dx.fundamental() != dy.fundamental() {
        let sy = genus_quadratics(dy);
        let shared: Vec<i64> = genus_quadratics(dx)
            .into_iter()
            .filter(|d| sy.contains(d))
            .collect();
        let basis = square_class_basis(&shared);
        let characters = |forms: &[QuadForm]| -> Option<Vec<Vec<i64>>> {
            forms
                .iter()
                .map(|f| basis.iter().map(|&d| genus_character(f, d)).collect())
                .collect()
        };
        let chi_x = characters(&forms_x)?;
        let chi_y = characters(&forms_y)?;
        let flip: Vec<i64> = basis.iter().map(|&d| if d < 0 { -1 } else { 1 }).collect();
        let merge = flip.contains(&-1);
        for i in 0..forms_x.len() {
            for j in 0..forms_y.len() {
                let key: Vec<i64> = (0..basis.len()).map(|t| chi_x[i][t] * chi_y[j][t]).collect();
                let canon = if merge {
                    let alt: Vec<i64> = key.iter().zip(&flip).map(|(k, s)| k * s).collect();
                    key.min(alt)
                } else {
                    key
                };
                groups.entry(canon).or_default().push(i * forms_y.len() + j);
            }
        }
    } else {
        return None;
    }
    Some(groups.into_values().collect())
}

/// Compositum of every conjugate pair of `dx` and `dy`, through the
/// smallest `M ≥ 1` whose values `x_i + M·y_j` are pairwise distinct.
/// Distinctness is decided exactly: the annihilator of the candidate
/// values must be squarefree.
pub fn pair_field(
    store: &mut ClassPolyStore,
    dx: &Discriminant,
    dy: &Discriminant,
) -> Result<PairField, DegreesError> {
    pair_field_at(store, dx, dy, 0)
}

/// [`pair_field`] with a floor on the starting value precision.
pub fn pair_field_at(
    store: &mut ClassPolyStore,
    dx: &Discriminant,
    dy: &Discriminant,
    floor: u32,
) -> Result<PairField, DegreesError> {
    let hx = store.get(dx)?.poly().clone();
    let hy = store.get(dy)?.poly().clone();
    let forms_x = reduced_forms(dx);
    let forms_y = reduced_forms(dy);
    let base = base_precision(dx, dy).max(floor);
    let hint = pair_orbit_hint(dx, dy);
    for m in 1..=MAX_SEPARATING_M {
        let scaled = hy.scale_roots(&BigInt::from(m));
        let annihilator = sum_annihilator(&hx, &scaled, Epsilon::Plus);
        if annihilator.squarefree_part().degree() != annihilator.degree() {
            continue;
        }
        let mf = BigFloat::from_i64(m);
        let (partition, values) =
            assemble_partition(&annihilator, &forms_x, &forms_y, base, hint.as_deref(), |x, y| {
                x.add(&y.scale(&mf))
            })?;
        return Ok(PairField {
            m,
            annihilator,
            partition,
            values,
        });
    }
    Err(DegreesError::NoSeparatingM)
}

/// The fields generated by `x_i ∘ y_j` for every conjugate pair.
pub fn generated_field(
    store: &mut ClassPolyStore,
    dx: &Discriminant,
    dy: &Discriminant,
    op: PairOp,
) -> Result<GeneratedField, DegreesError> {
    generated_field_at(store, dx, dy, op, 0)
}

/// [`generated_field`] with a floor on the starting value precision.
pub fn generated_field_at(
    store: &mut ClassPolyStore,
    dx: &Discriminant,
    dy: &Discriminant,
    op: PairOp,
    floor: u32,
) -> Result<GeneratedField, DegreesError> {
    if op.excludes_zero() && (dx.value() == -3 || dy.value() == -3) {
        return Err(DegreesError::ZeroModulus);
    }
    let hx = store.get(dx)?.poly().clone();
    let hy = store.get(dy)?.poly().clone();
    let annihilator = match op {
        PairOp::Sum => sum_annihilator(&hx, &hy, Epsilon::Plus),
        PairOp::Diff => sum_annihilator(&hx, &hy, Epsilon::Minus),
        PairOp::Prod => product_annihilator(&hx, &hy, Epsilon::Plus)?,
        PairOp::Ratio => product_annihilator(&hx, &hy, Epsilon::Minus)?,
    };
    let forms_x = reduced_forms(dx);
    let forms_y = reduced_forms(dy);
    let base = base_precision(dx, dy).max(floor);
    let hint = pair_orbit_hint(dx, dy);
    let (partition, values) =
        assemble_partition(&annihilator, &forms_x, &forms_y, base, hint.as_deref(), |x, y| {
            combine(x, y, op)
        })?;
    Ok(GeneratedField {
        op,
        annihilator,
        partition,
        values,
    })
}

fn form_index(forms: &[QuadForm], f: &QuadForm) -> Result<usize, DegreesError> {
    let r = f.reduce();
    let (a, b, c) = r.coefficients();
    forms
        .iter()
        .position(|g| *g == r)
        .ok_or(DegreesError::Forms(FormsError::NotPositiveDefinite(a, b, c)))
}

/// Certified degree of the compositum `Q(x, y)` for the moduli of two
/// specific forms.
pub fn deg_pair_field(
    store: &mut ClassPolyStore,
    fx: &QuadForm,
    fy: &QuadForm,
) -> Result<usize, DegreesError> {
    let dx = Discriminant::new(fx.discriminant())?;
    let dy = Discriminant::new(fy.discriminant())?;
    let pair = pair_field(store, &dx, &dy)?;
    let i = form_index(&reduced_forms(&dx), fx)?;
    let j = form_index(&reduced_forms(&dy), fy)?;
    pair.degree_of(i, j)
}

/// Certified degree of `Q(x ∘ y)` for the moduli of two specific forms.
pub fn deg_generated(
    store: &mut ClassPolyStore,
    fx: &QuadForm,
    fy: &QuadForm,
    op: PairOp,
) -> Result<usize, DegreesError> {
    let dx = Discriminant::new(fx.discriminant())?;
    let dy = Discriminant::new(fy.discriminant())?;
    let generated = generated_field(store, &dx, &dy, op)?;
    let i = form_index(&reduced_forms(&dx), fx)?;
    let j = form_index(&reduced_forms(&dy), fy)?;
    generated.degree_of(i, j)
}

/// Approximate bit size of a complex value, for precision budgeting.
fn value_bits(v: &AppComplex) -> u32 {
    let b = v
        .abs()
        .add(&BigFloat::one())
        .log2_floor()
        .unwrap_or(0)
        .max(0);
    b as u32 + 2
}

/// Degree reports for every conjugate pair of two discriminants under
/// one operation. Pairs `x_i = y_j` are skipped for differences; for
/// products and ratios a discriminant with the zero modulus yields an
/// empty report list.
pub fn index_report(
    store: &mut ClassPolyStore,
    dx: &Discriminant,
    dy: &Discriminant,
    op: PairOp,
) -> Result<Vec<FieldDegreeReport>, DegreesError> {
    index_report_at(store, dx, dy, op, 0)
}

/// [`index_report`] with a floor on the starting value precision.
pub fn index_report_at(
    store: &mut ClassPolyStore,
    dx: &Discriminant,
    dy: &Discriminant,
    op: PairOp,
    floor: u32,
) -> Result<Vec<FieldDegreeReport>, DegreesError> {
    if op.excludes_zero() && (dx.value() == -3 || dy.value() == -3) {
        return Ok(Vec::new());
    }
    let hx = store.get(dx)?.poly().clone();
    let hy = store.get(dy)?.poly().clone();
    let pair = pair_field_at(store, dx, dy, floor)?;
    let generated = generated_field_at(store, dx, dy, op, floor)?;
    let forms_x = reduced_forms(dx);
    let forms_y = reduced_forms(dy);
    let mut verdicts: BTreeMap<usize, Option<bool>> = BTreeMap::new();
    let mut reports = Vec::new();
    for (i, fx) in forms_x.iter().enumerate() {
        for (j, fy) in forms_y.iter().enumerate() {
            if op == PairOp::Diff && dx == dy && fx == fy {
                continue;
            }
            let deg_pair = pair.degree_of(i, j)?;
            let deg_generated = generated.degree_of(i, j)?;
            if deg_generated == 0 || deg_pair % deg_generated != 0 {
                return Err(DegreesError::Inconsistent);
            }
            let index = deg_pair / deg_generated;
            let part = pair
                .partition
                .part_of_value(&pair.values[i][j])
                .ok_or(DegreesError::PrecisionExhausted)?;
            let members = *verdicts.entry(part).or_insert_with(|| {
                member_in_generated(&hx, &hy, pair.m, op, &pair.partition.factors()[part])
            });
            reports.push(FieldDegreeReport {
                disc_x: dx.value(),
                disc_y: dy.value(),
                form_x: *fx,
                form_y: *fy,
                op,
                deg_x: forms_x.len(),
                deg_y: forms_y.len(),
                deg_pair,
                deg_generated,
                index,
                certified: members.map_or(false, |m| (index == 1) == m),
            });
        }
    }
    Ok(reports)
}

/// Certified minimal polynomial of one form's singular modulus, through
/// the orbit partition of its class polynomial.
pub fn minimal_poly_of_modulus(
    store: &mut ClassPolyStore,
    form: &QuadForm,
) -> Result<IntPoly, DegreesError> {
    let disc = Discriminant::new(form.discriminant())?;
    let h = store.get(&disc)?.poly().clone();
    let forms = reduced_forms(&disc);
    let floor = partition_precision(&h).max(policy_precision(&disc));
    for step in 0..VALUE_LADDER {
        let prec = floor << step;
        let values = conjugate_values(&forms, prec)?;
        match partition_with_values(&h, &values) {
            Ok(partition) => {
                let x = singular_modulus(&form.reduce(), prec)?;
                return partition
                    .factor_containing(&x)
                    .cloned()
                    .ok_or(DegreesError::PrecisionExhausted);
            }
            Err(OrbitError::PrecisionExhausted) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(DegreesError::PrecisionExhausted)
}

/// Both sides of the Galois criterion, computed independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaloisCheck {
    /// Every conjugate lies in the field generated by the principal
    /// form's modulus, so the class polynomial splits over it.
    pub splits: bool,
    /// The class group has exponent at most 2.
    pub two_elementary: bool,
}

impl GaloisCheck {
    pub fn agrees(&self) -> bool {
        self.splits == self.two_elementary
    }
}

/// Checks numerically that `Q(x)` is a splitting field of the class
/// polynomial exactly when the class group is 2-elementary. The two
/// sides are computed independently: membership of every conjugate in
/// `Q(x)` by lattice reduction against group structure by composition.
pub fn galois_iff_two_elementary(disc: &Discriminant) -> Result<GaloisCheck, DegreesError> {
    let two_elementary = is_two_elementary(disc);
    let forms = reduced_forms(disc);
    let h = forms.len();
    let principal = QuadForm::principal(disc);
    let base = (4 * policy_precision(disc)).max(512);
    let probe = singular_modulus(&principal, 192)?;
    let bits = value_bits(&probe);
    let mut splits = true;
    for f in &forms {
        if *f == principal {
            continue;
        }
        let mut found = false;
        for step in 0..3 {
            let scale = base << step;
            let q = scale + h as u32 * bits + 64;
            let gamma = singular_modulus(&principal, q)?;
            let beta = singular_modulus(f, q)?;
            if field_membership(&beta, &gamma, h, scale).is_some() {
                found = true;
                break;
            }
        }
        if !found {
            splits = false;
            break;
        }
    }
    Ok(GaloisCheck {
        splits,
        two_elementary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(v: i64) -> Discriminant {
        Discriminant::new(v).unwrap()
    }

    #[test]
    fn rational_moduli_have_degree_one_composita() {
        let mut store = ClassPolyStore::new();
        let f3 = QuadForm::principal(&disc(-3));
        let f4 = QuadForm::principal(&disc(-4));
        assert_eq!(deg_pair_field(&mut store, &f3, &f3).unwrap(), 1);
        assert_eq!(deg_pair_field(&mut store, &f3, &f4).unwrap(), 1);
        assert_eq!(
            deg_generated(&mut store, &f3, &f4, PairOp::Sum).unwrap(),
            1
        );
    }

    #[test]
    fn zero_modulus_is_rejected_for_products() {
        let mut store = ClassPolyStore::new();
        let f3 = QuadForm::principal(&disc(-3));
        let f4 = QuadForm::principal(&disc(-4));
        assert!(matches!(
            deg_generated(&mut store, &f3, &f4, PairOp::Prod),
            Err(DegreesError::ZeroModulus)
        ));
        assert!(matches!(
            deg_generated(&mut store, &f4, &f3, PairOp::Ratio),
            Err(DegreesError::ZeroModulus)
        ));
        assert!(index_report(&mut store, &disc(-3), &disc(-24), PairOp::Ratio)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn symmetric_sums_force_the_second_multiplier() {
        // x_i + y_j = x_j + y_i whenever the discriminants coincide, so
        // M = 1 can never separate and M = 2 is chosen
        let mut store = ClassPolyStore::new();
        let d = disc(-23);
        let pair = pair_field(&mut store, &d, &d).unwrap();
        assert_eq!(pair.separating_m(), 2);
        assert_eq!(pair.annihilator().degree(), Some(9));
    }

    #[test]
    fn cubic_conjugates_generate_the_full_sextic_compositum() {
        let mut store = ClassPolyStore::new();
        let d = disc(-23);
        let pair = pair_field(&mut store, &d, &d).unwrap();
        // diagonal pairs give back the cubic field itself
        assert_eq!(pair.degree_of(0, 0).unwrap(), 3);
        // distinct conjugates of an irreducible cubic with one real root
        // generate its splitting field of degree six
        assert_eq!(pair.degree_of(0, 1).unwrap(), 6);
        assert_eq!(pair.degree_of(1, 2).unwrap(), 6);
    }

    #[test]
    fn conjugate_sum_degree_drops_to_the_real_subfield() {
        // x + x̄ is real of degree three while the compositum is sextic
        let mut store = ClassPolyStore::new();
        let d = disc(-23);
        let generated = generated_field(&mut store, &d, &d, PairOp::Sum).unwrap();
        let forms = reduced_forms(&d);
        let (i, j) = conjugate_positions(&forms);
        assert_eq!(generated.degree_of(i, j).unwrap(), 3);
    }

    fn conjugate_positions(forms: &[QuadForm]) -> (usize, usize) {
        for (i, f) in forms.iter().enumerate() {
            for (j, g) in forms.iter().enumerate() {
                if f.b() > 0 && f.b() == -g.b() && f.a() == g.a() && f.c() == g.c() {
                    return (i, j);
                }
            }
        }
        panic!("no conjugate pair among {forms:?}");
    }

    #[test]
    fn quadratic_class_fields_have_rational_full_traces() {
        // h(-15) = 2: the two conjugates sum to a rational, so the pair
        // (x, x') has index 2, while the diagonal keeps index 1
        let mut store = ClassPolyStore::new();
        let d = disc(-15);
        let reports = index_report(&mut store, &d, &d, PairOp::Sum).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert_eq!(r.deg_generated * r.index, r.deg_pair);
            assert!(r.certified, "uncertified report {r:?}");
            if r.form_x == r.form_y {
                assert_eq!(r.index, 1);
                assert_eq!(r.deg_pair, 2);
            } else {
                assert_eq!(r.index, 2);
                assert_eq!(r.deg_generated, 1);
            }
        }
    }

    #[test]
    fn conjugate_pair_under_sum_has_index_two() {
        let mut store = ClassPolyStore::new();
        let d = disc(-23);
        let reports = index_report(&mut store, &d, &d, PairOp::Sum).unwrap();
        assert_eq!(reports.len(), 9);
        let forms = reduced_forms(&d);
        let (i, j) = conjugate_positions(&forms);
        let conj = reports
            .iter()
            .find(|r| r.form_x == forms[i] && r.form_y == forms[j])
            .unwrap();
        assert_eq!(conj.index, 2);
        assert_eq!(conj.deg_pair, 6);
        assert_eq!(conj.deg_generated, 3);
        for r in &reports {
            assert_eq!(r.deg_generated * r.index, r.deg_pair);
            assert!(r.certified, "uncertified report {r:?}");
            let expected_index = if r.form_x == r.form_y { 1 } else { 2 };
            assert_eq!(r.index, expected_index);
        }
    }

    #[test]
    fn distinct_discriminants_keep_index_one_under_products() {
        let mut store = ClassPolyStore::new();
        let reports =
            index_report(&mut store, &disc(-15), &disc(-24), PairOp::Prod).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            assert_eq!(r.index, 1, "report {r:?}");
            assert_eq!(r.deg_pair, 4);
            assert!(r.certified, "uncertified report {r:?}");
        }
    }

    #[test]
    fn differences_skip_equal_moduli_and_stay_index_one() {
        let mut store = ClassPolyStore::new();
        let d = disc(-15);
        let reports = index_report(&mut store, &d, &d, PairOp::Diff).unwrap();
        assert_eq!(reports.len(), 2);
        for r in &reports {
            assert_eq!(r.index, 1);
            assert_eq!(r.deg_generated, 2);
            assert!(r.certified, "uncertified report {r:?}");
        }
        assert!(index_report(&mut store, &disc(-4), &disc(-4), PairOp::Diff)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn minimal_polynomials_match_class_polynomials_for_small_discriminants() {
        let mut store = ClassPolyStore::new();
        for v in [-3i64, -4, -15, -23] {
            let d = disc(v);
            let expected = store.get(&d).unwrap().poly().clone();
            for f in reduced_forms(&d) {
                let minpoly = minimal_poly_of_modulus(&mut store, &f).unwrap();
                assert_eq!(minpoly, expected, "disc {v} form {f:?}");
            }
        }
    }

    #[test]
    fn galois_criterion_agrees_on_known_class_groups() {
        // h = 1 and h = 2 groups are 2-elementary and split trivially
        for v in [-3i64, -4, -15] {
            let check = galois_iff_two_elementary(&disc(v)).unwrap();
            assert!(check.splits, "disc {v}");
            assert!(check.two_elementary, "disc {v}");
        }
        // the cyclic cubic group of -23 is not 2-elementary and its class
        // polynomial does not split over the real root's field
        let check = galois_iff_two_elementary(&disc(-23)).unwrap();
        assert!(!check.splits);
        assert!(!check.two_elementary);
        assert!(check.agrees());
        // h(-84) = 4 with group C2 x C2: fully 2-elementary
        let check = galois_iff_two_elementary(&disc(-84)).unwrap();
        assert!(check.splits);
        assert!(check.two_elementary);
        assert!(check.agrees());
    }

    #[test]
    fn pair_reports_are_deterministic() {
        // both class fields are the same real quadratic field (each class
        // polynomial discriminant is a square times 5), so the compositum
        // stays quadratic and every sum generates it
        let mut store = ClassPolyStore::new();
        let a = index_report(&mut store, &disc(-15), &disc(-20), PairOp::Sum).unwrap();
        let b = index_report(&mut store, &disc(-15), &disc(-20), PairOp::Sum).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        for r in &a {
            assert_eq!(r.index, 1);
            assert_eq!(r.deg_pair, 2);
            assert!(r.certified);
        }
    }

    #[test]
    fn store_memoises_class_polynomials() {
        let mut store = ClassPolyStore::new();
        let d = disc(-23);
        let first = store.get(&d).unwrap().poly().clone();
        let second = store.get(&d).unwrap().poly().clone();
        assert_eq!(first, second);
        assert_eq!(store.polys().count(), 1);
        let line = store.get(&d).unwrap().cache_line();
        let mut seeded = ClassPolyStore::new();
        seeded.insert(crate::classpoly::ClassPoly::from_cache_line(&line).unwrap());
        assert_eq!(seeded.get(&d).unwrap().poly(), &first);
    }

    #[test]
    fn generated_ratio_of_conjugates_is_quadratic() {
        // x / x' for the two real conjugates of h(-15) = 2 lies in the
        // same quadratic field, so degree 2 with index 1
        let mut store = ClassPolyStore::new();
        let d = disc(-15);
        let reports = index_report(&mut store, &d, &d, PairOp::Ratio).unwrap();
        assert_eq!(reports.len(), 4);
        for r in &reports {
            if r.form_x == r.form_y {
                assert_eq!(r.deg_generated, 1);
                assert_eq!(r.index, 2);
            } else {
                assert_eq!(r.deg_generated, 2);
                assert_eq!(r.index, 1);
            }
            assert!(r.certified, "uncertified report {r:?}");
        }
    }
}
