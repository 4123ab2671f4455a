//! Exact membership of singular moduli in the fields their combinations
//! generate.
//!
//! Whether `x` lies in `Q(x ∘ y)` is decided inside the quotient algebra
//! `A = Q[X, Y]/(h_x, h_y)`. Each conjugate pair selects one component
//! of `A`, cut out by the certified minimal polynomial `F` of the
//! separating element `z = x + M·y`: the component is `A/F(z)·A`, and
//! `x ∈ Q(w)` there exactly when `x - P(w)` falls into the ideal
//! `F(z)·A` for some polynomial `P` in the generated value `w = x ∘ y`.
//! That linear condition is solved modulo many 62-bit primes. One
//! shortcut is decisive on its own: all the matrices involved are
//! integral (after clearing the invertible denominator of a ratio), so
//! a rank modulo `p` never exceeds the rank over `Q`, and a single
//! prime where the `w`-powers span the full component proves
//! `Q(w) = Q(x, y)` there, hence membership of both `x` and `y`.
//! Otherwise the least-degree solution is unique, so the per-prime
//! solutions glue by the Chinese remainder theorem, reconstruct to
//! rationals, and are confirmed against a fresh control prime;
//! inconsistent systems vote for non-membership and must agree across
//! several primes. Primes where the reduction degenerates (an
//! inseparable polynomial, a collapsed rank) are detected against the
//! exact expected ranks and skipped, so a verdict never rests on a bad
//! reduction.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::degrees::PairOp;
use crate::intpoly::{bigint_mod_u64, crt_fold, poly_mod_u64, IntPoly};

/// Hard cap on 62-bit primes drawn for one membership question,
/// including skipped and control primes. Exhausting it leaves the
/// question undecided, never wrongly answered.
const PRIME_BUDGET: usize = 256;

/// Consecutive agreeing inconsistent solves required before
/// non-membership is reported.
const NONMEMBER_AGREEMENT: usize = 3;

/// Control-prime draws allowed when confirming a reconstruction.
const CONTROL_ATTEMPTS: usize = 8;

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Quotient and remainder of `a` by nonzero `b`, little-endian mod `p`.
fn poly_divmod(mut a: Vec<u64>, b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    poly_trim(&mut a);
    let db = b.len() - 1;
    if a.len() <= db {
        return (Vec::new(), a);
    }
    let inv_lead = arith::inv_mod(b[db], p);
    let mut q = vec![0u64; a.len() - db];
    while a.len() > db {
        let da = a.len() - 1;
        let c = arith::mul_mod(a[da], inv_lead, p);
        q[da - db] = c;
        for (t, &bt) in b.iter().enumerate() {
            a[da - db + t] = sub_mod(a[da - db + t], arith::mul_mod(c, bt, p), p);
        }
        a.pop();
        poly_trim(&mut a);
    }
    (q, a)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], arith::mul_mod(ai, bj, p), p);
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (o, &ai) in out.iter_mut().zip(a) {
        *o = ai;
    }
    for (o, &bi) in out.iter_mut().zip(b) {
        *o = sub_mod(*o, bi, p);
    }
    poly_trim(&mut out);
    out
}

fn poly_derivative(a: &[u64], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| arith::mul_mod(c, k as u64 % p, p))
        .collect();
    poly_trim(&mut out);
    out
}

fn separable(a: &[u64], p: u64) -> bool {
    let mut x = a.to_vec();
    poly_trim(&mut x);
    let mut y = poly_derivative(&x, p);
    while !y.is_empty() {
        let r = poly_divmod(x, &y, p).1;
        x = y;
        y = r;
    }
    x.len() == 1
}

/// Inverse of `a` in `F_p[T]/(modulus)` when the two are coprime.
fn poly_inverse(a: &[u64], modulus: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut m = modulus.to_vec();
    poly_trim(&mut m);
    let mut r0 = m.clone();
    let mut t0: Vec<u64> = Vec::new();
    let mut r1 = poly_divmod(a.to_vec(), &m, p).1;
    let mut t1 = vec![1u64];
    while !r1.is_empty() {
        let (q, r2) = poly_divmod(r0.clone(), &r1, p);
        let t2 = poly_sub(&t0, &poly_mul(&q, &t1, p), p);
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if r0.len() != 1 {
        return None;
    }
    let scale = arith::inv_mod(r0[0], p);
    let scaled: Vec<u64> = t0.iter().map(|&c| arith::mul_mod(c, scale, p)).collect();
    Some(poly_divmod(scaled, &m, p).1)
}

/// `F_p[X, Y]/(h_x, h_y)` in the monomial basis, with `X^a Y^b` stored
/// at index `a·m + b` for `n = deg h_x` and `m = deg h_y`.
struct PairAlgebra {
    p: u64,
    n: usize,
    m: usize,
    hx: Vec<u64>,
    hy: Vec<u64>,
}

impl PairAlgebra {
    /// Rejects primes where either polynomial stops being monic and
    /// separable, which would change the algebra's shape.
    fn new(hx: &IntPoly, hy: &IntPoly, p: u64) -> Option<Self> {
        let hxp = poly_mod_u64(hx, p);
        let hyp = poly_mod_u64(hy, p);
        if hxp.last() != Some(&1) || hyp.last() != Some(&1) {
            return None;
        }
        if !separable(&hxp, p) || !separable(&hyp, p) {
            return None;
        }
        Some(Self {
            p,
            n: hxp.len() - 1,
            m: hyp.len() - 1,
            hx: hxp,
            hy: hyp,
        })
    }

    fn dim(&self) -> usize {
        self.n * self.m
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    fn one(&self) -> Vec<u64> {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    fn gen_x(&self) -> Vec<u64> {
        let mut e = self.zero();
        if self.n == 1 {
            e[0] = sub_mod(0, self.hx[0], self.p);
        } else {
            e[self.m] = 1;
        }
        e
    }

    fn gen_y(&self) -> Vec<u64> {
        let mut e = self.zero();
        if self.m == 1 {
            e[0] = sub_mod(0, self.hy[0], self.p);
        } else {
            e[1] = 1;
        }
        e
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| add_mod(x, y, self.p))
            .collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| sub_mod(x, y, self.p))
            .collect()
    }

    fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| arith::mul_mod(x, c, self.p)).collect()
    }

    /// Product with full reduction, first in `Y` by `h_y` within each
    /// `X` row, then in `X` by `h_x`.
    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, n, m) = (self.p, self.n, self.m);
        let gn = 2 * n - 1;
        let gm = 2 * m - 1;
        let mut grid = vec![0u64; gn * gm];
        for ax in 0..n {
            for ay in 0..m {
                let av = a[ax * m + ay];
                if av == 0 {
                    continue;
                }
                for bx in 0..n {
                    for by in 0..m {
                        let bv = b[bx * m + by];
                        if bv == 0 {
                            continue;
                        }
                        let idx = (ax + bx) * gm + ay + by;
                        grid[idx] = add_mod(grid[idx], arith::mul_mod(av, bv, p), p);
                    }
                }
            }
        }
        for row in 0..gn {
            let base = row * gm;
            for k in (m..gm).rev() {
                let c = grid[base + k];
                if c == 0 {
                    continue;
                }
                grid[base + k] = 0;
                for t in 0..m {
                    let s = arith::mul_mod(c, self.hy[t], p);
                    grid[base + k - m + t] = sub_mod(grid[base + k - m + t], s, p);
                }
            }
        }
        for k in (n..gn).rev() {
            for y in 0..m {
                let c = grid[k * gm + y];
                if c == 0 {
                    continue;
                }
                grid[k * gm + y] = 0;
                for t in 0..n {
                    let s = arith::mul_mod(c, self.hx[t], p);
                    grid[(k - n + t) * gm + y] = sub_mod(grid[(k - n + t) * gm + y], s, p);
                }
            }
        }
        let mut out = self.zero();
        for x in 0..n {
            out[x * m..(x + 1) * m].copy_from_slice(&grid[x * gm..x * gm + m]);
        }
        out
    }

    /// `Σ c_k a^k` by Horner's rule, coefficients little-endian.
    fn horner(&self, coeffs: &[u64], a: &[u64]) -> Vec<u64> {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, a);
            acc[0] = add_mod(acc[0], c, self.p);
        }
        acc
    }

    /// Inverse of `y`, absent when `h_y` and `Y` share a factor mod `p`.
    fn inv_y(&self) -> Option<Vec<u64>> {
        let v = poly_inverse(&[0, 1], &self.hy, self.p)?;
        let mut e = self.zero();
        e[..v.len()].copy_from_slice(&v);
        Some(e)
    }
}

/// Column basis over `F_p` kept fully reduced, so that normal forms
/// against the span are unique.
struct Echelon {
    p: u64,
    pivots: Vec<usize>,
    basis: Vec<Vec<u64>>,
}

impl Echelon {
    fn new(p: u64) -> Self {
        Self {
            p,
            pivots: Vec::new(),
            basis: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Normal form of `v`: zero at every pivot row.
    fn reduce(&self, v: &mut [u64]) {
        for (b, &r) in self.basis.iter().zip(&self.pivots) {
            let c = v[r];
            if c == 0 {
                continue;
            }
            for (vi, &bi) in v.iter_mut().zip(b) {
                *vi = sub_mod(*vi, arith::mul_mod(c, bi, self.p), self.p);
            }
        }
    }

    /// Reduces and inserts `v`; false when it was already in the span.
    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        self.reduce(&mut v);
        let Some(r) = v.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = arith::inv_mod(v[r], self.p);
        for vi in v.iter_mut() {
            *vi = arith::mul_mod(*vi, inv, self.p);
        }
        for b in self.basis.iter_mut() {
            let c = b[r];
            if c == 0 {
                continue;
            }
            for (bi, &vi) in b.iter_mut().zip(&v) {
                *bi = sub_mod(*bi, arith::mul_mod(c, vi, self.p), self.p);
            }
        }
        self.pivots.push(r);
        self.basis.push(v);
        true
    }
}

/// Solves `cols · c = rhs` over `F_p` for two right-hand sides sharing
/// one elimination; the columns are linearly independent when called.
fn solve_in_span(
    cols: &[Vec<u64>],
    rx: &[u64],
    ry: &[u64],
    p: u64,
) -> (Option<Vec<u64>>, Option<Vec<u64>>) {
    let rows = rx.len();
    let r = cols.len();
    let mut mat: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
            row.push(rx[i]);
            row.push(ry[i]);
            row
        })
        .collect();
    let mut next = 0;
    for col in 0..r {
        let Some(pr) = (next..rows).find(|&i| mat[i][col] != 0) else {
            return (None, None);
        };
        mat.swap(next, pr);
        let inv = arith::inv_mod(mat[next][col], p);
        for e in mat[next].iter_mut() {
            *e = arith::mul_mod(*e, inv, p);
        }
        for i in 0..rows {
            if i == next || mat[i][col] == 0 {
                continue;
            }
            let c = mat[i][col];
            for t in col..r + 2 {
                let s = arith::mul_mod(c, mat[next][t], p);
                mat[i][t] = sub_mod(mat[i][t], s, p);
            }
        }
        next += 1;
    }
    let ok_x = (next..rows).all(|i| mat[i][r] == 0);
    let ok_y = (next..rows).all(|i| mat[i][r + 1] == 0);
    let pick = |col: usize| (0..r).map(|k| mat[k][col]).collect::<Vec<u64>>();
    (ok_x.then(|| pick(r)), ok_y.then(|| pick(r + 1)))
}

/// One prime's view of the membership systems.
struct PrimeSolve {
    /// Rank of the powers of `w` in the component, i.e. `[Q(w) : Q]`
    /// as seen mod this prime.
    rank_w: usize,
    /// Least-degree coefficients expressing `x` then `y` in powers of
    /// `w`, absent when either system is inconsistent.
    certs: Option<Vec<u64>>,
}

/// One membership question: do `x` and `y` lie in `Q(x ∘ y)` on the
/// component of the pair algebra cut out by `factor`?
struct Question<'a> {
    hx: &'a IntPoly,
    hy: &'a IntPoly,
    sep_m: i64,
    op: PairOp,
    factor: &'a IntPoly,
    deg_f: usize,
}

impl Question<'_> {
    fn solve_mod(&self, p: u64) -> Option<PrimeSolve> {
        let alg = PairAlgebra::new(self.hx, self.hy, p)?;
        let x = alg.gen_x();
        let y = alg.gen_y();
        let w = match self.op {
            PairOp::Sum => alg.add(&x, &y),
            PairOp::Diff => alg.sub(&x, &y),
            PairOp::Prod => alg.mul(&x, &y),
            PairOp::Ratio => alg.mul(&x, &alg.inv_y()?),
        };
        let fp = poly_mod_u64(self.factor, p);
        if fp.last() != Some(&1) {
            return None;
        }
        let m_mod = self.sep_m.rem_euclid(p as i64) as u64;
        let z = alg.add(&x, &alg.scale(&y, m_mod));
        let u = alg.horner(&fp, &z);
        let dim = alg.dim();
        let mut ideal = Echelon::new(p);
        for t in 0..dim {
            let mut e = alg.zero();
            e[t] = 1;
            ideal.insert(alg.mul(&u, &e));
        }
        if ideal.rank() != dim - self.deg_f {
            return None;
        }
        let mut powers: Vec<Vec<u64>> = Vec::new();
        let mut span = Echelon::new(p);
        let mut wk = alg.one();
        for _ in 0..=self.deg_f {
            let mut v = wk.clone();
            ideal.reduce(&mut v);
            if !span.insert(v.clone()) {
                break;
            }
            powers.push(v);
            wk = alg.mul(&wk, &w);
        }
        let rank_w = powers.len();
        let mut xb = x;
        ideal.reduce(&mut xb);
        let mut yb = y;
        ideal.reduce(&mut yb);
        match solve_in_span(&powers, &xb, &yb, p) {
            (Some(cx), Some(cy)) => {
                let mut certs = cx;
                certs.extend(cy);
                Some(PrimeSolve {
                    rank_w,
                    certs: Some(certs),
                })
            }
            (None, None) => Some(PrimeSolve {
                rank_w,
                certs: None,
            }),
            _ => None,
        }
    }
}

/// Rational number from its residue, when numerator and denominator
/// both fit under `sqrt(modulus/2)`.
fn rational_reconstruct(r: &BigInt, modulus: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound = ((modulus - BigInt::one()) >> 1u32).sqrt();
    let mut r0 = modulus.clone();
    let mut r1 = r.mod_floor(modulus);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() {
        return None;
    }
    let (mut num, mut den) = (r1, t1);
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    if den > bound || !den.gcd(modulus).is_one() {
        return None;
    }
    Some((num, den))
}

fn reconstruct_all(residues: &[BigInt], modulus: &BigInt) -> Option<Vec<(BigInt, BigInt)>> {
    residues
        .iter()
        .map(|r| rational_reconstruct(r, modulus))
        .collect()
}

/// Revalidates reconstructed certificates against a fresh prime: an
/// independent solve must reproduce every coefficient.
fn confirmed(
    question: &Question<'_>,
    rank: usize,
    certs: &[(BigInt, BigInt)],
    primes: &mut impl Iterator<Item = u64>,
) -> bool {
    for _ in 0..CONTROL_ATTEMPTS {
        let Some(q) = primes.next() else {
            return false;
        };
        let Some(solve) = question.solve_mod(q) else {
            continue;
        };
        if solve.rank_w != rank {
            continue;
        }
        let Some(vals) = solve.certs else {
            return false;
        };
        if certs.iter().any(|(_, den)| bigint_mod_u64(den, q) == 0) {
            continue;
        }
        return certs.iter().zip(&vals).all(|((num, den), &v)| {
            bigint_mod_u64(num, q) == arith::mul_mod(v, bigint_mod_u64(den, q), q)
        });
    }
    false
}

struct Primes62 {
    candidate: u64,
}

impl Primes62 {
    fn new() -> Self {
        Self {
            candidate: (1 << 62) + 1,
        }
    }
}

impl Iterator for Primes62 {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            let c = self.candidate;
            self.candidate += 2;
            if arith::is_prime_u64(c) {
                return Some(c);
            }
        }
    }
}

/// Decides whether `x` and `y` lie in `Q(x ∘ y)` on the component of
/// the pair algebra selected by `factor`, the certified minimal
/// polynomial of `x + M·y` there. Inputs `h_x`, `h_y` must be monic
/// and squarefree, with `M` separating all root pairs; the verdict is
/// shared by every conjugate pair on the component.
///
/// `Some(true)` carries an implicit rational certificate reconstructed
/// from many primes and confirmed by a fresh one; `Some(false)` is the
/// agreement of several independently inconsistent reductions; `None`
/// means the prime budget ran out before a decision.
pub(crate) fn member_in_generated(
    hx: &IntPoly,
    hy: &IntPoly,
    sep_m: i64,
    op: PairOp,
    factor: &IntPoly,
) -> Option<bool> {
    let deg_f = factor.degree()?;
    let question = Question {
        hx,
        hy,
        sep_m,
        op,
        factor,
        deg_f,
    };
    let mut primes = Primes62::new().take(PRIME_BUDGET);
    let mut rank = 0usize;
    let mut inconsistent = 0usize;
    let mut folded = 0usize;
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = Vec::new();
    while let Some(p) = primes.next() {
        let Some(solve) = question.solve_mod(p) else {
            continue;
        };
        // ranks only drop under reduction, so full span at one good
        // prime proves Q(w) is the whole component and settles both
        // memberships at once
        if solve.rank_w == question.deg_f {
            return Some(true);
        }
        if solve.rank_w < rank {
            continue;
        }
        if solve.rank_w > rank {
            rank = solve.rank_w;
            inconsistent = 0;
            folded = 0;
            modulus = BigInt::one();
            residues = vec![BigInt::zero(); 2 * rank];
        }
        match solve.certs {
            None => {
                inconsistent += 1;
                if inconsistent >= NONMEMBER_AGREEMENT {
                    return Some(false);
                }
            }
            Some(vals) => {
                inconsistent = 0;
                crt_fold(&mut residues, &mut modulus, &vals, p);
                folded += 1;
                if folded % 2 == 0 {
                    if let Some(certs) = reconstruct_all(&residues, &modulus) {
                        if confirmed(&question, rank, &certs, &mut primes) {
                            return Some(true);
                        }
                    }
                }
            }
        }
    }
    None
}
