//! Dense exact matrices over the local ring, Smith normal form, linear
//! solving, and the classification of finitely generated modules.
//!
//! The Smith normal form works over `R = Z[S^{-1}]` by clearing
//! denominators (always `S`-units), running an integer reduction, and then
//! absorbing the unit parts of the diagonal into the left transform. The
//! resulting diagonal entries are *cores*: non-negative integers free of
//! inverted-prime factors, canonical up to nothing — they are unique.

use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::group::GroupExpression;

use super::{LocalRing, RingElement};

/// Errors from module-level computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModuleError {
    /// `boundary_out . boundary_in != 0`.
    CompositionNonzero,
    /// Dimension mismatch between the two boundary maps.
    ShapeMismatch,
    /// A vector handed to `class_of` is not a cycle.
    NotACycle,
    /// A vector has the wrong length for the chain group.
    WrongLength,
}

impl fmt::Display for ModuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleError::CompositionNonzero => {
                write!(f, "boundary maps do not compose to zero")
            }
            ModuleError::ShapeMismatch => write!(f, "boundary map dimensions do not match"),
            ModuleError::NotACycle => write!(f, "vector is not a cycle"),
            ModuleError::WrongLength => write!(f, "vector length does not match the chain group"),
        }
    }
}

/// A dense matrix over the ring, row-major. Zero-dimensional shapes are
/// legal and behave as expected under multiplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<RingElement>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![RingElement::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, RingElement::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> RingElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Convenience constructor from integer literals (tests, examples).
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix::from_fn(r, c, |i, j| RingElement::from_int(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<RingElement> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<RingElement> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, indices.len(), |i, j| self.get(i, indices[j]).clone())
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(indices.len(), self.cols, |i, j| self.get(indices[i], j).clone())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = RingElement::zero();
            for k in 0..self.cols {
                acc = &acc + &(self.get(i, k) * other.get(k, j));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[RingElement]) -> Vec<RingElement> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = RingElement::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * &v[k]);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, c: &RingElement) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    /// Exact determinant (square matrices) by fraction-free elimination over
    /// the rationals; the value of the determinant of a matrix over `R`
    /// lies in `R`.
    pub fn det(&self) -> RingElement {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return RingElement::one();
        }
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).as_ratio().clone()).collect())
            .collect();
        let mut sign = 1i64;
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[i][k].is_zero());
            let Some(p) = pivot else {
                return RingElement::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            let pv = a[k][k].clone();
            det *= &pv;
            for i in (k + 1)..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let factor = &a[i][k] / &pv;
                for j in k..n {
                    let sub = &factor * &a[k][j];
                    a[i][j] -= sub;
                }
            }
        }
        if sign < 0 {
            det = -det;
        }
        RingElement::from_ratio_unchecked(det)
    }

    /// Inverse over `R`: `Some` exactly when the matrix is invertible *over
    /// the ring* (determinant a unit), in which case every entry of the
    /// inverse lies in `R`.
    pub fn inverse(&self, ring: &LocalRing) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.get(i, j).as_ratio().clone())
                    .chain((0..n).map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    }))
                    .collect()
            })
            .collect();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(pivot, k);
            let pv = a[k][k].clone();
            for j in k..2 * n {
                a[k][j] = &a[k][j] / &pv;
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let factor = a[i][k].clone();
                for j in k..2 * n {
                    let sub = &factor * &a[k][j];
                    a[i][j] -= sub;
                }
            }
        }
        let mut out = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let q = a[i][n + j].clone();
                if !ring.contains(&q) {
                    return None;
                }
                out.set(i, j, RingElement::from_ratio_unchecked(q));
            }
        }
        Some(out)
    }

    /// Least common multiple of the entry denominators (always an `S`-unit
    /// for a matrix over `R`).
    fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for x in &self.data {
            l = l.lcm(x.denom());
        }
        l
    }
}

// ---------------------------------------------------------------------------
// Integer Smith reduction
// ---------------------------------------------------------------------------

/// Plain integer matrix used internally by the Smith reduction.
#[derive(Clone)]
struct IntMat {
    rows: usize,
    cols: usize,
    e: Vec<BigInt>,
}

impl IntMat {
    fn zero(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            e: vec![BigInt::zero(); rows * cols],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = IntMat::zero(n, n);
        for i in 0..n {
            m.e[i * n + i] = BigInt::one();
        }
        m
    }

    fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.e[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.e[i * self.cols + j] = x;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.e.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.e.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[a] += q * row[b]
    fn row_add(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * self.get(b, j);
            let v = self.get(a, j) + add;
            self.set(a, j, v);
        }
    }

    /// col[a] += q * col[b]
    fn col_add(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * self.get(i, b);
            let v = self.get(i, a) + add;
            self.set(i, a, v);
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.get(a, j).clone();
            self.set(a, j, v);
        }
    }

    /// Replace rows a, b by (x*row_a + y*row_b, z*row_a + w*row_b).
    fn row_combine(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for j in 0..self.cols {
            let ra = self.get(a, j).clone();
            let rb = self.get(b, j).clone();
            self.set(a, j, x * &ra + y * &rb);
            self.set(b, j, z * &ra + w * &rb);
        }
    }

    /// Replace cols a, b by (x*col_a + y*col_b, z*col_a + w*col_b).
    fn col_combine(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        for i in 0..self.rows {
            let ca = self.get(i, a).clone();
            let cb = self.get(i, b).clone();
            self.set(i, a, x * &ca + y * &cb);
            self.set(i, b, z * &ca + w * &cb);
        }
    }
}

/// Diagonalize `b` by unimodular row and column operations, mirroring the
/// row operations on `u` and the column operations on `v`, so that
/// `u0 * b0 * v0 = diag` where `b0` is the input value of `b`.
fn integer_diagonalize(b: &mut IntMat, u: &mut IntMat, v: &mut IntMat) -> Vec<BigInt> {
    let n = b.rows.min(b.cols);
    for k in 0..n {
        loop {
            // Find a pivot of minimal absolute value in the working block.
            let mut best: Option<(usize, usize)> = None;
            for i in k..b.rows {
                for j in k..b.cols {
                    if b.get(i, j).is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if b.get(i, j).abs() < b.get(bi, bj).abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // The whole remaining block is zero; the diagonal is done.
                return (0..n).map(|i| b.get(i, i).clone()).collect();
            };
            b.swap_rows(k, pi);
            u.swap_rows(k, pi);
            b.swap_cols(k, pj);
            v.swap_cols(k, pj);

            let mut clean = true;
            // Clear the column below the pivot.
            for i in (k + 1)..b.rows {
                if b.get(i, k).is_zero() {
                    continue;
                }
                let q = -(b.get(i, k) / b.get(k, k));
                b.row_add(i, k, &q);
                u.row_add(i, k, &q);
                if !b.get(i, k).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue; // a smaller remainder appeared; pick a new pivot
            }
            // Clear the row to the right of the pivot (the cleared column is
            // untouched: its only nonzero entry is the pivot row's).
            for j in (k + 1)..b.cols {
                if b.get(k, j).is_zero() {
                    continue;
                }
                let q = -(b.get(k, j) / b.get(k, k));
                b.col_add(j, k, &q);
                v.col_add(j, k, &q);
                if !b.get(k, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
    }
    (0..n).map(|i| b.get(i, i).clone()).collect()
}

/// Integer Smith normal form: returns `(u, diag, v)` with `u * a * v`
/// diagonal, the diagonal non-negative with each entry dividing the next,
/// and `u`, `v` unimodular over `Z`.
fn integer_snf(a: IntMat) -> (IntMat, Vec<BigInt>, IntMat) {
    let mut b = a;
    let mut u = IntMat::identity(b.rows);
    let mut v = IntMat::identity(b.cols);
    let mut d = integer_diagonalize(&mut b, &mut u, &mut v);
    let n = d.len();

    // Sign normalization.
    for i in 0..n {
        if d[i].is_negative() {
            u.negate_row(i);
            d[i] = -d[i].clone();
        }
    }

    // Divisibility chain: replace offending pairs (d_i, d_j) by
    // (gcd, lcm) via explicit 2x2 unimodular transforms.
    for i in 0..n {
        for j in (i + 1)..n {
            let (di, dj) = (d[i].clone(), d[j].clone());
            if dj.is_zero() {
                continue;
            }
            if di.is_zero() {
                // Move the nonzero entry forward.
                u.swap_rows(i, j);
                v.swap_cols(i, j);
                d.swap(i, j);
                continue;
            }
            if (&dj % &di).is_zero() {
                continue;
            }
            let e = di.extended_gcd(&dj);
            let g = e.gcd.clone();
            let (x, y) = (e.x.clone(), e.y.clone());
            let a_g = &di / &g;
            let b_g = &dj / &g;
            // Rows i, j of U: (x*U_i + y*U_j, -b/g*U_i + a/g*U_j).
            u.row_combine(i, j, &x, &y, &(-b_g.clone()), &a_g);
            // Columns i, j of V: (V_i + V_j, -(b/g)y*V_i + (a/g)x*V_j).
            let m01 = -(&b_g * &y);
            let m11 = &a_g * &x;
            v.col_combine(i, j, &BigInt::one(), &BigInt::one(), &m01, &m11);
            let lcm = (&di * &dj) / &g;
            d[i] = g;
            d[j] = lcm;
        }
    }
    (u, d, v)
}

/// A Smith decomposition over the ring: `u * a * v = d` with `u`, `v`
/// invertible over `R` and `d` diagonal with non-negative *core* entries
/// forming a divisibility chain.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: Matrix,
    pub v: Matrix,
    /// The diagonal entries (cores), length `min(rows, cols)`.
    pub diag: Vec<BigUint>,
    /// `d` as a full matrix of the input shape.
    pub d: Matrix,
}

impl SmithDecomposition {
    /// Number of nonzero diagonal entries, i.e. the rank of the matrix.
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form of a matrix over `R`.
///
/// Denominators are cleared first (their lcm is an `S`-unit), an integer
/// reduction runs, and the unit part of every diagonal entry is absorbed
/// into the corresponding row of `u`, leaving the canonical core on the
/// diagonal. Cores are multiplicative, so the divisibility chain survives.
pub fn smith_normal_form(a: &Matrix, ring: &LocalRing) -> SmithDecomposition {
    let rows = a.rows();
    let cols = a.cols();
    let l = a.denominator_lcm();
    let mut b = IntMat::zero(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let scaled = a.get(i, j).as_ratio() * BigRational::from_integer(l.clone());
            debug_assert!(scaled.is_integer());
            b.set(i, j, scaled.to_integer());
        }
    }
    let (u0, d0, v0) = integer_snf(b);

    // u0 * (l*a) * v0 = d0, so u0 * a * v0 has diagonal d0 / l. Scale row i
    // of u0 by the inverse of the unit part of d0_i / l to leave the core.
    let n = d0.len();
    let mut u = Matrix::from_fn(rows, rows, |i, j| {
        RingElement::from_ratio_unchecked(BigRational::from_integer(u0.get(i, j).clone()))
    });
    let v = Matrix::from_fn(cols, cols, |i, j| {
        RingElement::from_ratio_unchecked(BigRational::from_integer(v0.get(i, j).clone()))
    });
    let mut diag = Vec::with_capacity(n);
    for (i, e) in d0.iter().enumerate() {
        let core = ring.core_of(e);
        if !e.is_zero() {
            // unit part of (e/l) is (e/l)/core; multiply row i by its inverse.
            let unit_inv = BigRational::new(
                &l * BigInt::from(core.clone()),
                e.clone(),
            );
            for j in 0..rows {
                let val = u.get(i, j).as_ratio() * &unit_inv;
                u.set(i, j, RingElement::from_ratio_unchecked(val));
            }
        } else {
            // Zero diagonal entry: row must still cancel l, but u0*a*v0 has a
            // zero row here, so any unit scaling works; keep the row as is.
        }
        diag.push(core);
    }
    let mut d = Matrix::zero(rows, cols);
    for (i, c) in diag.iter().enumerate() {
        d.set(i, i, RingElement::from_biguint(c.clone()));
    }
    SmithDecomposition { u, v, diag, d }
}

/// A basis for the kernel of `a` (as columns of the returned matrix).
pub fn kernel_basis(a: &Matrix, ring: &LocalRing) -> Matrix {
    let snf = smith_normal_form(a, ring);
    let n = snf.diag.len();
    let mut indices = Vec::new();
    for j in 0..a.cols() {
        if j >= n || snf.diag[j].is_zero() {
            indices.push(j);
        }
    }
    snf.v.select_columns(&indices)
}

/// Solve `a x = b` over `R`; `None` when no solution exists in `R`.
pub fn solve_linear(a: &Matrix, b: &[RingElement], ring: &LocalRing) -> Option<Vec<RingElement>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length mismatch");
    let snf = smith_normal_form(a, ring);
    let ub = snf.u.mul_vec(b);
    let n = snf.diag.len();
    let mut y = vec![RingElement::zero(); a.cols()];
    for (i, ubi) in ub.iter().enumerate() {
        if i < n && !snf.diag[i].is_zero() {
            let di = RingElement::from_biguint(snf.diag[i].clone());
            y[i] = ring.try_divide(ubi, &di)?;
        } else if !ubi.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Rank of a matrix over `R` (equivalently over `Q`).
pub fn rank(a: &Matrix, ring: &LocalRing) -> usize {
    smith_normal_form(a, ring).rank()
}

// ---------------------------------------------------------------------------
// Module descriptions
// ---------------------------------------------------------------------------

/// Trial-division factorization into prime powers.
pub(crate) fn factor(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut n = n.clone();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let mut push = |p: BigUint, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let two = BigUint::from(2u32);
    let mut e = 0u32;
    while (&n % &two).is_zero() {
        n /= &two;
        e += 1;
    }
    push(two, e);
    let mut d = BigUint::from(3u32);
    while &d * &d <= n {
        let mut e = 0u32;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        push(d.clone(), e);
        d += 2u32;
    }
    if n > BigUint::one() {
        push(n, 1);
    }
    out
}

/// Canonical description of a finitely generated `R`-module: a free rank
/// and a list of prime-power torsion factors, sorted by prime then
/// exponent. Two modules are isomorphic iff their descriptions are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleDescription {
    pub free_rank: usize,
    /// Torsion cyclic factors `R/(p^e)` as `(p, e)` pairs.
    pub torsion: Vec<(BigUint, u32)>,
}

impl ModuleDescription {
    pub fn zero() -> Self {
        ModuleDescription {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        ModuleDescription {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Build from a list of invariant factors (cores; `0` contributes a
    /// free summand, `1` nothing).
    pub fn from_invariant_factors(factors: &[BigUint]) -> Self {
        let mut m = ModuleDescription::zero();
        for f in factors {
            if f.is_zero() {
                m.free_rank += 1;
            } else if !f.is_one() {
                m.torsion.extend(factor(f));
            }
        }
        m.normalize();
        m
    }

    fn normalize(&mut self) {
        self.torsion.sort();
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the module when finite.
    pub fn order(&self) -> Option<BigUint> {
        if self.free_rank > 0 {
            return None;
        }
        let mut n = BigUint::one();
        for (p, e) in &self.torsion {
            n *= p.pow(*e);
        }
        Some(n)
    }

    pub fn direct_sum(&self, other: &ModuleDescription) -> ModuleDescription {
        let mut m = ModuleDescription {
            free_rank: self.free_rank + other.free_rank,
            torsion: self
                .torsion
                .iter()
                .chain(other.torsion.iter())
                .cloned()
                .collect(),
        };
        m.normalize();
        m
    }

    /// `n` copies of this module.
    pub fn power(&self, n: usize) -> ModuleDescription {
        let mut m = ModuleDescription::zero();
        for _ in 0..n {
            m = m.direct_sum(self);
        }
        m
    }
}

impl fmt::Display for ModuleDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<alloc::string::String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push(alloc::string::String::from("R")),
            k => parts.push(format!("R^{k}")),
        }
        for (p, e) in &self.torsion {
            parts.push(format!("Z/{}", p.pow(*e)));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Cokernel of `a` as a map into `R^{rows}`.
pub fn cokernel_description(a: &Matrix, ring: &LocalRing) -> ModuleDescription {
    let snf = smith_normal_form(a, ring);
    let mut factors = snf.diag.clone();
    // Rows beyond the diagonal are untouched free summands.
    factors.extend(core::iter::repeat(BigUint::zero()).take(a.rows() - snf.diag.len()));
    ModuleDescription::from_invariant_factors(&factors)
}

// ---------------------------------------------------------------------------
// Subquotients (homology) with effective coordinates
// ---------------------------------------------------------------------------

/// The homology module at the middle of
/// `C_in --boundary_in--> C --boundary_out--> C_out`,
/// with effective coordinates: canonical representatives for a chosen basis
/// of the module, and a `class_of` map computing the coordinates of any
/// cycle.
#[derive(Debug, Clone)]
pub struct SubquotientModule {
    ring: LocalRing,
    /// Dimension of the middle chain group.
    dim: usize,
    /// Kernel-coordinate extractor: `coords * w` recovers kernel coordinates
    /// of any cycle `w`.
    coords: Matrix,
    /// Left transform of the relation matrix and its inverse.
    um: Matrix,
    /// Invariant factors of the quotient presentation, full list (units
    /// included) aligned with `um` rows.
    factors_full: Vec<BigUint>,
    /// Indices (into `factors_full`) of the exposed, non-unit factors.
    exposed: Vec<usize>,
    /// Representative cycles for the exposed classes, as columns.
    reps: Matrix,
    module: ModuleDescription,
    boundary_out: Matrix,
}

impl SubquotientModule {
    /// `boundary_out`: from the middle group; `boundary_in`: into it.
    pub fn new(
        ring: &LocalRing,
        boundary_out: &Matrix,
        boundary_in: &Matrix,
    ) -> Result<Self, ModuleError> {
        let dim = boundary_out.cols();
        if boundary_in.rows() != dim {
            return Err(ModuleError::ShapeMismatch);
        }
        if !boundary_out.mul(boundary_in).is_zero() {
            return Err(ModuleError::CompositionNonzero);
        }

        // Kernel of the outgoing boundary, with coordinates.
        let snf_out = smith_normal_form(boundary_out, ring);
        let n = snf_out.diag.len();
        let mut kernel_indices = Vec::new();
        for j in 0..dim {
            if j >= n || snf_out.diag[j].is_zero() {
                kernel_indices.push(j);
            }
        }
        let kernel = snf_out.v.select_columns(&kernel_indices);
        let v_inv = snf_out
            .v
            .inverse(ring)
            .expect("Smith transform is invertible over the ring");
        let coords = v_inv.select_rows(&kernel_indices);

        // Image of the incoming boundary in kernel coordinates.
        let m = coords.mul(boundary_in);
        let snf_m = smith_normal_form(&m, ring);
        let k = kernel_indices.len();
        let mut factors_full: Vec<BigUint> = snf_m.diag.clone();
        factors_full.extend(core::iter::repeat(BigUint::zero()).take(k - snf_m.diag.len()));

        let exposed: Vec<usize> = (0..k).filter(|&i| !factors_full[i].is_one()).collect();
        let um = snf_m.u.clone();
        let um_inv = um
            .inverse(ring)
            .expect("Smith transform is invertible over the ring");
        let reps_full = kernel.mul(&um_inv);
        let reps = reps_full.select_columns(&exposed);
        let module =
            ModuleDescription::from_invariant_factors(&exposed.iter().map(|&i| factors_full[i].clone()).collect::<Vec<_>>());

        Ok(SubquotientModule {
            ring: ring.clone(),
            dim,
            coords,
            um,
            factors_full,
            exposed,
            reps,
            module,
            boundary_out: boundary_out.clone(),
        })
    }

    /// The homology at the middle of a two-step complex, with the incoming
    /// boundary zero (i.e. kernel only).
    pub fn kernel_only(ring: &LocalRing, boundary_out: &Matrix) -> Result<Self, ModuleError> {
        let z = Matrix::zero(boundary_out.cols(), 0);
        SubquotientModule::new(ring, boundary_out, &z)
    }

    pub fn module(&self) -> &ModuleDescription {
        &self.module
    }

    /// Number of exposed coordinates (torsion factors first, then free).
    pub fn coordinate_count(&self) -> usize {
        self.exposed.len()
    }

    /// Invariant factor attached to each exposed coordinate (`0` = free).
    pub fn exposed_factors(&self) -> Vec<BigUint> {
        self.exposed.iter().map(|&i| self.factors_full[i].clone()).collect()
    }

    /// Representative cycle of the `i`-th exposed class (a vector in the
    /// middle chain group).
    pub fn representative(&self, i: usize) -> Vec<RingElement> {
        self.reps.column(i)
    }

    /// Canonical coordinates of a cycle's class: one entry per exposed
    /// factor, torsion entries reduced to `[0, f)`.
    pub fn class_of(&self, w: &[RingElement]) -> Result<Vec<RingElement>, ModuleError> {
        if w.len() != self.dim {
            return Err(ModuleError::WrongLength);
        }
        let bw = self.boundary_out.mul_vec(w);
        if bw.iter().any(|x| !x.is_zero()) {
            return Err(ModuleError::NotACycle);
        }
        let z = self.coords.mul_vec(w);
        let y = self.um.mul_vec(&z);
        let mut out = Vec::with_capacity(self.exposed.len());
        for &i in &self.exposed {
            let f = &self.factors_full[i];
            if f.is_zero() {
                out.push(y[i].clone());
            } else {
                out.push(RingElement::from_biguint(self.ring.reduce_mod(&y[i], f)));
            }
        }
        Ok(out)
    }

    /// Whether a cycle represents the zero class.
    pub fn is_boundary(&self, w: &[RingElement]) -> Result<bool, ModuleError> {
        Ok(self.class_of(w)?.iter().all(|x| x.is_zero()))
    }
}

// ---------------------------------------------------------------------------
// Automorphism groups
// ---------------------------------------------------------------------------

/// Describe the automorphism group of a finitely generated `R`-module.
///
/// Free modules give the unit group (`rank 1`) or a general linear group;
/// small finite modules additionally get their automorphism-group order,
/// established by brute-force enumeration of endomorphism matrices.
pub fn aut_description(m: &ModuleDescription, ring: &LocalRing) -> GroupExpression {
    let _ = ring;
    if m.is_zero() {
        return GroupExpression::Trivial;
    }
    if m.is_free() {
        return match m.free_rank {
            1 => GroupExpression::Units,
            j => GroupExpression::GeneralLinear(j),
        };
    }
    if m.free_rank > 0 {
        return GroupExpression::Aut {
            module: m.clone(),
            order: None,
        };
    }
    let order = brute_force_aut_order(m);
    GroupExpression::Aut {
        module: m.clone(),
        order,
    }
}

/// Enumerate the automorphisms of a finite module of order at most 10^4
/// (and at most ~2*10^6 candidate endomorphisms); `None` when the module is
/// too large for exhaustive verification.
fn brute_force_aut_order(m: &ModuleDescription) -> Option<BigUint> {
    const MAX_ORDER: u64 = 10_000;
    const MAX_ENDOS: u64 = 2_000_000;

    let order = m.order()?;
    let order: u64 = u64::try_from(&order).ok()?;
    if order > MAX_ORDER {
        return None;
    }
    // Moduli of the cyclic factors.
    let q: Vec<u64> = m
        .torsion
        .iter()
        .map(|(p, e)| {
            let v = p.pow(*e);
            u64::try_from(&v).ok()
        })
        .collect::<Option<Vec<_>>>()?;
    let g = q.len();
    // Cell (i, j): coefficient of e_i in the image of e_j, constrained to
    // (q_i / gcd(q_i, q_j)) * Z/q_i — gcd(q_i, q_j) choices.
    let mut counts = Vec::with_capacity(g * g);
    let mut steps = Vec::with_capacity(g * g);
    let mut total: u64 = 1;
    for i in 0..g {
        for j in 0..g {
            let gij = gcd_u64(q[i], q[j]);
            counts.push(gij);
            steps.push(q[i] / gij);
            total = total.saturating_mul(gij);
            if total > MAX_ENDOS {
                return None;
            }
        }
    }
    // Primes dividing the order, with the factor indices they live in.
    let mut primes: Vec<(u64, Vec<usize>)> = Vec::new();
    for (p, _) in &m.torsion {
        let p: u64 = u64::try_from(p).ok()?;
        if !primes.iter().any(|(pp, _)| *pp == p) {
            let idx = q
                .iter()
                .enumerate()
                .filter(|(_, &qi)| qi % p == 0)
                .map(|(i, _)| i)
                .collect();
            primes.push((p, idx));
        }
    }

    let mut digits = vec![0u64; g * g];
    let mut count: u64 = 0;
    loop {
        // Entry (i, j) = digits[i*g + j] * steps[i*g + j] in Z/q_i.
        let mut is_auto = true;
        for (p, idx) in &primes {
            let k = idx.len();
            let mut mat = vec![0u64; k * k];
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    mat[a * k + b] = (digits[i * g + j] * steps[i * g + j]) % p;
                }
            }
            if det_mod_p(&mut mat, k, *p) == 0 {
                is_auto = false;
                break;
            }
        }
        if is_auto {
            count += 1;
        }
        // Advance the odometer.
        let mut pos = 0;
        loop {
            if pos == g * g {
                return Some(BigUint::from(count));
            }
            digits[pos] += 1;
            if digits[pos] < counts[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Determinant modulo a prime, destroying the input.
fn det_mod_p(mat: &mut [u64], n: usize, p: u64) -> u64 {
    let mut det: u64 = 1;
    for k in 0..n {
        let pivot = (k..n).find(|&i| mat[i * n + k] % p != 0);
        let Some(pi) = pivot else { return 0 };
        if pi != k {
            for j in 0..n {
                mat.swap(pi * n + j, k * n + j);
            }
            det = (p - det % p) % p;
        }
        let pv = mat[k * n + k] % p;
        det = (det * pv) % p;
        let inv = mod_pow(pv, p - 2, p); // p prime
        for i in (k + 1)..n {
            let factor = (mat[i * n + k] % p * inv) % p;
            if factor == 0 {
                continue;
            }
            for j in k..n {
                let sub = (factor * (mat[k * n + j] % p)) % p;
                mat[i * n + j] = (mat[i * n + j] % p + p - sub) % p;
            }
        }
    }
    det % p
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn z() -> LocalRing {
        LocalRing::integers()
    }

    fn z_half() -> LocalRing {
        LocalRing::localized_at([2]).unwrap()
    }

    fn check_decomposition(a: &Matrix, ring: &LocalRing) -> SmithDecomposition {
        let snf = smith_normal_form(a, ring);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.d, "u*a*v != d");
        assert!(ring.is_unit(&snf.u.det()), "det(u) not a unit");
        assert!(ring.is_unit(&snf.v.det()), "det(v) not a unit");
        for w in snf.diag.windows(2) {
            if !w[0].is_zero() {
                if !w[1].is_zero() {
                    assert!((&w[1] % &w[0]).is_zero(), "divisibility chain broken");
                }
            } else {
                assert!(w[1].is_zero(), "zero before nonzero on the diagonal");
            }
        }
        snf
    }

    #[test]
    fn snf_strips_unit_factors() {
        // diag(2, 3) over Z[1/2]: 2 is a unit, so the form is diag(1, 3).
        let a = Matrix::from_int_rows(&[&[2, 0], &[0, 3]]);
        let snf = check_decomposition(&a, &z_half());
        assert_eq!(snf.diag, vec![BigUint::one(), BigUint::from(3u32)]);

        // [[4,0],[0,6]] over Z[1/2]: cores 1 and 3.
        let b = Matrix::from_int_rows(&[&[4, 0], &[0, 6]]);
        let snf = check_decomposition(&b, &z_half());
        assert_eq!(snf.diag, vec![BigUint::one(), BigUint::from(3u32)]);
    }

    #[test]
    fn snf_zero_matrix_is_trivial() {
        let a = Matrix::zero(2, 2);
        let snf = check_decomposition(&a, &z());
        assert_eq!(snf.diag, vec![BigUint::zero(), BigUint::zero()]);
        assert_eq!(snf.u, Matrix::identity(2));
        assert_eq!(snf.v, Matrix::identity(2));
    }

    #[test]
    fn snf_enforces_divisibility_chain() {
        // diag(4, 6) over Z must become diag(2, 12).
        let a = Matrix::from_int_rows(&[&[4, 0], &[0, 6]]);
        let snf = check_decomposition(&a, &z());
        assert_eq!(snf.diag, vec![BigUint::from(2u32), BigUint::from(12u32)]);
    }

    #[test]
    fn snf_handles_rectangular_and_denominators() {
        let r = z_half();
        let a = Matrix::from_fn(2, 3, |i, j| r.element((i + j) as i64, 2).unwrap());
        check_decomposition(&a, &r);
        let b = Matrix::from_int_rows(&[&[6, 4], &[2, 8], &[10, 2]]);
        check_decomposition(&b, &z());
        check_decomposition(&b, &z_half());
    }

    #[test]
    fn kernel_basis_spans_kernel() {
        let a = Matrix::from_int_rows(&[&[1, 2, 3]]);
        let k = kernel_basis(&a, &z());
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        // A full-rank square matrix has no kernel.
        let b = Matrix::from_int_rows(&[&[2, 1], &[1, 1]]);
        assert_eq!(kernel_basis(&b, &z()).cols(), 0);
    }

    #[test]
    fn solving_respects_the_ring() {
        let a = Matrix::from_int_rows(&[&[2]]);
        let b = [RingElement::one()];
        assert_eq!(solve_linear(&a, &b, &z()), None);
        let x = solve_linear(&a, &b, &z_half()).unwrap();
        assert_eq!(x, vec![z_half().element(1, 2).unwrap()]);

        // Inconsistent system.
        let a = Matrix::from_int_rows(&[&[1], &[1]]);
        let b = [RingElement::one(), RingElement::from_int(2)];
        assert_eq!(solve_linear(&a, &b, &z()), None);

        // A 2x3 system with a solution.
        let a = Matrix::from_int_rows(&[&[1, 2, 0], &[0, 3, 1]]);
        let b = [RingElement::from_int(5), RingElement::from_int(7)];
        let x = solve_linear(&a, &b, &z()).unwrap();
        assert_eq!(a.mul_vec(&x), b);
    }

    #[test]
    fn inverse_requires_unit_determinant() {
        let a = Matrix::from_int_rows(&[&[1, 1], &[1, 2]]);
        let inv = a.inverse(&z()).unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        let b = Matrix::from_int_rows(&[&[2, 0], &[0, 1]]);
        assert!(b.inverse(&z()).is_none());
        assert!(b.inverse(&z_half()).is_some());
        let c = Matrix::from_int_rows(&[&[1, 1], &[1, 1]]);
        assert!(c.inverse(&LocalRing::rationals()).is_none());
    }

    #[test]
    fn cokernel_examples() {
        // R^2 --diag(1,3)--> R^2: cokernel Z/3.
        let a = Matrix::from_int_rows(&[&[1, 0], &[0, 3]]);
        let m = cokernel_description(&a, &z());
        assert_eq!(m.to_string(), "Z/3");

        // 0 --> R^3: cokernel free of rank 3.
        let zero = Matrix::zero(3, 0);
        let m = cokernel_description(&zero, &z());
        assert_eq!(m, ModuleDescription::free(3));
        assert_eq!(m.to_string(), "R^3");

        // R --(2)--> R over Z[1/2]: trivial cokernel.
        let a = Matrix::from_int_rows(&[&[2]]);
        assert!(cokernel_description(&a, &z_half()).is_zero());

        // R --(0,5)^T--> R^2 over Z[1/2,1/3]: R ⊕ Z/5.
        let a = Matrix::from_int_rows(&[&[0], &[5]]);
        let r = LocalRing::localized_at([2, 3]).unwrap();
        let m = cokernel_description(&a, &r);
        assert_eq!(
            m,
            ModuleDescription {
                free_rank: 1,
                torsion: vec![(BigUint::from(5u32), 1)]
            }
        );
        assert_eq!(m.to_string(), "R ⊕ Z/5");
    }

    #[test]
    fn module_description_canonical_form() {
        let m = ModuleDescription::from_invariant_factors(&[
            BigUint::from(1u32),
            BigUint::from(12u32),
            BigUint::zero(),
        ]);
        assert_eq!(m.free_rank, 1);
        assert_eq!(
            m.torsion,
            vec![(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]
        );
        assert_eq!(m.to_string(), "R ⊕ Z/4 ⊕ Z/3");
        assert_eq!(m.order(), None);
        let t = ModuleDescription::from_invariant_factors(&[BigUint::from(6u32)]);
        assert_eq!(t.order(), Some(BigUint::from(6u32)));
        assert_eq!(factor(&BigUint::from(360u32)).len(), 3);
    }

    #[test]
    fn subquotient_torsion_classes() {
        // R --(5)--> R --> 0: homology Z/5 with coordinates.
        let ring = LocalRing::localized_at([2, 3]).unwrap();
        let out = Matrix::zero(0, 1);
        let inn = Matrix::from_int_rows(&[&[5]]);
        let h = SubquotientModule::new(&ring, &out, &inn).unwrap();
        assert_eq!(h.module().to_string(), "Z/5");
        let one = [RingElement::one()];
        assert_eq!(h.class_of(&one).unwrap(), vec![RingElement::one()]);
        let five = [RingElement::from_int(5)];
        assert!(h.is_boundary(&five).unwrap());
        let seven = [RingElement::from_int(7)];
        assert_eq!(h.class_of(&seven).unwrap(), vec![RingElement::from_int(2)]);
        // Half counts as 3 modulo 5 (2 * 3 = 6 = 1 mod 5).
        let half = [ring.element(1, 2).unwrap()];
        assert_eq!(h.class_of(&half).unwrap(), vec![RingElement::from_int(3)]);
        // The stored representative generates (any nonzero residue mod 5 is
        // a unit once 2 and 3 are inverted).
        let rep = h.representative(0);
        let c = h.class_of(&rep).unwrap();
        assert!(ring.is_unit(&c[0]));
    }

    #[test]
    fn subquotient_kernel_classes() {
        // R^2 --[1,1]--> R, nothing incoming: homology is the kernel, free
        // of rank 1, generated by (1, -1).
        let ring = z();
        let out = Matrix::from_int_rows(&[&[1, 1]]);
        let h = SubquotientModule::kernel_only(&ring, &out).unwrap();
        assert_eq!(h.module(), &ModuleDescription::free(1));
        let w = [RingElement::from_int(3), RingElement::from_int(-3)];
        let c = h.class_of(&w).unwrap();
        assert_eq!(c.len(), 1);
        assert!(!c[0].is_zero());
        let not_cycle = [RingElement::one(), RingElement::one()];
        assert_eq!(h.class_of(&not_cycle), Err(ModuleError::NotACycle));
    }

    #[test]
    fn subquotient_mixed_module() {
        // C_2 = R^2 --[[2,0],[0,0]]--> C_1 = R^2 --0--> 0:
        // homology = R^2 / im = Z/2 ⊕ R over Z.
        let ring = z();
        let out = Matrix::zero(0, 2);
        let inn = Matrix::from_int_rows(&[&[2, 0], &[0, 0]]);
        let h = SubquotientModule::new(&ring, &out, &inn).unwrap();
        assert_eq!(
            h.module(),
            &ModuleDescription {
                free_rank: 1,
                torsion: vec![(BigUint::from(2u32), 1)]
            }
        );
        // Composition validation.
        let bad_out = Matrix::from_int_rows(&[&[1, 0]]);
        assert_eq!(
            SubquotientModule::new(&ring, &bad_out, &inn).unwrap_err(),
            ModuleError::CompositionNonzero
        );
    }

    #[test]
    fn aut_descriptions() {
        let ring = z();
        assert_eq!(
            aut_description(&ModuleDescription::zero(), &ring),
            GroupExpression::Trivial
        );
        assert_eq!(
            aut_description(&ModuleDescription::free(1), &ring),
            GroupExpression::Units
        );
        assert_eq!(
            aut_description(&ModuleDescription::free(3), &ring),
            GroupExpression::GeneralLinear(3)
        );
        // aut(Z/5) has order 4.
        let z5 = ModuleDescription::from_invariant_factors(&[BigUint::from(5u32)]);
        match aut_description(&z5, &ring) {
            GroupExpression::Aut { order, .. } => {
                assert_eq!(order, Some(BigUint::from(4u32)))
            }
            other => panic!("unexpected {other:?}"),
        }
        // aut(Z/2 ⊕ Z/4) has order 8.
        let m = ModuleDescription::from_invariant_factors(&[
            BigUint::from(2u32),
            BigUint::from(4u32),
        ]);
        match aut_description(&m, &ring) {
            GroupExpression::Aut { order, .. } => {
                assert_eq!(order, Some(BigUint::from(8u32)))
            }
            other => panic!("unexpected {other:?}"),
        }
        // aut(Z/3 ⊕ Z/3) = GL_2(F_3), order 48.
        let m = ModuleDescription::from_invariant_factors(&[
            BigUint::from(3u32),
            BigUint::from(3u32),
        ]);
        match aut_description(&m, &ring) {
            GroupExpression::Aut { order, .. } => {
                assert_eq!(order, Some(BigUint::from(48u32)))
            }
            other => panic!("unexpected {other:?}"),
        }
        // Mixed modules stay symbolic.
        let mixed = ModuleDescription {
            free_rank: 1,
            torsion: vec![(BigUint::from(5u32), 1)],
        };
        match aut_description(&mixed, &ring) {
            GroupExpression::Aut { order, .. } => assert_eq!(order, None),
            other => panic!("unexpected {other:?}"),
        }
    }
}
