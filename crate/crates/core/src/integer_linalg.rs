//! Exact integer matrix kernels.
//!
//! Everything here works over arbitrary-precision integers. The Hermite
//! normal form is column-style: for an `r × c` matrix `M` we return a
//! unimodular `U` (`c × c`) with `M·U = H`, where
//!
//! * the nonzero columns of `H` come first, and column `k` has its pivot in
//!   row `p_k` with `p_0 < p_1 < …`;
//! * every entry above a pivot is zero and every pivot is positive;
//! * entries to the left of a pivot, in the pivot row, lie in `[0, pivot)`.
//!
//! The Smith normal form is produced by alternating that HNF on the matrix
//! and on its transpose until the matrix is diagonal, followed by a
//! gcd/lcm pass that enforces the divisibility chain.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntVector = Vec<BigInt>;

/// Converts a slice of machine integers into an exact vector.
pub fn int_vector(values: &[i64]) -> IntVector {
    values.iter().map(|&v| BigInt::from(v)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(Error::MalformedMatrix);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<IntVector> = rows.iter().map(|r| int_vector(r)).collect();
        Self::from_rows(&rows)
    }

    /// Builds the matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<BigInt>]) -> Result<Self> {
        Ok(Self::from_rows(columns)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> IntVector {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> IntVector {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<IntVector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul_vector(&self, v: &[BigInt]) -> IntVector {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        (0..self.rows).map(|r| dot(&self.row(r), v)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        determinant((0..self.rows).map(|r| self.row(r)).collect::<Vec<_>>())
    }

    fn negate_column(&mut self, c: usize) {
        for r in 0..self.rows {
            let v = &mut self[(r, c)];
            *v = -std::mem::take(v);
        }
    }

    /// `col[dst] -= factor · col[src]`
    fn sub_column_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for r in 0..self.rows {
            let delta = factor * &self[(r, src)];
            self[(r, dst)] -= delta;
        }
    }

    /// Replaces columns `(a, b)` by `(s·a + t·b, u·a + v·b)`.
    fn combine_columns(
        &mut self,
        a: usize,
        b: usize,
        s: &BigInt,
        t: &BigInt,
        u: &BigInt,
        v: &BigInt,
    ) {
        for r in 0..self.rows {
            let x = self[(r, a)].clone();
            let y = self[(r, b)].clone();
            self[(r, a)] = s * &x + t * &y;
            self[(r, b)] = u * &x + v * &y;
        }
    }

    /// Replaces rows `(a, b)` by `(s·a + t·b, u·a + v·b)`.
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for c in 0..self.cols {
            let x = self[(a, c)].clone();
            let y = self[(b, c)].clone();
            self[(a, c)] = s * &x + t * &y;
            self[(b, c)] = u * &x + v * &y;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = &mut self[(r, c)];
            *v = -std::mem::take(v);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let delta = a * &rhs[(k, c)];
                    out[(r, c)] += delta;
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|r| {
                self.row(r)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

/// Bareiss determinant of a square matrix given by rows.
pub fn determinant(mut m: Vec<IntVector>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[derive(Debug, Clone)]
pub struct HnfResult {
    /// Column Hermite form, `M·U = H`.
    pub h: IntMatrix,
    /// Unimodular column transform.
    pub u: IntMatrix,
    /// `(row, column)` of every pivot, in column order.
    pub pivots: Vec<(usize, usize)>,
}

impl HnfResult {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Bezout step: returns `(g, s, t)` with `s·a + t·b = g ≥ 0`.
fn bezout(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

pub fn hermite_normal_form(m: &IntMatrix) -> HnfResult {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols);
    let mut pivots = Vec::new();
    let mut k = 0;
    for r in 0..h.rows {
        if k == h.cols {
            break;
        }
        for j in k + 1..h.cols {
            if h[(r, j)].is_zero() {
                continue;
            }
            let a = h[(r, k)].clone();
            let b = h[(r, j)].clone();
            let (g, s, t) = bezout(&a, &b);
            let (bg, ag) = (-(&b / &g), &a / &g);
            h.combine_columns(k, j, &s, &t, &bg, &ag);
            u.combine_columns(k, j, &s, &t, &bg, &ag);
        }
        if h[(r, k)].is_zero() {
            continue;
        }
        if h[(r, k)].is_negative() {
            h.negate_column(k);
            u.negate_column(k);
        }
        let pivot = h[(r, k)].clone();
        for j in 0..k {
            let q = h[(r, j)].div_floor(&pivot);
            if !q.is_zero() {
                h.sub_column_multiple(j, k, &q);
                u.sub_column_multiple(j, k, &q);
            }
        }
        pivots.push((r, k));
        k += 1;
    }
    HnfResult { h, u, pivots }
}

#[derive(Debug, Clone)]
pub struct SnfResult {
    /// Diagonal entries `d_1 | d_2 | …`, `min(rows, cols)` of them, zeros last.
    pub divisors: Vec<BigInt>,
    /// Unimodular row transform (`rows × rows`).
    pub u: IntMatrix,
    /// Unimodular column transform (`cols × cols`); `U·M·V = diag(divisors)`.
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.divisors.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);

    while !d.is_diagonal() {
        let cols = hermite_normal_form(&d);
        d = cols.h;
        v = &v * &cols.u;
        if d.is_diagonal() {
            break;
        }
        let rows = hermite_normal_form(&d.transpose());
        d = rows.h.transpose();
        u = &rows.u.transpose() * &u;
    }

    let n = d.rows.min(d.cols);
    for i in 0..n {
        for j in i + 1..n {
            let a = d[(i, i)].clone();
            let b = d[(j, j)].clone();
            if b.is_zero() || (!a.is_zero() && b.is_multiple_of(&a)) {
                continue;
            }
            let (g, s, t) = bezout(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            // [[s, t], [-b/g, a/g]] · diag(a, b) · [[1, -t·b/g], [1, s·a/g]] = diag(g, lcm)
            u.combine_rows(i, j, &s, &t, &-&bg, &ag);
            v.combine_columns(
                i,
                j,
                &BigInt::one(),
                &BigInt::one(),
                &(-&t * &bg),
                &(&s * &ag),
            );
            d[(i, i)] = g;
            d[(j, j)] = &a * &bg;
        }
    }
    for i in 0..n {
        if d[(i, i)].is_negative() {
            d[(i, i)] = -d[(i, i)].clone();
            u.negate_row(i);
        }
    }
    SnfResult {
        divisors: (0..n).map(|i| d[(i, i)].clone()).collect(),
        u,
        v,
    }
}

/// Inverse of a unimodular matrix, read off its Hermite form (which is `I`).
pub fn unimodular_inverse(m: &IntMatrix) -> IntMatrix {
    let hnf = hermite_normal_form(m);
    assert!(
        hnf.h == IntMatrix::identity(m.rows),
        "matrix is not unimodular"
    );
    hnf.u
}

pub fn gcd_of(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Divides `v` by the gcd of its entries.
pub fn primitive_vector(v: &[BigInt]) -> Result<IntVector> {
    let g = gcd_of(v);
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Basis of the saturated lattice `span_Q(vectors) ∩ Z^n`, in column Hermite
/// form. Returns an empty basis when the input spans the zero space.
pub fn lattice_basis_of_span(vectors: &[IntVector]) -> Vec<IntVector> {
    let nonzero: Vec<IntVector> = vectors
        .iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Vec::new();
    }
    let m = IntMatrix::from_columns(&nonzero).expect("vectors share a dimension");
    let snf = smith_normal_form(&m);
    let rank = snf.rank();
    let u_inv = unimodular_inverse(&snf.u);
    let basis: Vec<IntVector> = (0..rank).map(|c| u_inv.column(c)).collect();
    let hnf = hermite_normal_form(&IntMatrix::from_columns(&basis).expect("nonempty basis"));
    (0..rank).map(|c| hnf.h.column(c)).collect()
}

/// Integer coordinates of `v` in the lattice spanned by `basis`, or `None`
/// when `v` is not an integer combination of the basis vectors.
pub fn coordinates_in_basis(basis: &[IntVector], v: &[BigInt]) -> Option<IntVector> {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    let b = IntMatrix::from_columns(basis).ok()?;
    if b.rows != v.len() {
        return None;
    }
    let hnf = hermite_normal_form(&b);
    if hnf.rank() != basis.len() {
        return None;
    }
    let mut y: IntVector = Vec::with_capacity(basis.len());
    for &(r, k) in &hnf.pivots {
        let partial: BigInt = (0..k).map(|j| &hnf.h[(r, j)] * &y[j]).sum();
        let rest = &v[r] - partial;
        let (q, rem) = rest.div_rem(&hnf.h[(r, k)]);
        if !rem.is_zero() {
            return None;
        }
        y.push(q);
    }
    if hnf.h.mul_vector(&y) != v {
        return None;
    }
    Some(hnf.u.mul_vector(&y))
}

/// Integer vector orthogonal to the `d - 1` rows given (generalized cross
/// product from signed maximal minors). Zero if the rows are dependent.
pub fn cofactor_normal(rows: &[IntVector]) -> IntVector {
    let d = rows.len() + 1;
    (0..d)
        .map(|skip| {
            let minor: Vec<IntVector> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != skip)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let det = determinant(minor);
            if skip % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    fn is_column_hermite(h: &HnfResult) -> bool {
        let mut expected_k = 0;
        for &(r, k) in &h.pivots {
            if k != expected_k || !h.h[(r, k)].is_positive() {
                return false;
            }
            for above in 0..r {
                if !h.h[(above, k)].is_zero() {
                    return false;
                }
            }
            for j in 0..k {
                let e = &h.h[(r, j)];
                if e.is_negative() || e >= &h.h[(r, k)] {
                    return false;
                }
            }
            expected_k += 1;
        }
        (expected_k..h.h.cols()).all(|c| h.h.column(c).iter().all(Zero::is_zero))
    }

    #[test]
    fn hnf_identity() {
        let id = IntMatrix::identity(2);
        let r = hermite_normal_form(&id);
        assert_eq!(r.h, id);
        assert_eq!(r.u, id);
    }

    #[test]
    fn hnf_diagonal_already_normal() {
        let d = m(&[&[2, 0], &[0, 3]]);
        let r = hermite_normal_form(&d);
        assert_eq!(r.h, d);
        assert_eq!(&d * &r.u, r.h);
    }

    #[test]
    fn hnf_columns_11_02() {
        let mat = IntMatrix::from_columns(&[int_vector(&[1, 1]), int_vector(&[0, 2])]).unwrap();
        let r = hermite_normal_form(&mat);
        assert_eq!(r.pivots, vec![(0, 0), (1, 1)]);
        assert_eq!(r.h[(0, 0)], BigInt::from(1));
        assert_eq!(r.h[(1, 1)], BigInt::from(2));
        assert_eq!(&mat * &r.u, r.h);
        assert_eq!(r.u.determinant().abs(), BigInt::one());
        assert!(is_column_hermite(&r));
    }

    #[test]
    fn hnf_rank_deficient_and_wide() {
        let mat = m(&[&[2, 4, 6], &[1, 2, 3]]);
        let r = hermite_normal_form(&mat);
        assert_eq!(r.rank(), 1);
        assert_eq!(&mat * &r.u, r.h);
        assert!(is_column_hermite(&r));
    }

    #[test]
    fn snf_examples() {
        assert_eq!(
            smith_normal_form(&m(&[&[2, 0], &[0, 3]])).divisors,
            int_vector(&[1, 6])
        );
        assert_eq!(
            smith_normal_form(&m(&[&[1, 0, 1], &[0, 1, 1]])).divisors,
            int_vector(&[1, 1])
        );
        let zero = smith_normal_form(&m(&[&[0]]));
        assert_eq!(zero.divisors, int_vector(&[0]));
        assert_eq!(zero.rank(), 0);
    }

    #[test]
    fn snf_reconstructs() {
        let mat = m(&[&[4, 6, 2], &[6, 9, 3], &[2, 0, 8]]);
        let s = smith_normal_form(&mat);
        let d = &(&s.u * &mat) * &s.v;
        assert!(d.is_diagonal());
        for (i, div) in s.divisors.iter().enumerate() {
            assert_eq!(&d[(i, i)], div);
        }
        assert_eq!(s.u.determinant().abs(), BigInt::one());
        assert_eq!(s.v.determinant().abs(), BigInt::one());
    }

    #[test]
    fn primitive_vector_examples() {
        assert_eq!(
            primitive_vector(&int_vector(&[2, -4, 6])).unwrap(),
            int_vector(&[1, -2, 3])
        );
        assert_eq!(
            primitive_vector(&int_vector(&[0, 0, 5])).unwrap(),
            int_vector(&[0, 0, 1])
        );
        assert_eq!(
            primitive_vector(&int_vector(&[3, 5])).unwrap(),
            int_vector(&[3, 5])
        );
        assert_eq!(
            primitive_vector(&int_vector(&[0, 0])),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn saturated_bases() {
        assert_eq!(
            lattice_basis_of_span(&[int_vector(&[1, 1])]),
            vec![int_vector(&[1, 1])]
        );
        assert_eq!(
            lattice_basis_of_span(&[int_vector(&[2, 0])]),
            vec![int_vector(&[1, 0])]
        );
        let basis = lattice_basis_of_span(&[int_vector(&[1, 0, 0]), int_vector(&[1, 2, 0])]);
        assert_eq!(basis, vec![int_vector(&[1, 0, 0]), int_vector(&[0, 1, 0])]);
        assert!(lattice_basis_of_span(&[]).is_empty());
        assert!(lattice_basis_of_span(&[int_vector(&[0, 0])]).is_empty());
    }

    #[test]
    fn coordinates_round_trip() {
        let basis = vec![int_vector(&[1, 1, 0]), int_vector(&[0, 1, 1])];
        let v = int_vector(&[2, -1, -3]);
        let y = coordinates_in_basis(&basis, &v).unwrap();
        assert_eq!(y, int_vector(&[2, -3]));
        assert!(coordinates_in_basis(&basis, &int_vector(&[1, 0, 0])).is_none());
    }

    #[test]
    fn cofactor_normal_is_orthogonal() {
        let rows = vec![int_vector(&[1, 2, 3]), int_vector(&[0, 1, 4])];
        let n = cofactor_normal(&rows);
        assert!(rows.iter().all(|r| dot(r, &n).is_zero()));
        assert_eq!(n, int_vector(&[5, -4, 1]));
    }

    #[test]
    fn bareiss_matches_hand_values() {
        assert_eq!(m(&[&[2, 1], &[1, 3]]).determinant(), BigInt::from(5));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(
            m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).determinant(),
            BigInt::from(-3)
        );
    }
}
