//! Exact integer and rational linear algebra over the standard lattice Z^n:
//! Hermite and Smith normal forms, primitivity and sublattice saturation.
//!
//! Conventions are fixed so that certificates are reproducible: HNF is
//! row-style with positive pivots and above-pivot entries reduced into
//! `[0, pivot)`; the SNF diagonal is nonnegative with a divisibility chain.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("input vectors are linearly dependent over Q")]
    DependentInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty input")]
    Empty,
}

/// A vector with arbitrary-precision integer entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector {
    entries: Vec<BigInt>,
}

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        Self { entries }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Self {
            entries: entries.iter().map(|&e| BigInt::from(e)).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![BigInt::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// gcd of the entries (nonnegative; 0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.entries
            .iter()
            .fold(BigInt::zero(), |g, e| g.gcd(e))
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn dot_rat(&self, other: &RatVector) -> BigRational {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(other.entries())
            .map(|(a, b)| BigRational::from(a.clone()) * b)
            .sum()
    }

    pub fn neg(&self) -> IntVector {
        IntVector::new(self.entries.iter().map(|e| -e).collect())
    }

    /// Divide out the content, preserving sign. Errors on the zero vector.
    pub fn primitive_part(&self) -> Result<IntVector, LatticeError> {
        let g = self.content();
        if g.is_zero() {
            return Err(LatticeError::ZeroVector);
        }
        Ok(IntVector::new(self.entries.iter().map(|e| e / &g).collect()))
    }

    pub fn to_rat(&self) -> RatVector {
        RatVector::new(
            self.entries
                .iter()
                .map(|e| BigRational::from(e.clone()))
                .collect(),
        )
    }
}

/// A vector with exact rational entries (always stored reduced by `num`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatVector {
    entries: Vec<BigRational>,
}

impl RatVector {
    pub fn new(entries: Vec<BigRational>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![BigRational::zero(); dim],
        }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Self {
            entries: entries
                .iter()
                .map(|&e| BigRational::from(BigInt::from(e)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn dot(&self, other: &RatVector) -> BigRational {
        debug_assert_eq!(self.dim(), other.dim());
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, c: &BigRational) -> RatVector {
        RatVector::new(self.entries.iter().map(|e| e * c).collect())
    }

    /// Clear denominators and divide by the content; errors on zero.
    pub fn primitive_direction(&self) -> Result<IntVector, LatticeError> {
        let lcm = self
            .entries
            .iter()
            .fold(BigInt::one(), |l, e| l.lcm(e.denom()));
        let ints: Vec<BigInt> = self
            .entries
            .iter()
            .map(|e| e.numer() * (&lcm / e.denom()))
            .collect();
        IntVector::new(ints).primitive_part()
    }
}

/// A dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[IntVector]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.dim());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.dim(), c, "ragged rows");
            data.extend(row.entries().iter().cloned());
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let vs: Vec<IntVector> = rows.iter().map(|r| IntVector::from_i64(r)).collect();
        Self::from_rows(&vs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector::new(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector::new((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.cols, v.dim());
        IntVector::new(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols)
                        .map(|j| self.get(i, j) * &v.entries()[j])
                        .sum()
                })
                .collect(),
        )
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = &num / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Rank over Q.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<BigRational>> = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| BigRational::from(self.get(i, j).clone()))
                    .collect()
            })
            .collect();
        rational_rank(&mut a)
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    /// Exact inverse of a unimodular matrix (integer entries).
    pub fn inverse_unimodular(&self) -> IntMatrix {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let det = self.det();
        assert!(det.abs().is_one(), "matrix is not unimodular");
        // Gauss-Jordan over Q; entries of the result are integers since |det| = 1.
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n)
                    .map(|j| BigRational::from(self.get(i, j).clone()))
                    .collect();
                row.extend((0..n).map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).expect("singular");
            a.swap(k, p);
            let piv = a[k][k].clone();
            for j in 0..2 * n {
                a[k][j] = &a[k][j] / &piv;
            }
            for i in 0..n {
                if i != k && !a[i][k].is_zero() {
                    let f = a[i][k].clone();
                    for j in 0..2 * n {
                        let v = &a[i][j] - &f * &a[k][j];
                        a[i][j] = v;
                    }
                }
            }
        }
        let mut inv = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let e = &a[i][n + j];
                assert!(e.is_integer());
                inv.set(i, j, e.to_integer());
            }
        }
        inv
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c).clone();
            self.set(i, c, v);
        }
    }

    /// row i -= q * row j
    fn sub_scaled_row(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(i, c) - q * self.get(j, c);
            self.set(i, c, v);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// col i -= q * col j
    fn sub_scaled_col(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, i) - q * self.get(r, j);
            self.set(r, i, v);
        }
    }
}

pub(crate) fn rational_rank(a: &mut Vec<Vec<BigRational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        for i in row + 1..rows {
            if !a[i][col].is_zero() {
                let f = &a[i][col] / &a[row][col];
                for j in col..cols {
                    let v = &a[i][j] - &f * &a[row][j];
                    a[i][j] = v;
                }
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

/// Rank over Q of a set of integer vectors.
pub fn rank_of(vectors: &[IntVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(vectors).rank()
}

/// Row-style Hermite normal form. Returns `(h, u)` with `h = u * m`,
/// `u` unimodular, pivots positive and above-pivot entries in `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let rows = m.rows();
    let cols = m.cols();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row >= rows {
            break;
        }
        if (pivot_row..rows).all(|i| h.get(i, col).is_zero()) {
            continue;
        }
        // Euclidean reduction of the column below pivot_row.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..rows {
                if !h.get(i, col).is_zero()
                    && best.map_or(true, |b| h.get(i, col).abs() < h.get(b, col).abs())
                {
                    best = Some(i);
                }
            }
            let b = best.unwrap();
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            let piv = h.get(pivot_row, col).clone();
            for i in pivot_row + 1..rows {
                if !h.get(i, col).is_zero() {
                    let q = h.get(i, col).div_floor(&piv);
                    h.sub_scaled_row(i, pivot_row, &q);
                    u.sub_scaled_row(i, pivot_row, &q);
                    if !h.get(i, col).is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h.get(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let piv = h.get(pivot_row, col).clone();
        for i in 0..pivot_row {
            let q = h.get(i, col).div_floor(&piv);
            h.sub_scaled_row(i, pivot_row, &q);
            u.sub_scaled_row(i, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form. Returns `(d, u, v)` with `d = u * m * v`, `u` and `v`
/// unimodular, `d` diagonal with nonnegative entries in a divisibility chain.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (d, u, v, _vinv) = snf_with_inverse(m);
    (d, u, v)
}

/// SNF that additionally tracks the inverse of `v`, needed for Z-basis
/// completions.
pub fn snf_with_inverse(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let rows = d.rows();
    let cols = d.cols();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut vinv = IntMatrix::identity(cols);
    let r = rows.min(cols);
    for t in 0..r {
        // Find a nonzero pivot in the trailing block.
        let mut pivot = None;
        'search: for i in t..rows {
            for j in t..cols {
                if !d.get(i, j).is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        vinv.swap_rows(t, pj);
        // Clear row and column t; restart if a residual appears.
        loop {
            // Column below pivot.
            loop {
                let mut best = t;
                for i in t + 1..rows {
                    if !d.get(i, t).is_zero()
                        && (d.get(best, t).is_zero()
                            || d.get(i, t).abs() < d.get(best, t).abs())
                    {
                        best = i;
                    }
                }
                d.swap_rows(t, best);
                u.swap_rows(t, best);
                let piv = d.get(t, t).clone();
                let mut done = true;
                for i in t + 1..rows {
                    if !d.get(i, t).is_zero() {
                        let q = d.get(i, t).div_floor(&piv);
                        d.sub_scaled_row(i, t, &q);
                        u.sub_scaled_row(i, t, &q);
                        if !d.get(i, t).is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            // Row right of pivot.
            loop {
                let mut best = t;
                for j in t + 1..cols {
                    if !d.get(t, j).is_zero()
                        && (d.get(t, best).is_zero()
                            || d.get(t, j).abs() < d.get(t, best).abs())
                    {
                        best = j;
                    }
                }
                d.swap_cols(t, best);
                v.swap_cols(t, best);
                vinv.swap_rows(t, best);
                let piv = d.get(t, t).clone();
                let mut done = true;
                for j in t + 1..cols {
                    if !d.get(t, j).is_zero() {
                        let q = d.get(t, j).div_floor(&piv);
                        d.sub_scaled_col(j, t, &q);
                        v.sub_scaled_col(j, t, &q);
                        // Inverse of a column op C_j -= q C_t is R_t += q R_j on vinv.
                        let nq = -q;
                        vinv.sub_scaled_row(t, j, &nq);
                        if !d.get(t, j).is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if (t + 1..rows).all(|i| d.get(i, t).is_zero()) {
                break;
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    // Enforce the divisibility chain d_i | d_{i+1}.
    loop {
        let mut fixed = true;
        for t in 0..r.saturating_sub(1) {
            let a = d.get(t, t).clone();
            let b = d.get(t + 1, t + 1).clone();
            if a.is_zero() && !b.is_zero() {
                // Move the nonzero entry forward.
                d.swap_rows(t, t + 1);
                u.swap_rows(t, t + 1);
                d.swap_cols(t, t + 1);
                v.swap_cols(t, t + 1);
                vinv.swap_rows(t, t + 1);
                fixed = false;
                continue;
            }
            if a.is_zero() || (&b % &a).is_zero() {
                continue;
            }
            // Fold b into position t via a 2x2 gcd step: add column t+1 to
            // column t, then re-reduce the 2x2 block with row/col operations.
            let one = BigInt::one();
            d.sub_scaled_col(t, t + 1, &-one.clone());
            v.sub_scaled_col(t, t + 1, &-one.clone());
            vinv.sub_scaled_row(t + 1, t, &one);
            // Now the block is [[a, 0], [b, b]]; reduce it.
            reduce_block(&mut d, &mut u, &mut v, &mut vinv, t);
            fixed = false;
        }
        if fixed {
            break;
        }
    }
    (d, u, v, vinv)
}

/// Re-diagonalize the 2x2 block at (t, t) after a divisibility fix.
fn reduce_block(
    d: &mut IntMatrix,
    u: &mut IntMatrix,
    v: &mut IntMatrix,
    vinv: &mut IntMatrix,
    t: usize,
) {
    let rows = d.rows();
    let cols = d.cols();
    loop {
        // Clear column t.
        loop {
            let mut best = t;
            for i in t + 1..rows.min(t + 2) {
                if !d.get(i, t).is_zero()
                    && (d.get(best, t).is_zero() || d.get(i, t).abs() < d.get(best, t).abs())
                {
                    best = i;
                }
            }
            d.swap_rows(t, best);
            u.swap_rows(t, best);
            let piv = d.get(t, t).clone();
            let mut done = true;
            for i in t + 1..rows.min(t + 2) {
                if !d.get(i, t).is_zero() {
                    let q = d.get(i, t).div_floor(&piv);
                    d.sub_scaled_row(i, t, &q);
                    u.sub_scaled_row(i, t, &q);
                    if !d.get(i, t).is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        // Clear row t.
        loop {
            let mut best = t;
            for j in t + 1..cols.min(t + 2) {
                if !d.get(t, j).is_zero()
                    && (d.get(t, best).is_zero() || d.get(t, j).abs() < d.get(t, best).abs())
                {
                    best = j;
                }
            }
            d.swap_cols(t, best);
            v.swap_cols(t, best);
            vinv.swap_rows(t, best);
            let piv = d.get(t, t).clone();
            let mut done = true;
            for j in t + 1..cols.min(t + 2) {
                if !d.get(t, j).is_zero() {
                    let q = d.get(t, j).div_floor(&piv);
                    d.sub_scaled_col(j, t, &q);
                    v.sub_scaled_col(j, t, &q);
                    let nq = -q;
                    vinv.sub_scaled_row(t, j, &nq);
                    if !d.get(t, j).is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if (t + 1..rows.min(t + 2)).all(|i| d.get(i, t).is_zero()) {
            break;
        }
    }
    if d.get(t, t).is_negative() {
        d.negate_row(t);
        u.negate_row(t);
    }
    if t + 1 < rows && t + 1 < cols && d.get(t + 1, t + 1).is_negative() {
        d.negate_row(t + 1);
        u.negate_row(t + 1);
    }
}

/// True iff the entries of `v` are coprime.
pub fn is_primitive(v: &IntVector) -> Result<bool, LatticeError> {
    if v.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    Ok(v.content().is_one())
}

/// Result of a sublattice saturation test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationReport {
    pub saturated: bool,
    pub snf_diagonal: Vec<BigInt>,
    /// Rows completing the input to a Z-basis of Z^n, present iff saturated.
    pub completion: Option<IntMatrix>,
}

/// Decide whether the Z-span of linearly independent integer vectors is a
/// saturated sublattice of Z^n, i.e. whether they extend to a Z-basis.
pub fn saturation_check(vectors: &[IntVector]) -> Result<SaturationReport, LatticeError> {
    if vectors.is_empty() {
        return Err(LatticeError::Empty);
    }
    let n = vectors[0].dim();
    for v in vectors {
        if v.dim() != n {
            return Err(LatticeError::DimensionMismatch {
                expected: n,
                got: v.dim(),
            });
        }
    }
    let k = vectors.len();
    let m = IntMatrix::from_rows(vectors);
    if m.rank() != k {
        return Err(LatticeError::DependentInput);
    }
    let (d, _u, _v, vinv) = snf_with_inverse(&m);
    let diag: Vec<BigInt> = (0..k).map(|i| d.get(i, i).clone()).collect();
    let saturated = diag.iter().all(|e| e.is_one());
    let completion = if saturated && k < n {
        // With D = U M V = [I_k | 0], the rows of M span the same lattice as
        // the first k rows of V^{-1}; the last n-k rows of V^{-1} complete
        // them to a Z-basis.
        let mut c = IntMatrix::zeros(n - k, n);
        for i in k..n {
            for j in 0..n {
                c.set(i - k, j, vinv.get(i, j).clone());
            }
        }
        Some(c)
    } else if saturated {
        Some(IntMatrix::zeros(0, n))
    } else {
        None
    };
    Ok(SaturationReport {
        saturated,
        snf_diagonal: diag,
        completion,
    })
}
