//! Dense matrices over GF(p) and the exact linear algebra built on them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};

/// An `rows x cols` matrix over a prime field, stored row-major with one
/// canonical residue per entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

/// Output of [`Matrix::rref`]: `left * original == reduced`, `left` invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub left: Matrix,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[", self.field)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// The elementary matrix with a single `1` at `(i, j)`.
    pub fn unit(field: FieldSpec, rows: usize, cols: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        m.set(i, j, 1);
        m
    }

    /// Builds a matrix from integer rows, reducing every entry modulo `p`.
    pub fn from_rows<R: AsRef<[i64]>>(field: FieldSpec, rows: &[R]) -> Result<Matrix> {
        let n = rows.len();
        let m = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != m) {
            return Err(Error::shape("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| field.reduce(v)))
            .collect();
        Ok(Matrix { field, rows: n, cols: m, data })
    }

    /// Wraps already-reduced row-major entries.
    pub fn from_entries(field: FieldSpec, rows: usize, cols: usize, data: Vec<u8>) -> Matrix {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        debug_assert!(data.iter().all(|&v| v < field.order()));
        Matrix { field, rows, cols, data }
    }

    /// Column vector with the given entries.
    pub fn column(field: FieldSpec, data: Vec<u8>) -> Matrix {
        let n = data.len();
        Matrix::from_entries(field, n, 1, data)
    }

    pub fn scalar(field: FieldSpec, n: usize, lambda: u8) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = lambda;
        }
        m
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn entries(&self) -> &[u8] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    pub fn at(&self, i: usize, j: usize) -> FieldElem {
        self.field.elem(self.get(i, j) as u32)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        debug_assert!(v < self.field.order());
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// Matrix product. Panics on a field or inner-dimension mismatch.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix product shape")
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        self.same_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d = f.mul_add(*d, a, b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        self.assert_same_shape(rhs);
        let f = self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect();
        self.with_data(data)
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        self.assert_same_shape(rhs);
        let f = self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.sub(a, b)).collect();
        self.with_data(data)
    }

    pub fn scale(&self, lambda: u8) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, lambda)).collect();
        self.with_data(data)
    }

    pub fn neg(&self) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.neg(a)).collect();
        self.with_data(data)
    }

    fn with_data(&self, data: Vec<u8>) -> Matrix {
        Matrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    fn same_field(&self, rhs: &Matrix) -> Result<()> {
        if self.field != rhs.field {
            return Err(Error::FieldMismatch {
                left: self.field.order() as u32,
                right: rhs.field.order() as u32,
            });
        }
        Ok(())
    }

    fn assert_same_shape(&self, rhs: &Matrix) {
        assert_eq!(self.field, rhs.field, "field mismatch");
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
    }

    /// Copy of the `h x w` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, h: usize, w: usize) -> Matrix {
        assert!(r0 + h <= self.rows && c0 + w <= self.cols, "block out of range");
        let mut out = Matrix::zeros(self.field, h, w);
        for i in 0..h {
            out.data[i * w..(i + 1) * w]
                .copy_from_slice(&self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + w]);
        }
        out
    }

    /// Overwrites the block at `(r0, c0)` with `b`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert_eq!(self.field, b.field, "field mismatch");
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    /// Block-diagonal `self ⊕ other`.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    pub fn rank(&self) -> usize {
        let mut buf = self.data.clone();
        rank_in_place(self.field, self.rows, self.cols, &mut buf)
    }

    /// Reduced row-echelon form together with an invertible left factor.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let (n, m) = self.shape();
        let width = m + n;
        let mut aug = vec![0u8; n * width];
        for i in 0..n {
            aug[i * width..i * width + m].copy_from_slice(self.row(i));
            aug[i * width + m + i] = 1;
        }
        let pivots = rref_rows(f, n, width, &mut aug, m);
        let mut reduced = Matrix::zeros(f, n, m);
        let mut left = Matrix::zeros(f, n, n);
        for i in 0..n {
            reduced.data[i * m..(i + 1) * m].copy_from_slice(&aug[i * width..i * width + m]);
            left.data[i * n..(i + 1) * n].copy_from_slice(&aug[i * width + m..(i + 1) * width]);
        }
        Rref { reduced, pivots, left }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::shape(format!("inverse of non-square {}x{}", self.rows, self.cols)));
        }
        let r = self.rref();
        if r.pivots.len() < self.rows {
            return Err(Error::SingularMatrix);
        }
        Ok(r.left)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn det(&self) -> u8 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let f = self.field;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1u8;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&r| a[r * n + c] != 0) else {
                return 0;
            };
            if pr != c {
                for j in 0..n {
                    a.swap(pr * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = a[c * n + c];
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("nonzero pivot");
            for r in c + 1..n {
                let factor = f.mul(a[r * n + c], inv);
                if factor == 0 {
                    continue;
                }
                let nf = f.neg(factor);
                for j in c..n {
                    a[r * n + j] = f.mul_add(a[r * n + j], nf, a[c * n + j]);
                }
            }
        }
        det
    }

    /// Basis of the right null space `{x : self * x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<u8>> {
        let f = self.field;
        let r = self.rref();
        let m = self.cols;
        let mut is_pivot = vec![false; m];
        for &c in &r.pivots {
            is_pivot[c] = true;
        }
        (0..m)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u8; m];
                v[free] = 1;
                for (i, &pc) in r.pivots.iter().enumerate() {
                    v[pc] = f.neg(r.reduced.get(i, free));
                }
                v
            })
            .collect()
    }

    /// Solves `self · x = rhs`: a particular solution plus a basis of the
    /// homogeneous solutions, or `None` when the system is inconsistent.
    pub fn solve(&self, rhs: &[u8]) -> Option<(Vec<u8>, Vec<Vec<u8>>)> {
        assert_eq!(rhs.len(), self.rows, "right-hand side length");
        let f = self.field;
        let (n, m) = self.shape();
        let width = m + 1;
        let mut aug = vec![0u8; n * width];
        for i in 0..n {
            aug[i * width..i * width + m].copy_from_slice(self.row(i));
            aug[i * width + m] = rhs[i];
        }
        let pivots = rref_rows(f, n, width, &mut aug, m);
        if (pivots.len()..n).any(|i| aug[i * width + m] != 0) {
            return None;
        }
        let mut particular = vec![0u8; m];
        for (i, &c) in pivots.iter().enumerate() {
            particular[c] = aug[i * width + m];
        }
        let mut is_pivot = vec![false; m];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let kernel = (0..m)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u8; m];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(aug[i * width + free]);
                }
                v
            })
            .collect();
        Some((particular, kernel))
    }

    /// Uniformly random invertible `n x n` matrix (rejection sampling).
    pub fn random_invertible<R: Rng + ?Sized>(field: FieldSpec, n: usize, rng: &mut R) -> Matrix {
        let q = field.order();
        loop {
            let data = (0..n * n).map(|_| rng.gen_range(0..q)).collect();
            let m = Matrix::from_entries(field, n, n, data);
            if m.is_invertible() {
                return m;
            }
        }
    }
}

/// Row-reduces `rows x width` entries in place to reduced row-echelon form,
/// choosing pivots only among the first `pivot_cols` columns. Returns the
/// pivot columns.
pub(crate) fn rref_rows(f: FieldSpec, rows: usize, width: usize, a: &mut [u8], pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i * width + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..width {
                a.swap(pr * width + j, r * width + j);
            }
        }
        let inv = f.inv(a[r * width + c]).expect("nonzero pivot");
        for j in c..width {
            a[r * width + j] = f.mul(a[r * width + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[i * width + c];
            if factor == 0 {
                continue;
            }
            let nf = f.neg(factor);
            for j in c..width {
                a[i * width + j] = f.mul_add(a[i * width + j], nf, a[r * width + j]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination, destroying `a`.
pub fn rank_in_place(f: FieldSpec, rows: usize, cols: usize, a: &mut [u8]) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in c..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a[r * cols + c]).expect("nonzero pivot");
        for i in r + 1..rows {
            let factor = a[i * cols + c];
            if factor == 0 {
                continue;
            }
            let nf = f.neg(f.mul(factor, inv));
            for j in c..cols {
                a[i * cols + j] = f.mul_add(a[i * cols + j], nf, a[r * cols + j]);
            }
        }
        r += 1;
    }
    r
}

/// `|GL_n(F_q)| = prod_{i<n} (q^n - q^i)`.
pub fn gl_order(n: usize, q: u64) -> u128 {
    let qn = (q as u128).pow(n as u32);
    (0..n as u32).map(|i| qn - (q as u128).pow(i)).product()
}

/// Iterator over `GL_n(F_q)` in lexicographic order of row-major entries.
pub struct GlEnumerator {
    field: FieldSpec,
    n: usize,
    current: Vec<u8>,
    done: bool,
}

impl GlEnumerator {
    /// No budget check; callers meter the elements they consume.
    pub fn unbounded(n: usize, field: FieldSpec) -> GlEnumerator {
        GlEnumerator { field, n, current: vec![0; n * n], done: n == 0 }
    }
}

impl Iterator for GlEnumerator {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        let q = self.field.order();
        while !self.done {
            let candidate = Matrix::from_entries(self.field, self.n, self.n, self.current.clone());
            // odometer step, last entry fastest
            let mut k = self.current.len();
            loop {
                if k == 0 {
                    self.done = true;
                    break;
                }
                k -= 1;
                self.current[k] += 1;
                if self.current[k] < q {
                    break;
                }
                self.current[k] = 0;
            }
            if candidate.is_invertible() {
                return Some(candidate);
            }
        }
        None
    }
}

/// Streams every invertible `n x n` matrix exactly once, provided the
/// `q^(n^2)` candidates fit in `budget`.
pub fn enumerate_gl(n: usize, field: FieldSpec, budget: u64) -> Result<GlEnumerator> {
    let candidates = (field.order() as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if candidates > budget as u128 {
        return Err(Error::budget(format!("GL_{n}({field})"), candidates, budget));
    }
    Ok(GlEnumerator { field, n, current: vec![0; n * n], done: n == 0 })
}

type GlCache = Mutex<HashMap<(usize, u8), Arc<Vec<Matrix>>>>;

/// Cached, fully materialised `GL_n` in enumeration order.
pub fn gl_list(n: usize, field: FieldSpec, budget: u64) -> Result<Arc<Vec<Matrix>>> {
    static CACHE: OnceLock<GlCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(list) = cache.lock().expect("gl cache").get(&(n, field.order())) {
        return Ok(Arc::clone(list));
    }
    let list = Arc::new(enumerate_gl(n, field, budget)?.collect::<Vec<_>>());
    cache.lock().expect("gl cache").insert((n, field.order()), Arc::clone(&list));
    Ok(list)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    field: u32,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<i64>>,
}

impl Matrix {
    pub(crate) fn from_json_parts(p: u32, rows: usize, cols: usize, entries: &[Vec<i64>]) -> Result<Matrix> {
        let field = FieldSpec::new(p)?;
        if rows == 0 || cols == 0 {
            return Err(Error::shape("matrix dimensions must be positive"));
        }
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::shape(format!("entries do not form a {rows}x{cols} array")));
        }
        let mut data = Vec::with_capacity(rows * cols);
        for &v in entries.iter().flatten() {
            if v < 0 || v >= field.order() as i64 {
                return Err(Error::EntryOutOfRange { value: v, p: field.order() });
            }
            data.push(v as u8);
        }
        Ok(Matrix { field, rows, cols, data })
    }

    pub(crate) fn json_entries(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|&v| v as i64).collect()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Matrix> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            field: self.field.order() as u32,
            rows: self.rows,
            cols: self.cols,
            entries: self.json_entries(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Matrix::from_json_parts(j.field, j.rows, j.cols, &j.entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn m(f: FieldSpec, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(f, rows).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f = gf(3);
        assert_eq!(Matrix::identity(f, 3).rank(), 3);
        assert_eq!(Matrix::zeros(f, 2, 2).rank(), 0);
        assert_eq!(m(f, &[&[1, 2], &[2, 1]]).rank(), 1);
        assert_eq!(m(gf(5), &[&[1, 2], &[2, 1]]).rank(), 2);
    }

    #[test]
    fn rref_examples() {
        let f = gf(3);
        let r = Matrix::identity(f, 2).rref();
        assert_eq!((r.reduced, r.pivots), (Matrix::identity(f, 2), vec![0, 1]));
        let a = m(f, &[&[0, 1], &[0, 2]]);
        let r = a.rref();
        assert_eq!(r.reduced, m(f, &[&[0, 1], &[0, 0]]));
        assert_eq!(r.pivots, vec![1]);
        assert_eq!(r.left.mul(&a), r.reduced);
        assert!(r.left.is_invertible());
    }

    #[test]
    fn inverse_examples() {
        let f = gf(3);
        assert_eq!(Matrix::identity(f, 3).inverse().unwrap(), Matrix::identity(f, 3));
        let a = m(f, &[&[0, 1], &[2, 0]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(f, &[&[0, 2], &[1, 0]]));
        assert_eq!(a.mul(&inv), Matrix::identity(f, 2));
        assert!(matches!(m(f, &[&[1, 1], &[1, 1]]).inverse(), Err(Error::SingularMatrix)));
        assert!(Matrix::zeros(f, 2, 3).inverse().is_err());
    }

    #[test]
    fn gl_counts() {
        let f = gf(3);
        assert_eq!(enumerate_gl(1, f, u64::MAX).unwrap().count(), 2);
        assert_eq!(enumerate_gl(2, f, u64::MAX).unwrap().count(), 48);
        assert_eq!(enumerate_gl(3, f, u64::MAX).unwrap().count(), 11232);
        assert_eq!(enumerate_gl(2, gf(5), u64::MAX).unwrap().count() as u128, gl_order(2, 5));
        assert!(matches!(enumerate_gl(3, f, 1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn gl_order_is_lexicographic() {
        let f = gf(3);
        let list: Vec<Matrix> = enumerate_gl(2, f, u64::MAX).unwrap().collect();
        assert_eq!(list[0], m(f, &[&[0, 1], &[1, 0]]));
        assert!(list.windows(2).all(|w| w[0].entries() < w[1].entries()));
    }

    #[test]
    fn det_and_kernel() {
        let f = gf(5);
        let a = m(f, &[&[1, 2], &[3, 4]]);
        assert_eq!(a.det(), f.reduce(-2));
        let s = m(f, &[&[1, 2, 3], &[2, 4, 2]]);
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert!(s.mul(&Matrix::column(f, k[0].clone())).is_zero());
    }

    #[test]
    fn solve_consistent_and_not() {
        let f = gf(3);
        let a = m(f, &[&[1, 1], &[1, 1]]);
        let (x, ker) = a.solve(&[2, 2]).unwrap();
        assert_eq!(a.mul(&Matrix::column(f, x)).entries(), &[2, 2]);
        assert_eq!(ker.len(), 1);
        assert!(a.solve(&[1, 2]).is_none());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f = gf(7);
        let a = m(f, &[&[1, 6, 0], &[3, 2, 5]]);
        assert_eq!(a.to_json(), r#"{"field":7,"rows":2,"cols":3,"entries":[[1,6,0],[3,2,5]]}"#);
        assert_eq!(Matrix::from_json(&a.to_json()).unwrap(), a);
        assert!(Matrix::from_json(r#"{"field":3,"rows":1,"cols":1,"entries":[[3]]}"#).is_err());
        assert!(Matrix::from_json(r#"{"field":3,"rows":1,"cols":2,"entries":[[1]]}"#).is_err());
        assert!(Matrix::from_json(r#"{"field":4,"rows":1,"cols":1,"entries":[[1]]}"#).is_err());
        assert!(Matrix::from_json(r#"{"field":3,"rows":0,"cols":1,"entries":[]}"#).is_err());
    }
}
