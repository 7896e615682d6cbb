//! Affine subspaces of `M_{n,p}(GF(q))` with canonical encodings, and the
//! standard constructions on them (alternate spaces, `∨`, `i_{n,p}`, the
//! canonical maximal families).
//!
//! A subspace is stored as an offset plus a translation space. Matrices are
//! vectorised row-major; the translation space is kept as the reduced
//! row-echelon basis of those coordinate vectors and the offset is reduced
//! to zero at every pivot coordinate. Two subspaces are equal as point sets
//! exactly when their encodings are equal, so `Eq`/`Hash` are set identity.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::{rank_in_place, rref_rows, Matrix};
use crate::quadform;

/// Default number of rank evaluations an exhaustive scan may spend.
pub const DEFAULT_LRK_BUDGET: u64 = 10_000_000;

/// A linear subspace of `GF(q)^m`, held as a reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    field: FieldSpec,
    ambient: usize,
    basis: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn zero(field: FieldSpec, ambient: usize) -> Span {
        Span { field, ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: FieldSpec, ambient: usize) -> Span {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Span { field, ambient, basis, pivots: (0..ambient).collect() }
    }

    /// Span of arbitrary (possibly dependent) vectors of length `ambient`.
    pub fn from_vectors<'a, I>(field: FieldSpec, ambient: usize, vectors: I) -> Span
    where
        I: IntoIterator<Item = &'a [u8]>,
    {
        let mut flat = Vec::new();
        let mut count = 0;
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length does not match ambient dimension");
            flat.extend_from_slice(v);
            count += 1;
        }
        Span::from_flat(field, ambient, count, flat)
    }

    pub(crate) fn from_flat(field: FieldSpec, ambient: usize, count: usize, mut flat: Vec<u8>) -> Span {
        let pivots = rref_rows(field, count, ambient, &mut flat, ambient);
        let basis = (0..pivots.len())
            .map(|i| flat[i * ambient..(i + 1) * ambient].to_vec())
            .collect();
        Span { field, ambient, basis, pivots }
    }

    #[inline]
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Replaces `v` by its residue modulo the span (zero at every pivot).
    #[inline]
    pub fn reduce(&self, v: &mut [u8]) {
        let f = self.field;
        for (b, &c) in self.basis.iter().zip(&self.pivots) {
            let coef = v[c];
            if coef == 0 {
                continue;
            }
            let nc = f.neg(coef);
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.mul_add(*x, nc, y);
            }
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Coordinates of a member in the canonical basis; `None` if outside.
    pub fn coordinates(&self, v: &[u8]) -> Option<Vec<u8>> {
        let coords: Vec<u8> = self.pivots.iter().map(|&c| v[c]).collect();
        let f = self.field;
        let mut w = v.to_vec();
        for (b, &c) in self.basis.iter().zip(&coords) {
            let nc = f.neg(c);
            for (x, &y) in w.iter_mut().zip(b) {
                *x = f.mul_add(*x, nc, y);
            }
        }
        w.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn is_subspace_of(&self, other: &Span) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    /// Smallest span containing both.
    pub fn join(&self, other: &Span) -> Span {
        Span::from_vectors(
            self.field,
            self.ambient,
            self.basis.iter().chain(other.basis.iter()).map(Vec::as_slice),
        )
    }

    /// Basis of the orthogonal complement under the dot product.
    pub fn orthogonal(&self) -> Span {
        if self.basis.is_empty() {
            return Span::full(self.field, self.ambient);
        }
        let flat: Vec<u8> = self.basis.iter().flatten().copied().collect();
        let m = Matrix::from_entries(self.field, self.dim(), self.ambient, flat);
        let kernel = m.kernel();
        Span::from_vectors(self.field, self.ambient, kernel.iter().map(Vec::as_slice))
    }
}

/// An affine subspace `offset + span` of `M_{rows,cols}(GF(q))`, canonically
/// encoded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    offset: Vec<u8>,
    span: Span,
}

impl AffineSubspace {
    /// `offset + span(generators)`; dependent generators are dropped.
    pub fn new(offset: &Matrix, generators: &[Matrix]) -> Result<AffineSubspace> {
        let (field, (rows, cols)) = (offset.field(), offset.shape());
        for g in generators {
            if g.field() != field {
                return Err(Error::FieldMismatch { left: field.order() as u32, right: g.field().order() as u32 });
            }
            if g.shape() != (rows, cols) {
                return Err(Error::shape(format!(
                    "generator is {}x{}, offset is {rows}x{cols}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        let span = Span::from_vectors(field, rows * cols, generators.iter().map(Matrix::entries));
        Ok(AffineSubspace::from_parts(field, rows, cols, offset.entries().to_vec(), span))
    }

    /// Linear subspace spanned by `generators` inside `M_{rows,cols}`.
    pub fn linear(field: FieldSpec, rows: usize, cols: usize, generators: &[Matrix]) -> Result<AffineSubspace> {
        AffineSubspace::new(&Matrix::zeros(field, rows, cols), generators)
    }

    pub fn point(m: &Matrix) -> AffineSubspace {
        let span = Span::zero(m.field(), m.rows() * m.cols());
        AffineSubspace::from_parts(m.field(), m.rows(), m.cols(), m.entries().to_vec(), span)
    }

    /// The whole ambient space `M_{rows,cols}`.
    pub fn full(field: FieldSpec, rows: usize, cols: usize) -> AffineSubspace {
        let span = Span::full(field, rows * cols);
        AffineSubspace::from_parts(field, rows, cols, vec![0; rows * cols], span)
    }

    pub(crate) fn from_parts(field: FieldSpec, rows: usize, cols: usize, mut offset: Vec<u8>, span: Span) -> AffineSubspace {
        debug_assert_eq!(span.ambient, rows * cols);
        span.reduce(&mut offset);
        AffineSubspace { field, rows, cols, offset, span }
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

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn codim(&self) -> usize {
        self.rows * self.cols - self.dim()
    }

    pub fn span(&self) -> &Span {
        &self.span
    }

    pub fn offset_entries(&self) -> &[u8] {
        &self.offset
    }

    pub fn offset(&self) -> Matrix {
        Matrix::from_entries(self.field, self.rows, self.cols, self.offset.clone())
    }

    /// Canonical basis of the translation space, as matrices.
    pub fn basis(&self) -> Vec<Matrix> {
        self.span
            .basis
            .iter()
            .map(|b| Matrix::from_entries(self.field, self.rows, self.cols, b.clone()))
            .collect()
    }

    /// The translation vector space, as a linear subspace.
    pub fn translation(&self) -> AffineSubspace {
        AffineSubspace {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            offset: vec![0; self.rows * self.cols],
            span: self.span.clone(),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.offset.iter().all(|&v| v == 0)
    }

    fn check_member_shape(&self, m: &Matrix) -> Result<()> {
        if m.field() != self.field {
            return Err(Error::FieldMismatch { left: self.field.order() as u32, right: m.field().order() as u32 });
        }
        if m.shape() != self.shape() {
            return Err(Error::shape(format!(
                "matrix is {}x{}, subspace lives in {}x{}",
                m.rows(),
                m.cols(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }

    pub fn contains(&self, m: &Matrix) -> Result<bool> {
        self.check_member_shape(m)?;
        Ok(self.contains_entries(m.entries()))
    }

    pub(crate) fn contains_entries(&self, v: &[u8]) -> bool {
        let f = self.field;
        let mut w: Vec<u8> = v.iter().zip(&self.offset).map(|(&a, &b)| f.sub(a, b)).collect();
        self.span.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Is `self` (as a point set) inside `other`?
    pub fn is_subset_of(&self, other: &AffineSubspace) -> bool {
        self.field == other.field
            && self.shape() == other.shape()
            && other.contains_entries(&self.offset)
            && self.span.is_subspace_of(&other.span)
    }

    /// `q^dim`, saturating.
    pub fn point_count(&self) -> u128 {
        (self.field.order() as u128).checked_pow(self.dim() as u32).unwrap_or(u128::MAX)
    }

    /// Visits every member once, in lexicographic order of the coefficients on
    /// the canonical basis. No budget check.
    pub fn for_each_point<F>(&self, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&[u8]) -> ControlFlow<()>,
    {
        let f = self.field;
        let q = f.order();
        let d = self.dim();
        let mut coeffs = vec![0u8; d];
        let mut x = self.offset.clone();
        loop {
            visit(&x)?;
            let mut k = d;
            loop {
                if k == 0 {
                    return ControlFlow::Continue(());
                }
                k -= 1;
                for (xi, &bi) in x.iter_mut().zip(&self.span.basis[k]) {
                    *xi = f.add(*xi, bi);
                }
                coeffs[k] += 1;
                if coeffs[k] < q {
                    break;
                }
                coeffs[k] = 0;
            }
        }
    }

    /// All `q^dim` members, each once, provided that fits in `budget`.
    pub fn points(&self, budget: u64) -> Result<Vec<Matrix>> {
        let count = self.point_count();
        if count > budget as u128 {
            return Err(Error::budget("point enumeration", count, budget));
        }
        let mut out = Vec::with_capacity(count as usize);
        let _ = self.for_each_point(|x| {
            out.push(Matrix::from_entries(self.field, self.rows, self.cols, x.to_vec()));
            ControlFlow::Continue(())
        });
        Ok(out)
    }

    /// Exact lower rank (minimum rank of a member).
    pub fn lrk(&self, budget: u64) -> Result<usize> {
        let count = self.point_count();
        if count > budget as u128 {
            return Err(Error::LrkBudgetExceeded {
                points: count,
                budget,
                upper_bound: self.sampled_rank_bound(budget.min(4096)),
            });
        }
        Ok(self.lrk_unchecked())
    }

    pub(crate) fn lrk_unchecked(&self) -> usize {
        let mut ranker = Ranker::new(self.field, self.rows, self.cols);
        let mut best = self.rows.min(self.cols);
        let _ = self.for_each_point(|x| {
            best = best.min(ranker.rank(x));
            if best == 0 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        best
    }

    /// Minimum rank over a deterministic pseudo-random sample of members.
    fn sampled_rank_bound(&self, samples: u64) -> usize {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let f = self.field;
        let mut ranker = Ranker::new(f, self.rows, self.cols);
        let mut best = ranker.rank(&self.offset);
        for _ in 0..samples {
            let mut x = self.offset.clone();
            for b in &self.span.basis {
                let c = rng.gen_range(0..f.order());
                for (xi, &bi) in x.iter_mut().zip(b) {
                    *xi = f.mul_add(*xi, c, bi);
                }
            }
            best = best.min(ranker.rank(&x));
        }
        best
    }

    /// `hist[k]` = number of members of rank `k`.
    pub fn rank_histogram(&self, budget: u64) -> Result<Vec<u64>> {
        let count = self.point_count();
        if count > budget as u128 {
            return Err(Error::budget("rank histogram", count, budget));
        }
        let mut ranker = Ranker::new(self.field, self.rows, self.cols);
        let mut hist = vec![0u64; self.rows.min(self.cols) + 1];
        let _ = self.for_each_point(|x| {
            hist[ranker.rank(x)] += 1;
            ControlFlow::Continue(())
        });
        Ok(hist)
    }

    /// Canonical encoding of `P · self · Q`.
    pub fn transform(&self, p: &Matrix, q: &Matrix) -> Result<AffineSubspace> {
        if p.field() != self.field || q.field() != self.field {
            return Err(Error::FieldMismatch {
                left: self.field.order() as u32,
                right: if p.field() != self.field { p.field() } else { q.field() }.order() as u32,
            });
        }
        if p.shape() != (self.rows, self.rows) || q.shape() != (self.cols, self.cols) {
            return Err(Error::shape(format!(
                "transform of a {}x{} space needs {}x{} and {}x{} factors",
                self.rows, self.cols, self.rows, self.rows, self.cols, self.cols
            )));
        }
        if !p.is_invertible() || !q.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(self.transform_unchecked(p, q))
    }

    /// As [`transform`](Self::transform) without validating the factors.
    pub(crate) fn transform_unchecked(&self, p: &Matrix, q: &Matrix) -> AffineSubspace {
        let f = self.field;
        let (n, m) = (self.rows, self.cols);
        let d = self.dim();
        let mut flat = Vec::with_capacity(d * n * m);
        for b in &self.span.basis {
            flat.extend(sandwich(f, p, b, q, n, m));
        }
        let span = Span::from_flat(f, n * m, d, flat);
        let offset = sandwich(f, p, &self.offset, q, n, m);
        AffineSubspace::from_parts(f, n, m, offset, span)
    }

    /// `{Mᵀ : M ∈ self}`.
    pub fn transpose(&self) -> AffineSubspace {
        let (n, m) = (self.rows, self.cols);
        let tr = |v: &[u8]| {
            let mut t = vec![0u8; n * m];
            for i in 0..n {
                for j in 0..m {
                    t[j * n + i] = v[i * m + j];
                }
            }
            t
        };
        let flat: Vec<u8> = self.span.basis.iter().flat_map(|b| tr(b)).collect();
        let span = Span::from_flat(self.field, n * m, self.dim(), flat);
        AffineSubspace::from_parts(self.field, m, n, tr(&self.offset), span)
    }

    /// Integer packing of the canonical encoding, unique among subspaces of
    /// the same field, shape and dimension. `None` when it needs more than
    /// 128 bits.
    pub fn key(&self) -> Option<u128> {
        let q = self.field.order() as u128;
        let digits = (self.dim() + 1) * self.rows * self.cols;
        q.checked_pow(digits as u32)?;
        let mut key = 0u128;
        for &v in self.offset.iter().chain(self.span.basis.iter().flatten()) {
            key = key * q + v as u128;
        }
        Some(key)
    }
}

/// `P · X · Q` on row-major entries.
fn sandwich(f: FieldSpec, p: &Matrix, x: &[u8], q: &Matrix, n: usize, m: usize) -> Vec<u8> {
    // X·Q first, then P·(XQ)
    let mut xq = vec![0u8; n * m];
    for i in 0..n {
        for k in 0..m {
            let a = x[i * m + k];
            if a == 0 {
                continue;
            }
            let qrow = q.row(k);
            let dst = &mut xq[i * m..(i + 1) * m];
            for (d, &b) in dst.iter_mut().zip(qrow) {
                *d = f.mul_add(*d, a, b);
            }
        }
    }
    let mut out = vec![0u8; n * m];
    for i in 0..n {
        let prow = p.row(i);
        let dst_start = i * m;
        for (k, &a) in prow.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for j in 0..m {
                out[dst_start + j] = f.mul_add(out[dst_start + j], a, xq[k * m + j]);
            }
        }
    }
    out
}

const RANK_TABLE_LIMIT: u64 = 1 << 16;

type RankTableCache = Mutex<HashMap<(u8, usize, usize), Arc<Vec<u8>>>>;

fn rank_table(field: FieldSpec, rows: usize, cols: usize) -> Option<Arc<Vec<u8>>> {
    let size = field.order_u64().checked_pow((rows * cols) as u32)?;
    if size > RANK_TABLE_LIMIT {
        return None;
    }
    static CACHE: OnceLock<RankTableCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (field.order(), rows, cols);
    if let Some(t) = cache.lock().expect("rank table cache").get(&key) {
        return Some(Arc::clone(t));
    }
    let q = field.order();
    let mut table = Vec::with_capacity(size as usize);
    let mut digits = vec![0u8; rows * cols];
    let mut buf = vec![0u8; rows * cols];
    for _ in 0..size {
        // index = Σ digits[k] q^k, so digits[0] varies fastest
        buf.copy_from_slice(&digits);
        table.push(rank_in_place(field, rows, cols, &mut buf) as u8);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    let table = Arc::new(table);
    cache.lock().expect("rank table cache").insert(key, Arc::clone(&table));
    Some(table)
}

/// Rank evaluator for matrices of one fixed shape: table lookup when the
/// ambient space is small, in-place elimination otherwise.
pub struct Ranker {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    table: Option<Arc<Vec<u8>>>,
    scratch: Vec<u8>,
}

impl Ranker {
    pub fn new(field: FieldSpec, rows: usize, cols: usize) -> Ranker {
        Ranker {
            field,
            rows,
            cols,
            table: rank_table(field, rows, cols),
            scratch: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn rank(&mut self, entries: &[u8]) -> usize {
        if let Some(t) = &self.table {
            let q = self.field.order() as usize;
            let idx = entries.iter().rev().fold(0usize, |acc, &v| acc * q + v as usize);
            t[idx] as usize
        } else {
            self.scratch.copy_from_slice(entries);
            rank_in_place(self.field, self.rows, self.cols, &mut self.scratch)
        }
    }
}

/// Basis `{E_ij - E_ji : i < j}` of the alternate matrices `Mata_n`.
pub fn alternate_basis(n: usize, field: FieldSpec) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut m = Matrix::zeros(field, n, n);
            m.set(i, j, 1);
            m.set(j, i, field.neg(1));
            out.push(m);
        }
    }
    out
}

/// `Mata_n` as a linear subspace of `M_n`.
pub fn alternate_space(n: usize, field: FieldSpec) -> AffineSubspace {
    AffineSubspace::linear(field, n, n, &alternate_basis(n, field)).expect("consistent shapes")
}

fn pad(m: &[u8], src_cols: usize, dst_cols: usize, r0: usize, c0: usize, dst_rows: usize) -> Vec<u8> {
    let src_rows = m.len().checked_div(src_cols).unwrap_or(0);
    let mut out = vec![0u8; dst_rows * dst_cols];
    for i in 0..src_rows {
        for j in 0..src_cols {
            out[(r0 + i) * dst_cols + c0 + j] = m[i * src_cols + j];
        }
    }
    out
}

/// `A ∨ B`: block upper-triangular matrices `[[a, x], [0, b]]` with `a ∈ A`,
/// `b ∈ B` and `x` free.
pub fn vee(a: &AffineSubspace, b: &AffineSubspace) -> Result<AffineSubspace> {
    if a.field != b.field {
        return Err(Error::FieldMismatch { left: a.field.order() as u32, right: b.field.order() as u32 });
    }
    let f = a.field;
    let (rows, cols) = (a.rows + b.rows, a.cols + b.cols);
    let mut offset = pad(&a.offset, a.cols, cols, 0, 0, rows);
    let lower = pad(&b.offset, b.cols, cols, a.rows, a.cols, rows);
    for (o, l) in offset.iter_mut().zip(lower) {
        *o = f.add(*o, l);
    }
    let mut gens: Vec<Vec<u8>> = Vec::new();
    gens.extend(a.span.basis.iter().map(|g| pad(g, a.cols, cols, 0, 0, rows)));
    gens.extend(b.span.basis.iter().map(|g| pad(g, b.cols, cols, a.rows, a.cols, rows)));
    for i in 0..a.rows {
        for j in a.cols..cols {
            let mut e = vec![0u8; rows * cols];
            e[i * cols + j] = 1;
            gens.push(e);
        }
    }
    let span = Span::from_vectors(f, rows * cols, gens.iter().map(Vec::as_slice));
    Ok(AffineSubspace::from_parts(f, rows, cols, offset, span))
}

/// `i_{n,p}(W)`: the top-left block ranges over `W`, every other entry is free.
pub fn embed_inp(w: &AffineSubspace, n: usize, p: usize) -> Result<AffineSubspace> {
    if n < w.rows || p < w.cols {
        return Err(Error::InvalidInput(format!(
            "cannot embed a {}x{} core into {n}x{p}",
            w.rows, w.cols
        )));
    }
    let f = w.field;
    let offset = pad(&w.offset, w.cols, p, 0, 0, n);
    let mut gens: Vec<Vec<u8>> = w.span.basis.iter().map(|g| pad(g, w.cols, p, 0, 0, n)).collect();
    for i in 0..n {
        for j in 0..p {
            if i < w.rows && j < w.cols {
                continue;
            }
            let mut e = vec![0u8; n * p];
            e[i * p + j] = 1;
            gens.push(e);
        }
    }
    let span = Span::from_vectors(f, n * p, gens.iter().map(Vec::as_slice));
    Ok(AffineSubspace::from_parts(f, n, p, offset, span))
}

/// The blocks `P_1, ..., P_q` of a canonical maximal space
/// `I_r + (P_1 Mata_{n_1} ∨ ... ∨ P_q Mata_{n_q})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalFamilySpec {
    pub blocks: Vec<Matrix>,
}

impl CanonicalFamilySpec {
    pub fn new(blocks: Vec<Matrix>) -> CanonicalFamilySpec {
        CanonicalFamilySpec { blocks }
    }

    /// One block per part, each the first representative returned by
    /// [`quadform::nonisotropic_classes`] (`labels[k]` picks another one).
    pub fn from_parts(parts: &[usize], labels: Option<&[usize]>, field: FieldSpec, budget: u64) -> Result<CanonicalFamilySpec> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidSpec("parts must be a nonempty list of positive sizes".into()));
        }
        if let Some(l) = labels {
            if l.len() != parts.len() {
                return Err(Error::InvalidSpec("one label per part".into()));
            }
        }
        let mut blocks = Vec::with_capacity(parts.len());
        for (k, &size) in parts.iter().enumerate() {
            let classes = quadform::nonisotropic_classes(size, field, budget)?;
            let label = labels.map_or(0, |l| l[k]);
            let rep = classes.get(label).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "no non-isotropic class #{label} of dimension {size} over {field} ({} exist)",
                    classes.len()
                ))
            })?;
            blocks.push(rep.clone());
        }
        Ok(CanonicalFamilySpec { blocks })
    }

    pub fn parts(&self) -> Vec<usize> {
        self.blocks.iter().map(Matrix::rows).collect()
    }

    pub fn size(&self) -> usize {
        self.blocks.iter().map(Matrix::rows).sum()
    }
}

/// `I_r + (P_1 Mata_{n_1} ∨ ... ∨ P_q Mata_{n_q})`, after checking every
/// block is square, invertible and non-isotropic.
pub fn construct_canonical(spec: &CanonicalFamilySpec, budget: u64) -> Result<AffineSubspace> {
    let Some(first) = spec.blocks.first() else {
        return Err(Error::InvalidSpec("no blocks".into()));
    };
    let f = first.field();
    let mut acc: Option<AffineSubspace> = None;
    for (k, p) in spec.blocks.iter().enumerate() {
        if p.field() != f {
            return Err(Error::InvalidSpec(format!("block {k} lives in another field")));
        }
        if !p.is_square() || p.rows() == 0 {
            return Err(Error::InvalidSpec(format!("block {k} is not square")));
        }
        if !p.is_invertible() {
            return Err(Error::InvalidSpec(format!("block {k} is singular")));
        }
        if !quadform::is_nonisotropic(p, budget)? {
            return Err(Error::InvalidSpec(format!("block {k} is isotropic")));
        }
        let gens: Vec<Matrix> = alternate_basis(p.rows(), f).iter().map(|a| p.mul(a)).collect();
        let piece = AffineSubspace::linear(f, p.rows(), p.rows(), &gens)?;
        acc = Some(match acc {
            None => piece,
            Some(prev) => vee(&prev, &piece)?,
        });
    }
    let lin = acc.expect("at least one block");
    let r = lin.rows;
    AffineSubspace::new(&Matrix::identity(f, r), &lin.basis())
}

/// `i_{n,p}(I_r + strictly upper-triangular)`: codimension `binom(r+1, 2)`,
/// lower rank `r`.
pub fn construct_intro_example(n: usize, p: usize, r: usize, field: FieldSpec) -> Result<AffineSubspace> {
    if r == 0 || r > n.min(p) {
        return Err(Error::InvalidInput(format!("need 1 <= r <= min(n, p), got r={r}, n={n}, p={p}")));
    }
    let mut gens = Vec::new();
    for i in 0..r {
        for j in i + 1..r {
            gens.push(Matrix::unit(field, r, r, i, j));
        }
    }
    let core = AffineSubspace::new(&Matrix::identity(field, r), &gens)?;
    embed_inp(&core, n, p)
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    field: u32,
    rows: usize,
    cols: usize,
    offset: Vec<Vec<i64>>,
    basis: Vec<Vec<Vec<i64>>>,
}

impl AffineSubspace {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("subspace serializes")
    }

    /// Parses and re-canonicalises.
    pub fn from_json(s: &str) -> Result<AffineSubspace> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for AffineSubspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceJson {
            field: self.field.order() as u32,
            rows: self.rows,
            cols: self.cols,
            offset: self.offset().json_entries(),
            basis: self.basis().iter().map(Matrix::json_entries).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AffineSubspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SubspaceJson::deserialize(d)?;
        let build = || -> Result<AffineSubspace> {
            let offset = Matrix::from_json_parts(j.field, j.rows, j.cols, &j.offset)?;
            let gens = j
                .basis
                .iter()
                .map(|b| Matrix::from_json_parts(j.field, j.rows, j.cols, b))
                .collect::<Result<Vec<_>>>()?;
            AffineSubspace::new(&offset, &gens)
        };
        build().map_err(serde::de::Error::custom)
    }
}

/// A batch of membership constraints sharing one unknown vector `c`:
/// `Σ_k c_k · vectors[k] − target ∈ span` for every block.
pub(crate) struct MembershipBlock {
    pub vectors: Vec<Vec<u8>>,
    pub target: Vec<u8>,
}

/// Solves the stacked membership constraints: a particular solution plus a
/// basis of the homogeneous solutions, or `None` when inconsistent.
pub(crate) fn solve_membership(span: &Span, unknowns: usize, blocks: &[MembershipBlock]) -> Option<(Vec<u8>, Vec<Vec<u8>>)> {
    let f = span.field();
    let m = span.ambient();
    let mut is_pivot = vec![false; m];
    for &c in span.pivots() {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..m).filter(|&c| !is_pivot[c]).collect();
    let rows = blocks.len() * free.len();
    let mut a = Matrix::zeros(f, rows.max(1), unknowns);
    let mut rhs = vec![0u8; rows.max(1)];
    for (bi, block) in blocks.iter().enumerate() {
        debug_assert_eq!(block.vectors.len(), unknowns);
        for (k, v) in block.vectors.iter().enumerate() {
            let mut r = v.clone();
            span.reduce(&mut r);
            for (fi, &c) in free.iter().enumerate() {
                a.set(bi * free.len() + fi, k, r[c]);
            }
        }
        let mut t = block.target.clone();
        span.reduce(&mut t);
        for (fi, &c) in free.iter().enumerate() {
            rhs[bi * free.len() + fi] = t[c];
        }
    }
    a.solve(&rhs)
}

/// `{M : Σ_ij A_ij M_ij = 1}`, the non-linear hyperplane attached to a
/// nonzero `A`.
pub fn trace_hyperplane(a: &Matrix) -> Result<AffineSubspace> {
    let f = a.field();
    let (n, p) = a.shape();
    let Some(k) = a.entries().iter().position(|&v| v != 0) else {
        return Err(Error::InvalidInput("zero functional".into()));
    };
    let normal = Span::from_vectors(f, n * p, [a.entries()]);
    let lin = normal.orthogonal();
    let mut offset = vec![0u8; n * p];
    offset[k] = f.inv(a.entries()[k]).expect("nonzero");
    Ok(AffineSubspace::from_parts(f, n, p, offset, lin))
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

    const B: u64 = DEFAULT_LRK_BUDGET;

    #[test]
    fn make_subspace_examples() {
        let f = gf(3);
        let s = AffineSubspace::new(&Matrix::identity(f, 2), &[]).unwrap();
        assert_eq!(s.dim(), 0);
        let e11 = Matrix::unit(f, 2, 2, 0, 0);
        let s = AffineSubspace::linear(f, 2, 2, &[e11.clone(), e11.scale(2)]).unwrap();
        assert_eq!(s.dim(), 1);
        let e12 = Matrix::unit(f, 2, 2, 0, 1);
        let a = AffineSubspace::new(&Matrix::identity(f, 2), &[e11.clone(), e12.add(&e11)]).unwrap();
        let b = AffineSubspace::new(&Matrix::identity(f, 2).add(&e12), &[e12.clone(), e11.scale(2)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        assert!(AffineSubspace::new(&Matrix::identity(f, 2), &[Matrix::zeros(f, 2, 3)]).is_err());
    }

    #[test]
    fn contains_examples() {
        let f = gf(3);
        let s = AffineSubspace::point(&Matrix::identity(f, 2));
        assert!(s.contains(&Matrix::identity(f, 2)).unwrap());
        assert!(!s.contains(&Matrix::zeros(f, 2, 2)).unwrap());
        assert!(s.contains(&Matrix::zeros(f, 2, 3)).is_err());
        let v = construct_intro_example(3, 2, 2, f).unwrap();
        assert!(v.contains(&v.offset()).unwrap());
    }

    #[test]
    fn point_enumeration_counts() {
        let f = gf(3);
        let zero = AffineSubspace::point(&Matrix::identity(f, 2));
        assert_eq!(zero.points(B).unwrap(), vec![Matrix::identity(f, 2)]);
        let line = construct_intro_example(2, 2, 2, f).unwrap();
        assert_eq!(line.points(B).unwrap().len(), 3);
        let v = construct_intro_example(3, 2, 2, f).unwrap();
        let pts = v.points(B).unwrap();
        assert_eq!(pts.len(), 27);
        let distinct: std::collections::HashSet<_> = pts.iter().collect();
        assert_eq!(distinct.len(), 27);
        assert!(pts.iter().all(|p| v.contains(p).unwrap()));
        assert!(v.points(10).is_err());
    }

    #[test]
    fn lrk_examples() {
        let f = gf(3);
        assert_eq!(AffineSubspace::point(&Matrix::identity(f, 2)).lrk(B).unwrap(), 2);
        assert_eq!(AffineSubspace::full(f, 2, 2).lrk(B).unwrap(), 0);
        let upper = AffineSubspace::new(&Matrix::identity(f, 2), &[Matrix::unit(f, 2, 2, 0, 1)]).unwrap();
        assert_eq!(upper.lrk(B).unwrap(), 2);
    }

    #[test]
    fn lrk_overflow_carries_bound() {
        let f = gf(3);
        let v = construct_intro_example(3, 3, 3, f).unwrap();
        match v.lrk(10) {
            Err(Error::LrkBudgetExceeded { upper_bound, .. }) => assert!(upper_bound >= 3),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn alternate_basis_examples() {
        let f = gf(3);
        assert!(alternate_basis(1, f).is_empty());
        assert_eq!(alternate_basis(2, f), vec![m(f, &[&[0, 1], &[-1, 0]])]);
        let four = alternate_basis(4, f);
        assert_eq!(four.len(), 6);
        assert_eq!(AffineSubspace::linear(f, 4, 4, &four).unwrap().dim(), 6);
    }

    #[test]
    fn vee_examples() {
        let f = gf(3);
        let a1 = alternate_space(1, f);
        let v = vee(&a1, &a1).unwrap();
        assert_eq!(v, AffineSubspace::linear(f, 2, 2, &[Matrix::unit(f, 2, 2, 0, 1)]).unwrap());
        let z1 = AffineSubspace::point(&Matrix::zeros(f, 1, 1));
        let z2 = AffineSubspace::point(&Matrix::zeros(f, 2, 2));
        assert_eq!(vee(&z1, &z2).unwrap().dim(), 2);
        let (x, y, z) = (
            AffineSubspace::point(&m(f, &[&[1]])),
            AffineSubspace::point(&m(f, &[&[2]])),
            AffineSubspace::point(&m(f, &[&[1]])),
        );
        assert_eq!(vee(&vee(&x, &y).unwrap(), &z).unwrap(), vee(&x, &vee(&y, &z).unwrap()).unwrap());
        assert!(vee(&x, &AffineSubspace::point(&Matrix::identity(gf(5), 1))).is_err());
    }

    #[test]
    fn embed_examples() {
        let f = gf(3);
        let i2 = AffineSubspace::point(&Matrix::identity(f, 2));
        assert_eq!(embed_inp(&i2, 2, 2).unwrap(), i2);
        let upper = AffineSubspace::new(&Matrix::identity(f, 2), &[Matrix::unit(f, 2, 2, 0, 1)]).unwrap();
        let v = embed_inp(&upper, 3, 2).unwrap();
        assert_eq!((v.dim(), v.codim()), (3, 3));
        assert_eq!(v.lrk(B).unwrap(), 2);
        assert!(embed_inp(&upper, 1, 2).is_err());
    }

    #[test]
    fn canonical_examples() {
        let f = gf(3);
        let s = CanonicalFamilySpec::from_parts(&[1, 1], None, f, B).unwrap();
        let w = construct_canonical(&s, B).unwrap();
        assert_eq!(w, AffineSubspace::new(&Matrix::identity(f, 2), &[Matrix::unit(f, 2, 2, 0, 1)]).unwrap());

        let s = CanonicalFamilySpec::new(vec![Matrix::identity(f, 2)]);
        let w = construct_canonical(&s, B).unwrap();
        assert_eq!(w, AffineSubspace::new(&Matrix::identity(f, 2), &[m(f, &[&[0, 1], &[-1, 0]])]).unwrap());
        for p in w.points(B).unwrap() {
            assert_ne!(p.det(), 0);
        }

        assert!(matches!(
            construct_canonical(&CanonicalFamilySpec::new(vec![Matrix::identity(f, 3)]), B),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            construct_canonical(&CanonicalFamilySpec::new(vec![m(f, &[&[0, 1], &[1, 0]])]), B),
            Err(Error::InvalidSpec(_))
        ));
        assert!(CanonicalFamilySpec::from_parts(&[3], None, f, B).is_err());
    }

    #[test]
    fn intro_examples() {
        let f = gf(3);
        let a = construct_intro_example(2, 2, 2, f).unwrap();
        assert_eq!((a.dim(), a.lrk(B).unwrap()), (1, 2));
        let b = construct_intro_example(3, 2, 2, f).unwrap();
        assert_eq!((b.dim(), b.lrk(B).unwrap()), (3, 2));
        let c = construct_intro_example(3, 2, 1, f).unwrap();
        assert_eq!((c.codim(), c.lrk(B).unwrap()), (1, 1));
        assert!(!c.is_linear());
        assert!(construct_intro_example(3, 2, 3, f).is_err());
    }

    #[test]
    fn transform_examples() {
        let f = gf(3);
        let s = construct_intro_example(3, 2, 2, f).unwrap();
        assert_eq!(s.transform(&Matrix::identity(f, 3), &Matrix::identity(f, 2)).unwrap(), s);
        let p = m(f, &[&[1, 1, 0], &[0, 1, 2], &[1, 0, 2]]);
        let q = m(f, &[&[0, 1], &[1, 1]]);
        let t = s.transform(&p, &q).unwrap();
        assert_eq!(t.lrk(B).unwrap(), 2);
        assert_eq!(t.transform(&p.inverse().unwrap(), &q.inverse().unwrap()).unwrap(), s);
        assert!(matches!(s.transform(&Matrix::zeros(f, 3, 3), &q), Err(Error::SingularMatrix)));
    }

    #[test]
    fn json_shape_and_recanonicalisation() {
        let f = gf(3);
        let s = construct_intro_example(2, 2, 2, f).unwrap();
        assert_eq!(s.to_json(), r#"{"field":3,"rows":2,"cols":2,"offset":[[1,0],[0,1]],"basis":[[[0,1],[0,0]]]}"#);
        // non-canonical input: doubled generator, unreduced offset
        let messy = r#"{"field":3,"rows":2,"cols":2,"offset":[[1,2],[0,1]],"basis":[[[0,2],[0,0]],[[0,1],[0,0]]]}"#;
        assert_eq!(AffineSubspace::from_json(messy).unwrap(), s);
    }

    #[test]
    fn trace_hyperplane_is_codim_one() {
        let f = gf(5);
        let a = m(f, &[&[1, 2], &[0, 3]]);
        let h = trace_hyperplane(&a).unwrap();
        assert_eq!(h.codim(), 1);
        assert!(!h.is_linear());
        assert!(trace_hyperplane(&Matrix::zeros(f, 2, 2)).is_err());
    }
}
