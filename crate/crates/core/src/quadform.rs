//! Quadratic forms `X ↦ XᵀPX`: isotropy, congruence, similarity, and the
//! similarity classes of non-isotropic forms over GF(p).

use std::collections::{HashMap, HashSet};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};
use crate::matrix::{GlEnumerator, Matrix};

/// Default cap on elementary steps (form evaluations or group elements tried).
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// The quadratic form `X ↦ XᵀPX`. `P` is kept as given; only its symmetric
/// part matters for the values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    gram: Matrix,
}

impl QuadForm {
    pub fn new(gram: Matrix) -> Result<QuadForm> {
        if !gram.is_square() {
            return Err(Error::shape(format!("gram matrix is {}x{}", gram.rows(), gram.cols())));
        }
        Ok(QuadForm { gram })
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> FieldSpec {
        self.gram.field()
    }

    /// `XᵀPX` for a coordinate vector `x`.
    pub fn eval(&self, x: &[u8]) -> u8 {
        eval_form(&self.gram, x)
    }

    /// `(P + Pᵀ) / 2`, the symmetric gram of the same form.
    pub fn symmetric_gram(&self) -> Matrix {
        symmetrize(&self.gram)
    }
}

#[inline]
fn eval_form(p: &Matrix, x: &[u8]) -> u8 {
    let f = p.field();
    let n = p.rows();
    let mut acc = 0u8;
    for i in 0..n {
        if x[i] == 0 {
            continue;
        }
        let row = p.row(i).iter().zip(x).fold(0u8, |acc, (&a, &b)| f.mul_add(acc, a, b));
        acc = f.mul_add(acc, x[i], row);
    }
    acc
}

pub(crate) fn symmetrize(p: &Matrix) -> Matrix {
    let f = p.field();
    let half = f.inv(2).expect("odd characteristic");
    p.add(&p.transpose()).scale(half)
}

fn check_square(p: &Matrix) -> Result<()> {
    if p.is_square() {
        Ok(())
    } else {
        Err(Error::shape(format!("expected a square matrix, got {}x{}", p.rows(), p.cols())))
    }
}

/// Does `XᵀPX` vanish only at `X = 0`? Singular `P` always gives `false`,
/// since a kernel vector is isotropic.
pub fn is_nonisotropic(p: &Matrix, budget: u64) -> Result<bool> {
    check_square(p)?;
    let f = p.field();
    let n = p.rows();
    let vectors = (f.order() as u128).pow(n as u32) - 1;
    if vectors > budget as u128 {
        return Err(Error::budget("isotropy scan", vectors, budget));
    }
    if !p.is_invertible() {
        return Ok(false);
    }
    Ok(nonisotropic_unchecked(p))
}

fn nonisotropic_unchecked(p: &Matrix) -> bool {
    let f = p.field();
    let q = f.order();
    let n = p.rows();
    let mut x = vec![0u8; n];
    loop {
        // next nonzero vector in lexicographic order
        let mut k = n;
        loop {
            if k == 0 {
                return true;
            }
            k -= 1;
            x[k] += 1;
            if x[k] < q {
                break;
            }
            x[k] = 0;
        }
        if eval_form(p, &x) == 0 {
            return false;
        }
    }
}

fn det_ratio_is_square(f: FieldSpec, a: u8, b: u8) -> bool {
    match (a, b) {
        (0, 0) => true,
        (0, _) | (_, 0) => false,
        _ => f.is_square(f.mul(a, f.inv(b).expect("nonzero"))),
    }
}

/// Searches `GL_n` for `R` with `target == R · source · Rᵀ`, charging one
/// unit of `spent` per element tried.
fn search_congruence(target: &Matrix, source: &Matrix, spent: &mut u64, budget: u64, what: &str) -> Result<Option<Matrix>> {
    let f = target.field();
    let n = target.rows();
    for r in GlEnumerator::unbounded(n, f) {
        if *spent >= budget {
            return Err(Error::Inconclusive { what: what.into(), spent: *spent, budget });
        }
        *spent += 1;
        if &r.mul(source).mul(&r.transpose()) == target {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

fn check_pair(a: &Matrix, b: &Matrix) -> Result<()> {
    check_square(a)?;
    check_square(b)?;
    if a.field() != b.field() {
        return Err(Error::FieldMismatch { left: a.field().order() as u32, right: b.field().order() as u32 });
    }
    if a.rows() != b.rows() {
        return Err(Error::shape(format!("{}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    Ok(())
}

/// Matrix congruence: `Some(R)` with `A = R·B·Rᵀ`, or `None` once every
/// element of `GL_n` has been ruled out. A search cut short by `budget`
/// is [`Error::Inconclusive`], never `None`.
pub fn congruent(a: &Matrix, b: &Matrix, budget: u64) -> Result<Option<Matrix>> {
    check_pair(a, b)?;
    let f = a.field();
    if a == b {
        return Ok(Some(Matrix::identity(f, a.rows())));
    }
    // invariants: rank, rank of the symmetric and skew parts, det square class
    let (at, bt) = (a.transpose(), b.transpose());
    if a.rank() != b.rank()
        || a.add(&at).rank() != b.add(&bt).rank()
        || a.sub(&at).rank() != b.sub(&bt).rank()
        || !det_ratio_is_square(f, a.det(), b.det())
    {
        return Ok(None);
    }
    let mut spent = 0;
    search_congruence(a, b, &mut spent, budget, "congruence search")
}

/// Similarity of the quadratic forms of `A` and `B`: `Some((λ, R))` with
/// `sym(A) = λ·R·sym(B)·Rᵀ`, where `sym(P) = (P + Pᵀ)/2` (this is the literal
/// identity `A = λ·R·B·Rᵀ` when both are symmetric). `None` is an exhaustive
/// verdict; running out of budget is [`Error::Inconclusive`].
pub fn similar(a: &Matrix, b: &Matrix, budget: u64) -> Result<Option<(FieldElem, Matrix)>> {
    check_pair(a, b)?;
    let f = a.field();
    let n = a.rows();
    let (sa, sb) = (symmetrize(a), symmetrize(b));
    if sa == sb {
        return Ok(Some((f.one(), Matrix::identity(f, n))));
    }
    if sa.rank() != sb.rank() {
        return Ok(None);
    }
    let (da, db) = (sa.det(), sb.det());
    let mut spent = 0;
    for lambda in f.units() {
        let scaled = sb.scale(lambda.value());
        // det(λ R S Rᵀ) = λ^n det(R)^2 det(S)
        if !det_ratio_is_square(f, da, f.mul(f.pow(lambda.value(), n as u64), db)) {
            continue;
        }
        if scaled == sa {
            return Ok(Some((lambda, Matrix::identity(f, n))));
        }
        if let Some(r) = search_congruence(&sa, &scaled, &mut spent, budget, "similarity search")? {
            return Ok(Some((lambda, r)));
        }
    }
    Ok(None)
}

/// One representative per similarity class of non-isotropic forms of
/// dimension `n`, each the lexicographically smallest gram (row-major
/// enumeration order over all `n x n` matrices) of its class. Empty when no
/// non-isotropic form of that dimension exists.
///
/// `budget` caps the isotropy scan (`q^(n(n+1)/2) · (q^n − 1)` evaluations)
/// and, separately, the group elements tried while sweeping each class.
pub fn nonisotropic_classes(n: usize, field: FieldSpec, budget: u64) -> Result<Vec<Matrix>> {
    type Cache = Mutex<HashMap<(usize, u8), Vec<Matrix>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(reps) = cache.lock().expect("class cache").get(&(n, field.order())) {
        return Ok(reps.clone());
    }
    let reps = compute_classes(n, field, budget)?;
    cache.lock().expect("class cache").insert((n, field.order()), reps.clone());
    Ok(reps)
}

fn compute_classes(n: usize, field: FieldSpec, budget: u64) -> Result<Vec<Matrix>> {
    if n == 0 {
        return Err(Error::InvalidInput("form dimension must be positive".into()));
    }
    let q = field.order() as u128;
    let sym_count = q.pow((n * (n + 1) / 2) as u32);
    let evaluations = sym_count * (q.pow(n as u32) - 1);
    if evaluations > budget as u128 {
        return Err(Error::budget(format!("non-isotropic classes in dimension {n}"), evaluations, budget));
    }

    // Non-isotropic symmetric grams.
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut digits = vec![0u8; slots.len()];
    let mut anisotropic: Vec<Matrix> = Vec::new();
    for _ in 0..sym_count {
        let mut s = Matrix::zeros(field, n, n);
        for (&(i, j), &v) in slots.iter().zip(&digits) {
            s.set(i, j, v);
            s.set(j, i, v);
        }
        if s.is_invertible() && nonisotropic_unchecked(&s) {
            anisotropic.push(s);
        }
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < field.order() {
                break;
            }
            *d = 0;
        }
    }

    // Partition them by sweeping similarity orbits.
    let mut class_of: Vec<Option<usize>> = vec![None; anisotropic.len()];
    let mut classes: Vec<HashSet<Matrix>> = Vec::new();
    for start in 0..anisotropic.len() {
        if class_of[start].is_some() {
            continue;
        }
        let orbit = similarity_orbit(&anisotropic[start], budget)?;
        let id = classes.len();
        for (k, s) in anisotropic.iter().enumerate() {
            if orbit.contains(s) {
                class_of[k] = Some(id);
            }
        }
        classes.push(orbit);
    }
    if classes.is_empty() {
        return Ok(Vec::new());
    }

    // Smallest gram (symmetric or not) representing each class.
    let mut reps: Vec<Option<Matrix>> = vec![None; classes.len()];
    let mut found = 0;
    let total = q.pow((n * n) as u32);
    let mut entries = vec![0u8; n * n];
    for _ in 0..total {
        let p = Matrix::from_entries(field, n, n, entries.clone());
        let s = symmetrize(&p);
        if let Some(id) = classes.iter().position(|c| c.contains(&s)) {
            if reps[id].is_none() {
                reps[id] = Some(p);
                found += 1;
                if found == classes.len() {
                    break;
                }
            }
        }
        for d in entries.iter_mut().rev() {
            *d += 1;
            if *d < field.order() {
                break;
            }
            *d = 0;
        }
    }
    let mut reps: Vec<Matrix> = reps.into_iter().map(|r| r.expect("every class has a gram")).collect();
    reps.sort_by(|a, b| a.entries().cmp(b.entries()));
    Ok(reps)
}

/// `{λ·R·S·Rᵀ}` over `λ ≠ 0`, `R ∈ GL_n`.
fn similarity_orbit(s: &Matrix, budget: u64) -> Result<HashSet<Matrix>> {
    let f = s.field();
    let mut orbit = HashSet::new();
    let mut spent = 0u64;
    for r in GlEnumerator::unbounded(s.rows(), f) {
        spent += 1;
        if spent > budget {
            return Err(Error::Inconclusive { what: "similarity orbit".into(), spent, budget });
        }
        let c = r.mul(s).mul(&r.transpose());
        for lambda in 1..f.order() {
            orbit.insert(c.scale(lambda));
        }
    }
    Ok(orbit)
}

/// Ordered list of similarity classes `([φ_1], ..., [φ_q])`: block sizes plus,
/// per block, the index of its class in [`nonisotropic_classes`].
///
/// Over the supported fields every block size has at most one class, so the
/// JSON form carries only `parts`; labels read back as zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSignature {
    parts: Vec<usize>,
    labels: Vec<usize>,
}

impl QuadSignature {
    pub fn new(parts: Vec<usize>, labels: Vec<usize>) -> Result<QuadSignature> {
        if parts.len() != labels.len() {
            return Err(Error::InvalidInput("one label per part".into()));
        }
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidInput("parts must be positive".into()));
        }
        Ok(QuadSignature { parts, labels })
    }

    pub fn from_parts(parts: Vec<usize>) -> Result<QuadSignature> {
        let labels = vec![0; parts.len()];
        QuadSignature::new(parts, labels)
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Sum of the parts.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }
}

impl std::fmt::Display for QuadSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Serialize, Deserialize)]
struct SignatureJson {
    parts: Vec<usize>,
}

impl Serialize for QuadSignature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignatureJson { parts: self.parts.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadSignature {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SignatureJson::deserialize(d)?;
        QuadSignature::from_parts(j.parts).map_err(serde::de::Error::custom)
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

    const B: u64 = DEFAULT_SEARCH_BUDGET;

    #[test]
    fn isotropy_examples() {
        let f3 = gf(3);
        assert!(is_nonisotropic(&m(f3, &[&[1]]), B).unwrap());
        assert!(is_nonisotropic(&Matrix::identity(f3, 2), B).unwrap());
        assert!(!is_nonisotropic(&m(f3, &[&[0, 1], &[1, 0]]), B).unwrap());
        assert!(!is_nonisotropic(&Matrix::identity(gf(5), 2), B).unwrap());
        assert!(!is_nonisotropic(&m(f3, &[&[1, 1], &[1, 1]]), B).unwrap());
        assert!(is_nonisotropic(&Matrix::identity(f3, 3), 5).is_err());
    }

    #[test]
    fn evaluation_uses_raw_gram() {
        let f = gf(5);
        let q = QuadForm::new(m(f, &[&[1, 3], &[0, 2]])).unwrap();
        // x² + 3xy + 2y² at (1, 1)
        assert_eq!(q.eval(&[1, 1]), 1);
        assert_eq!(q.symmetric_gram(), symmetrize(q.gram()));
        assert!(QuadForm::new(Matrix::zeros(f, 2, 3)).is_err());
    }

    #[test]
    fn congruence_examples() {
        let f3 = gf(3);
        let a = m(f3, &[&[1, 2], &[0, 1]]);
        assert_eq!(congruent(&a, &a, B).unwrap(), Some(Matrix::identity(f3, 2)));
        assert_eq!(congruent(&m(f3, &[&[1]]), &m(f3, &[&[2]]), B).unwrap(), None);
        let f5 = gf(5);
        assert_eq!(congruent(&m(f5, &[&[1]]), &m(f5, &[&[4]]), B).unwrap(), Some(m(f5, &[&[2]])));
    }

    #[test]
    fn congruence_budget_is_inconclusive() {
        let f = gf(3);
        let a = Matrix::identity(f, 2);
        let b = m(f, &[&[2, 0], &[0, 2]]);
        assert!(matches!(congruent(&a, &b, 1), Err(Error::Inconclusive { .. })));
        assert!(congruent(&a, &b, B).unwrap().is_some());
    }

    #[test]
    fn similarity_examples() {
        let f = gf(3);
        let (lambda, r) = similar(&m(f, &[&[1]]), &m(f, &[&[2]]), B).unwrap().unwrap();
        assert_eq!((lambda.value(), r), (2, Matrix::identity(f, 1)));
        let a = m(f, &[&[1, 1], &[0, 2]]);
        let (lambda, r) = similar(&a, &a, B).unwrap().unwrap();
        assert_eq!((lambda.value(), r), (1, Matrix::identity(f, 2)));
        let i2 = Matrix::identity(f, 2);
        assert_eq!(similar(&i2, &i2, B).unwrap().map(|(l, _)| l.value()), Some(1));
        assert_eq!(similar(&i2, &m(f, &[&[0, 1], &[1, 0]]), B).unwrap(), None);
    }

    #[test]
    fn class_examples() {
        let f = gf(3);
        assert_eq!(nonisotropic_classes(1, f, B).unwrap(), vec![m(f, &[&[1]])]);
        let two = nonisotropic_classes(2, f, B).unwrap();
        assert_eq!(two.len(), 1);
        assert!(similar(&two[0], &Matrix::identity(f, 2), B).unwrap().is_some());
        assert!(nonisotropic_classes(3, f, B).unwrap().is_empty());
        assert!(nonisotropic_classes(0, f, B).is_err());
    }

    #[test]
    fn signature_json_and_display() {
        let s = QuadSignature::from_parts(vec![1, 2]).unwrap();
        assert_eq!(s.to_string(), "(1,2)");
        assert_eq!(s.size(), 3);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"parts":[1,2]}"#);
        assert_eq!(serde_json::from_str::<QuadSignature>(&j).unwrap(), s);
        assert!(serde_json::from_str::<QuadSignature>(r#"{"parts":[0]}"#).is_err());
    }
}
