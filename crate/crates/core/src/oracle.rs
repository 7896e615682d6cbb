//! Brute-force enumerators over every affine subspace of a small ambient
//! space, and exhaustive verifiers built on them.
//!
//! Linear subspaces are walked by RREF pivot pattern, so each one is produced
//! exactly once in canonical form; affine subspaces add an offset that is zero
//! at the pivot columns. Work is split by pivot pattern and merged in pattern
//! order, which makes every report independent of the worker count.

use std::collections::{HashSet, VecDeque};
use std::ops::ControlFlow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::binomial;
use crate::classify::candidate_signatures;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::{gl_list, gl_order, Matrix};
use crate::quadform::{nonisotropic_classes, symmetrize};
use crate::space::{alternate_space, embed_inp, trace_hyperplane, AffineSubspace, Ranker, Span};

/// Default cap on rank evaluations per verify call (2·10^6 subspaces × 100).
pub const DEFAULT_ORACLE_BUDGET: u64 = 200_000_000;

/// Number of `d`-dimensional linear subspaces of `GF(q)^m`; `None` on overflow.
pub fn gaussian_binomial(m: usize, d: usize, q: u64) -> Option<u128> {
    if d > m {
        return Some(0);
    }
    let q = q as u128;
    let mut acc = 1u128;
    for i in 0..d {
        let num = q.checked_pow((m - i) as u32)? - 1;
        let den = q.checked_pow((i + 1) as u32)? - 1;
        acc = acc.checked_mul(num)? / den;
    }
    Some(acc)
}

/// Number of `d`-dimensional affine subspaces of `GF(q)^m`.
pub fn affine_count(m: usize, d: usize, q: u64) -> Option<u128> {
    if d > m {
        return Some(0);
    }
    (q as u128).checked_pow((m - d) as u32)?.checked_mul(gaussian_binomial(m, d, q)?)
}

/// `d`-subsets of `0..m` in lexicographic order.
fn pivot_patterns(m: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..d).collect();
    if d > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < m - d + i {
                break;
            }
        }
        cur[i] += 1;
        for k in i + 1..d {
            cur[k] = cur[k - 1] + 1;
        }
    }
}

/// Increments the digits at `idx` (last fastest); `false` once it wraps.
fn odometer(v: &mut [u8], idx: &[usize], q: u8) -> bool {
    for &k in idx.iter().rev() {
        v[k] += 1;
        if v[k] < q {
            return true;
        }
        v[k] = 0;
    }
    false
}

/// Visits every affine subspace of `GF(q)^m` whose translation space has
/// the given pivots, as `(basis rows flattened, offset)` in canonical form.
fn scan_pattern<F>(f: FieldSpec, m: usize, pivots: &[usize], mut visit: F) -> ControlFlow<()>
where
    F: FnMut(&[u8], &[u8]) -> ControlFlow<()>,
{
    let q = f.order();
    let mut is_pivot = vec![false; m];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let mut basis = vec![0u8; pivots.len() * m];
    let mut free = Vec::new();
    for (i, &c) in pivots.iter().enumerate() {
        basis[i * m + c] = 1;
        free.extend((c + 1..m).filter(|&col| !is_pivot[col]).map(|col| i * m + col));
    }
    let nonpivots: Vec<usize> = (0..m).filter(|&c| !is_pivot[c]).collect();
    let mut offset = vec![0u8; m];
    loop {
        loop {
            visit(&basis, &offset)?;
            if !odometer(&mut offset, &nonpivots, q) {
                break;
            }
        }
        if !odometer(&mut basis, &free, q) {
            return ControlFlow::Continue(());
        }
    }
}

fn subspace_from_raw(f: FieldSpec, n: usize, p: usize, basis: &[u8], offset: &[u8]) -> AffineSubspace {
    let m = n * p;
    let span = Span::from_flat(f, m, basis.len() / m, basis.to_vec());
    AffineSubspace::from_parts(f, n, p, offset.to_vec(), span)
}

/// Same packing as [`AffineSubspace::key`], on raw canonical data.
fn raw_key(q: u8, basis: &[u8], offset: &[u8]) -> u128 {
    offset.iter().chain(basis).fold(0u128, |acc, &v| acc * q as u128 + v as u128)
}

/// Lower rank of `offset + span(basis)` with a running count of rank calls.
fn raw_lrk(ranker: &mut Ranker, f: FieldSpec, m: usize, basis: &[u8], offset: &[u8], x: &mut Vec<u8>, calls: &mut u64) -> usize {
    let q = f.order();
    let d = basis.len() / m;
    let mut coeffs = vec![0u8; d];
    x.clear();
    x.extend_from_slice(offset);
    let mut best = usize::MAX;
    loop {
        *calls += 1;
        best = best.min(ranker.rank(x));
        if best == 0 {
            return 0;
        }
        let mut k = d;
        loop {
            if k == 0 {
                return best;
            }
            k -= 1;
            for (xi, &bi) in x.iter_mut().zip(&basis[k * m..(k + 1) * m]) {
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

/// Stream of every `d`-dimensional affine subspace of `M_{n,p}`, each once.
pub struct AffineEnumerator {
    field: FieldSpec,
    n: usize,
    p: usize,
    patterns: std::vec::IntoIter<Vec<usize>>,
    buffer: std::vec::IntoIter<AffineSubspace>,
}

impl Iterator for AffineEnumerator {
    type Item = AffineSubspace;

    fn next(&mut self) -> Option<AffineSubspace> {
        loop {
            if let Some(s) = self.buffer.next() {
                return Some(s);
            }
            let pivots = self.patterns.next()?;
            let (f, n, p) = (self.field, self.n, self.p);
            let mut batch = Vec::new();
            let _ = scan_pattern(f, n * p, &pivots, |b, o| {
                batch.push(subspace_from_raw(f, n, p, b, o));
                ControlFlow::Continue(())
            });
            self.buffer = batch.into_iter();
        }
    }
}

/// Every affine subspace of dimension `d` in `M_{n,p}(GF(q))`, provided the
/// count fits in `budget`.
pub fn enumerate_affine(n: usize, p: usize, d: usize, field: FieldSpec, budget: u64) -> Result<AffineEnumerator> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidInput("ambient dimensions must be positive".into()));
    }
    let m = n * p;
    if d > m {
        return Err(Error::InvalidInput(format!("dimension {d} exceeds ambient dimension {m}")));
    }
    let count = affine_count(m, d, field.order_u64()).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(Error::budget("affine subspace enumeration", count, budget));
    }
    Ok(AffineEnumerator {
        field,
        n,
        p,
        patterns: pivot_patterns(m, d).into_iter(),
        buffer: Vec::new().into_iter(),
    })
}

/// One canonical orbit and how many enumerated subspaces fell into it.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct OrbitReport {
    pub label: String,
    pub representative: AffineSubspace,
    pub size: u64,
    pub hits: u64,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CensusReport {
    pub check: String,
    pub field: u8,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub dim: usize,
    pub codim: usize,
    pub total: u64,
    pub expected_total: u64,
    /// `lrk_counts[k]`: subspaces of lower rank `k`.
    pub lrk_counts: Vec<u64>,
    /// Subspaces with lower rank at least `r`.
    pub extremal: u64,
    /// Histogram one codimension up (the extremal level) when a bound check
    /// had room for it in the budget.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal_lrk_counts: Option<Vec<u64>>,
    pub group_order: u128,
    pub orbit_count: usize,
    pub orbits: Vec<OrbitReport>,
    pub rank_evaluations: u64,
}

#[derive(Default)]
struct Tally {
    total: u64,
    lrk: Vec<u64>,
    hits: Vec<u64>,
    calls: u64,
    /// First offending subspace in enumeration order.
    bad: Option<(AffineSubspace, String)>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.total += other.total;
        add_into(&mut self.lrk, &other.lrk);
        add_into(&mut self.hits, &other.hits);
        self.calls += other.calls;
        if self.bad.is_none() {
            self.bad = other.bad;
        }
    }
}

fn add_into(acc: &mut Vec<u64>, other: &[u64]) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// Runs `judge(lrk, key)` on every `d`-dimensional affine subspace, pattern
/// by pattern in parallel. `judge` returns `Err(reason)` for an offender and
/// `Ok(Some(i))` to credit orbit `i`.
fn census<J>(n: usize, p: usize, d: usize, field: FieldSpec, orbits: usize, judge: J) -> Tally
where
    J: Fn(usize, u128) -> std::result::Result<Option<usize>, String> + Sync,
{
    let m = n * p;
    let q = field.order();
    let tallies: Vec<Tally> = pivot_patterns(m, d)
        .par_iter()
        .map(|pivots| {
            let mut t = Tally { lrk: vec![0; n.min(p) + 1], hits: vec![0; orbits], ..Tally::default() };
            let mut ranker = Ranker::new(field, n, p);
            let mut x = Vec::with_capacity(m);
            let _ = scan_pattern(field, m, pivots, |basis, offset| {
                let lrk = raw_lrk(&mut ranker, field, m, basis, offset, &mut x, &mut t.calls);
                t.total += 1;
                t.lrk[lrk] += 1;
                match judge(lrk, raw_key(q, basis, offset)) {
                    Ok(Some(i)) => t.hits[i] += 1,
                    Ok(None) => {}
                    Err(reason) => {
                        if t.bad.is_none() {
                            t.bad = Some((subspace_from_raw(field, n, p, basis, offset), reason));
                        }
                    }
                }
                ControlFlow::Continue(())
            });
            t
        })
        .collect();
    let mut acc = Tally { lrk: vec![0; n.min(p) + 1], hits: vec![0; orbits], ..Tally::default() };
    for t in tallies {
        acc.merge(t);
    }
    acc
}

fn check_shape(n: usize, p: usize, r: usize) -> Result<()> {
    if n == 0 || p == 0 {
        return Err(Error::InvalidInput("ambient dimensions must be positive".into()));
    }
    if r == 0 || r > n.min(p) {
        return Err(Error::InvalidInput(format!("need 1 <= r <= min(n, p), got r={r} for {n}x{p}")));
    }
    Ok(())
}

/// Rank evaluations needed to scan every `d`-dimensional subspace.
fn scan_cost(m: usize, d: usize, field: FieldSpec) -> u128 {
    let total = affine_count(m, d, field.order_u64()).unwrap_or(u128::MAX);
    total.saturating_mul((field.order() as u128).saturating_pow(d as u32))
}

fn falsified(statement: &str, field: FieldSpec, space: &AffineSubspace, reason: &str) -> Error {
    Error::TheoremFalsified {
        statement: statement.into(),
        dump: format!("field={} reason={reason} space={}", field.order(), space.to_json()),
    }
}

/// The lower-rank bound: no affine subspace of `M_{n,p}` of codimension
/// `binom(r+1,2) − 1` has lower rank `r` or more. Every space of smaller
/// codimension contains one of that codimension, so this level suffices.
pub fn verify_bound(n: usize, p: usize, r: usize, field: FieldSpec, budget: u64) -> Result<CensusReport> {
    check_shape(n, p, r)?;
    let m = n * p;
    let c = binomial(r + 1, 2);
    let d = m + 1 - c;
    let cost = scan_cost(m, d, field);
    if cost > budget as u128 {
        return Err(Error::budget("bound census", cost, budget));
    }
    let tally = census(n, p, d, field, 0, |lrk, _| {
        if lrk >= r {
            Err(format!("lower rank {lrk} at codimension {}", c - 1))
        } else {
            Ok(None)
        }
    });
    if let Some((space, reason)) = &tally.bad {
        return Err(falsified("codim >= binom(r+1, 2) whenever lrk >= r", field, space, reason));
    }
    let mut calls = tally.calls;
    let extremal_lrk_counts = if d >= 1 && cost + scan_cost(m, d - 1, field) <= budget as u128 {
        let upper = census(n, p, d - 1, field, 0, |_, _| Ok(None));
        calls += upper.calls;
        Some(upper.lrk)
    } else {
        None
    };
    let extremal = tally.lrk[r..].iter().sum();
    Ok(CensusReport {
        check: "bound".into(),
        field: field.order(),
        n,
        p,
        r,
        dim: d,
        codim: c - 1,
        total: tally.total,
        expected_total: affine_count(m, d, field.order_u64()).unwrap_or(u128::MAX) as u64,
        lrk_counts: tally.lrk,
        extremal,
        extremal_lrk_counts,
        group_order: gl_order(n, field.order_u64()) * gl_order(p, field.order_u64()),
        orbit_count: 0,
        orbits: Vec::new(),
        rank_evaluations: calls,
    })
}

/// Generators of `GL_n`: `diag(g, 1, …, 1)` for a primitive root `g` and the
/// transvections `I + E_ij`.
fn gl_generators(n: usize, field: FieldSpec) -> Vec<Matrix> {
    let mut gens = Vec::new();
    let mut d = Matrix::identity(field, n);
    d.set(0, 0, field.primitive_root());
    gens.push(d);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut t = Matrix::identity(field, n);
                t.set(i, j, 1);
                gens.push(t);
            }
        }
    }
    gens
}

/// Canonical keys of the full `GL_n × GL_p` orbit of `rep`, by breadth-first
/// search over generators. Fails once the orbit exceeds `limit`.
pub fn orbit_keys(rep: &AffineSubspace, limit: u64) -> Result<HashSet<u128>> {
    let (n, p) = rep.shape();
    let f = rep.field();
    let key = |s: &AffineSubspace| {
        s.key().ok_or_else(|| Error::InvalidInput("canonical encoding does not fit in 128 bits".into()))
    };
    let (idn, idp) = (Matrix::identity(f, n), Matrix::identity(f, p));
    let moves: Vec<(Matrix, Matrix)> = gl_generators(n, f)
        .into_iter()
        .map(|g| (g, idp.clone()))
        .chain(gl_generators(p, f).into_iter().map(|g| (idn.clone(), g)))
        .collect();
    let mut seen = HashSet::new();
    seen.insert(key(rep)?);
    let mut queue = VecDeque::from([rep.clone()]);
    while let Some(s) = queue.pop_front() {
        for (a, b) in &moves {
            let t = s.transform_unchecked(a, b);
            if seen.insert(key(&t)?) {
                if seen.len() as u64 > limit {
                    return Err(Error::budget("orbit enumeration", seen.len() as u128, limit));
                }
                queue.push_back(t);
            }
        }
    }
    Ok(seen)
}

/// Labelled representatives of the expected orbits of extremal subspaces.
fn canonical_representatives(n: usize, p: usize, r: usize, field: FieldSpec, budget: u64) -> Result<Vec<(String, AffineSubspace)>> {
    if r == 1 {
        // non-linear hyperplanes, indexed by the rank of the trace form
        return (1..=n.min(p))
            .map(|k| {
                let mut a = Matrix::zeros(field, n, p);
                for i in 0..k {
                    a.set(i, i, 1);
                }
                Ok((format!("rank(A)={k}"), trace_hyperplane(&a)?))
            })
            .collect();
    }
    candidate_signatures(r, field, budget)?
        .into_iter()
        .map(|(sig, w)| Ok((sig.to_string(), embed_inp(&w, n, p)?)))
        .collect()
}

/// Completeness and uniqueness of the classification: every subspace of
/// codimension `binom(r+1,2)` and lower rank `r` lies in exactly one orbit of
/// a canonical `i_{n,p}(W)` (of a trace hyperplane when `r = 1`), and every
/// such orbit is met.
pub fn verify_classification(n: usize, p: usize, r: usize, field: FieldSpec, budget: u64) -> Result<CensusReport> {
    check_shape(n, p, r)?;
    let m = n * p;
    let c = binomial(r + 1, 2);
    let d = m - c;
    let cost = scan_cost(m, d, field);
    if cost > budget as u128 {
        return Err(Error::budget("classification census", cost, budget));
    }
    let group_order = gl_order(n, field.order_u64()) * gl_order(p, field.order_u64());
    let reps = canonical_representatives(n, p, r, field, budget)?;
    let orbit_limit = (budget / 100).max(1);
    let orbit_sets = reps
        .par_iter()
        .map(|(_, rep)| orbit_keys(rep, orbit_limit))
        .collect::<Result<Vec<_>>>()?;
    for ((label, rep), set) in reps.iter().zip(&orbit_sets) {
        if !group_order.is_multiple_of(set.len() as u128) {
            return Err(falsified("orbit size divides |GL_n x GL_p|", field, rep, &format!("{label}: {}", set.len())));
        }
    }
    let tally = census(n, p, d, field, reps.len(), |lrk, key| {
        if lrk > r {
            return Err(format!("lower rank {lrk} > {r} at codimension {c}"));
        }
        if lrk < r {
            return Ok(None);
        }
        let mut owners = orbit_sets.iter().enumerate().filter(|(_, s)| s.contains(&key)).map(|(i, _)| i);
        match (owners.next(), owners.next()) {
            (Some(i), None) => Ok(Some(i)),
            (None, _) => Err("extremal subspace outside every canonical orbit".into()),
            (Some(i), Some(j)) => Err(format!("canonical orbits {i} and {j} intersect")),
        }
    });
    if let Some((space, reason)) = &tally.bad {
        return Err(falsified("every extremal subspace is equivalent to exactly one canonical space", field, space, reason));
    }
    let orbits: Vec<OrbitReport> = reps
        .into_iter()
        .zip(&orbit_sets)
        .zip(&tally.hits)
        .map(|(((label, rep), set), &hits)| OrbitReport { label, representative: rep, size: set.len() as u64, hits })
        .collect();
    for o in &orbits {
        if o.hits != o.size {
            return Err(falsified(
                "canonical orbits consist of extremal subspaces",
                field,
                &o.representative,
                &format!("{}: orbit size {} but {} hits", o.label, o.size, o.hits),
            ));
        }
    }
    Ok(CensusReport {
        check: "classification".into(),
        field: field.order(),
        n,
        p,
        r,
        dim: d,
        codim: c,
        total: tally.total,
        expected_total: affine_count(m, d, field.order_u64()).unwrap_or(u128::MAX) as u64,
        extremal: tally.lrk[r],
        lrk_counts: tally.lrk,
        extremal_lrk_counts: None,
        group_order,
        orbit_count: orbits.iter().filter(|o| o.hits > 0).count(),
        orbits,
        rank_evaluations: tally.calls,
    })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MaximalityReport {
    pub field: u8,
    pub r: usize,
    /// `binom(r, 2)`.
    pub maximal_dim: usize,
    /// All-invertible subspaces of dimension `binom(r,2)`, by orbit.
    pub classification: CensusReport,
    /// No all-invertible subspace of dimension `binom(r,2) + 1`.
    pub bound: CensusReport,
}

/// Maximal affine subspaces of nonsingular `r × r` matrices: those of
/// dimension `binom(r,2)` are each equivalent to a canonical one, and none of
/// dimension `binom(r,2) + 1` exists.
pub fn verify_maximality(r: usize, field: FieldSpec, budget: u64) -> Result<MaximalityReport> {
    let classification = verify_classification(r, r, r, field, budget)?;
    let bound = verify_bound(r, r, r, field, budget)?;
    Ok(MaximalityReport { field: field.order(), r, maximal_dim: binomial(r, 2), classification, bound })
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FactCheck {
    pub n: usize,
    pub checked: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FactsReport {
    pub field: u8,
    pub n: usize,
    pub seed: u64,
    /// Every alternate matrix has even rank.
    pub even_rank: Vec<FactCheck>,
    /// `P · Mata_n · Q⁻¹ = (P·Qᵀ) · Mata_n` for sampled invertible `(P, Q)`.
    pub conjugation: Vec<FactCheck>,
    /// `Mata_n · X = X^⊥` for every nonzero column `X`.
    pub orthogonal: Vec<FactCheck>,
}

/// Structural facts about alternate matrices for every size `1..=n`.
pub fn verify_facts(n: usize, field: FieldSpec, samples: u64, seed: u64, budget: u64) -> Result<FactsReport> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FactsReport { field: field.order(), n, seed, even_rank: vec![], conjugation: vec![], orthogonal: vec![] };
    let fail = |what: &str, detail: String| Error::TheoremFalsified {
        statement: what.into(),
        dump: format!("field={} {detail}", field.order()),
    };
    for k in 1..=n {
        let alt = alternate_space(k, field);

        let mut checked = 0;
        for a in alt.points(budget)? {
            checked += 1;
            if a.rank() % 2 != 0 {
                return Err(fail("alternate matrices have even rank", format!("A={}", a.to_json())));
            }
        }
        report.even_rank.push(FactCheck { n: k, checked, holds: true });

        for _ in 0..samples {
            let p = Matrix::random_invertible(field, k, &mut rng);
            let q = Matrix::random_invertible(field, k, &mut rng);
            let left = alt.transform(&p, &q.inverse()?)?;
            let right = alt.transform(&p.mul(&q.transpose()), &Matrix::identity(field, k))?;
            if left != right {
                return Err(fail(
                    "P Mata_n Q^-1 = (P Q^T) Mata_n",
                    format!("P={} Q={}", p.to_json(), q.to_json()),
                ));
            }
        }
        report.conjugation.push(FactCheck { n: k, checked: samples, holds: true });

        let columns = AffineSubspace::full(field, k, 1).points(budget)?;
        let basis = alt.basis();
        let mut checked = 0;
        for x in columns.iter().filter(|x| !x.is_zero()) {
            checked += 1;
            let image = Span::from_vectors(field, k, basis.iter().map(|a| a.mul(x)).collect::<Vec<_>>().iter().map(Matrix::entries));
            let perp = Span::from_vectors(field, k, [x.entries()]).orthogonal();
            if image != perp {
                return Err(fail("Mata_n X = X^perp", format!("X={}", x.to_json())));
            }
        }
        report.orthogonal.push(FactCheck { n: k, checked, holds: true });
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct NonisotropyLevel {
    pub n: usize,
    pub group_order: u128,
    /// Members of `GL_n` whose quadratic form has no nonzero zero.
    pub nonisotropic: u64,
    pub evaluations: u64,
    /// Similarity classes found by brute-force orbit sweeping.
    pub classes: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct NonisotropyReport {
    pub field: u8,
    pub levels: Vec<NonisotropyLevel>,
}

/// Scans all of `GL_n × (GF(q)^n \ 0)` for each `n` in `1..=max_n`, then
/// groups the non-isotropic forms into similarity classes by sweeping
/// `λ · R · S · Rᵀ` over units and `GL_n`. The class counts must agree with
/// [`nonisotropic_classes`].
pub fn verify_nonisotropy(max_n: usize, field: FieldSpec, budget: u64) -> Result<NonisotropyReport> {
    let mut levels = Vec::new();
    for n in 1..=max_n {
        let group = gl_list(n, field, budget)?;
        let vectors: Vec<Matrix> = AffineSubspace::full(field, n, 1)
            .points(budget)?
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect();
        let cost = group.len() as u128 * vectors.len() as u128;
        if cost > budget as u128 {
            return Err(Error::budget("isotropy census", cost, budget));
        }
        let mut evaluations = 0u64;
        let mut forms: Vec<Matrix> = Vec::new();
        for g in group.iter() {
            let mut isotropic = false;
            for x in &vectors {
                evaluations += 1;
                if x.transpose().mul(g).mul(x).get(0, 0) == 0 {
                    isotropic = true;
                    break;
                }
            }
            if !isotropic {
                forms.push(symmetrize(g));
            }
        }
        let nonisotropic = forms.len() as u64;
        forms.sort_by(|a, b| a.entries().cmp(b.entries()));
        forms.dedup();
        let mut unclassified: HashSet<Vec<u8>> = forms.iter().map(|s| s.entries().to_vec()).collect();
        let mut classes = 0;
        for s in &forms {
            if !unclassified.contains(s.entries()) {
                continue;
            }
            classes += 1;
            for lambda in field.units() {
                let scaled = s.scale(lambda.value());
                for r in group.iter() {
                    unclassified.remove(r.mul(&scaled).mul(&r.transpose()).entries());
                }
            }
        }
        let library = nonisotropic_classes(n, field, budget)?.len();
        if library != classes {
            return Err(Error::TheoremFalsified {
                statement: "similarity class count agrees with brute force".into(),
                dump: format!("field={} n={n} brute_force={classes} library={library}", field.order()),
            });
        }
        levels.push(NonisotropyLevel { n, group_order: group.len() as u128, nonisotropic, evaluations, classes });
    }
    Ok(NonisotropyReport { field: field.order(), levels })
}
