use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{gl_list, gl_order, Matrix};
use crate::space::{solve_membership, AffineSubspace, MembershipBlock};

use super::kw_invariant;

#[derive(Clone, Copy, Debug)]
pub struct EquivOptions {
    /// Caps the right factors tried and, per right factor, the left-factor
    /// candidates enumerated.
    pub budget: u64,
    /// Reject early on differing invariants (dimension always checked).
    pub prefilter: bool,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { budget: crate::quadform::DEFAULT_SEARCH_BUDGET, prefilter: true }
    }
}

impl EquivOptions {
    /// No invariant shortcuts: the verdict comes from the witness search alone.
    pub fn exhaustive(budget: u64) -> Self {
        EquivOptions { budget, prefilter: false }
    }
}

/// `Ok(false)` when some invariant separates the two spaces.
fn invariants_agree(s: &AffineSubspace, t: &AffineSubspace, budget: u64) -> bool {
    if s.point_count() <= budget as u128 {
        let (hs, ht) = (s.rank_histogram(budget), t.rank_histogram(budget));
        if let (Ok(a), Ok(b)) = (hs, ht) {
            if a != b {
                return false;
            }
        }
        let (ls, lt) = (s.translation().rank_histogram(budget), t.translation().rank_histogram(budget));
        if let (Ok(a), Ok(b)) = (ls, lt) {
            if a != b {
                return false;
            }
        }
    }
    kw_invariant(s).dim() == kw_invariant(t).dim()
        && kw_invariant(&s.transpose()).dim() == kw_invariant(&t.transpose()).dim()
}

enum Attempt {
    Found(Matrix),
    None,
    OverBudget,
}

/// For a fixed right factor (already applied: `s_q = S·Q`), looks for an
/// invertible `P` with `P · s_q = T`.
fn left_factor(s_q_offset: &[u8], s_q_basis: &[Vec<u8>], t: &AffineSubspace, budget: u64) -> Attempt {
    let (n, p) = t.shape();
    let f = t.field();
    let unknowns = n * n;
    // P ↦ P·X: unknown (a, k) contributes row k of X to row a
    let images = |x: &[u8]| -> Vec<Vec<u8>> {
        (0..unknowns)
            .map(|u| {
                let (a, k) = (u / n, u % n);
                let mut v = vec![0u8; n * p];
                v[a * p..(a + 1) * p].copy_from_slice(&x[k * p..(k + 1) * p]);
                v
            })
            .collect()
    };
    let mut blocks: Vec<MembershipBlock> = s_q_basis
        .iter()
        .map(|b| MembershipBlock { vectors: images(b), target: vec![0u8; n * p] })
        .collect();
    blocks.push(MembershipBlock { vectors: images(s_q_offset), target: t.offset_entries().to_vec() });
    let Some((particular, kernel)) = solve_membership(t.span(), unknowns, &blocks) else {
        return Attempt::None;
    };
    let q = f.order();
    let candidates = (q as u128).checked_pow(kernel.len() as u32).unwrap_or(u128::MAX);
    let limit = candidates.min(budget as u128 + 1);
    let mut coeffs = vec![0u8; kernel.len()];
    let mut x = particular;
    let mut tried = 0u128;
    loop {
        if tried == limit {
            return Attempt::OverBudget;
        }
        tried += 1;
        let pm = Matrix::from_entries(f, n, n, x.clone());
        if pm.is_invertible() {
            return Attempt::Found(pm);
        }
        if tried == candidates {
            return Attempt::None;
        }
        let mut k = kernel.len();
        loop {
            k -= 1;
            for (xi, &bi) in x.iter_mut().zip(&kernel[k]) {
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

fn right_multiply(v: &[u8], q: &Matrix, n: usize, p: usize) -> Vec<u8> {
    let f = q.field();
    let mut out = vec![0u8; n * p];
    for i in 0..n {
        for k in 0..p {
            let a = v[i * p + k];
            if a == 0 {
                continue;
            }
            for j in 0..p {
                out[i * p + j] = f.mul_add(out[i * p + j], a, q.get(k, j));
            }
        }
    }
    out
}

/// Largest `q^(p^2)` scanned to materialise `GL_p`.
const GL_MATERIALIZE_LIMIT: u64 = 1 << 25;

/// Search with the right factor ranging over `GL_cols`.
fn search(s: &AffineSubspace, t: &AffineSubspace, budget: u64) -> Result<Option<(Matrix, Matrix)>> {
    let (n, p) = s.shape();
    let f = s.field();
    let group_size = gl_order(p, f.order_u64());
    let group = gl_list(p, f, GL_MATERIALIZE_LIMIT)?;
    let scanned = group.len().min(budget as usize);
    let over_budget = AtomicBool::new(false);
    let found = group[..scanned].par_iter().find_map_first(|q| {
        let offset = right_multiply(s.offset_entries(), q, n, p);
        let basis: Vec<Vec<u8>> = s.span().basis().iter().map(|b| right_multiply(b, q, n, p)).collect();
        match left_factor(&offset, &basis, t, budget) {
            Attempt::Found(pm) => Some((pm, q.clone())),
            Attempt::None => None,
            Attempt::OverBudget => {
                over_budget.store(true, Ordering::Relaxed);
                None
            }
        }
    });
    if found.is_some() {
        return Ok(found);
    }
    if over_budget.load(Ordering::Relaxed) || (scanned as u128) < group_size {
        return Err(Error::Inconclusive {
            what: "equivalence search".into(),
            spent: scanned as u64,
            budget,
        });
    }
    Ok(None)
}

/// Decides whether `T = P · S · Q` for some invertible `(P, Q)`.
///
/// Returns the witness with the lowest right-factor enumeration index (so
/// the answer does not depend on the worker count), or `None` once every
/// right factor has been ruled out. The right factor ranges over the smaller
/// of `GL_n`, `GL_p` (transposing both spaces if needed); for each one the
/// admissible left factors form an affine space found by a linear solve.
pub fn equiv_decide(s: &AffineSubspace, t: &AffineSubspace, opts: EquivOptions) -> Result<Option<(Matrix, Matrix)>> {
    if s.field() != t.field() {
        return Err(Error::FieldMismatch { left: s.field().order() as u32, right: t.field().order() as u32 });
    }
    if s.shape() != t.shape() {
        return Err(Error::shape(format!("{:?} vs {:?}", s.shape(), t.shape())));
    }
    let f = s.field();
    let (n, p) = s.shape();
    if s == t {
        return Ok(Some((Matrix::identity(f, n), Matrix::identity(f, p))));
    }
    if s.dim() != t.dim() {
        return Ok(None);
    }
    if opts.prefilter && !invariants_agree(s, t, opts.budget) {
        return Ok(None);
    }
    let witness = if p <= n {
        search(s, t, opts.budget)?
    } else {
        // Q'ᵀ · S · P'ᵀ = T  ⟺  P' · Sᵀ · Q' = Tᵀ
        search(&s.transpose(), &t.transpose(), opts.budget)?.map(|(pp, qq)| (qq.transpose(), pp.transpose()))
    };
    if let Some((pm, qm)) = &witness {
        debug_assert_eq!(&s.transform(pm, qm)?, t);
    }
    Ok(witness)
}
