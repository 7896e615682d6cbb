//! Classification of affine spaces of lower rank `r` and minimal codimension
//! `binom(r+1, 2)`.
//!
//! The pipeline is: [`rough_reduce`] moves a rank-`r` member to the pivot
//! `J = I_r ⊕ 0`; [`core_space`] extracts the core `I_r + W`;
//! [`reduce_to_canonical`] solves for the row and column corrections that
//! carry the space onto `i_{n,p}(core)` and checks the result exactly;
//! [`signature`] names the equivalence class of the core.

mod equiv;
mod reduce;
mod signature;

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::matrix::Matrix;
use crate::quadform::QuadSignature;
use crate::space::{solve_membership, AffineSubspace, MembershipBlock, Span};

pub use equiv::{equiv_decide, EquivOptions};
pub use reduce::reduce_to_canonical;
pub use signature::{candidate_signatures, signature};

/// `P · original · Q = reduced`, and `reduced` contains `J = I_r ⊕ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoughReduction {
    pub p: Matrix,
    pub q: Matrix,
    pub reduced: AffineSubspace,
}

/// Core space `I_r + W` of a roughly-reduced space, with the dimension
/// bookkeeping `dim_core + dim_h = dim V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreSpaceReport {
    pub core: AffineSubspace,
    pub dim_core: usize,
    pub dim_h: usize,
}

/// Certificate that `P · V · Q = i_{n,p}(W)` with `W` maximal nonsingular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationWitness {
    #[serde(rename = "P")]
    pub p: Matrix,
    #[serde(rename = "Q")]
    pub q: Matrix,
    #[serde(rename = "W")]
    pub w: AffineSubspace,
    pub signature: QuadSignature,
}

impl ClassificationWitness {
    /// Re-checks `P · V · Q = i_{n,p}(W)` exactly.
    pub fn verify(&self, v: &AffineSubspace) -> Result<bool> {
        let target = crate::space::embed_inp(&self.w, v.rows(), v.cols())?;
        Ok(v.transform(&self.p, &self.q)? == target)
    }
}

/// `J = I_r ⊕ 0` in `M_{n,p}`.
pub fn pivot_matrix(field: FieldSpec, n: usize, p: usize, r: usize) -> Matrix {
    let mut j = Matrix::zeros(field, n, p);
    for i in 0..r {
        j.set(i, i, 1);
    }
    j
}

/// Invertible `(P, Q)` with `P · M · Q = I_r ⊕ 0`, `r = rank(M)`.
pub fn rank_factorization(m: &Matrix) -> (Matrix, Matrix) {
    let rows = m.rref();
    // rows.reduced has its nonzero rows on top; clear the columns the same way
    let cols = rows.reduced.transpose().rref();
    (rows.left, cols.left.transpose())
}

/// Finds a member of rank `r` (first in point order) and moves it to `J`.
pub fn rough_reduce(v: &AffineSubspace, r: usize, budget: u64) -> Result<RoughReduction> {
    let (n, p) = v.shape();
    let f = v.field();
    if r == 0 || r > n.min(p) {
        return Err(Error::InvalidInput(format!("rank {r} impossible in {n}x{p}")));
    }
    let j = pivot_matrix(f, n, p, r);
    if v.contains(&j)? {
        return Ok(RoughReduction {
            p: Matrix::identity(f, n),
            q: Matrix::identity(f, p),
            reduced: v.clone(),
        });
    }
    let mut ranker = crate::space::Ranker::new(f, n, p);
    let mut seen = 0u64;
    let mut found = None;
    let _ = v.for_each_point(|x| {
        if seen >= budget {
            return ControlFlow::Break(());
        }
        seen += 1;
        if ranker.rank(x) == r {
            found = Some(x.to_vec());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let Some(x) = found else {
        return Err(if seen >= budget && (seen as u128) < v.point_count() {
            Error::Inconclusive { what: format!("search for a rank-{r} member"), spent: seen, budget }
        } else {
            Error::InvalidInput(format!("no member of rank {r}"))
        });
    };
    let m = Matrix::from_entries(f, n, p, x);
    let (pl, qr) = rank_factorization(&m);
    debug_assert_eq!(pl.mul(&m).mul(&qr), j);
    let reduced = v.transform(&pl, &qr)?;
    Ok(RoughReduction { p: pl, q: qr, reduced })
}

/// Core space of a roughly-reduced `V`: `W = {A ∈ M_r : A ⊕ 0 ∈ translation(V)}`,
/// core `I_r + W`, and `dim H_V = dim V − dim W`.
pub fn core_space(v: &AffineSubspace, r: usize) -> Result<CoreSpaceReport> {
    let (n, p) = v.shape();
    let f = v.field();
    if r == 0 || r > n.min(p) {
        return Err(Error::InvalidInput(format!("rank {r} impossible in {n}x{p}")));
    }
    if !v.contains(&pivot_matrix(f, n, p, r))? {
        return Err(Error::InvalidInput("space is not roughly reduced (does not contain J)".into()));
    }
    let block = MembershipBlock {
        vectors: (0..r * r)
            .map(|k| {
                let mut e = vec![0u8; n * p];
                e[(k / r) * p + k % r] = 1;
                e
            })
            .collect(),
        target: vec![0u8; n * p],
    };
    let (_, kernel) = solve_membership(v.span(), r * r, &[block]).expect("homogeneous system");
    let gens: Vec<Matrix> = kernel.into_iter().map(|a| Matrix::from_entries(f, r, r, a)).collect();
    let core = AffineSubspace::new(&Matrix::identity(f, r), &gens)?;
    let dim_core = core.dim();
    Ok(CoreSpaceReport { dim_h: v.dim() - dim_core, core, dim_core })
}

/// `K = {x ∈ K^n : x·yᵀ ∈ translation(V) for every y ∈ K^p}`, returned as a
/// linear subspace of `M_{n,1}`.
pub fn kw_invariant(v: &AffineSubspace) -> AffineSubspace {
    let (n, p) = v.shape();
    let f = v.field();
    let blocks: Vec<MembershipBlock> = (0..p)
        .map(|j| MembershipBlock {
            vectors: (0..n)
                .map(|k| {
                    let mut e = vec![0u8; n * p];
                    e[k * p + j] = 1;
                    e
                })
                .collect(),
            target: vec![0u8; n * p],
        })
        .collect();
    let (_, kernel) = solve_membership(v.span(), n, &blocks).expect("homogeneous system");
    let span = Span::from_vectors(f, n, kernel.iter().map(Vec::as_slice));
    AffineSubspace::new(&Matrix::zeros(f, n, 1), &span.basis().iter().map(|b| Matrix::column(f, b.clone())).collect::<Vec<_>>())
        .expect("column vectors")
}

/// Equivalence data of a non-linear hyperplane `{M : tr(AᵀM) = 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HyperplaneClass {
    #[serde(rename = "A")]
    pub a: Matrix,
    pub rank: usize,
}

/// Recovers the unique `A` with `V = {M : tr(AᵀM) = 1}` and its rank, the
/// complete equivalence invariant when `r = 1`.
pub fn classify_r1(v: &AffineSubspace) -> Result<HyperplaneClass> {
    if v.codim() != 1 {
        return Err(Error::InvalidInput(format!("expected a hyperplane, codimension is {}", v.codim())));
    }
    if v.is_linear() {
        return Err(Error::InvalidInput("hyperplane is linear (contains 0)".into()));
    }
    let f = v.field();
    let normal = v.span().orthogonal();
    let a0 = &normal.basis()[0];
    let t = a0.iter().zip(v.offset_entries()).fold(0u8, |acc, (&x, &y)| f.mul_add(acc, x, y));
    let scale = f.inv(t).expect("offset lies off the translation space");
    let a = Matrix::from_entries(f, v.rows(), v.cols(), a0.iter().map(|&x| f.mul(x, scale)).collect());
    let rank = a.rank();
    Ok(HyperplaneClass { a, rank })
}
