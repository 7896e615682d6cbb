use crate::binomial;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::space::{embed_inp, solve_membership, AffineSubspace, MembershipBlock};

use super::{core_space, rough_reduce, signature, ClassificationWitness};

fn unit_vec(n: usize, p: usize, i: usize, j: usize) -> Vec<u8> {
    let mut e = vec![0u8; n * p];
    e[i * p + j] = 1;
    e
}

fn falsified(statement: &str, v: &AffineSubspace, detail: String) -> Error {
    Error::TheoremFalsified {
        statement: statement.into(),
        dump: format!("field={} space={} {detail}", v.field().order(), v.to_json()),
    }
}

/// Row corrections `L_k ← L_k + λ_k^{(i)} L_i` (`k < r <= i`): returns
/// `R = I + Σ λ_k^{(i)} E_{k,i}` such that `R · V` contains every matrix
/// supported on row `i` and the first `r` columns.
fn row_corrections(v: &AffineSubspace, r: usize) -> std::result::Result<Matrix, String> {
    let (n, p) = v.shape();
    let f = v.field();
    let mut corr = Matrix::identity(f, n);
    for i in r..n {
        // (e_i − Σ_k λ_k e_k) e_jᵀ ∈ V for j < r
        let blocks: Vec<MembershipBlock> = (0..r)
            .map(|j| MembershipBlock {
                vectors: (0..r).map(|k| unit_vec(n, p, k, j)).collect(),
                target: unit_vec(n, p, i, j),
            })
            .collect();
        let (lambda, _) = solve_membership(v.span(), r, &blocks)
            .ok_or_else(|| format!("row-correction system for row {i} is inconsistent"))?;
        for (k, &l) in lambda.iter().enumerate() {
            corr.set(k, i, l);
        }
    }
    Ok(corr)
}

/// Column corrections `C_k ← C_k + μ_k^{(j)} C_j` (`k < r <= j`): returns
/// `S = I + Σ μ_k^{(j)} E_{j,k}` such that `V · S` contains every matrix
/// supported on column `j` and the first `r` rows.
fn column_corrections(v: &AffineSubspace, r: usize) -> std::result::Result<Matrix, String> {
    let (n, p) = v.shape();
    let f = v.field();
    let mut corr = Matrix::identity(f, p);
    for j in r..p {
        // e_i (e_j − Σ_k μ_k e_k)ᵀ ∈ V for i < r
        let blocks: Vec<MembershipBlock> = (0..r)
            .map(|i| MembershipBlock {
                vectors: (0..r).map(|k| unit_vec(n, p, i, k)).collect(),
                target: unit_vec(n, p, i, j),
            })
            .collect();
        let (mu, _) = solve_membership(v.span(), r, &blocks)
            .ok_or_else(|| format!("column-correction system for column {j} is inconsistent"))?;
        for (k, &m) in mu.iter().enumerate() {
            corr.set(j, k, m);
        }
    }
    Ok(corr)
}

/// Carries an extremal `V` (codimension `binom(r+1,2)`, lower rank `r`) onto
/// `i_{n,p}(W)` and returns the witness `(P, Q, W, signature)`.
///
/// Fails with [`Error::NotExtremal`] when the preconditions do not hold and
/// with [`Error::TheoremFalsified`] (carrying a reproducible dump) when a
/// correction system is inconsistent or the final set equality fails.
pub fn reduce_to_canonical(v: &AffineSubspace, r: usize, budget: u64) -> Result<ClassificationWitness> {
    let (n, p) = v.shape();
    if r == 0 || r > n.min(p) {
        return Err(Error::InvalidInput(format!("need 1 <= r <= min(n, p), got r={r} for {n}x{p}")));
    }
    if r == 1 && n.min(p) > 1 {
        return Err(Error::InvalidInput(
            "r = 1 with min(n, p) > 1 is classified by the trace form (classify_r1)".into(),
        ));
    }
    let expected = binomial(r + 1, 2);
    if v.codim() != expected {
        return Err(Error::NotExtremal(format!("codimension {} != binom({}, 2) = {expected}", v.codim(), r + 1)));
    }
    let lrk = v.lrk(budget)?;
    if lrk != r {
        return Err(Error::NotExtremal(format!("lower rank {lrk} != {r}")));
    }

    let rough = rough_reduce(v, r, budget)?;
    let core = core_space(&rough.reduced, r)?;
    if core.dim_core != binomial(r, 2) || core.dim_h != n * p - r * r {
        return Err(falsified(
            "dimension accounting of the core space",
            v,
            format!("dim_core={} dim_h={}", core.dim_core, core.dim_h),
        ));
    }

    let row = row_corrections(&rough.reduced, r).map_err(|e| falsified("existence of row corrections", v, e))?;
    let identity_p = Matrix::identity(v.field(), p);
    let stage = rough.reduced.transform(&row, &identity_p)?;
    let col = column_corrections(&stage, r).map_err(|e| falsified("existence of column corrections", v, e))?;
    let identity_n = Matrix::identity(v.field(), n);
    let corrected = stage.transform(&identity_n, &col)?;

    let target = embed_inp(&core.core, n, p)?;
    if corrected != target {
        return Err(falsified(
            "corrected space equals i_{n,p}(core)",
            v,
            format!("corrected={} target={}", corrected.to_json(), target.to_json()),
        ));
    }
    let pl = row.mul(&rough.p);
    let qr = rough.q.mul(&col);
    if v.transform(&pl, &qr)? != target {
        return Err(falsified("composed witness", v, format!("P={pl:?} Q={qr:?}")));
    }
    let signature = signature(&core.core, budget)?;
    Ok(ClassificationWitness { p: pl, q: qr, w: core.core, signature })
}
