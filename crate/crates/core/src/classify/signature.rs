use crate::binomial;
use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::quadform::{nonisotropic_classes, QuadSignature};
use crate::space::{construct_canonical, AffineSubspace, CanonicalFamilySpec};

use super::{equiv_decide, EquivOptions};

/// Compositions of `r` in lexicographic order: `(1,1) < (2)`,
/// `(1,1,1) < (1,2) < (2,1) < (3)`.
fn compositions(r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=r {
        for mut rest in compositions(r - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every signature realisable over `field` for size `r`, paired with its
/// canonical maximal space, in the order they are tried: compositions
/// lexicographically, then class labels lexicographically.
pub fn candidate_signatures(r: usize, field: FieldSpec, budget: u64) -> Result<Vec<(QuadSignature, AffineSubspace)>> {
    let mut out = Vec::new();
    for parts in compositions(r) {
        let mut class_counts = Vec::with_capacity(parts.len());
        for &size in &parts {
            class_counts.push(nonisotropic_classes(size, field, budget)?.len());
        }
        if class_counts.contains(&0) {
            continue;
        }
        let mut labels = vec![0usize; parts.len()];
        loop {
            let spec = CanonicalFamilySpec::from_parts(&parts, Some(&labels), field, budget)?;
            let space = construct_canonical(&spec, budget)?;
            out.push((QuadSignature::new(parts.clone(), labels.clone())?, space));
            // next label tuple
            let mut k = labels.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                labels[k] += 1;
                if labels[k] < class_counts[k] {
                    break;
                }
                labels[k] = 0;
            }
            if labels.iter().all(|&l| l == 0) {
                break;
            }
        }
    }
    Ok(out)
}

/// The signature of a maximal affine subspace of nonsingular matrices `W`
/// (dimension `binom(r,2)`, lower rank `r`): the first candidate canonical
/// space equivalent to `W`.
pub fn signature(w: &AffineSubspace, budget: u64) -> Result<QuadSignature> {
    let (r, c) = w.shape();
    if r != c {
        return Err(Error::InvalidInput(format!("core must be square, got {r}x{c}")));
    }
    if w.dim() != binomial(r, 2) {
        return Err(Error::NotExtremal(format!("dimension {} != binom({r}, 2)", w.dim())));
    }
    let lrk = w.lrk(budget)?;
    if lrk != r {
        return Err(Error::NotExtremal(format!("core contains a singular matrix (lower rank {lrk})")));
    }
    let field = w.field();
    let mut inconclusive = None;
    for (sig, cand) in candidate_signatures(r, field, budget)? {
        match equiv_decide(w, &cand, EquivOptions { budget, prefilter: true }) {
            Ok(Some(_)) => return Ok(sig),
            Ok(None) => {}
            Err(e @ Error::Inconclusive { .. }) => inconclusive = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(inconclusive.unwrap_or_else(|| Error::TheoremFalsified {
        statement: "every maximal nonsingular space is equivalent to a canonical one".into(),
        dump: format!("field={} core={}", field.order(), w.to_json()),
    }))
}
