//! Exact computations with affine spaces of matrices over small prime fields
//! whose members all have rank bounded below.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: arithmetic in GF(p), `p` an odd prime up to 31;
//! * [`matrix`]: dense matrices, elimination, `GL_n` enumeration;
//! * [`space`]: canonically encoded affine subspaces and the standard
//!   constructions (alternate spaces, `∨`, `i_{n,p}`, canonical maximal spaces);
//! * [`quadform`]: isotropy, congruence and similarity of quadratic forms;
//! * [`classify`]: reduction of an extremal space to `i_{n,p}(W)` with an
//!   explicit equivalence witness, signatures, equivalence decisions;
//! * [`oracle`]: brute-force enumerators and exhaustive verifiers.

pub mod classify;
pub mod error;
pub mod field;
pub mod matrix;
pub mod oracle;
pub mod quadform;
pub mod space;

pub use error::{Error, Result};
pub use field::{FieldElem, FieldSpec};
pub use matrix::Matrix;
pub use quadform::QuadSignature;
pub use space::{AffineSubspace, CanonicalFamilySpec};

/// `binom(n, k)`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
