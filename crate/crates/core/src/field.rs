//! Exact arithmetic in the prime fields GF(p), `p` odd and `3 <= p <= 31`.
//!
//! Elements are stored as canonical residues in a `u8`. All the per-field
//! tables (multiplication, inverses, squares) are built at compile time, so a
//! [`FieldSpec`] is a `Copy` handle that costs nothing to pass around.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported modulus.
pub const MAX_PRIME: u8 = 31;

/// The supported moduli, in increasing order.
pub const SUPPORTED_PRIMES: [u8; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

const TABLE: usize = 32;

const fn is_supported(p: usize) -> bool {
    let mut i = 0;
    while i < SUPPORTED_PRIMES.len() {
        if SUPPORTED_PRIMES[i] as usize == p {
            return true;
        }
        i += 1;
    }
    false
}

const fn build_mul() -> [[[u8; TABLE]; TABLE]; TABLE] {
    let mut t = [[[0u8; TABLE]; TABLE]; TABLE];
    let mut p = 3;
    while p < TABLE {
        if is_supported(p) {
            let mut a = 0;
            while a < p {
                let mut b = 0;
                while b < p {
                    t[p][a][b] = ((a * b) % p) as u8;
                    b += 1;
                }
                a += 1;
            }
        }
        p += 1;
    }
    t
}

const fn build_inv() -> [[u8; TABLE]; TABLE] {
    let mut t = [[0u8; TABLE]; TABLE];
    let mut p = 3;
    while p < TABLE {
        if is_supported(p) {
            let mut a = 1;
            while a < p {
                let mut b = 1;
                while b < p {
                    if (a * b) % p == 1 {
                        t[p][a] = b as u8;
                    }
                    b += 1;
                }
                a += 1;
            }
        }
        p += 1;
    }
    t
}

const fn build_squares() -> [[bool; TABLE]; TABLE] {
    let mut t = [[false; TABLE]; TABLE];
    let mut p = 3;
    while p < TABLE {
        if is_supported(p) {
            let mut x = 0;
            while x < p {
                t[p][(x * x) % p] = true;
                x += 1;
            }
        }
        p += 1;
    }
    t
}

static MUL: [[[u8; TABLE]; TABLE]; TABLE] = build_mul();
static INV: [[u8; TABLE]; TABLE] = build_inv();
static SQUARES: [[bool; TABLE]; TABLE] = build_squares();

/// A supported prime field GF(p).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    p: u8,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl FieldSpec {
    /// Returns the field of order `p`, rejecting even, composite or
    /// out-of-range moduli.
    pub fn new(p: u32) -> Result<Self> {
        if p <= MAX_PRIME as u32 && is_supported(p as usize) {
            Ok(FieldSpec { p: p as u8 })
        } else {
            Err(Error::UnsupportedField(p))
        }
    }

    #[inline]
    pub fn order(self) -> u8 {
        self.p
    }

    #[inline]
    pub fn order_u64(self) -> u64 {
        self.p as u64
    }

    /// Reduces an arbitrary integer to its canonical residue.
    #[inline]
    pub fn reduce(self, v: i64) -> u8 {
        v.rem_euclid(self.p as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        MUL[self.p as usize][a as usize][b as usize]
    }

    /// `a + b * c`, the elimination workhorse.
    #[inline]
    pub fn mul_add(self, a: u8, b: u8, c: u8) -> u8 {
        self.add(a, self.mul(b, c))
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(self, a: u8) -> Option<u8> {
        if a == 0 {
            None
        } else {
            Some(INV[self.p as usize][a as usize])
        }
    }

    #[inline]
    pub fn is_square(self, a: u8) -> bool {
        SQUARES[self.p as usize][a as usize]
    }

    pub fn pow(self, mut base: u8, mut exp: u64) -> u8 {
        let mut acc = 1u8;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Wraps a residue (reduced modulo `p`) as a [`FieldElem`].
    pub fn elem(self, v: u32) -> FieldElem {
        FieldElem {
            value: (v % self.p as u32) as u8,
            field: self,
        }
    }

    pub fn zero(self) -> FieldElem {
        self.elem(0)
    }

    pub fn one(self) -> FieldElem {
        self.elem(1)
    }

    /// All elements `0, 1, ..., p-1`, in that order.
    pub fn elements(self) -> impl ExactSizeIterator<Item = FieldElem> + Clone {
        (0..self.p).map(move |value| FieldElem { value, field: self })
    }

    /// The nonzero elements `1, ..., p-1`.
    pub fn units(self) -> impl ExactSizeIterator<Item = FieldElem> + Clone {
        (1..self.p).map(move |value| FieldElem { value, field: self })
    }

    /// Smallest generator of the multiplicative group.
    pub fn primitive_root(self) -> u8 {
        let order = (self.p - 1) as u64;
        (2..self.p)
            .find(|&g| {
                (1..order).all(|k| !order.is_multiple_of(k) || self.pow(g, k) != 1)
            })
            .unwrap_or(1)
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.p)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u32::deserialize(d)?;
        FieldSpec::new(p).map_err(serde::de::Error::custom)
    }
}

/// An element of a [`FieldSpec`], tagged with its field.
///
/// The `std::ops` impls panic when the operands live in different fields;
/// the `try_*` methods report that as [`Error::FieldMismatch`] instead.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u8,
    field: FieldSpec,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.p)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FieldElem {
    #[inline]
    pub fn value(self) -> u8 {
        self.value
    }

    #[inline]
    pub fn field(self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check(self, other: FieldElem) -> Result<FieldSpec> {
        if self.field == other.field {
            Ok(self.field)
        } else {
            Err(Error::FieldMismatch {
                left: self.field.p as u32,
                right: other.field.p as u32,
            })
        }
    }

    pub fn try_add(self, other: FieldElem) -> Result<FieldElem> {
        let f = self.check(other)?;
        Ok(FieldElem { value: f.add(self.value, other.value), field: f })
    }

    pub fn try_sub(self, other: FieldElem) -> Result<FieldElem> {
        let f = self.check(other)?;
        Ok(FieldElem { value: f.sub(self.value, other.value), field: f })
    }

    pub fn try_mul(self, other: FieldElem) -> Result<FieldElem> {
        let f = self.check(other)?;
        Ok(FieldElem { value: f.mul(self.value, other.value), field: f })
    }

    pub fn try_div(self, other: FieldElem) -> Result<FieldElem> {
        self.try_mul(other.inv()?)
    }

    pub fn inv(self) -> Result<FieldElem> {
        self.field
            .inv(self.value)
            .map(|value| FieldElem { value, field: self.field })
            .ok_or(Error::DivisionByZero)
    }

    pub fn is_square(self) -> bool {
        self.field.is_square(self.value)
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: FieldElem) -> FieldElem {
        self.try_add(rhs).expect("field mismatch")
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: FieldElem) -> FieldElem {
        self.try_sub(rhs).expect("field mismatch")
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: FieldElem) -> FieldElem {
        self.try_mul(rhs).expect("field mismatch")
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { value: self.field.neg(self.value), field: self.field }
    }
}
