//! Arithmetic in `Z/pZ` for word-sized primes, and the challenge sample sets
//! drawn from it.
//!
//! Residues are plain `u64` values in `[0, p)`. Hot loops (elimination,
//! matrix-vector products) work on raw residues through [`PrimeField`];
//! [`FieldElement`] carries its modulus and is the checked, self-describing
//! value used at API boundaries.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Modulus used when none is given.
pub const DEFAULT_MODULUS: u64 = 131_071;

/// Exclusive upper bound on supported moduli; keeps every product below 2^62.
pub const MODULUS_LIMIT: u64 = 1 << 31;

/// Deterministic generator injected into every randomized routine.
pub type RandomSource = ChaCha20Rng;

/// Seeds a [`RandomSource`].
pub fn seeded(seed: u64) -> RandomSource {
    RandomSource::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime modulus in [2, 2^31)")]
    NotPrime(u64),
    #[error("operands live in different fields (p = {0} and p = {1})")]
    ModulusMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("sample set is empty")]
    EmptySampleSet,
}

/// The prime field `F_p`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
    // floor(2^64 / p), for Barrett reduction.
    barrett: u64,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MODULUS_LIMIT || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        let barrett = if p.is_power_of_two() {
            u64::MAX / p + 1
        } else {
            u64::MAX / p
        };
        Ok(Self { p, barrett })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Number of elements, `p`.
    #[inline]
    pub fn order(&self) -> u64 {
        self.p
    }

    /// Reduces any `u64` to its canonical residue.
    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let r = x - q * self.p;
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }

    /// Maps a signed integer to its residue.
    pub fn from_i64(&self, x: i64) -> u64 {
        let r = x.rem_euclid(self.p as i64);
        r as u64
    }

    #[inline(always)]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    /// `acc + a*b`.
    #[inline(always)]
    pub fn mul_add(&self, acc: u64, a: u64, b: u64) -> u64 {
        self.reduce(acc + a * b)
    }

    /// `acc - a*b`.
    #[inline(always)]
    pub fn mul_sub(&self, acc: u64, a: u64, b: u64) -> u64 {
        self.sub(acc, self.reduce(a * b))
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        let a = self.reduce(a);
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.from_i64(t0))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        let mut b = self.reduce(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Inner product of two equally long residue slices.
    pub fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        a.iter()
            .zip(b)
            .fold(0, |acc, (&x, &y)| self.mul_add(acc, x, y))
    }

    /// Wraps a residue (reducing it first).
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(value),
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// Uniform element of the whole field.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(0..self.p)
    }

    /// Uniform nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(1..self.p)
    }
}

/// An element of `F_p` that remembers its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.field.p)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn same_field(&self, other: &Self) -> Result<PrimeField, FieldError> {
        if self.field.p != other.field.p {
            return Err(FieldError::ModulusMismatch(self.field.p, other.field.p));
        }
        Ok(self.field)
    }

    pub fn add(self, rhs: Self) -> Result<Self, FieldError> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.add(self.value, rhs.value)))
    }

    pub fn sub(self, rhs: Self) -> Result<Self, FieldError> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.sub(self.value, rhs.value)))
    }

    pub fn mul(self, rhs: Self) -> Result<Self, FieldError> {
        let f = self.same_field(&rhs)?;
        Ok(f.elem(f.mul(self.value, rhs.value)))
    }

    pub fn neg(self) -> Self {
        self.field.elem(self.field.neg(self.value))
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        Ok(self.field.elem(self.field.inv(self.value)?))
    }

    pub fn pow(self, exp: u64) -> Self {
        self.field.elem(self.field.pow(self.value, exp))
    }
}

/// A finite subset `S` of `F_p` that challenges are drawn from: the field
/// minus a small set of excluded residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    field: PrimeField,
    // sorted, deduplicated, all < p
    excluded: Vec<u64>,
}

impl SampleSet {
    /// `S = F_p`.
    pub fn full(field: PrimeField) -> Self {
        Self {
            field,
            excluded: Vec::new(),
        }
    }

    /// `S* = F_p \ {0}`.
    pub fn nonzero(field: PrimeField) -> Self {
        Self {
            field,
            excluded: vec![0],
        }
    }

    pub fn excluding(field: PrimeField, values: impl IntoIterator<Item = u64>) -> Self {
        let mut excluded: Vec<u64> = values.into_iter().map(|v| field.reduce(v)).collect();
        excluded.sort_unstable();
        excluded.dedup();
        Self { field, excluded }
    }

    /// This set with one more residue removed.
    pub fn without(&self, value: u64) -> Self {
        Self::excluding(
            self.field,
            self.excluded.iter().copied().chain([self.field.reduce(value)]),
        )
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn excluded(&self) -> &[u64] {
        &self.excluded
    }

    /// `|S|`.
    pub fn size(&self) -> u64 {
        self.field.p - self.excluded.len() as u64
    }

    pub fn contains(&self, value: u64) -> bool {
        value < self.field.p && self.excluded.binary_search(&value).is_err()
    }

    /// The `index`-th member of `S` in increasing order.
    pub fn nth(&self, index: u64) -> Result<u64, FieldError> {
        if index >= self.size() {
            return Err(FieldError::EmptySampleSet);
        }
        let mut value = index;
        for &e in &self.excluded {
            if e <= value {
                value += 1;
            } else {
                break;
            }
        }
        Ok(value)
    }

    /// Uniform draw from `S`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u64, FieldError> {
        let size = self.size();
        if size == 0 {
            return Err(FieldError::EmptySampleSet);
        }
        self.nth(rng.random_range(0..size))
    }
}
