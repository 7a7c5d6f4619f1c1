#![allow(dead_code)]

use rand::Rng;
use rankcert::la::lu_generic;
use rankcert::oracle::{has_grp, oracle_rank};
use rankcert::prelude::*;
use rankcert::proto::{Inputs, ProtocolId};

pub fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// All 512 matrices of `F_2^{3x3}`.
pub fn binary_3x3() -> impl Iterator<Item = DenseMatrix> {
    let f2 = field(2);
    (0u32..512).map(move |bits| {
        DenseMatrix::from_fn(f2, 3, 3, |i, j| ((bits >> (3 * i + j)) & 1) as u64)
    })
}

/// `m x n` of rank at most `r`.
pub fn low_rank(f: PrimeField, m: usize, n: usize, r: usize, rng: &mut RandomSource) -> DenseMatrix {
    let x = DenseMatrix::random(f, m, r, rng);
    let y = DenseMatrix::random(f, r, n, rng);
    x.mul(&y).unwrap()
}

/// Square matrices of sizes `sizes`; every third one is rank deficient.
pub fn random_square(f: PrimeField, count: usize, sizes: std::ops::RangeInclusive<usize>, seed: u64) -> Vec<DenseMatrix> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(sizes.clone());
            if k % 3 == 2 {
                let r = rng.random_range(0..n);
                low_rank(f, n, n, r, &mut rng)
            } else {
                DenseMatrix::random(f, n, n, &mut rng)
            }
        })
        .collect()
}

/// Rectangular matrices with both dimensions in `sizes`.
pub fn random_rect(f: PrimeField, count: usize, sizes: std::ops::RangeInclusive<usize>, seed: u64) -> Vec<DenseMatrix> {
    let mut rng = seeded(seed);
    (0..count)
        .map(|k| {
            let m = rng.random_range(sizes.clone());
            let n = rng.random_range(sizes.clone());
            if k % 3 == 2 {
                let r = rng.random_range(0..=m.min(n));
                low_rank(f, m, n, r, &mut rng)
            } else {
                DenseMatrix::random(f, m, n, &mut rng)
            }
        })
        .collect()
}

/// Invertible and with a generic rank profile: `L·U` with random unit `L`
/// and `U` with a nonzero diagonal.
pub fn random_grp(f: PrimeField, n: usize, rng: &mut RandomSource) -> DenseMatrix {
    let l = DenseMatrix::from_fn(f, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Greater => f.random(rng),
        std::cmp::Ordering::Less => 0,
    });
    let u = DenseMatrix::from_fn(f, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => f.random_nonzero(rng),
        std::cmp::Ordering::Less => f.random(rng),
        std::cmp::Ordering::Greater => 0,
    });
    l.mul(&u).unwrap()
}

/// `m x n` with rank exactly `r`, `r ≤ min(m, n)`.
pub fn exact_rank(f: PrimeField, m: usize, n: usize, r: usize, rng: &mut RandomSource) -> DenseMatrix {
    loop {
        let a = low_rank(f, m, n, r, rng);
        if oracle_rank(&a) == r {
            return a;
        }
    }
}

fn triangular(f: PrimeField, n: usize, side: Side, rng: &mut RandomSource) -> DenseMatrix {
    DenseMatrix::from_fn(f, n, n, |i, j| {
        if i == j {
            f.random_nonzero(rng)
        } else if (i > j) == (side == Side::Lower) {
            f.random(rng)
        } else {
            0
        }
    })
}

/// Public inputs on which the honest prover of `id` has a witness, or
/// `None` if `a` does not meet the protocol's precondition.
pub fn honest_inputs(id: ProtocolId, a: &DenseMatrix, seed: u64) -> Option<Inputs> {
    let f = a.field();
    let mut rng = seeded(seed);
    let square = a.is_square();
    let full = oracle_rank(a) == a.rows().min(a.cols());
    let invertible = square && full;
    let inputs = Inputs::new(a.clone());
    match id {
        ProtocolId::Freivalds => {
            let b = DenseMatrix::random(f, a.cols(), rng.random_range(1..=4), &mut rng);
            Some(inputs.with_b(b))
        }
        ProtocolId::TriEquivLower | ProtocolId::TriEquivUpper => {
            if !(full && a.rows() >= a.cols()) {
                return None;
            }
            let side = if id == ProtocolId::TriEquivLower { Side::Lower } else { Side::Upper };
            let b = a.mul(&triangular(f, a.cols(), side, &mut rng)).unwrap();
            Some(inputs.with_b(b))
        }
        ProtocolId::Grp => (invertible && has_grp(a) && lu_generic(a).is_ok()).then_some(inputs),
        ProtocolId::Ldup | ProtocolId::RpmInvertible => invertible.then_some(inputs),
        ProtocolId::Det => square.then_some(inputs),
        ProtocolId::RankUpper => Some(inputs.with_rank(oracle_rank(a))),
        _ => Some(inputs),
    }
}
