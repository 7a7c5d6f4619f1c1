//! Slow, independent reference computations.
//!
//! Nothing here shares elimination code with [`crate::la`]; these functions
//! are what the factorizations and certificates are tested against.

use thiserror::Error;

use crate::ff::PrimeField;
use crate::la::{DenseMatrix, RankProfile, RankProfileMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("minor needs as many rows as columns ({0} vs {1})")]
    NotSquareMinor(usize, usize),
    #[error("determinant of a non-square {0}x{1} matrix")]
    NotSquare(usize, usize),
    #[error("index out of range")]
    OutOfRange,
}

fn to_rows(a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> Vec<Vec<u64>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| a.get(i, j)).collect())
        .collect()
}

fn all(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Rank by plain row reduction.
fn rank_of(f: PrimeField, mut rows: Vec<Vec<u64>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(pos) = (rank..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rank, pos);
        let inv = f.inv(rows[rank][c]).unwrap();
        for i in 0..rows.len() {
            if i != rank && rows[i][c] != 0 {
                let factor = f.mul(rows[i][c], inv);
                for k in 0..ncols {
                    let sub = f.mul(factor, rows[rank][k]);
                    rows[i][k] = f.sub(rows[i][k], sub);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Determinant by row reduction with swaps.
fn det_elimination(f: PrimeField, mut rows: Vec<Vec<u64>>) -> u64 {
    let n = rows.len();
    let mut det = 1 % f.modulus();
    for c in 0..n {
        let Some(pos) = (c..n).find(|&i| rows[i][c] != 0) else {
            return 0;
        };
        if pos != c {
            rows.swap(pos, c);
            det = f.neg(det);
        }
        det = f.mul(det, rows[c][c]);
        let inv = f.inv(rows[c][c]).unwrap();
        for i in c + 1..n {
            let factor = f.mul(rows[i][c], inv);
            for k in c..n {
                let sub = f.mul(factor, rows[c][k]);
                rows[i][k] = f.sub(rows[i][k], sub);
            }
        }
    }
    det
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // Heap's algorithm; the flag is the parity (true = odd).
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    let mut odd = false;
    out.push((a.clone(), odd));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            odd = !odd;
            out.push((a.clone(), odd));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Leibniz expansion; exponential, only for tiny matrices.
fn det_leibniz(f: PrimeField, rows: &[Vec<u64>]) -> u64 {
    let n = rows.len();
    let mut acc = 0;
    for (perm, odd) in permutations(n) {
        let term = (0..n).fold(1 % f.modulus(), |t, i| f.mul(t, rows[i][perm[i]]));
        acc = if odd { f.sub(acc, term) } else { f.add(acc, term) };
    }
    acc
}

/// The `(I, J)` minor. The empty minor is 1.
pub fn minor(a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> Result<u64, OracleError> {
    if rows.len() != cols.len() {
        return Err(OracleError::NotSquareMinor(rows.len(), cols.len()));
    }
    if rows.iter().any(|&i| i >= a.rows()) || cols.iter().any(|&j| j >= a.cols()) {
        return Err(OracleError::OutOfRange);
    }
    let sub = to_rows(a, rows, cols);
    let f = a.field();
    Ok(if rows.len() <= 4 {
        det_leibniz(f, &sub)
    } else {
        det_elimination(f, sub)
    })
}

pub fn oracle_rank(a: &DenseMatrix) -> usize {
    rank_of(a.field(), to_rows(a, &all(a.rows()), &all(a.cols())))
}

pub fn oracle_det(a: &DenseMatrix) -> Result<u64, OracleError> {
    if !a.is_square() {
        return Err(OracleError::NotSquare(a.rows(), a.cols()));
    }
    let rows = to_rows(a, &all(a.rows()), &all(a.cols()));
    let det = det_elimination(a.field(), rows.clone());
    if a.rows() <= 4 {
        assert_eq!(det, det_leibniz(a.field(), &rows), "elimination and Leibniz disagree");
    }
    Ok(det)
}

/// `A·B` by the schoolbook triple loop.
pub fn oracle_product(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    let f = a.field();
    DenseMatrix::from_fn(f, a.rows(), b.cols(), |i, j| {
        (0..a.cols()).fold(0, |acc, k| f.add(acc, f.mul(a.get(i, k), b.get(k, j))))
    })
}

/// Lexicographically smallest set of independent columns: keep a column
/// iff it raises the rank of the columns kept so far.
pub fn oracle_crp(a: &DenseMatrix) -> RankProfile {
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..a.cols() {
        let mut trial = kept.clone();
        trial.push(j);
        let rank = rank_of(a.field(), to_rows(a, &all(a.rows()), &trial));
        if rank > kept.len() {
            kept = trial;
        }
    }
    RankProfile::new(kept, a.cols()).unwrap()
}

pub fn oracle_rrp(a: &DenseMatrix) -> RankProfile {
    oracle_crp(&a.transpose())
}

/// `r[i][j] = rank(A[0..i, 0..j])`, for `0 ≤ i ≤ m`, `0 ≤ j ≤ n`.
pub fn leading_ranks(a: &DenseMatrix) -> Vec<Vec<usize>> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = vec![vec![0; n + 1]; m + 1];
    for i in 1..=m {
        for j in 1..=n {
            r[i][j] = rank_of(a.field(), to_rows(a, &all(i), &all(j)));
        }
    }
    r
}

/// The rank profile matrix by inclusion–exclusion on leading ranks: there
/// is a one at `(i, j)` exactly when
/// `r(i+1, j+1) - r(i, j+1) - r(i+1, j) + r(i, j) = 1`.
pub fn oracle_rpm(a: &DenseMatrix) -> RankProfileMatrix {
    let r = leading_ranks(a);
    let mut ones = Vec::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let d = (r[i + 1][j + 1] + r[i][j]) as isize - (r[i][j + 1] + r[i + 1][j]) as isize;
            debug_assert!(d == 0 || d == 1);
            if d == 1 {
                ones.push((i, j));
            }
        }
    }
    RankProfileMatrix::new(a.rows(), a.cols(), ones).expect("leading ranks define a rook placement")
}

fn rook_placements(m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(
        i: usize,
        m: usize,
        n: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if i == m {
            out.push(cur.clone());
            return;
        }
        go(i + 1, m, n, used, cur, out);
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                cur.push((i, j));
                go(i + 1, m, n, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, m, n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Every 0/1 matrix with at most one one per row and column whose leading
/// ranks all match those of `A`. There is exactly one; exponential.
pub fn oracle_rpm_exhaustive(a: &DenseMatrix) -> Vec<RankProfileMatrix> {
    let (m, n) = (a.rows(), a.cols());
    let target = leading_ranks(a);
    rook_placements(m, n)
        .into_iter()
        .filter(|ones| {
            (1..=m).all(|i| {
                (1..=n).all(|j| ones.iter().filter(|&&(r, c)| r < i && c < j).count() == target[i][j])
            })
        })
        .map(|ones| RankProfileMatrix::new(m, n, ones).unwrap())
        .collect()
}

/// Whether every leading principal minor of a square matrix is nonzero.
pub fn has_grp(a: &DenseMatrix) -> bool {
    a.is_square() && (1..=a.rows()).all(|i| minor(a, &all(i), &all(i)).unwrap() != 0)
}

/// Checks the Desnanot–Jacobi identity
/// `det A · [A]_{2..n-1} = [A]_{1..n-1}·[A]_{2..n} − [A]^{2..n}_{1..n-1}·[A]^{1..n-1}_{2..n}`
/// and its conjugate by the cyclic shift, which removes the last two
/// indices instead of the first and last.
pub fn check_dodgson(a: &DenseMatrix) -> bool {
    let n = a.rows();
    if n < 2 || !a.is_square() {
        return false;
    }
    let f = a.field();
    let mn = |r: &[usize], c: &[usize]| minor(a, r, c).unwrap();
    let full = all(n);
    let head: Vec<usize> = (0..n - 1).collect();
    let tail: Vec<usize> = (1..n).collect();
    let inner: Vec<usize> = (1..n - 1).collect();
    let lhs = f.mul(mn(&full, &full), mn(&inner, &inner));
    let rhs = f.sub(
        f.mul(mn(&head, &head), mn(&tail, &tail)),
        f.mul(mn(&tail, &head), mn(&head, &tail)),
    );
    let first = lhs == rhs;

    let short: Vec<usize> = (0..n - 2).collect();
    let skip: Vec<usize> = (0..n - 2).chain([n - 1]).collect();
    let lhs = f.mul(mn(&full, &full), mn(&short, &short));
    let rhs = f.sub(
        f.mul(mn(&skip, &skip), mn(&head, &head)),
        f.mul(mn(&head, &skip), mn(&skip, &head)),
    );
    first && lhs == rhs
}
