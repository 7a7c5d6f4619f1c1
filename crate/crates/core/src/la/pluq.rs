use super::{
    is_lower_triangular, is_upper_triangular, trsv_lower, trsv_upper, DenseMatrix, Diagonal,
    LaError, Padding, Permutation, RankProfile, RankProfileMatrix,
};
use crate::ff::PrimeField;
use crate::par::Execution;

/// `A = P·L·U·Q`.
///
/// `p` maps row `i` of `L·U` to row `p[i]` of `A`, and `q` maps column `k`
/// of `L·U` to column `q[k]` of `A`; as matrices `P = p.matrix()` and
/// `Q = q.inverse().matrix()`. `L` is `m x r` unit lower trapezoidal and `U`
/// is `r x n` upper trapezoidal with a nonzero diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluqFactorization {
    pub rank: usize,
    pub p: Permutation,
    pub l: DenseMatrix,
    pub u: DenseMatrix,
    pub q: Permutation,
}

impl PluqFactorization {
    pub fn field(&self) -> PrimeField {
        self.l.field()
    }

    /// `P·L·U·Q` by a dense product.
    pub fn reconstruct(&self) -> Result<DenseMatrix, LaError> {
        let lu = self.l.mul(&self.u)?;
        self.q.inverse().permute_cols(&self.p.permute_rows(&lu)?)
    }

    /// `U·Q`, the matrix whose echelon shape certifies the column profile.
    pub fn uq(&self) -> Result<DenseMatrix, LaError> {
        self.q.inverse().permute_cols(&self.u)
    }

    /// `q[0..r]`: the columns of `A` the pivots sit in, in pivot order.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.q.images()[..self.rank]
    }

    /// `p[0..r]`.
    pub fn pivot_rows(&self) -> &[usize] {
        &self.p.images()[..self.rank]
    }

    /// Sorted pivot columns.
    pub fn column_profile(&self) -> RankProfile {
        let mut c = self.pivot_columns().to_vec();
        c.sort_unstable();
        RankProfile::new(c, self.q.len()).expect("pivot columns are distinct")
    }

    /// Sorted pivot rows.
    pub fn row_profile(&self) -> RankProfile {
        let mut c = self.pivot_rows().to_vec();
        c.sort_unstable();
        RankProfile::new(c, self.p.len()).expect("pivot rows are distinct")
    }

    /// `P·[I_r 0; 0 0]·Q`: ones at `(p[k], q[k])` for `k < r`.
    pub fn rank_profile_matrix(&self) -> RankProfileMatrix {
        let ones = self
            .pivot_rows()
            .iter()
            .zip(self.pivot_columns())
            .map(|(&i, &j)| (i, j))
            .collect();
        RankProfileMatrix::new(self.p.len(), self.q.len(), ones)
            .expect("pivots occupy distinct rows and columns")
    }

    /// `P·[L | 0]·Pᵀ` (square, `m x m`).
    pub fn conjugated_l(&self) -> Result<DenseMatrix, LaError> {
        let m = self.p.len();
        let padded = self.l.pad_to(m, m, Padding::Zero)?;
        super::conjugate_by_permutations(&self.p, &padded, &self.p.inverse())
    }

    /// `Qᵀ·[U; 0]·Q` (square, `n x n`).
    pub fn conjugated_u(&self) -> Result<DenseMatrix, LaError> {
        let n = self.q.len();
        let padded = self.u.pad_to(n, n, Padding::Zero)?;
        super::conjugate_by_permutations(&self.q, &padded, &self.q.inverse())
    }

    /// The two triangularity conditions under which `P·[I_r 0]·Q` is the
    /// rank profile matrix.
    pub fn reveals_rank_profile_matrix(&self) -> bool {
        match (self.conjugated_l(), self.conjugated_u()) {
            (Ok(l), Ok(u)) => is_lower_triangular(&l) && is_upper_triangular(&u),
            _ => false,
        }
    }

    /// A solution `γ` of `A·γ = w` supported on the pivot columns.
    ///
    /// Only the leading `r` equations (after `Pᵀ`) are used, so the result
    /// is meaningful only when `w` lies in the column space of `A`.
    pub fn solve_on_pivots(&self, w: &[u64]) -> Result<Vec<u64>, LaError> {
        let r = self.rank;
        if w.len() != self.p.len() {
            return Err(LaError::dims("pivot solve", self.p.len(), w.len()));
        }
        let permuted = self.p.gather(w);
        let y = trsv_lower(&self.l.leading(r, r), &permuted[..r])?;
        let g = trsv_upper(&self.u.leading(r, r), &y)?;
        let mut gamma = vec![0; self.q.len()];
        for (k, &c) in self.pivot_columns().iter().enumerate() {
            gamma[c] = g[k];
        }
        Ok(gamma)
    }

    /// Determinant of a square input (zero when rank-deficient).
    pub fn determinant(&self) -> Result<u64, LaError> {
        let n = self.p.len();
        if n != self.q.len() {
            return Err(LaError::Shape("determinant of a non-square matrix".into()));
        }
        let f = self.field();
        if self.rank < n {
            return Ok(0);
        }
        let prod = (0..n).fold(1 % f.modulus(), |acc, k| f.mul(acc, self.u.get(k, k)));
        Ok(if self.p.sign() * self.q.sign() < 0 {
            f.neg(prod)
        } else {
            prod
        })
    }
}

/// `A = L·D·U₁·P` with `L`, `U₁` unit triangular and `D` invertible.
///
/// Column `k` of `L·D·U₁` is column `p[k]` of `A`, i.e. `P[k, p[k]] = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdupFactorization {
    pub l: DenseMatrix,
    pub d: Diagonal,
    pub u1: DenseMatrix,
    pub p: Permutation,
}

impl LdupFactorization {
    pub fn reconstruct(&self) -> Result<DenseMatrix, LaError> {
        let f = self.l.field();
        let ldu = self.l.mul(&self.d.matrix(f))?.mul(&self.u1)?;
        self.p.inverse().permute_cols(&ldu)
    }

    /// The permutation matrix `P`.
    pub fn p_matrix(&self, field: PrimeField) -> DenseMatrix {
        self.p.inverse().matrix(field)
    }

    pub fn determinant(&self) -> u64 {
        let f = self.l.field();
        let d = self.d.determinant(f);
        if self.p.sign() < 0 {
            f.neg(d)
        } else {
            d
        }
    }
}

struct Eliminated {
    w: Vec<u64>,
    p: Vec<usize>,
    q: Vec<usize>,
    rank: usize,
    // Row of `w` holding the `t`-th pivot row: `p[t]` when rows stay in
    // place, `t` when rows are physically swapped.
    swapped: bool,
}

/// Subtracts multiples of the pivot row from every row of `below`, storing
/// the multiplier in the pivot column. Only columns after `j` are touched.
fn eliminate_below(
    f: PrimeField,
    below: &mut [u64],
    pivot_row: &[u64],
    n: usize,
    j: usize,
    exec: Execution,
) {
    let inv = f.inv(pivot_row[j]).expect("pivot is nonzero");
    let rows = below.len() / n.max(1);
    let exec = exec.for_work(rows * (n - j));
    exec.for_each_row(below, n, |_, row| {
        let x = row[j];
        if x == 0 {
            return;
        }
        let mult = f.mul(x, inv);
        row[j] = mult;
        let nm = f.neg(mult);
        for (r, &u) in row[j + 1..].iter_mut().zip(&pivot_row[j + 1..]) {
            *r = f.mul_add(*r, nm, u);
        }
    });
}

fn assemble(f: PrimeField, m: usize, n: usize, e: Eliminated) -> PluqFactorization {
    let r = e.rank;
    let store = |t: usize| if e.swapped { t } else { e.p[t] };
    let pivots = &e.q[..r];
    let l = DenseMatrix::from_fn(f, m, r, |s, t| {
        if s == t {
            1
        } else if s < t {
            0
        } else {
            e.w[store(s) * n + pivots[t]]
        }
    });
    let u = DenseMatrix::from_fn(f, r, n, |t, s| {
        if s < t {
            0
        } else {
            e.w[store(t) * n + e.q[s]]
        }
    });
    PluqFactorization {
        rank: r,
        p: Permutation::new(e.p).expect("row order is a permutation"),
        l,
        u,
        q: Permutation::new(e.q).expect("column order is a permutation"),
    }
}

fn with_remaining(pivots: Vec<usize>, n: usize) -> Vec<usize> {
    let mut used = vec![false; n];
    pivots.iter().for_each(|&i| used[i] = true);
    let mut all = pivots;
    all.extend((0..n).filter(|&i| !used[i]));
    all
}

/// PLUQ with `U·Q` in row echelon form, so that the pivot columns are the
/// column rank profile. Pivots are searched column by column; rows are
/// exchanged by transpositions.
pub fn pluq_crp(a: &DenseMatrix) -> PluqFactorization {
    pluq_crp_with(a, Execution::default())
}

pub fn pluq_crp_with(a: &DenseMatrix, exec: Execution) -> PluqFactorization {
    let (m, n, f) = (a.rows(), a.cols(), a.field());
    let mut w = a.data().to_vec();
    let mut rows: Vec<usize> = (0..m).collect();
    let mut pivots = Vec::new();
    let mut k = 0;
    for j in 0..n {
        if k == m {
            break;
        }
        let Some(i) = (k..m).find(|&i| w[i * n + j] != 0) else {
            continue;
        };
        if i != k {
            let (top, bottom) = w.split_at_mut(i * n);
            top[k * n..(k + 1) * n].swap_with_slice(&mut bottom[..n]);
            rows.swap(i, k);
        }
        let (top, below) = w.split_at_mut((k + 1) * n);
        eliminate_below(f, below, &top[k * n..], n, j, exec);
        pivots.push(j);
        k += 1;
    }
    let rank = pivots.len();
    let e = Eliminated {
        w,
        p: rows,
        q: with_remaining(pivots, n),
        rank,
        swapped: true,
    };
    let out = assemble(f, m, n, e);
    debug_assert!(super::is_row_echelon(&out.uq().unwrap()));
    out
}

/// PLUQ revealing the rank profile matrix: rows are taken in order, each
/// pivoting on its leftmost nonzero among the unpivoted columns. Rows stay
/// in place during elimination; `P` and `Q` list the pivots in order, then
/// the remaining indices in order.
pub fn pluq_rpm(a: &DenseMatrix) -> PluqFactorization {
    pluq_rpm_with(a, Execution::default())
}

pub fn pluq_rpm_with(a: &DenseMatrix, exec: Execution) -> PluqFactorization {
    let (m, n, f) = (a.rows(), a.cols(), a.field());
    let mut w = a.data().to_vec();
    let mut pivoted = vec![false; n];
    let mut pivot_rows = Vec::new();
    let mut pivot_cols = Vec::new();
    let mut masked = vec![0u64; n];
    for i in 0..m {
        let Some(j) = (0..n).find(|&j| !pivoted[j] && w[i * n + j] != 0) else {
            continue;
        };
        // Earlier pivot columns of this row hold multipliers, not entries.
        masked.copy_from_slice(&w[i * n..(i + 1) * n]);
        for &c in &pivot_cols {
            masked[c] = 0;
        }
        eliminate_below(f, &mut w[(i + 1) * n..], &masked, n, j, exec);
        pivoted[j] = true;
        pivot_rows.push(i);
        pivot_cols.push(j);
    }
    let rank = pivot_rows.len();
    let e = Eliminated {
        w,
        p: with_remaining(pivot_rows, m),
        q: with_remaining(pivot_cols, n),
        rank,
        swapped: false,
    };
    let out = assemble(f, m, n, e);
    debug_assert!(out.reveals_rank_profile_matrix());
    out
}

/// LDUP of a non-singular matrix with `P` equal to its rank profile matrix.
///
/// Taking rows in order never leaves a row without a pivot when `A` is
/// invertible, so the row permutation of [`pluq_rpm`] is the identity and
/// `A = L·U·Q` directly gives `D = diag(U)`, `U₁ = D⁻¹U` and `P = Q`.
pub fn ldup(a: &DenseMatrix) -> Result<LdupFactorization, LaError> {
    ldup_with(a, Execution::default())
}

pub fn ldup_with(a: &DenseMatrix, exec: Execution) -> Result<LdupFactorization, LaError> {
    if !a.is_square() {
        return Err(LaError::Shape("LDUP needs a square matrix".into()));
    }
    let n = a.rows();
    let f = a.field();
    let pluq = pluq_rpm_with(a, exec);
    if pluq.rank < n {
        return Err(LaError::SingularMatrix);
    }
    debug_assert!(pluq.p.is_identity());
    let diag: Vec<u64> = (0..n).map(|k| pluq.u.get(k, k)).collect();
    let inv: Vec<u64> = diag
        .iter()
        .map(|&d| f.inv(d))
        .collect::<Result<_, _>>()?;
    let u1 = DenseMatrix::from_fn(f, n, n, |i, j| f.mul(inv[i], pluq.u.get(i, j)));
    Ok(LdupFactorization {
        l: pluq.l,
        d: Diagonal::new(f, diag)?,
        u1,
        p: pluq.q,
    })
}

/// `A = L·U` without pivoting, `L` unit lower and `U` upper with a nonzero
/// diagonal. Fails when a leading principal minor vanishes.
pub fn lu_generic(a: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix), LaError> {
    if !a.is_square() {
        return Err(LaError::Shape("LU needs a square matrix".into()));
    }
    let (n, f) = (a.rows(), a.field());
    let mut w = a.data().to_vec();
    for k in 0..n {
        if w[k * n + k] == 0 {
            return Err(LaError::NoGenericRankProfile);
        }
        let (top, below) = w.split_at_mut((k + 1) * n);
        eliminate_below(f, below, &top[k * n..], n, k, Execution::Sequential);
    }
    let l = DenseMatrix::from_fn(f, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Greater => w[i * n + j],
    });
    let u = DenseMatrix::from_fn(f, n, n, |i, j| if j < i { 0 } else { w[i * n + j] });
    Ok((l, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::seeded;
    use crate::la::{is_row_echelon, is_unit_lower_triangular, is_unit_upper_triangular};
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(f(p), &rows).unwrap()
    }

    fn check_shape(a: &DenseMatrix, d: &PluqFactorization) {
        assert_eq!(&d.reconstruct().unwrap(), a);
        assert!(is_unit_lower_triangular(&d.l.leading(d.rank, d.rank)));
        assert!(is_upper_triangular(&d.u));
        assert!((0..d.rank).all(|k| d.u.get(k, k) != 0));
    }

    #[test]
    fn identity_and_zero() {
        let id = DenseMatrix::identity(f(7), 4);
        let d = pluq_crp(&id);
        assert_eq!(d.rank, 4);
        assert!(d.q.is_identity());
        assert_eq!(d.column_profile().indices(), &[0, 1, 2, 3]);
        let z = DenseMatrix::zeros(f(7), 3, 2);
        for d in [pluq_crp(&z), pluq_rpm(&z)] {
            assert_eq!(d.rank, 0);
            assert_eq!((d.l.cols(), d.u.rows()), (0, 0));
            assert!(d.column_profile().indices().is_empty());
            check_shape(&z, &d);
        }
    }

    #[test]
    fn crp_skips_zero_column() {
        let a = m(5, &[&[0, 1], &[0, 2]]);
        let d = pluq_crp(&a);
        assert_eq!(d.rank, 1);
        assert_eq!(d.pivot_columns(), &[1]);
        check_shape(&a, &d);
    }

    #[test]
    fn rpm_of_antidiagonal() {
        let a = m(7, &[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        let d = pluq_rpm(&a);
        assert_eq!(d.rank_profile_matrix().ones(), &[(0, 2), (1, 1), (2, 0)]);
        check_shape(&a, &d);
    }

    #[test]
    fn ldup_examples() {
        let a = m(7, &[&[2, 0], &[0, 3]]);
        let d = ldup(&a).unwrap();
        assert_eq!(d.d.entries(), &[2, 3]);
        assert!(d.p.is_identity());
        assert_eq!(d.l, DenseMatrix::identity(f(7), 2));
        assert_eq!(d.u1, DenseMatrix::identity(f(7), 2));

        let swap = m(7, &[&[0, 1], &[1, 0]]);
        let d = ldup(&swap).unwrap();
        assert_eq!(d.p, Permutation::swap(2, 0, 1));
        assert_eq!(d.d.entries(), &[1, 1]);
        assert_eq!(d.reconstruct().unwrap(), swap);

        let a = m(5, &[&[1, 1], &[1, 0]]);
        let d = ldup(&a).unwrap();
        assert!(d.p.is_identity());
        assert_eq!(d.d.entries(), &[1, 4]);
        assert_eq!(d.l, m(5, &[&[1, 0], &[1, 1]]));
        assert_eq!(d.u1, m(5, &[&[1, 1], &[0, 1]]));
        assert_eq!(d.reconstruct().unwrap(), a);

        assert_eq!(ldup(&m(7, &[&[1, 2], &[2, 4]])), Err(LaError::SingularMatrix));
    }

    #[test]
    fn generic_lu() {
        let a = m(5, &[&[1, 1], &[1, 0]]);
        let (l, u) = lu_generic(&a).unwrap();
        assert_eq!(l.mul(&u).unwrap(), a);
        assert_eq!(
            lu_generic(&m(5, &[&[0, 1], &[1, 0]])),
            Err(LaError::NoGenericRankProfile)
        );
    }

    #[test]
    fn determinant_from_factors() {
        let a = m(7, &[&[1, 2], &[3, 4]]);
        assert_eq!(pluq_crp(&a).determinant().unwrap(), 5);
        assert_eq!(pluq_rpm(&a).determinant().unwrap(), 5);
        assert_eq!(ldup(&a).unwrap().determinant(), 5);
        assert_eq!(ldup(&m(7, &[&[0, 1], &[1, 0]])).unwrap().determinant(), 6);
    }

    #[test]
    fn exhaustive_binary_3x3() {
        let f2 = f(2);
        for bits in 0u32..512 {
            let a = DenseMatrix::from_fn(f2, 3, 3, |i, j| ((bits >> (3 * i + j)) & 1) as u64);
            let crp = pluq_crp(&a);
            check_shape(&a, &crp);
            assert!(is_row_echelon(&crp.uq().unwrap()));
            let rpm = pluq_rpm(&a);
            check_shape(&a, &rpm);
            assert!(rpm.reveals_rank_profile_matrix());
            if rpm.rank == 3 {
                let d = ldup(&a).unwrap();
                assert_eq!(d.reconstruct().unwrap(), a);
                assert!(is_unit_lower_triangular(&d.l) && is_unit_upper_triangular(&d.u1));
            }
        }
    }

    #[test]
    fn strategies_agree_on_a_large_matrix() {
        let a = DenseMatrix::random(f(131_071), 150, 140, &mut seeded(9));
        assert_eq!(
            pluq_crp_with(&a, Execution::Sequential),
            pluq_crp_with(&a, Execution::Parallel)
        );
        assert_eq!(
            pluq_rpm_with(&a, Execution::Sequential),
            pluq_rpm_with(&a, Execution::Parallel)
        );
    }

    fn low_rank(field: PrimeField, m: usize, n: usize, r: usize, seed: u64) -> DenseMatrix {
        let mut rng = seeded(seed);
        let x = DenseMatrix::random(field, m, r, &mut rng);
        let y = DenseMatrix::random(field, r, n, &mut rng);
        x.mul(&y).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn reconstruction_random(m in 1usize..20, n in 1usize..20, r in 0usize..20, seed in any::<u64>()) {
            let a = low_rank(f(131_071), m, n, r, seed);
            let crp = pluq_crp(&a);
            check_shape(&a, &crp);
            prop_assert!(is_row_echelon(&crp.uq().unwrap()));
            let rpm = pluq_rpm(&a);
            check_shape(&a, &rpm);
            prop_assert!(rpm.reveals_rank_profile_matrix());
            prop_assert_eq!(crp.rank, rpm.rank);
        }

        #[test]
        fn pivot_solve(m in 1usize..12, n in 1usize..12, r in 0usize..12, seed in any::<u64>()) {
            let a = low_rank(f(101), m, n, r, seed);
            let d = pluq_crp(&a);
            let v: Vec<u64> = (0..n as u64).map(|i| (i * 37 + seed) % 101).collect();
            let w = a.apply(&v).unwrap();
            let gamma = d.solve_on_pivots(&w).unwrap();
            prop_assert_eq!(a.apply(&gamma).unwrap(), w);
            let support = gamma.iter().filter(|&&g| g != 0).count();
            prop_assert!(support <= d.rank);
        }

        #[test]
        fn ldup_random(n in 1usize..16, seed in any::<u64>()) {
            let a = DenseMatrix::random(f(131_071), n, n, &mut seeded(seed));
            if let Ok(d) = ldup(&a) {
                prop_assert_eq!(d.reconstruct().unwrap(), a.clone());
                prop_assert!(is_unit_lower_triangular(&d.l));
                prop_assert!(is_unit_upper_triangular(&d.u1));
                prop_assert_eq!(d.p.clone(), pluq_rpm(&a).q);
            }
        }
    }
}
