use super::{DenseMatrix, LaError};
use crate::ff::PrimeField;

/// A permutation of `0..n`, stored by images.
///
/// As a matrix, column `i` has its single one in row `images[i]`, so
/// `P·e_i = e_{images[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, LaError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(LaError::NotAPermutation);
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// The transposition of `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.images.swap(a, b);
        p
    }

    /// `i ↦ n-1-i`.
    pub fn reversal(n: usize) -> Self {
        Self {
            images: (0..n).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. the matrix product `self·other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// `+1` or `-1`.
    pub fn sign(&self) -> i8 {
        let mut seen = vec![false; self.len()];
        let mut transpositions = 0;
        for start in 0..self.len() {
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn matrix(&self, field: PrimeField) -> DenseMatrix {
        let n = self.len();
        let mut m = DenseMatrix::zeros(field, n, n);
        for (i, &j) in self.images.iter().enumerate() {
            m.set(j, i, 1);
        }
        m
    }

    /// `P·v`: `out[images[i]] = v[i]`.
    pub fn scatter<T: Copy + Default>(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.len());
        let mut out = vec![T::default(); v.len()];
        for (i, &j) in self.images.iter().enumerate() {
            out[j] = v[i];
        }
        out
    }

    /// `Pᵀ·v`: `out[i] = v[images[i]]`.
    pub fn gather<T: Copy>(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.len());
        self.images.iter().map(|&j| v[j]).collect()
    }

    /// `P·M` as an index map.
    pub fn permute_rows(&self, m: &DenseMatrix) -> Result<DenseMatrix, LaError> {
        if m.rows() != self.len() {
            return Err(LaError::dims("row permutation", self.len(), m.rows()));
        }
        let inv = self.inverse();
        Ok(DenseMatrix::from_fn(m.field(), m.rows(), m.cols(), |i, j| {
            m.get(inv.images[i], j)
        }))
    }

    /// `M·P` as an index map: column `j` of the result is column
    /// `images[j]` of `M`.
    pub fn permute_cols(&self, m: &DenseMatrix) -> Result<DenseMatrix, LaError> {
        if m.cols() != self.len() {
            return Err(LaError::dims("column permutation", self.len(), m.cols()));
        }
        Ok(DenseMatrix::from_fn(m.field(), m.rows(), m.cols(), |i, j| {
            m.get(i, self.images[j])
        }))
    }
}

/// `P·M·Q` with both permutation matrices applied as index maps.
pub fn conjugate_by_permutations(
    p: &Permutation,
    m: &DenseMatrix,
    q: &Permutation,
) -> Result<DenseMatrix, LaError> {
    q.permute_cols(&p.permute_rows(m)?)
}

/// An invertible diagonal matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagonal {
    entries: Vec<u64>,
}

impl Diagonal {
    pub fn new(field: PrimeField, entries: Vec<u64>) -> Result<Self, LaError> {
        if let Some(&v) = entries.iter().find(|&&v| v >= field.modulus()) {
            return Err(LaError::NonCanonical(v, field.modulus()));
        }
        if entries.contains(&0) {
            return Err(LaError::SingularMatrix);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn determinant(&self, field: PrimeField) -> u64 {
        self.entries.iter().fold(1 % field.modulus(), |acc, &d| field.mul(acc, d))
    }

    pub fn matrix(&self, field: PrimeField) -> DenseMatrix {
        let n = self.len();
        DenseMatrix::from_fn(field, n, n, |i, j| if i == j { self.entries[i] } else { 0 })
    }
}

/// Strictly increasing row or column indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RankProfile(Vec<usize>);

impl RankProfile {
    /// Checks that the indices increase strictly and stay below `bound`.
    pub fn new(indices: Vec<usize>, bound: usize) -> Result<Self, LaError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= bound) {
            return Err(LaError::NotAProfile);
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// An `m x n` 0/1 matrix with at most one one per row and column, stored
/// as its sorted `(row, col)` positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankProfileMatrix {
    rows: usize,
    cols: usize,
    ones: Vec<(usize, usize)>,
}

impl RankProfileMatrix {
    pub fn new(rows: usize, cols: usize, mut ones: Vec<(usize, usize)>) -> Result<Self, LaError> {
        ones.sort_unstable();
        let mut row_used = vec![false; rows];
        let mut col_used = vec![false; cols];
        for &(i, j) in &ones {
            if i >= rows
                || j >= cols
                || std::mem::replace(&mut row_used[i], true)
                || std::mem::replace(&mut col_used[j], true)
            {
                return Err(LaError::NotAProfile);
            }
        }
        Ok(Self { rows, cols, ones })
    }

    /// Reads a dense 0/1 matrix.
    pub fn from_dense(m: &DenseMatrix) -> Result<Self, LaError> {
        let mut ones = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                match m.get(i, j) {
                    0 => {}
                    1 => ones.push((i, j)),
                    _ => return Err(LaError::NotAProfile),
                }
            }
        }
        Self::new(m.rows(), m.cols(), ones)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Positions of the ones, sorted by row.
    pub fn ones(&self) -> &[(usize, usize)] {
        &self.ones
    }

    pub fn rank(&self) -> usize {
        self.ones.len()
    }

    pub fn to_dense(&self, field: PrimeField) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(field, self.rows, self.cols);
        for &(i, j) in &self.ones {
            m.set(i, j, 1);
        }
        m
    }

    /// Row rank profile read off the matrix.
    pub fn row_profile(&self) -> Vec<usize> {
        self.ones.iter().map(|&(i, _)| i).collect()
    }

    /// Column rank profile read off the matrix.
    pub fn col_profile(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.ones.iter().map(|&(_, j)| j).collect();
        c.sort_unstable();
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f7() -> PrimeField {
        PrimeField::new(7).unwrap()
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn matrix_convention() {
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        let m = p.matrix(f7());
        assert_eq!(m.get(2, 0), 1);
        assert_eq!(m.apply(&[1, 2, 3]).unwrap(), p.scatter(&[1, 2, 3]));
        assert_eq!(m.transpose().apply(&[1, 2, 3]).unwrap(), p.gather(&[1, 2, 3]));
    }

    #[test]
    fn signs() {
        assert_eq!(Permutation::identity(4).sign(), 1);
        assert_eq!(Permutation::swap(4, 1, 3).sign(), -1);
        assert_eq!(Permutation::new(vec![1, 2, 0]).unwrap().sign(), 1);
        assert_eq!(Permutation::reversal(2).sign(), -1);
    }

    #[test]
    fn conjugation_examples() {
        let f = f7();
        let d = DenseMatrix::from_rows(f, &[vec![1, 0], vec![0, 2]]).unwrap();
        let id = Permutation::identity(2);
        assert_eq!(conjugate_by_permutations(&id, &d, &id).unwrap(), d);
        let s = Permutation::swap(2, 0, 1);
        let expect = DenseMatrix::from_rows(f, &[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(conjugate_by_permutations(&s, &d, &s).unwrap(), expect);
    }

    #[test]
    fn diagonal_rejects_zero() {
        assert_eq!(Diagonal::new(f7(), vec![1, 0]), Err(LaError::SingularMatrix));
        assert_eq!(Diagonal::new(f7(), vec![2, 3]).unwrap().determinant(f7()), 6);
    }

    #[test]
    fn profile_validation() {
        assert!(RankProfile::new(vec![0, 2], 3).is_ok());
        assert!(RankProfile::new(vec![2, 0], 3).is_err());
        assert!(RankProfile::new(vec![3], 3).is_err());
        assert!(RankProfileMatrix::new(2, 2, vec![(0, 1), (1, 1)]).is_err());
        let r = RankProfileMatrix::new(3, 3, vec![(2, 0), (0, 2)]).unwrap();
        assert_eq!(r.row_profile(), vec![0, 2]);
        assert_eq!(r.col_profile(), vec![0, 2]);
        assert_eq!(RankProfileMatrix::from_dense(&r.to_dense(f7())).unwrap(), r);
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn conjugation_matches_dense_products(
            (p, q) in (1usize..7, 1usize..7).prop_flat_map(|(m, n)| (perm_strategy(m), perm_strategy(n))),
            seed in any::<u64>(),
        ) {
            let f = PrimeField::new(101).unwrap();
            let m = DenseMatrix::random(f, p.len(), q.len(), &mut crate::ff::seeded(seed));
            let dense = p.matrix(f).mul(&m).unwrap().mul(&q.matrix(f)).unwrap();
            prop_assert_eq!(conjugate_by_permutations(&p, &m, &q).unwrap(), dense);
        }

        #[test]
        fn inverse_and_composition(p in perm_strategy(8), q in perm_strategy(8)) {
            prop_assert!(p.compose(&p.inverse()).is_identity());
            prop_assert_eq!(p.compose(&q).sign(), p.sign() * q.sign());
            let f = PrimeField::new(7).unwrap();
            prop_assert_eq!(p.compose(&q).matrix(f), p.matrix(f).mul(&q.matrix(f)).unwrap());
        }
    }
}
