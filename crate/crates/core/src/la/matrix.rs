use std::fmt;

use rand::Rng;

use super::LaError;
use crate::ff::PrimeField;
use crate::par::Execution;
use crate::proto::CostMeter;

/// A dense row-major matrix over `F_p`. Entries are canonical residues.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} over {}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    /// Wraps row-major data; every entry must already be reduced.
    pub fn new(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Result<Self, LaError> {
        if data.len() != rows * cols {
            return Err(LaError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&v) = data.iter().find(|&&v| v >= field.modulus()) {
            return Err(LaError::NonCanonical(v, field.modulus()));
        }
        Ok(Self {
            field,
            rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from rows, reducing every entry mod p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, LaError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LaError::Shape("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(
        field: PrimeField,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u64,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(field.reduce(f(i, j)));
            }
        }
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Uniformly random entries.
    pub fn random<R: Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    /// Sets an entry, reducing it mod p.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = self.field.reduce(v);
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), cols.len(), |i, j| {
            self.get(rows[i], cols[j])
        })
    }

    /// Leading `rows x cols` block.
    pub fn leading(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(self.field, rows, cols, |i, j| self.get(i, j))
    }

    fn check_field(&self, other: &Self) -> Result<(), LaError> {
        if self.field != other.field {
            return Err(LaError::Field(crate::ff::FieldError::ModulusMismatch(
                self.field.modulus(),
                other.field.modulus(),
            )));
        }
        Ok(())
    }

    /// Dense product, `O(mnk)`. Used by provers and tests, never by verifiers.
    pub fn mul(&self, rhs: &Self) -> Result<Self, LaError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(LaError::dims("matrix product", self.cols, rhs.rows));
        }
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(rhs.row(k)) {
                    *d = f.mul_add(*d, a, b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LaError> {
        self.check_field(rhs)?;
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(LaError::Shape(format!(
                "adding {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Self { data, ..*self })
    }

    /// `A·v` without metering.
    pub fn apply(&self, v: &[u64]) -> Result<Vec<u64>, LaError> {
        self.apply_with(v, Execution::default())
    }

    pub fn apply_with(&self, v: &[u64], exec: Execution) -> Result<Vec<u64>, LaError> {
        if v.len() != self.cols {
            return Err(LaError::dims("matrix-vector product", self.cols, v.len()));
        }
        let f = self.field;
        let exec = exec.for_work(self.rows * self.cols);
        Ok(exec.map(self.rows, |i| f.dot(self.row(i), v)))
    }

    /// `A·v`, charging one matrix-vector product to `meter`.
    pub fn matvec(&self, v: &[u64], meter: &mut CostMeter) -> Result<Vec<u64>, LaError> {
        let out = self.apply(v)?;
        meter.charge_matvec(self.rows, self.cols);
        Ok(out)
    }

    /// `wᵀ·A` without metering.
    pub fn apply_left(&self, w: &[u64]) -> Result<Vec<u64>, LaError> {
        if w.len() != self.rows {
            return Err(LaError::dims("vector-matrix product", self.rows, w.len()));
        }
        let f = self.field;
        let mut out = vec![0; self.cols];
        for (i, &wi) in w.iter().enumerate() {
            if wi == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = f.mul_add(*o, wi, a);
            }
        }
        Ok(out)
    }

    /// `wᵀ·A`, charged as one matrix-vector product.
    pub fn vecmat(&self, w: &[u64], meter: &mut CostMeter) -> Result<Vec<u64>, LaError> {
        let out = self.apply_left(w)?;
        meter.charge_matvec(self.rows, self.cols);
        Ok(out)
    }

    /// Embeds this matrix in the top-left corner of a larger one, filling
    /// the rest with zeros, or with an identity block on the new diagonal
    /// positions when `pad` is [`Padding::Identity`].
    pub fn pad_to(&self, rows: usize, cols: usize, pad: Padding) -> Result<Self, LaError> {
        if rows < self.rows || cols < self.cols {
            return Err(LaError::Shape(format!(
                "cannot pad {}x{} to {rows}x{cols}",
                self.rows, self.cols
            )));
        }
        let mut out = Self::zeros(self.field, rows, cols);
        for i in 0..self.rows {
            out.data[i * cols..i * cols + self.cols].copy_from_slice(self.row(i));
        }
        if pad == Padding::Identity {
            for k in self.rows.min(self.cols)..rows.min(cols) {
                if k >= self.rows || k >= self.cols {
                    out.data[k * cols + k] = 1;
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Padding {
    Zero,
    Identity,
}

/// Strictly increasing pivot columns of the rows, `None` if `m` is not in
/// row echelon form (zero rows must come last).
pub fn echelon_pivots(m: &DenseMatrix) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut seen_zero = false;
    for i in 0..m.rows() {
        match m.row(i).iter().position(|&v| v != 0) {
            Some(j) => {
                if seen_zero || pivots.last().is_some_and(|&last| j <= last) {
                    return None;
                }
                pivots.push(j);
            }
            None => seen_zero = true,
        }
    }
    Some(pivots)
}

pub fn is_row_echelon(m: &DenseMatrix) -> bool {
    echelon_pivots(m).is_some()
}

/// Zero above the main diagonal.
pub fn is_lower_triangular(m: &DenseMatrix) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().skip(i + 1).all(|&v| v == 0))
}

/// Zero below the main diagonal.
pub fn is_upper_triangular(m: &DenseMatrix) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().take(i.min(m.cols())).all(|&v| v == 0))
}

fn unit_diagonal(m: &DenseMatrix) -> bool {
    (0..m.rows().min(m.cols())).all(|i| m.get(i, i) == 1)
}

pub fn is_unit_lower_triangular(m: &DenseMatrix) -> bool {
    is_lower_triangular(m) && unit_diagonal(m)
}

pub fn is_unit_upper_triangular(m: &DenseMatrix) -> bool {
    is_upper_triangular(m) && unit_diagonal(m)
}

/// Solves `T·x = b` for lower triangular `T` by forward substitution.
pub fn trsv_lower(t: &DenseMatrix, b: &[u64]) -> Result<Vec<u64>, LaError> {
    let n = t.rows();
    if !t.is_square() {
        return Err(LaError::Shape("triangular solve needs a square matrix".into()));
    }
    if b.len() != n {
        return Err(LaError::dims("triangular solve", n, b.len()));
    }
    let f = t.field();
    let mut x = vec![0; n];
    for i in 0..n {
        let s = f.dot(&t.row(i)[..i], &x[..i]);
        let d = t.get(i, i);
        if d == 0 {
            return Err(LaError::SingularMatrix);
        }
        x[i] = f.mul(f.sub(f.reduce(b[i]), s), f.inv(d)?);
    }
    Ok(x)
}

/// Solves `T·x = b` for upper triangular `T` by back substitution.
pub fn trsv_upper(t: &DenseMatrix, b: &[u64]) -> Result<Vec<u64>, LaError> {
    let n = t.rows();
    if !t.is_square() {
        return Err(LaError::Shape("triangular solve needs a square matrix".into()));
    }
    if b.len() != n {
        return Err(LaError::dims("triangular solve", n, b.len()));
    }
    let f = t.field();
    let mut x = vec![0; n];
    for i in (0..n).rev() {
        let s = f.dot(&t.row(i)[i + 1..], &x[i + 1..]);
        let d = t.get(i, i);
        if d == 0 {
            return Err(LaError::SingularMatrix);
        }
        x[i] = f.mul(f.sub(f.reduce(b[i]), s), f.inv(d)?);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::seeded;
    use proptest::prelude::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn m(p: u64, rows: &[&[u64]]) -> DenseMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        DenseMatrix::from_rows(f(p), &rows).unwrap()
    }

    #[test]
    fn matvec_examples() {
        let mut meter = CostMeter::default();
        let id = DenseMatrix::identity(f(7), 3);
        assert_eq!(id.matvec(&[1, 2, 3], &mut meter).unwrap(), vec![1, 2, 3]);
        let z = DenseMatrix::zeros(f(7), 2, 3);
        assert_eq!(z.matvec(&[4, 5, 6], &mut meter).unwrap(), vec![0, 0]);
        let a = m(7, &[&[1, 2], &[3, 4]]);
        assert_eq!(a.matvec(&[1, 1], &mut meter).unwrap(), vec![3, 0]);
        assert_eq!(meter.matvecs, 3);
        assert_eq!(meter.verifier_field_ops, (2 * 9 - 3) + (2 * 6 - 2) + (2 * 4 - 2));
        assert!(a.matvec(&[1], &mut meter).is_err());
    }

    #[test]
    fn new_rejects_noncanonical() {
        assert!(DenseMatrix::new(f(7), 1, 2, vec![1, 7]).is_err());
        assert!(DenseMatrix::new(f(7), 1, 2, vec![1]).is_err());
    }

    #[test]
    fn vecmat_is_transposed_matvec() {
        let a = DenseMatrix::random(f(101), 4, 6, &mut seeded(4));
        let w = [3, 1, 4, 1];
        assert_eq!(a.apply_left(&w).unwrap(), a.transpose().apply(&w).unwrap());
    }

    #[test]
    fn echelon_examples() {
        assert!(is_row_echelon(&DenseMatrix::identity(f(7), 3)));
        assert!(!is_row_echelon(&m(7, &[&[0, 1], &[1, 0]])));
        assert!(is_row_echelon(&m(7, &[&[1, 2, 0], &[0, 0, 3]])));
        assert!(!is_row_echelon(&m(7, &[&[0, 0], &[0, 1]])));
        assert_eq!(echelon_pivots(&m(7, &[&[1, 2, 0], &[0, 0, 3]])), Some(vec![0, 2]));
    }

    #[test]
    fn triangular_predicates() {
        let id = DenseMatrix::identity(f(7), 3);
        assert!(is_lower_triangular(&id) && is_upper_triangular(&id));
        assert!(!is_lower_triangular(&m(7, &[&[0, 1], &[0, 0]])));
        assert!(is_upper_triangular(&m(7, &[&[0, 1], &[0, 0]])));
        assert!(is_lower_triangular(&m(7, &[&[1, 0], &[2, 1], &[3, 4]])));
        assert!(is_upper_triangular(&m(7, &[&[1, 2, 3], &[0, 1, 4]])));
    }

    #[test]
    fn trsv_examples() {
        let f7 = f(7);
        let id = DenseMatrix::identity(f7, 2);
        assert_eq!(trsv_lower(&id, &[3, 4]).unwrap(), vec![3, 4]);
        let t = m(7, &[&[2, 0], &[1, 3]]);
        assert_eq!(trsv_lower(&t, &[2, 4]).unwrap(), vec![1, 1]);
        let u = m(7, &[&[1, 5], &[0, 1]]);
        assert_eq!(trsv_upper(&u, &[6, 1]).unwrap(), vec![1, 1]);
        let sing = m(7, &[&[0, 0], &[1, 3]]);
        assert_eq!(trsv_lower(&sing, &[1, 1]), Err(LaError::SingularMatrix));
    }

    #[test]
    fn padding() {
        let l = m(7, &[&[1, 0], &[2, 1], &[3, 4]]);
        let z = l.pad_to(3, 3, Padding::Zero).unwrap();
        assert_eq!(z.column(2), vec![0, 0, 0]);
        let i = l.pad_to(3, 3, Padding::Identity).unwrap();
        assert_eq!(i.column(2), vec![0, 0, 1]);
        let u = m(7, &[&[1, 2, 3]]);
        let ui = u.pad_to(3, 3, Padding::Identity).unwrap();
        assert_eq!(ui, m(7, &[&[1, 2, 3], &[0, 1, 0], &[0, 0, 1]]));
    }

    fn random_triangular(p: u64, n: usize, lower: bool, seed: u64) -> DenseMatrix {
        let field = f(p);
        let mut rng = seeded(seed);
        DenseMatrix::from_fn(field, n, n, |i, j| {
            if i == j {
                field.random_nonzero(&mut rng)
            } else if (i > j) == lower {
                field.random(&mut rng)
            } else {
                0
            }
        })
    }

    proptest! {
        #[test]
        fn trsv_solves(n in 1usize..12, seed in any::<u64>(), lower in any::<bool>()) {
            let t = random_triangular(131_071, n, lower, seed);
            let b: Vec<u64> = (0..n as u64).map(|i| i * 7919 % 131_071).collect();
            let x = if lower { trsv_lower(&t, &b) } else { trsv_upper(&t, &b) }.unwrap();
            prop_assert_eq!(t.apply(&x).unwrap(), b);
        }

        #[test]
        fn parallel_matvec_matches(rows in 1usize..200, cols in 1usize..200, seed in any::<u64>()) {
            let a = DenseMatrix::random(f(131_071), rows, cols, &mut seeded(seed));
            let v: Vec<u64> = (0..cols as u64).collect();
            prop_assert_eq!(
                a.apply_with(&v, Execution::Sequential).unwrap(),
                a.apply_with(&v, Execution::Parallel).unwrap()
            );
        }
    }
}
