use std::fmt;

use super::{check_dim, AlgebraError, CVec, Scalar};

/// Dense row-major matrix over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub(crate) fn from_vec(rows: usize, cols: usize, data: Vec<Scalar>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        CMat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map(Vec::len).unwrap_or(0);
        if r == 0 || c == 0 {
            return Err(AlgebraError::Empty);
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim(c, row.len())?;
            data.extend(row);
        }
        Ok(CMat { rows: r, cols: c, data })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[CVec]) -> Result<Self, AlgebraError> {
        let first = cols.first().ok_or(AlgebraError::Empty)?;
        let rows = first.dim();
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            check_dim(rows, c.dim())?;
            for (i, x) in c.nonzeros() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> CVec {
        CVec::new((0..self.rows).map(|i| self.get(i, j).clone()).collect()).expect("rows >= 1")
    }

    pub fn columns(&self) -> Vec<CVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let x = self.get(i, j);
                if !x.is_zero() {
                    m.set(j, i, x.conj());
                }
            }
        }
        m
    }

    pub fn transpose(&self) -> CMat {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn conj(&self) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::conj).collect() }
    }

    pub fn mul(&self, other: &CMat) -> Result<CMat, AlgebraError> {
        check_dim(self.cols, other.rows)?;
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        m.data[idx] += &(a * b);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &CVec) -> Result<CVec, AlgebraError> {
        check_dim(self.cols, v.dim())?;
        let mut out = vec![Scalar::zero(); self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            for (k, x) in v.nonzeros() {
                let a = self.get(i, k);
                if !a.is_zero() {
                    *slot += &(a * x);
                }
            }
        }
        CVec::new(out)
    }

    pub fn add(&self, other: &CMat) -> Result<CMat, AlgebraError> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &CMat) -> Result<CMat, AlgebraError> {
        check_dim(self.rows, other.rows)?;
        check_dim(self.cols, other.cols)?;
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && *self == self.adjoint()
    }

    pub fn is_idempotent(&self) -> bool {
        self.is_square() && self.mul(self).map(|sq| sq == *self).unwrap_or(false)
    }

    /// True when the matrix equals `c·I` for some scalar `c`.
    pub fn is_scalar_multiple_of_identity(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let c = self.get(0, 0);
        (0..self.rows).all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j) == c } else { self.get(i, j).is_zero() }))
    }

    /// Kronecker product, `self` index slowest.
    pub fn kron(&self, other: &CMat) -> CMat {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut m = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            m.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        m
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (CMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("pivot nonzero");
            for j in c..m.cols {
                let x = m.get(r, j);
                if !x.is_zero() {
                    let y = x * &inv;
                    m.set(r, j, y);
                }
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let pr = m.get(r, j);
                    if !pr.is_zero() {
                        let y = m.get(i, j) - &(&f * pr);
                        m.set(i, j, y);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self·x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<CVec> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = CVec::zeros(self.cols);
            v.set(free, Scalar::one());
            for (row, &pc) in pivots.iter().enumerate() {
                let x = r.get(row, free);
                if !x.is_zero() {
                    v.set(pc, -x);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Linearly independent subset of the columns spanning the column space.
    pub fn column_space(&self) -> Vec<CVec> {
        let (_, pivots) = self.rref();
        pivots.into_iter().map(|c| self.column(c)).collect()
    }

    pub fn inverse(&self) -> Option<CMat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Orthogonal projector onto the span of `vectors` (which need not be independent).
    pub fn projector_onto(vectors: &[CVec]) -> Result<CMat, AlgebraError> {
        let spanning = CMat::from_columns(vectors)?;
        let basis = spanning.column_space();
        let dim = spanning.rows;
        if basis.is_empty() {
            return Ok(CMat::zeros(dim, dim));
        }
        let b = CMat::from_columns(&basis)?;
        let bd = b.adjoint();
        let gram_inv = bd.mul(&b)?.inverse().expect("Gram matrix of independent vectors is invertible");
        b.mul(&gram_inv)?.mul(&bd)
    }

    /// Flatten back into a vector (row-major).
    pub fn to_vec(&self) -> CVec {
        CVec::new(self.data.clone()).expect("non-empty")
    }
}

impl fmt::Display for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(CMat::identity(3).rank(), 3);
        let prod = CVec::basis(2, 0).tensor(&CVec::basis(2, 0));
        assert_eq!(prod.reshape(2, 2).unwrap().rank(), 1);
        let bell = CVec::from_ints(&[1, 0, 0, 1]);
        assert_eq!(bell.reshape(2, 2).unwrap().rank(), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let m = CMat::from_int_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]).unwrap();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).unwrap().is_zero());
    }

    #[test]
    fn inverse_round_trip() {
        let m = CMat::from_rows(vec![
            vec![Scalar::from_int(2), Scalar::i()],
            vec![Scalar::from_gaussian(0, -1), Scalar::from_int(3)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(CMat::from_int_rows(&[&[1, 1], &[1, 1]]).unwrap().inverse().is_none());
    }

    #[test]
    fn projector_onto_span() {
        let p = CMat::projector_onto(&[CVec::from_ints(&[1, 1, 0]), CVec::from_ints(&[2, 2, 0])]).unwrap();
        assert!(p.is_hermitian() && p.is_idempotent());
        assert_eq!(p.rank(), 1);
        assert_eq!(p.get(0, 1), &Scalar::from_ratio(1, 2));
    }

    #[test]
    fn reshape_shape_error() {
        assert!(matches!(CVec::from_ints(&[1, 2, 3]).reshape(2, 2), Err(AlgebraError::Shape { .. })));
    }
}
