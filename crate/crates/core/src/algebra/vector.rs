use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;

use super::{check_dim, AlgebraError, CMat, Scalar};

/// Dense column vector over the Gaussian rationals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CVec {
    entries: Vec<Scalar>,
}

impl CVec {
    pub fn new(entries: Vec<Scalar>) -> Result<Self, AlgebraError> {
        if entries.is_empty() {
            return Err(AlgebraError::Empty);
        }
        Ok(CVec { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be positive");
        CVec { entries: vec![Scalar::zero(); dim] }
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = Scalar::one();
        v
    }

    pub fn from_ints(values: &[i64]) -> Self {
        CVec::new(values.iter().map(|&x| Scalar::from_int(x)).collect()).expect("non-empty")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: Scalar) {
        self.entries[i] = value;
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.entries
    }

    /// Iterator over `(index, amplitude)` for nonzero amplitudes.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().enumerate().filter(|(_, s)| !s.is_zero())
    }

    pub fn support(&self) -> Vec<usize> {
        self.nonzeros().map(|(i, _)| i).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Scalar::is_zero)
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVec) -> Result<Scalar, AlgebraError> {
        check_dim(self.dim(), other.dim())?;
        let mut acc = Scalar::zero();
        for (i, a) in self.nonzeros() {
            let b = &other.entries[i];
            if !b.is_zero() {
                acc += &(&a.conj() * b);
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> BigRational {
        self.entries.iter().fold(BigRational::default(), |acc, s| acc + s.norm_sqr())
    }

    /// Kronecker product `self ⊗ other`, `self` index slowest.
    pub fn tensor(&self, other: &CVec) -> CVec {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                if a.is_zero() || b.is_zero() {
                    out.push(Scalar::zero());
                } else {
                    out.push(a * b);
                }
            }
        }
        CVec { entries: out }
    }

    pub fn tensor_all(factors: &[CVec]) -> Option<CVec> {
        let (first, rest) = factors.split_first()?;
        Some(rest.iter().fold(first.clone(), |acc, f| acc.tensor(f)))
    }

    pub fn scale(&self, c: &Scalar) -> CVec {
        CVec { entries: self.entries.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &CVec) -> Result<CVec, AlgebraError> {
        check_dim(self.dim(), other.dim())?;
        Ok(CVec { entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &CVec) -> Result<CVec, AlgebraError> {
        check_dim(self.dim(), other.dim())?;
        Ok(CVec { entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect() })
    }

    pub fn conj(&self) -> CVec {
        CVec { entries: self.entries.iter().map(Scalar::conj).collect() }
    }

    /// Representative of the ray: first nonzero coordinate scaled to 1.
    /// The zero vector is returned unchanged.
    pub fn canonical(&self) -> CVec {
        match self.nonzeros().next() {
            Some((_, lead)) => {
                let inv = lead.inv().expect("nonzero");
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// True when `other = c · self` for some nonzero scalar `c`.
    pub fn is_parallel(&self, other: &CVec) -> bool {
        self.dim() == other.dim()
            && !self.is_zero()
            && !other.is_zero()
            && self.canonical() == other.canonical()
    }

    /// Reshape into a `rows × cols` matrix (row-major, consistent with the tensor order).
    pub fn reshape(&self, rows: usize, cols: usize) -> Result<CMat, AlgebraError> {
        if rows * cols != self.dim() || rows == 0 || cols == 0 {
            return Err(AlgebraError::Shape { len: self.dim(), rows, cols });
        }
        Ok(CMat::from_vec(rows, cols, self.entries.clone()))
    }

    /// `|self⟩⟨other|`
    pub fn outer(&self, other: &CVec) -> CMat {
        let mut m = CMat::zeros(self.dim(), other.dim());
        for (i, a) in self.nonzeros() {
            for (j, b) in other.nonzeros() {
                m.set(i, j, a * &b.conj());
            }
        }
        m
    }

    pub fn canonical_cmp(&self, other: &CVec) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            for (a, b) in self.entries.iter().zip(&other.entries) {
                let c = a.canonical_cmp(b);
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}
