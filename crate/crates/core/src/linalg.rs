//! Dense complex matrix algebra for exact density-matrix simulation.
//!
//! Matrices are stored row-major. Factor 0 of a tensor product is the
//! leftmost Kronecker factor (most significant index digit); the impurity
//! spin is always the last factor.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::{c, modulus, re, Real, C};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real-valued constructor, handy for tests and Pauli matrices.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| re(T::lit(x))).collect(),
        }
    }

    pub fn diag(values: &[C<T>]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
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

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> C<T> {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).fold(re(T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (a, b)| m.max(modulus(*a - *b)))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, a| m.max(modulus(*a)))
    }

    /// Largest entrywise deviation from Hermiticity, `max |h - h^dagger|`.
    pub fn hermiticity_error(&self) -> T {
        assert!(self.is_square());
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max(modulus(self[(i, j)] - self[(j, i)].conj()));
            }
        }
        worst
    }

    fn check_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "expected square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let dev = self.hermiticity_error();
        if dev > T::HERMITIAN_TOL || !dev.is_finite() {
            return Err(Error::NotHermitian {
                max_dev: dev.to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn to_nalgebra(&self) -> DMatrix<C<T>> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    fn from_nalgebra(m: &DMatrix<C<T>>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

/// Pauli matrices `(sigma_x, sigma_y, sigma_z)`.
pub fn pauli<T: Real>() -> [ComplexMatrix<T>; 3] {
    let o = re(T::zero());
    let l = re(T::one());
    let i = c(T::zero(), T::one());
    [
        ComplexMatrix::from_row_major(2, 2, vec![o, l, l, o]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, vec![o, -i, i, o]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, vec![l, o, o, -l]).unwrap(),
    ]
}

/// Kronecker product; entry `(i*b.rows + k, j*b.cols + l)` is `a(i,j) * b(k,l)`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                let dst = (i * b.rows + k) * cols + j * b.cols;
                let src = b.row(k);
                for (o, y) in out.data[dst..dst + b.cols].iter_mut().zip(src) {
                    *o = x * *y;
                }
            }
        }
    }
    out
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a, T: Real + 'a>(
    factors: impl IntoIterator<Item = &'a ComplexMatrix<T>>,
) -> ComplexMatrix<T> {
    factors
        .into_iter()
        .fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    /// Columns are the orthonormal eigenvectors.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// `V f(diag) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(T) -> C<T>) -> ComplexMatrix<T> {
        let v = &self.eigenvectors;
        let n = v.rows();
        let phases: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, k| v[(i, k)] * phases[k]);
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.map_spectrum(re)
    }
}

pub fn hermitian_eig<T: Real>(h: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    h.check_hermitian()?;
    let eig = h.to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    let eigenvectors = ComplexMatrix::from_fn(h.rows, h.cols, |i, k| vecs[(i, order[k])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only (ascending); cheaper than [`hermitian_eig`].
pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>) -> Result<Vec<T>> {
    h.check_hermitian()?;
    Ok(hermitian_eigenvalues_unchecked(h))
}

/// Skips the Hermiticity admission check; for internally assembled matrices
/// that are Hermitian by construction.
pub(crate) fn hermitian_eigenvalues_unchecked<T: Real>(h: &ComplexMatrix<T>) -> Vec<T> {
    let mut vals: Vec<T> = h.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    vals
}

/// `exp(-i * theta * h)` through the eigendecomposition of `h`.
pub fn unitary_from_hermitian<T: Real>(h: &ComplexMatrix<T>, theta: T) -> Result<ComplexMatrix<T>> {
    Ok(unitary_from_eig(&hermitian_eig(h)?, theta))
}

pub fn unitary_from_eig<T: Real>(eig: &EigenDecomposition<T>, theta: T) -> ComplexMatrix<T> {
    eig.map_spectrum(|l| {
        let phase = -theta * l;
        c(phase.cos(), phase.sin())
    })
}

/// Reduced matrix over the factors listed in `keep` (output in ascending factor order).
pub fn partial_trace<T: Real>(
    rho: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "factor dims {dims:?} (product {total}) vs {}x{} matrix",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::DimensionMismatch("keep set is empty".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor {bad} out of range for {} factors",
            dims.len()
        )));
    }

    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim = total / kept_dim;
    // full_index[kept * traced_dim + traced]
    let mut full_index = vec![0usize; total];
    let mut digits = vec![0usize; dims.len()];
    for idx in 0..total {
        let mut rem = idx;
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let (mut ki, mut ti) = (0usize, 0usize);
        for (f, &d) in digits.iter().enumerate() {
            if keep.binary_search(&f).is_ok() {
                ki = ki * dims[f] + d;
            } else {
                ti = ti * dims[f] + d;
            }
        }
        full_index[ki * traced_dim + ti] = idx;
    }

    Ok(ComplexMatrix::from_fn(kept_dim, kept_dim, |i, j| {
        (0..traced_dim).fold(re(T::zero()), |acc, t| {
            acc + rho[(full_index[i * traced_dim + t], full_index[j * traced_dim + t])]
        })
    }))
}
