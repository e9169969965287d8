use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, partial_trace, ComplexMatrix};
use crate::scalar::Real;

/// Unit-trace positive semidefinite Hermitian matrix with its tensor-factor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dims: Vec<usize>,
    mat: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Admits `mat` after checking Hermiticity, unit trace and positivity.
    pub fn new(dims: Vec<usize>, mat: ComplexMatrix<T>) -> Result<Self> {
        let rho = Self::from_parts(dims, mat)?;
        rho.check_hermitian_and_trace()?;
        let min = hermitian_eigenvalues(&rho.mat)?[0];
        if min < -T::STATE_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix has eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    /// Checks shape, Hermiticity and trace but not positivity; for states
    /// produced by operations known to preserve the spectrum.
    pub(crate) fn new_trusted(dims: Vec<usize>, mat: ComplexMatrix<T>) -> Result<Self> {
        let rho = Self::from_parts(dims, mat)?;
        rho.check_hermitian_and_trace()?;
        Ok(rho)
    }

    fn from_parts(dims: Vec<usize>, mat: ComplexMatrix<T>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || !mat.is_square() || mat.rows() != total {
            return Err(Error::DimensionMismatch(format!(
                "factor dims {dims:?} vs {}x{} matrix",
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(Self { dims, mat })
    }

    fn check_hermitian_and_trace(&self) -> Result<()> {
        let dev = self.mat.hermiticity_error();
        if dev > T::HERMITIAN_TOL || !dev.is_finite() {
            return Err(Error::NotHermitian {
                max_dev: dev.to_f64_lossy(),
            });
        }
        let tr = self.mat.trace();
        if (tr.re - T::one()).abs() > T::STATE_TOL || tr.im.abs() > T::STATE_TOL {
            return Err(Error::InvariantViolation(format!(
                "trace {} + {}i is not 1",
                tr.re, tr.im
            )));
        }
        Ok(())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn n_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    /// Reduced state on the factors in `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let mat = partial_trace(&self.mat, &self.dims, &kept)?;
        let dims = kept.iter().map(|&k| self.dims[k]).collect();
        Ok(Self { dims, mat })
    }

    /// State of every factor except the last (subsystem A).
    pub fn reduce_to_a(&self) -> Result<Self> {
        if self.n_factors() < 2 {
            return Err(Error::DimensionMismatch(
                "bipartition needs at least two factors".into(),
            ));
        }
        self.reduce(&(0..self.n_factors() - 1).collect::<Vec<_>>())
    }

    /// State of the last factor (subsystem B, the impurity).
    pub fn reduce_to_b(&self) -> Result<Self> {
        if self.n_factors() < 2 {
            return Err(Error::DimensionMismatch(
                "bipartition needs at least two factors".into(),
            ));
        }
        self.reduce(&[self.n_factors() - 1])
    }
}
