//! Dipolar spin chain (subsystem A) coupled by zz-interactions to one
//! impurity spin (subsystem B, the last tensor factor).

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron_all, pauli, ComplexMatrix, EigenDecomposition};
use crate::scalar::{c, re, Real};

/// Impurity-chain coupling at the reference distance `a`, in s^-1.
pub const DEFAULT_G_REF: f64 = 3120.79;
/// Nearest-neighbour dipolar constant, in s^-1.
pub const DEFAULT_D_REF: f64 = 2.0 * std::f64::consts::PI * 1000.0;
/// `beta * omega_B * T` in kelvin.
pub const BETA_OMEGA_B_KELVIN: f64 = 0.015;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `I_{site,axis}`: spin-1/2 projection on `site`, identity elsewhere.
pub fn spin_operator<T: Real>(n_total: usize, site: usize, axis: Axis) -> Result<ComplexMatrix<T>> {
    if site >= n_total {
        return Err(Error::IndexOutOfRange {
            index: site,
            len: n_total,
        });
    }
    let [sx, sy, sz] = pauli::<T>();
    let sigma = match axis {
        Axis::X => sx,
        Axis::Y => sy,
        Axis::Z => sz,
    };
    let half = sigma.scale_real(T::lit(0.5));
    let id = ComplexMatrix::identity(2);
    Ok(kron_all((0..n_total).map(|k| if k == site { &half } else { &id })))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<T: Real> {
    pub n_chain: usize,
    /// Nearest-neighbour spacing along the chain.
    pub a: T,
    /// Offset of the impurity from the chain line, on the perpendicular bisector.
    pub b: T,
    pub beta_omega_a: T,
    pub beta_omega_b: T,
    pub g_ref: T,
    pub d_ref: T,
}

impl<T: Real> SystemSpec<T> {
    /// Default calibration at temperature `kelvin`: `a = 1`, `beta omega_A = beta omega_B = 0.015 / T`.
    pub fn at_temperature(n_chain: usize, b2_over_a2: T, kelvin: T) -> Self {
        let bw = T::lit(BETA_OMEGA_B_KELVIN) / kelvin;
        Self {
            n_chain,
            a: T::one(),
            b: b2_over_a2.sqrt(),
            beta_omega_a: bw,
            beta_omega_b: bw,
            g_ref: T::lit(DEFAULT_G_REF),
            d_ref: T::lit(DEFAULT_D_REF),
        }
    }

    pub fn n_total(&self) -> usize {
        self.n_chain + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        let finite = [
            self.a,
            self.b,
            self.beta_omega_a,
            self.beta_omega_b,
            self.g_ref,
            self.d_ref,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return bad("non-finite system parameter");
        }
        if self.n_chain < 1 {
            return bad("n_chain must be >= 1");
        }
        if self.a <= T::zero() {
            return bad("a must be > 0");
        }
        if self.b < T::zero() {
            return bad("b must be >= 0");
        }
        if self.g_ref <= T::zero() {
            return bad("g_ref must be > 0");
        }
        if self.d_ref < T::zero() {
            return bad("d_ref must be >= 0");
        }
        Ok(())
    }
}

/// Realized coupling constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings<T: Real> {
    /// Symmetric chain-chain dipolar constants, zero diagonal.
    pub d: Vec<Vec<T>>,
    /// Chain-impurity zz constants.
    pub g: Vec<T>,
}

impl<T: Real> Couplings<T> {
    pub fn n_chain(&self) -> usize {
        self.g.len()
    }

    fn check(&self, n_total: usize) -> Result<()> {
        let n = self.g.len();
        if n + 1 != n_total || self.d.len() != n || self.d.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "couplings for {n} chain spins vs {n_total} total spins"
            )));
        }
        Ok(())
    }
}

/// Chain spins sit at `x_i = (i - (n-1)/2) a`, the impurity at `(0, b)`.
/// `d_ij = d_ref / |i-j|^3`, `g_i = g_ref (a / r_i)^3`.
pub fn couplings_from_geometry<T: Real>(spec: &SystemSpec<T>) -> Result<Couplings<T>> {
    spec.validate()?;
    let n = spec.n_chain;
    let centre = T::from_usize(n - 1).unwrap() / T::lit(2.0);
    let mut g = Vec::with_capacity(n);
    for i in 0..n {
        let x = (T::from_usize(i).unwrap() - centre) * spec.a;
        let r2 = x * x + spec.b * spec.b;
        if r2 <= T::zero() {
            return Err(Error::DegenerateGeometry { site: i });
        }
        let ratio = spec.a / r2.sqrt();
        g.push(spec.g_ref * ratio * ratio * ratio);
    }
    let d = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        T::zero()
                    } else {
                        let sep = T::from_usize(i.abs_diff(j)).unwrap();
                        spec.d_ref / (sep * sep * sep)
                    }
                })
                .collect()
        })
        .collect();
    Ok(Couplings { d, g })
}

/// Eigenvalue `+1/2` for bit 0, `-1/2` for bit 1 of `site`.
#[inline]
fn m_z<T: Real>(state: usize, site: usize, n_total: usize) -> T {
    if state >> (n_total - 1 - site) & 1 == 0 {
        T::lit(0.5)
    } else {
        T::lit(-0.5)
    }
}

/// Secular dipolar Hamiltonian `sum_{i<j} d_ij (3 I_iz I_jz - I_i . I_j)` on the chain,
/// identity on the impurity.
pub fn hamiltonian_dz<T: Real>(couplings: &Couplings<T>, n_total: usize) -> Result<ComplexMatrix<T>> {
    couplings.check(n_total)?;
    let n = couplings.n_chain();
    let dim = 1usize << n_total;
    let mut h = ComplexMatrix::zeros(dim, dim);
    // 3 IzIz - I.I = 2 IzIz - (I+I- + I-I+)/2
    for s in 0..dim {
        let mut diag = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                let dij = couplings.d[i][j];
                if dij == T::zero() {
                    continue;
                }
                let (mi, mj) = (m_z::<T>(s, i, n_total), m_z::<T>(s, j, n_total));
                diag += T::lit(2.0) * dij * mi * mj;
                if mi != mj {
                    let flipped = s ^ (1 << (n_total - 1 - i)) ^ (1 << (n_total - 1 - j));
                    h[(s, flipped)] += re(-dij / T::lit(2.0));
                }
            }
        }
        h[(s, s)] += re(diag);
    }
    Ok(h)
}

/// `sum_i g_i I_iz S_z`, diagonal in the computational basis.
pub fn hamiltonian_zz<T: Real>(couplings: &Couplings<T>, n_total: usize) -> Result<ComplexMatrix<T>> {
    couplings.check(n_total)?;
    let dim = 1usize << n_total;
    let imp = n_total - 1;
    let diag: Vec<_> = (0..dim)
        .map(|s| {
            let sz = m_z::<T>(s, imp, n_total);
            let field = couplings
                .g
                .iter()
                .enumerate()
                .fold(T::zero(), |acc, (i, &gi)| acc + gi * m_z::<T>(s, i, n_total));
            re(field * sz)
        })
        .collect();
    Ok(ComplexMatrix::diag(&diag))
}

/// `H_dz + H_zz` for the spec's geometry.
pub fn total_hamiltonian<T: Real>(spec: &SystemSpec<T>) -> Result<ComplexMatrix<T>> {
    let couplings = couplings_from_geometry(spec)?;
    let n = spec.n_total();
    Ok(&hamiltonian_dz(&couplings, n)? + &hamiltonian_zz(&couplings, n)?)
}

/// `exp(beta omega sigma_x / 2) / Z = (1 + tanh(beta omega / 2) sigma_x) / 2`.
pub fn x_polarized_spin<T: Real>(beta_omega: T) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    let p = (beta_omega * half).tanh() * half;
    ComplexMatrix::from_row_major(2, 2, vec![re(half), re(p), re(p), re(half)]).unwrap()
}

/// Thermal state after the 90-degree pulses, `exp(bwA I_x + bwB S_x) / Z`, as a product state.
pub fn initial_state<T: Real>(spec: &SystemSpec<T>) -> Result<DensityMatrix<T>> {
    spec.validate()?;
    let chain = x_polarized_spin(spec.beta_omega_a);
    let imp = x_polarized_spin(spec.beta_omega_b);
    let factors: Vec<&ComplexMatrix<T>> = (0..spec.n_chain)
        .map(|_| &chain)
        .chain(std::iter::once(&imp))
        .collect();
    DensityMatrix::new_trusted(vec![2; spec.n_total()], kron_all(factors))
}

/// `e^{-iHt} rho0 e^{iHt}`.
pub fn evolve<T: Real>(rho0: &DensityMatrix<T>, h: &ComplexMatrix<T>, t: T) -> Result<DensityMatrix<T>> {
    Propagator::new(h, rho0)?.state_at(t)
}

/// Repeated evolution of one initial state under one Hamiltonian; the
/// Hamiltonian is diagonalized once and the state is kept in its eigenbasis.
#[derive(Debug, Clone)]
pub struct Propagator<T: Real> {
    eig: EigenDecomposition<T>,
    dims: Vec<usize>,
    rho_eigenbasis: ComplexMatrix<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(h: &ComplexMatrix<T>, rho0: &DensityMatrix<T>) -> Result<Self> {
        if !h.is_square() || h.rows() != rho0.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Hamiltonian for a {}-dimensional state",
                h.rows(),
                h.cols(),
                rho0.dim()
            )));
        }
        let eig = hermitian_eig(h)?;
        let v = &eig.eigenvectors;
        let rho_eigenbasis = v.adjoint().matmul(rho0.matrix()).matmul(v);
        Ok(Self {
            eig,
            dims: rho0.dims().to_vec(),
            rho_eigenbasis,
        })
    }

    pub fn state_at(&self, t: T) -> Result<DensityMatrix<T>> {
        let lambda = &self.eig.eigenvalues;
        let phase = |l: T| {
            let a = -l * t;
            c(a.cos(), a.sin())
        };
        let phases: Vec<_> = lambda.iter().map(|&l| phase(l)).collect();
        let r = &self.rho_eigenbasis;
        let n = r.rows();
        let rotated = ComplexMatrix::from_fn(n, n, |i, j| phases[i] * r[(i, j)] * phases[j].conj());
        let v = &self.eig.eigenvectors;
        let mat = v.matmul(&rotated).matmul(&v.adjoint());
        // Symmetrize away rounding so downstream Hermiticity checks see an exact adjoint.
        let mat = (&mat + &mat.adjoint()).scale_real(T::lit(0.5));
        DensityMatrix::new_trusted(self.dims.clone(), mat)
    }
}
