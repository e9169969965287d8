//! Entropies, measurements on the impurity qubit, and the discord.
//!
//! Subsystem B is always the last tensor factor and must be a qubit;
//! subsystem A is everything before it. All entropies are in bits.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigenvalues, hermitian_eigenvalues_unchecked, pauli, ComplexMatrix};
use crate::optimizer::Minimizer;
use crate::scalar::{c, re, xlog2x_neg, Real, C};

/// Unit vector `(z1, z2, z3)` selecting the projective measurement
/// `B_k = (1 + (-1)^k z . sigma) / 2` on the impurity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector<T: Real> {
    pub z1: T,
    pub z2: T,
    pub z3: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(z1: T, z2: T, z3: T) -> Result<Self> {
        let v = Self { z1, z2, z3 };
        let n2 = v.norm_sq();
        if !n2.is_finite() || (n2 - T::one()).abs() > T::NORM_TOL {
            return Err(Error::NotNormalized {
                norm_sq: n2.to_f64_lossy(),
            });
        }
        Ok(v)
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_angles(theta: T, phi: T) -> Self {
        let s = theta.sin();
        Self {
            z1: s * phi.cos(),
            z2: s * phi.sin(),
            z3: theta.cos(),
        }
    }

    pub fn north() -> Self {
        Self {
            z1: T::zero(),
            z2: T::zero(),
            z3: T::one(),
        }
    }

    pub fn norm_sq(&self) -> T {
        self.z1 * self.z1 + self.z2 * self.z2 + self.z3 * self.z3
    }

    pub fn neg(&self) -> Self {
        Self {
            z1: -self.z1,
            z2: -self.z2,
            z3: -self.z3,
        }
    }

    /// Representative of `{z, -z}` with `z3 >= 0`, then `z1 >= 0`, then `z2 >= 0` on ties.
    pub fn canonical(&self) -> Self {
        let zero = T::zero();
        let flip = if self.z3 != zero {
            self.z3 < zero
        } else if self.z1 != zero {
            self.z1 < zero
        } else {
            self.z2 < zero
        };
        if flip {
            self.neg()
        } else {
            *self
        }
    }

    pub fn as_array(&self) -> [T; 3] {
        [self.z1, self.z2, self.z3]
    }

    /// Entries of `B_k` as `[[b00, b01], [b10, b11]]`.
    fn projector_entries(&self, k: usize) -> [[C<T>; 2]; 2] {
        let half = T::lit(0.5);
        let (z1, z2, z3) = if k == 0 {
            (self.z1, self.z2, self.z3)
        } else {
            (-self.z1, -self.z2, -self.z3)
        };
        [
            [re(half * (T::one() + z3)), c(half * z1, -half * z2)],
            [c(half * z1, half * z2), re(half * (T::one() - z3))],
        ]
    }
}

/// `-sum lambda log2 lambda` over a spectrum, clamping small negative
/// round-off to zero and rejecting anything more negative.
pub fn entropy_of_spectrum<T: Real>(eigenvalues: &[T]) -> Result<T> {
    let mut s = T::zero();
    for &l in eigenvalues {
        if l < -T::ENTROPY_CLAMP || !l.is_finite() {
            return Err(Error::InvariantViolation(format!(
                "state has eigenvalue {l:e}"
            )));
        }
        s += xlog2x_neg(l.max(T::zero()).min(T::one()));
    }
    Ok(s)
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    entropy_of_spectrum(&hermitian_eigenvalues(rho.matrix())?)
}

/// `S(rho_A) + S(rho_B) - S(rho)` with B the last factor.
pub fn mutual_information<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let sa = von_neumann_entropy(&rho.reduce_to_a()?)?;
    let sb = von_neumann_entropy(&rho.reduce_to_b()?)?;
    Ok(sa + sb - von_neumann_entropy(rho)?)
}

/// The two measurement projectors `(B_0, B_1)` for direction `z`.
pub fn measurement_projectors<T: Real>(z: &BlochVector<T>) -> Result<[ComplexMatrix<T>; 2]> {
    let z = BlochVector::new(z.z1, z.z2, z.z3)?;
    let [sx, sy, sz] = pauli::<T>();
    let n_sigma = &(&sx.scale_real(z.z1) + &sy.scale_real(z.z2)) + &sz.scale_real(z.z3);
    let id = ComplexMatrix::identity(2);
    let half = T::lit(0.5);
    Ok([
        (&id + &n_sigma).scale_real(half),
        (&id - &n_sigma).scale_real(half),
    ])
}

/// Outcome probabilities and normalized post-measurement states of A.
#[derive(Debug, Clone)]
pub struct MeasurementEnsemble<T: Real> {
    pub p: [T; 2],
    /// `None` when the branch probability is at or below the cutoff.
    pub post_states: [Option<DensityMatrix<T>>; 2],
}

fn check_bipartite<T: Real>(rho: &DensityMatrix<T>) -> Result<usize> {
    if rho.n_factors() < 2 || *rho.dims().last().unwrap() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "need a qubit as last factor of at least two, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(rho.dim() / 2)
}

/// `rho_ab[i][j] = <i,a| rho |j,b>` for B the last qubit.
fn impurity_blocks<T: Real>(rho: &ComplexMatrix<T>) -> [ComplexMatrix<T>; 4] {
    let da = rho.rows() / 2;
    let block = |a: usize, b: usize| ComplexMatrix::from_fn(da, da, |i, j| rho[(2 * i + a, 2 * j + b)]);
    [block(0, 0), block(0, 1), block(1, 0), block(1, 1)]
}

/// Unnormalized `Tr_B[(1 x B) rho]` from the impurity blocks: `sum_ab B_ba rho_ab`.
fn combine_blocks<T: Real>(blocks: &[ComplexMatrix<T>; 4], b: &[[C<T>; 2]; 2]) -> ComplexMatrix<T> {
    let n = blocks[0].rows();
    let coef = [b[0][0], b[1][0], b[0][1], b[1][1]];
    ComplexMatrix::from_fn(n, n, |i, j| {
        coef[0] * blocks[0][(i, j)]
            + coef[1] * blocks[1][(i, j)]
            + coef[2] * blocks[2][(i, j)]
            + coef[3] * blocks[3][(i, j)]
    })
}

pub fn measure_b<T: Real>(rho: &DensityMatrix<T>, z: &BlochVector<T>) -> Result<MeasurementEnsemble<T>> {
    let z = BlochVector::new(z.z1, z.z2, z.z3)?;
    check_bipartite(rho)?;
    let dims_a = rho.dims()[..rho.n_factors() - 1].to_vec();
    let blocks = impurity_blocks(rho.matrix());
    let mut p = [T::zero(); 2];
    let mut post_states = [None, None];
    for k in 0..2 {
        let y = combine_blocks(&blocks, &z.projector_entries(k));
        let pk = y.trace().re;
        p[k] = pk;
        if pk > T::BRANCH_CUTOFF {
            let y = y.scale_real(T::one() / pk);
            post_states[k] = Some(DensityMatrix::new(dims_a.clone(), y)?);
        }
    }
    Ok(MeasurementEnsemble { p, post_states })
}

/// `p_0 S(rho_0) + p_1 S(rho_1)` for the measurement along `z`.
pub fn conditional_entropy<T: Real>(rho: &DensityMatrix<T>, z: &BlochVector<T>) -> Result<T> {
    let ens = measure_b(rho, z)?;
    let mut s = T::zero();
    for k in 0..2 {
        if let Some(state) = &ens.post_states[k] {
            s += ens.p[k] * von_neumann_entropy(state)?;
        }
    }
    Ok(s)
}

#[derive(Debug, Clone)]
enum Route<T: Real> {
    /// Post-measurement states assembled from the four `dim_A x dim_A` impurity blocks.
    Blocks([ComplexMatrix<T>; 4]),
    /// `rho ~ W W^dagger` with rank `r < dim_A`; post-measurement spectra are
    /// those of `r x r` Gram matrices `sum_bb' B_bb' G_bb'`.
    LowRank([ComplexMatrix<T>; 4]),
}

/// Conditional entropy as a function of the measurement direction, with
/// everything that does not depend on the direction computed once.
#[derive(Debug, Clone)]
pub struct ConditionalEntropy<T: Real> {
    route: Route<T>,
    entropy_total: T,
}

impl<T: Real> ConditionalEntropy<T> {
    pub fn new(rho: &DensityMatrix<T>) -> Result<Self> {
        check_bipartite(rho)?;
        let dim_a = rho.dim() / 2;
        let eig = hermitian_eig(rho.matrix())?;
        let entropy_total = entropy_of_spectrum(&eig.eigenvalues)?;

        // Drop the smallest eigenvalues while their total weight stays below the cutoff.
        let mut dropped = T::zero();
        let mut first_kept = 0;
        for &l in &eig.eigenvalues {
            let w = dropped + l.abs();
            if w > T::SPECTRAL_CUTOFF {
                break;
            }
            dropped = w;
            first_kept += 1;
        }
        let rank = eig.eigenvalues.len() - first_kept;

        let route = if rank < dim_a {
            let v = &eig.eigenvectors;
            let kept: Vec<usize> = (first_kept..eig.eigenvalues.len()).collect();
            let sqrt_l: Vec<T> = kept.iter().map(|&m| eig.eigenvalues[m].max(T::zero()).sqrt()).collect();
            // W_b[i][m] = sqrt(lambda_m) v_m[2i + b]
            let w = |b: usize| {
                ComplexMatrix::from_fn(dim_a, rank, |i, m| v[(2 * i + b, kept[m])] * re(sqrt_l[m]))
            };
            let (w0, w1) = (w(0), w(1));
            let (w0h, w1h) = (w0.adjoint(), w1.adjoint());
            Route::LowRank([w0h.matmul(&w0), w0h.matmul(&w1), w1h.matmul(&w0), w1h.matmul(&w1)])
        } else {
            Route::Blocks(impurity_blocks(rho.matrix()))
        };
        Ok(Self { route, entropy_total })
    }

    /// `S(rho)`, available for free from the preparation.
    pub fn entropy_total(&self) -> T {
        self.entropy_total
    }

    pub fn uses_low_rank(&self) -> bool {
        matches!(self.route, Route::LowRank(_))
    }

    fn branch(&self, z: &BlochVector<T>, k: usize) -> ComplexMatrix<T> {
        let b = z.projector_entries(k);
        match &self.route {
            Route::Blocks(blocks) => combine_blocks(blocks, &b),
            Route::LowRank(g) => {
                // Gamma = sum_{b,b'} B_{b b'} G_{b b'}; same slot layout as the blocks
                // but with the transposed coefficient.
                let swapped = [[b[0][0], b[1][0]], [b[0][1], b[1][1]]];
                combine_blocks(g, &swapped)
            }
        }
    }

    /// Probability of outcome 0 and the conditional entropy; rejects
    /// post-measurement spectra below the clamp tolerance.
    pub fn try_evaluate(&self, z: &BlochVector<T>) -> Result<(T, T)> {
        let mut total = T::zero();
        let mut p0 = T::zero();
        for k in 0..2 {
            let y = self.branch(z, k);
            let pk = y.trace().re;
            if k == 0 {
                p0 = pk;
            }
            if pk <= T::BRANCH_CUTOFF {
                continue;
            }
            let inv = T::one() / pk;
            let spec: Vec<T> = hermitian_eigenvalues_unchecked(&y).into_iter().map(|l| l * inv).collect();
            total += pk * entropy_of_spectrum(&spec)?;
        }
        Ok((p0, total))
    }

    /// Objective value for the optimizers; negative round-off in the
    /// spectrum is clamped rather than reported.
    pub fn evaluate(&self, z: &BlochVector<T>) -> T {
        let mut total = T::zero();
        for k in 0..2 {
            let y = self.branch(z, k);
            let pk = y.trace().re;
            if pk <= T::BRANCH_CUTOFF {
                continue;
            }
            let inv = T::one() / pk;
            let s = hermitian_eigenvalues_unchecked(&y)
                .into_iter()
                .fold(T::zero(), |acc, l| acc + xlog2x_neg((l * inv).max(T::zero()).min(T::one())));
            total += pk * s;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscordResult<T: Real> {
    pub discord: T,
    pub mutual_information: T,
    pub min_conditional_entropy: T,
    pub argmin: BlochVector<T>,
    pub p0_at_argmin: T,
    pub entropy_total: T,
    pub entropy_a: T,
    pub entropy_b: T,
    pub evaluations: usize,
}

/// `S(rho_B) - S(rho) + min_z S(rho | {B_k(z)})`.
pub fn discord<T: Real, M: Minimizer<T> + ?Sized>(rho: &DensityMatrix<T>, minimizer: &M) -> Result<DiscordResult<T>> {
    let objective = ConditionalEntropy::new(rho)?;
    let entropy_total = objective.entropy_total();
    let entropy_a = von_neumann_entropy(&rho.reduce_to_a()?)?;
    let entropy_b = von_neumann_entropy(&rho.reduce_to_b()?)?;

    let found = minimizer.minimize(&|z: &BlochVector<T>| objective.evaluate(z));
    let (p0, min_cond) = objective.try_evaluate(&found.argmin)?;

    let mutual_information = entropy_a + entropy_b - entropy_total;
    let d = entropy_b - entropy_total + min_cond;
    if !d.is_finite() || d < -T::DISCORD_TOL {
        return Err(Error::InvariantViolation(format!("negative discord {d:e}")));
    }
    Ok(DiscordResult {
        discord: d,
        mutual_information,
        min_conditional_entropy: min_cond,
        argmin: found.argmin,
        p0_at_argmin: p0,
        entropy_total,
        entropy_a,
        entropy_b,
        evaluations: found.evaluations,
    })
}
