//! Scalar abstraction shared by every numeric module.

use nalgebra::{Complex, RealField};
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point type the whole pipeline is generic over (`f32` or `f64`).
///
/// The tolerance hooks scale the fixed double-precision thresholds to the
/// precision actually available; `f64` uses the documented values.
pub trait Real:
    RealField + Copy + FloatConst + FromPrimitive + ToPrimitive + std::fmt::Display + std::fmt::LowerExp + Send + Sync
{
    /// Max |h - h^dagger| entry accepted as Hermitian.
    const HERMITIAN_TOL: Self;
    /// Unitarity and eigendecomposition reconstruction tolerance.
    const RECONSTRUCT_TOL: Self;
    /// Trace / positivity slack for density matrices.
    const STATE_TOL: Self;
    /// Eigenvalues in `[-ENTROPY_CLAMP, 0)` are clamped to zero before entropies.
    const ENTROPY_CLAMP: Self;
    /// Branches with probability at or below this are dropped from ensemble averages.
    const BRANCH_CUTOFF: Self;
    /// Discarded spectral weight allowed when compressing a density matrix to low rank.
    const SPECTRAL_CUTOFF: Self;
    /// Unit-norm slack for Bloch vectors.
    const NORM_TOL: Self;
    /// Most negative discord accepted as round-off.
    const DISCORD_TOL: Self;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($t:ty, $herm:expr, $rec:expr, $state:expr, $clamp:expr, $branch:expr, $spec:expr, $norm:expr, $disc:expr) => {
        impl Real for $t {
            const HERMITIAN_TOL: Self = $herm;
            const RECONSTRUCT_TOL: Self = $rec;
            const STATE_TOL: Self = $state;
            const ENTROPY_CLAMP: Self = $clamp;
            const BRANCH_CUTOFF: Self = $branch;
            const SPECTRAL_CUTOFF: Self = $spec;
            const NORM_TOL: Self = $norm;
            const DISCORD_TOL: Self = $disc;
        }
    };
}

impl_real!(f64, 1e-10, 1e-9, 1e-10, 1e-10, 1e-12, 1e-14, 1e-12, 1e-8);
impl_real!(f32, 1e-4, 1e-3, 1e-4, 1e-4, 1e-6, 1e-7, 1e-5, 1e-3);

pub type C<T> = Complex<T>;

#[inline]
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn modulus<T: Real>(z: C<T>) -> T {
    z.re.hypot(z.im)
}

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub fn xlog2x_neg<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        -x * x.log2()
    }
}
