#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spin_discord::linalg::{kron, unitary_from_hermitian};
use spin_discord::model::{initial_state, total_hamiltonian, Propagator};
use spin_discord::scalar::c;
use spin_discord::{Density, Matrix, Spec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> Matrix {
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    unitary_from_hermitian(&random_hermitian(n, rng), 3.0).unwrap()
}

/// Random density matrix `X X† / tr` on the given factor dimensions.
pub fn random_density(dims: &[usize], rng: &mut impl Rng) -> Density {
    let n: usize = dims.iter().product();
    let x = Matrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let m = x.matmul(&x.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale_real(1.0 / tr);
    // Exact Hermiticity for the strict constructor.
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    Density::new(dims.to_vec(), m).unwrap()
}

/// `(U_A ⊗ U_B) rho (U_A ⊗ U_B)†` with random local unitaries.
pub fn local_rotation(rho: &Density, rng: &mut impl Rng) -> Density {
    let d_b = *rho.dims().last().unwrap();
    let d_a = rho.dim() / d_b;
    let u = kron(&random_unitary(d_a, rng), &random_unitary(d_b, rng));
    let mut m = u.matmul(rho.matrix()).matmul(&u.adjoint());
    let n = m.rows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            m[(j, i)] = m[(i, j)].conj();
        }
    }
    Density::new(rho.dims().to_vec(), m).unwrap()
}

pub fn propagator(spec: &Spec) -> Propagator<f64> {
    let h = total_hamiltonian(spec).unwrap();
    Propagator::new(&h, &initial_state(spec).unwrap()).unwrap()
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Number of interior local maxima whose topographic prominence is at least `min_prominence`.
pub fn prominent_maxima(y: &[f64], min_prominence: f64) -> usize {
    let n = y.len();
    (1..n.saturating_sub(1))
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .filter(|&i| {
            let mut left = y[i];
            for j in (0..i).rev() {
                if y[j] > y[i] {
                    break;
                }
                left = left.min(y[j]);
            }
            let mut right = y[i];
            for &v in &y[i + 1..] {
                if v > y[i] {
                    break;
                }
                right = right.min(v);
            }
            y[i] - left.max(right) >= min_prominence
        })
        .count()
}

/// Least-squares `y ≈ c0 + c1 f` and the max-abs residual of that fit.
fn affine_residual(y: &[f64], f: &[f64]) -> f64 {
    let n = y.len() as f64;
    let (sf, sy) = (f.iter().sum::<f64>(), y.iter().sum::<f64>());
    let sff: f64 = f.iter().map(|v| v * v).sum();
    let sfy: f64 = f.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sff - sf * sf;
    let (c0, c1) = if det.abs() < 1e-300 {
        (sy / n, 0.0)
    } else {
        ((sff * sy - sf * sfy) / det, (n * sfy - sf * sy) / det)
    };
    f.iter()
        .zip(y)
        .map(|(fv, yv)| (yv - c0 - c1 * fv).abs())
        .fold(0.0, f64::max)
}

/// Best max-abs residual of `c0 + c1 shape(omega t)` over a scan of `omega`,
/// polished by golden-section search around the best scan point.
pub fn best_single_frequency_residual(t: &[f64], y: &[f64], omegas: &[f64], shape: impl Fn(f64, f64) -> f64) -> (f64, f64) {
    let resid = |w: f64| {
        let f: Vec<f64> = t.iter().map(|&ti| shape(w, ti)).collect();
        affine_residual(y, &f)
    };
    let (mut best_k, mut best) = (0, f64::INFINITY);
    for (k, &w) in omegas.iter().enumerate() {
        let r = resid(w);
        if r < best {
            best = r;
            best_k = k;
        }
    }
    let mut lo = omegas[best_k.saturating_sub(1)];
    let mut hi = omegas[(best_k + 1).min(omegas.len() - 1)];
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if resid(m1) < resid(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let w = 0.5 * (lo + hi);
    let r = resid(w);
    if r < best {
        (r, w)
    } else {
        (best, omegas[best_k])
    }
}
