//! Closed forms for the two-spin chain plus impurity (three qubits).
//!
//! All results are in bits. `x = tanh(bwB/2) cos^2(gt/2)` is the impurity
//! polarization that survives the zz evolution.

use crate::scalar::Real;

/// `ln cosh u` without overflow: `|u| + ln(1 + e^{-2|u|}) - ln 2`.
pub fn ln_cosh<T: Real>(u: T) -> T {
    let a = u.abs();
    a + (-(a + a)).exp().ln_1p() - T::LN_2()
}

/// `(1+x) ln(1+x) + (1-x) ln(1-x)`, with `0 ln 0 = 0` at `|x| = 1`.
fn binary_mixing<T: Real>(x: T) -> T {
    let term = |y: T| if y <= T::zero() { T::zero() } else { y * y.ln() };
    term(T::one() + x) + term(T::one() - x)
}

pub fn impurity_polarization<T: Real>(beta_omega_b: T, g: T, t: T) -> T {
    let half = T::lit(0.5);
    let cos = (g * t * half).cos();
    (beta_omega_b * half).tanh() * cos * cos
}

/// `S(rho)` of the whole three-qubit state (time independent).
pub fn entropy_total<T: Real>(beta_omega_a: T, beta_omega_b: T) -> T {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let ln2 = T::LN_2();
    T::lit(3.0) + two * ln_cosh(beta_omega_a * half) / ln2 + ln_cosh(beta_omega_b * half) / ln2
        - beta_omega_a * (beta_omega_a * half).tanh() / ln2
        - beta_omega_b * (beta_omega_b * half).tanh() / (two * ln2)
}

/// `S(rho_A(0))` of the two chain spins.
pub fn entropy_a0<T: Real>(beta_omega_a: T) -> T {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let ln2 = T::LN_2();
    two + two * ln_cosh(beta_omega_a * half) / ln2 - beta_omega_a * (beta_omega_a * half).tanh() / ln2
}

/// `S(rho_B(t))` of the impurity.
pub fn entropy_b<T: Real>(beta_omega_b: T, g: T, t: T) -> T {
    let x = impurity_polarization(beta_omega_b, g, t);
    T::one() - binary_mixing(x) / (T::lit(2.0) * T::LN_2())
}

/// Closed-form discord, independent of the dipolar constants.
///
/// Assumes the optimal measurement on the impurity is along z, which holds
/// when the chain is at least as polarized as the impurity
/// (`beta omega_A >= beta omega_B`). A hotter chain gives a smaller discord.
pub fn discord_analytic<T: Real>(beta_omega_b: T, g: T, t: T) -> T {
    let half = T::lit(0.5);
    let ln2 = T::LN_2();
    let x = impurity_polarization(beta_omega_b, g, t);
    -binary_mixing(x) / (T::lit(2.0) * ln2) - ln_cosh(beta_omega_b * half) / ln2
        + beta_omega_b / (T::lit(2.0) * ln2) * (beta_omega_b * half).tanh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    const G: f64 = 3120.79;

    #[test]
    fn ln_cosh_is_stable() {
        for u in [0.0, 0.3, -2.0, 10.0] {
            assert!((ln_cosh(u) - f64::cosh(u).ln()).abs() < 1e-13);
        }
        assert!((ln_cosh(75.0) - (75.0 - LN_2)).abs() < 1e-12);
        assert!(ln_cosh(1e4_f64).is_finite());
    }

    #[test]
    fn total_entropy_limits() {
        assert!((entropy_total(0.0_f64, 0.0) - 3.0).abs() < 1e-15);
        assert!(entropy_total(50.0_f64, 50.0).abs() < 1e-9);
    }

    #[test]
    fn chain_entropy_limits() {
        assert!((entropy_a0(0.0_f64) - 2.0).abs() < 1e-15);
        assert!(entropy_a0(50.0_f64).abs() < 1e-9);
        // Two independent spins with eigenvalues (1 +- tanh(bw/2))/2.
        let p = (1.0 + (1.3_f64 / 2.0).tanh()) / 2.0;
        let h = -p * p.log2() - (1.0 - p) * (1.0 - p).log2();
        assert!((entropy_a0(1.3) - 2.0 * h).abs() < 1e-14);
    }

    #[test]
    fn impurity_entropy_limits() {
        assert!((entropy_b(15.0, G, PI / G) - 1.0).abs() < 1e-15);
        for t in [0.0, 1e-4, 1e-3] {
            assert!((entropy_b(0.0, G, t) - 1.0).abs() < 1e-15);
        }
        // Fully polarized impurity at t = 0 is pure.
        assert!(entropy_b(200.0, G, 0.0).abs() < 1e-15);
    }

    #[test]
    fn discord_zeros() {
        for bw in [150.0, 30.0, 15.0, 7.5, 0.3] {
            assert!(discord_analytic(bw, G, 0.0).abs() < 1e-12, "bw {bw}");
            assert!(discord_analytic(bw, G, 2.0 * PI / G).abs() < 1e-12, "bw {bw}");
        }
    }

    #[test]
    fn discord_peak_at_low_temperature() {
        let u: f64 = 7.5;
        let expected = (u * u.tanh() - u.cosh().ln()) / LN_2;
        let d = discord_analytic(15.0, G, PI / G);
        assert!((d - expected).abs() < 1e-12);
        assert!((d - 1.0).abs() < 1e-3);
    }

    #[test]
    fn discord_period_and_reflection() {
        let period = 2.0 * PI / G;
        for frac in [0.07, 0.31, 0.5, 0.77] {
            let t = frac * period;
            let d = discord_analytic(15.0, G, t);
            assert!((discord_analytic(15.0, G, t + period) - d).abs() < 1e-12);
            assert!((discord_analytic(15.0, G, period - t) - d).abs() < 1e-12);
        }
    }

    #[test]
    fn discord_decays_with_temperature() {
        for gt in [0.4, PI / 2.0, 2.5, 4.0] {
            let vals: Vec<f64> = [150.0, 30.0, 15.0, 7.5]
                .iter()
                .map(|&bw| discord_analytic(bw, G, gt / G))
                .collect();
            assert!(vals.windows(2).all(|w| w[0] > w[1]), "gt {gt}: {vals:?}");
        }
    }

    #[test]
    fn single_precision_agrees() {
        let d32 = discord_analytic(15.0_f32, 3120.79, 1.0e-3);
        let d64 = discord_analytic(15.0_f64, 3120.79, 1.0e-3);
        assert!((d32 as f64 - d64).abs() < 1e-4);
    }
}
