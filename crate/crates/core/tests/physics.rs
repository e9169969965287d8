mod common;

use std::f64::consts::PI;

use spin_discord::analytic;
use spin_discord::model::{couplings_from_geometry, hamiltonian_zz, initial_state, Propagator, SystemSpec};
use spin_discord::optimizer::{EvolutionaryStrategy, GridConfig, OptimizerConfig};
use spin_discord::qinfo::{discord, von_neumann_entropy};
use spin_discord::scenario::{fig2_surface, Settings};

const G: f64 = 3120.79;

fn es() -> EvolutionaryStrategy {
    EvolutionaryStrategy::new(OptimizerConfig::default()).unwrap()
}

fn three_qubit_discord(bw_a: f64, bw_b: f64, t: f64, es: &EvolutionaryStrategy) -> f64 {
    let mut spec = SystemSpec::at_temperature(2, 0.75, 0.001);
    spec.beta_omega_a = bw_a;
    spec.beta_omega_b = bw_b;
    discord(&common::propagator(&spec).state_at(t).unwrap(), es).unwrap().discord
}

#[test]
fn discord_ignores_chain_polarization_when_chain_is_colder() {
    let es = es();
    for bw_b in [15.0, 7.5] {
        for t in [0.37e-3, 1.1e-3] {
            let expected = analytic::discord_analytic(bw_b, G, t);
            for factor in [1.0, 2.0, 4.0] {
                let d = three_qubit_discord(factor * bw_b, bw_b, t, &es);
                assert!((d - expected).abs() < 1e-7, "bw_b {bw_b} t {t} factor {factor}: {d} vs {expected}");
            }
        }
    }
}

#[test]
fn hot_chain_lets_tilted_measurements_beat_the_z_axis() {
    // With the chain less polarized than the impurity, the z measurement is no
    // longer optimal and the discord drops below the closed form.
    let es = es();
    let t = 1.1e-3;
    let expected = analytic::discord_analytic(15.0, G, t);
    let mut previous = f64::NEG_INFINITY;
    for bw_a in [0.0, 2.0, 5.0, 10.0] {
        let d = three_qubit_discord(bw_a, 15.0, t, &es);
        assert!(d < expected - 1e-5, "bw_a {bw_a}: {d} vs {expected}");
        assert!(d > previous);
        previous = d;
    }
}

#[test]
fn chain_coupling_does_not_change_three_qubit_discord() {
    let es = es();
    let spec = SystemSpec::at_temperature(2, 0.75, 0.0005);
    let full = common::propagator(&spec);
    let zz = hamiltonian_zz(&couplings_from_geometry(&spec).unwrap(), 3).unwrap();
    let bare = Propagator::new(&zz, &initial_state(&spec).unwrap()).unwrap();
    for t in [0.2e-3, 0.9e-3, 1.7e-3] {
        let a = discord(&full.state_at(t).unwrap(), &es).unwrap().discord;
        let b = discord(&bare.state_at(t).unwrap(), &es).unwrap().discord;
        assert!((a - b).abs() < 1e-7, "t {t}: {a} vs {b}");
    }
}

#[test]
fn local_unitaries_leave_discord_unchanged() {
    let es = es();
    let mut rng = common::rng(7);
    let spec = SystemSpec::at_temperature(2, 1.5, 0.001);
    let rho = common::propagator(&spec).state_at(0.8e-3).unwrap();
    let d0 = discord(&rho, &es).unwrap().discord;
    for _ in 0..3 {
        let d = discord(&common::local_rotation(&rho, &mut rng), &es).unwrap().discord;
        assert!((d - d0).abs() < 1e-7, "{d} vs {d0}");
    }
}

#[test]
fn discord_is_bounded_by_impurity_entropy() {
    let es = es();
    let spec = SystemSpec::at_temperature(4, 0.75, 0.001);
    let p = common::propagator(&spec);
    for t in [0.5e-3, 2.5e-3] {
        let rho = p.state_at(t).unwrap();
        let r = discord(&rho, &es).unwrap();
        let s_b = von_neumann_entropy(&rho.reduce_to_b().unwrap()).unwrap();
        assert!(r.discord >= -1e-10 && r.discord <= s_b + 1e-10);
        assert!(r.discord <= r.mutual_information + 1e-10);
    }
}

#[test]
fn evolution_preserves_spectrum_for_larger_chains() {
    let spec = SystemSpec::at_temperature(4, 1.5, 0.002);
    let p = common::propagator(&spec);
    let s0 = von_neumann_entropy(&initial_state(&spec).unwrap()).unwrap();
    for t in [1e-4, 3e-3] {
        let s = von_neumann_entropy(&p.state_at(t).unwrap()).unwrap();
        assert!((s - s0).abs() < 1e-10);
    }
}

#[test]
fn surface_minimum_sits_on_the_z_axis() {
    let s = Settings::from_config_text("n_chain = 2\nb2_over_a2 = 0.75\ntemperature_k = 0.001")
        .unwrap()
        .into_scenario()
        .unwrap();
    let (points, best) = fig2_surface(&s, 1e-3, GridConfig { n_theta: 91, n_phi: 91, refine: false }).unwrap();
    let min = points[best];
    assert!((min.z.z3.abs() - 1.0).abs() < 1e-12, "{:?}", min.z);
    assert!((min.cond_entropy - analytic::entropy_a0(15.0)).abs() < 1e-9);
    // Away from the poles the surface is strictly higher.
    let off_axis = points.iter().filter(|p| p.z.z3.abs() < 0.99).map(|p| p.cond_entropy).fold(f64::INFINITY, f64::min);
    assert!(off_axis > min.cond_entropy);
}

#[test]
fn discord_returns_to_zero_each_period() {
    let es = es();
    let spec = SystemSpec::at_temperature(2, 0.75, 0.002);
    let p = common::propagator(&spec);
    for k in 1..=3 {
        let t = 2.0 * PI * k as f64 / G;
        assert!(discord(&p.state_at(t).unwrap(), &es).unwrap().discord.abs() < 1e-8);
    }
}
