//! Global minimization of objectives on the measurement Bloch sphere.
//!
//! [`EvolutionaryStrategy`] is an elitist random-mutation search on spherical
//! angles; [`GridSearch`] is the exhaustive oracle used to validate it.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qinfo::BlochVector;
use crate::scalar::Real;

/// Objective over measurement directions. Must be callable from worker threads.
pub type Objective<'a, T> = dyn Fn(&BlochVector<T>) -> T + Sync + 'a;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T: Real> {
    /// Canonical representative (`z3 >= 0`, then `z1 >= 0`).
    pub argmin: BlochVector<T>,
    pub value: T,
    pub evaluations: usize,
}

pub trait Minimizer<T: Real>: Sync {
    fn minimize(&self, objective: &Objective<'_, T>) -> Minimum<T>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub population: usize,
    pub elites: usize,
    /// Initial mutation standard deviation in radians.
    pub mutation_sigma0: f64,
    /// Per-generation geometric decay of the mutation sigma.
    pub sigma_decay: f64,
    pub generations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            population: 24,
            elites: 4,
            mutation_sigma0: 0.5,
            sigma_decay: 0.95,
            generations: 80,
            restarts: 4,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if self.population < 1 || self.elites < 1 || self.generations < 1 || self.restarts < 1 {
            return bad("optimizer counts must be >= 1");
        }
        if self.elites >= self.population {
            return bad("elites must be smaller than the population");
        }
        if !(self.sigma_decay > 0.0 && self.sigma_decay <= 1.0) {
            return bad("sigma_decay must lie in (0, 1]");
        }
        if !(self.mutation_sigma0.is_finite() && self.mutation_sigma0 > 0.0) {
            return bad("mutation_sigma0 must be positive");
        }
        Ok(())
    }

    /// Objective evaluations one run performs.
    pub fn budget(&self) -> usize {
        self.restarts * (self.population + self.generations * (self.population - self.elites))
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent stream for one (restart, generation, individual) triple.
fn stream(seed: u64, restart: usize, generation: usize, index: usize) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for part in [restart as u64, generation as u64, index as u64] {
        h = splitmix(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// Generation tag reserved for the per-restart frame draw.
const FRAME_STREAM: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Individual<T: Real> {
    theta: T,
    phi: T,
    value: T,
}

/// Row-major 3x3 rotation.
type Frame<T> = [[T; 3]; 3];

fn random_frame<T: Real>(rng: &mut ChaCha8Rng) -> Frame<T> {
    // Uniform rotation from a normalized Gaussian quaternion.
    let mut q = [0.0f64; 4];
    for x in q.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    let m = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    m.map(|row| row.map(T::lit))
}

fn apply_frame<T: Real>(frame: &Frame<T>, theta: T, phi: T) -> BlochVector<T> {
    let local = BlochVector::from_angles(theta, phi).as_array();
    let r = |row: &[T; 3]| row[0] * local[0] + row[1] * local[1] + row[2] * local[2];
    BlochVector {
        z1: r(&frame[0]),
        z2: r(&frame[1]),
        z3: r(&frame[2]),
    }
}

fn by_value<T: Real>(a: &Individual<T>, b: &Individual<T>) -> Ordering {
    // NaN sorts last.
    let key = |v: T| if v.is_finite() || v < T::zero() { v } else { T::max_value().unwrap() };
    key(a.value).partial_cmp(&key(b.value)).unwrap()
}

/// Elitist (mu + lambda) evolution strategy with Gaussian mutations of the
/// spherical angles and geometric sigma decay.
#[derive(Debug, Clone)]
pub struct EvolutionaryStrategy {
    cfg: OptimizerConfig,
}

/// Best value after the initial population and after every generation, over all restarts.
#[derive(Debug, Clone)]
pub struct Trace<T: Real> {
    pub minimum: Minimum<T>,
    pub incumbent: Vec<T>,
}

impl EvolutionaryStrategy {
    pub fn new(cfg: OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.cfg
    }

    pub fn run<T: Real>(&self, objective: &Objective<'_, T>) -> Trace<T> {
        let cfg = &self.cfg;
        let mut best: Option<(BlochVector<T>, T)> = None;
        let mut incumbent = Vec::with_capacity(cfg.restarts * (cfg.generations + 1));
        let mut evaluations = 0;

        let consider = |z: BlochVector<T>, v: T, best: &mut Option<(BlochVector<T>, T)>| match best {
            Some((_, bv)) if v.partial_cmp(bv) != Some(Ordering::Less) => {}
            _ => *best = Some((z, v)),
        };

        for restart in 0..cfg.restarts {
            let frame: Frame<T> = random_frame(&mut stream(cfg.seed, restart, FRAME_STREAM, 0));
            let eval = |theta: T, phi: T| Individual {
                theta,
                phi,
                value: objective(&apply_frame(&frame, theta, phi)),
            };

            let mut pop: Vec<Individual<T>> = (0..cfg.population)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(cfg.seed, restart, 0, i);
                    let u: f64 = rng.random();
                    let v: f64 = rng.random();
                    eval(T::lit((1.0 - 2.0 * u).acos()), T::lit(2.0 * std::f64::consts::PI * v))
                })
                .collect();
            evaluations += pop.len();
            pop.sort_by(by_value);
            let top = pop[0];
            consider(apply_frame(&frame, top.theta, top.phi), top.value, &mut best);
            incumbent.push(best.unwrap().1);

            for generation in 1..=cfg.generations {
                let sigma = T::lit(cfg.mutation_sigma0 * cfg.sigma_decay.powi(generation as i32));
                let elites = &pop[..cfg.elites];
                let children: Vec<Individual<T>> = (0..cfg.population - cfg.elites)
                    .into_par_iter()
                    .map(|i| {
                        let parent = elites[i % cfg.elites];
                        let mut rng = stream(cfg.seed, restart, generation, i);
                        let dt: f64 = rng.sample(StandardNormal);
                        let dp: f64 = rng.sample(StandardNormal);
                        eval(parent.theta + sigma * T::lit(dt), parent.phi + sigma * T::lit(dp))
                    })
                    .collect();
                evaluations += children.len();
                pop.truncate(cfg.elites);
                pop.extend(children);
                // Stable: at equal values the earlier (elite) individual wins.
                pop.sort_by(by_value);
                let top = pop[0];
                consider(apply_frame(&frame, top.theta, top.phi), top.value, &mut best);
                incumbent.push(best.unwrap().1);
            }
        }

        let (z, value) = best.expect("at least one restart");
        Trace {
            minimum: Minimum {
                argmin: z.canonical(),
                value,
                evaluations,
            },
            incumbent,
        }
    }
}

impl<T: Real> Minimizer<T> for EvolutionaryStrategy {
    fn minimize(&self, objective: &Objective<'_, T>) -> Minimum<T> {
        self.run(objective).minimum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridConfig {
    pub n_theta: usize,
    pub n_phi: usize,
    /// One extra pass at 10x finer spacing around the grid winner.
    pub refine: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_theta: 91,
            n_phi: 181,
            refine: true,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_theta < 2 || self.n_phi < 2 {
            return Err(Error::InvalidParameter("grid needs n_theta >= 2 and n_phi >= 2".into()));
        }
        Ok(())
    }
}

/// Exhaustive `(theta, phi)` grid including both poles.
#[derive(Debug, Clone)]
pub struct GridSearch {
    cfg: GridConfig,
}

impl GridSearch {
    pub fn new(cfg: GridConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg })
    }
}

/// Evaluates `points` in order and returns the first strict minimum.
fn scan<T: Real>(objective: &Objective<'_, T>, points: &[(T, T)]) -> Option<(T, T, T)> {
    let values: Vec<T> = points
        .par_iter()
        .map(|&(th, ph)| objective(&BlochVector::from_angles(th, ph)))
        .collect();
    let mut best: Option<(T, T, T)> = None;
    for (&(th, ph), &v) in points.iter().zip(&values) {
        match best {
            Some((_, _, bv)) if v.partial_cmp(&bv) != Some(Ordering::Less) => {}
            _ => best = Some((th, ph, v)),
        }
    }
    best
}

impl<T: Real> Minimizer<T> for GridSearch {
    fn minimize(&self, objective: &Objective<'_, T>) -> Minimum<T> {
        let GridConfig { n_theta, n_phi, refine } = self.cfg;
        let pi = T::PI();
        let d_theta = pi / T::from_usize(n_theta - 1).unwrap();
        let d_phi = (pi + pi) / T::from_usize(n_phi).unwrap();

        let mut points = Vec::with_capacity(n_theta * n_phi);
        for i in 0..n_theta {
            let theta = d_theta * T::from_usize(i).unwrap();
            let at_pole = i == 0 || i == n_theta - 1;
            let phis = if at_pole { 1 } else { n_phi };
            for j in 0..phis {
                points.push((theta, d_phi * T::from_usize(j).unwrap()));
            }
        }
        let mut evaluations = points.len();
        let (mut th, mut ph, mut val) = scan(objective, &points).expect("non-empty grid");

        if refine {
            let tenth = T::lit(0.1);
            let at_pole = th == T::zero() || th == pi;
            let mut fine = Vec::new();
            if at_pole {
                // Rings around the pole, all coarse azimuths.
                for k in 1..=10 {
                    let off = d_theta * tenth * T::from_usize(k).unwrap();
                    let ring = if th == T::zero() { off } else { pi - off };
                    for j in 0..n_phi {
                        fine.push((ring, d_phi * T::from_usize(j).unwrap()));
                    }
                }
            } else {
                for k in -10i32..=10 {
                    for l in -10i32..=10 {
                        if k == 0 && l == 0 {
                            continue;
                        }
                        fine.push((
                            th + d_theta * tenth * T::lit(k as f64),
                            ph + d_phi * tenth * T::lit(l as f64),
                        ));
                    }
                }
            }
            evaluations += fine.len();
            if let Some((fth, fph, fv)) = scan(objective, &fine) {
                if fv < val {
                    (th, ph, val) = (fth, fph, fv);
                }
            }
        }

        Minimum {
            argmin: BlochVector::from_angles(th, ph).canonical(),
            value: val,
            evaluations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn es(seed: u64) -> EvolutionaryStrategy {
        EvolutionaryStrategy::new(OptimizerConfig {
            seed,
            ..Default::default()
        })
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = [
            OptimizerConfig { elites: 24, ..Default::default() },
            OptimizerConfig { population: 0, ..Default::default() },
            OptimizerConfig { sigma_decay: 0.0, ..Default::default() },
            OptimizerConfig { sigma_decay: 1.5, ..Default::default() },
            OptimizerConfig { restarts: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(EvolutionaryStrategy::new(cfg).is_err(), "{cfg:?}");
        }
        assert!(GridSearch::new(GridConfig { n_theta: 1, ..Default::default() }).is_err());
        assert_eq!(OptimizerConfig::default().budget(), 4 * (24 + 80 * 20));
    }

    #[test]
    fn finds_north_pole_of_smooth_bowl() {
        let f = |z: &BlochVector<f64>| (1.0 - z.z3).powi(2);
        let m = es(3).minimize(&f);
        assert!(m.value < 1e-6, "{m:?}");
        assert!((m.argmin.z3 - 1.0).abs() < 1e-3);
        assert_eq!(m.evaluations, OptimizerConfig::default().budget());
    }

    #[test]
    fn constant_objective() {
        let f = |_: &BlochVector<f64>| 0.625;
        let m = es(1).minimize(&f);
        assert_eq!(m.value, 0.625);
        assert!((m.argmin.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_finds_south_pole() {
        let f = |z: &BlochVector<f64>| z.z3;
        let g = GridSearch::new(GridConfig::default()).unwrap();
        let m = g.minimize(&f);
        assert_eq!(m.value, -1.0);
        // Canonicalization maps the south pole to the north pole representative.
        assert!((m.argmin.z3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_refinement_improves_off_grid_minimum() {
        let target = BlochVector::from_angles(1.234_f64, 2.345);
        let f = |z: &BlochVector<f64>| {
            let d = z.z1 * target.z1 + z.z2 * target.z2 + z.z3 * target.z3;
            1.0 - d
        };
        let coarse = GridSearch::new(GridConfig { refine: false, ..Default::default() }).unwrap().minimize(&f);
        let fine = GridSearch::new(GridConfig::default()).unwrap().minimize(&f);
        assert!(fine.value < coarse.value);
        assert!(fine.value < 2e-5);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let f = |z: &BlochVector<f64>| (z.z1 - 0.3).powi(2) + (z.z2 * 2.0).sin() + z.z3 * z.z1;
        let a = es(42).run(&f);
        let b = es(42).run(&f);
        assert_eq!(a.minimum, b.minimum);
        assert_eq!(a.incumbent, b.incumbent);
        let c = es(43).run(&f);
        assert_ne!(a.incumbent, c.incumbent);
    }

    #[test]
    fn incumbent_never_increases() {
        let f = |z: &BlochVector<f64>| (3.0 * z.z1).cos() + (5.0 * z.z2).sin() * z.z3;
        let trace = es(9).run(&f);
        assert!(trace.incumbent.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*trace.incumbent.last().unwrap(), trace.minimum.value);
    }

    #[test]
    fn antipodal_objective_gives_canonical_argmin() {
        // Minima at +-(0.6, 0, -0.8).
        let f = |z: &BlochVector<f64>| 1.0 - (0.6 * z.z1 - 0.8 * z.z3).powi(2);
        for seed in 0..4 {
            let m = es(seed).minimize(&f);
            assert!(m.argmin.z3 >= 0.0);
            assert!((m.argmin.z1 + 0.6).abs() < 1e-3 && (m.argmin.z3 - 0.8).abs() < 1e-3, "{m:?}");
        }
    }

    #[test]
    fn works_in_single_precision() {
        let f = |z: &BlochVector<f32>| (1.0 - z.z3) * (1.0 - z.z3);
        let m = es(5).minimize(&f);
        assert!(m.value < 1e-5);
    }
}
