//! Reproducible parameter corpora for cross-checking the index and spectrum
//! engines.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::index::is_fredholm;
use crate::model::{ModelParamsUm, PhaseValues};
use crate::profile::{Endpoint, ParameterProfile, ValueKind};

pub const DEFAULT_SEED: u64 = 0x5eed_c4a1;
pub const DEFAULT_CORPUS_SIZE: usize = 240;
/// Minimum distance `||p_gamma| - |a||` from the Fredholm boundary at both ends.
pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const M_VALUES: [i64; 6] = [-3, -2, -1, 1, 2, 3];

#[derive(Clone, Copy, Debug)]
pub struct CorpusOptions {
    pub seed: u64,
    pub size: usize,
    pub margin: f64,
    pub max_gamma: f64,
    /// Sites `-k..=k` may carry finite perturbations of the coins.
    pub perturbation_radius: i64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            seed: DEFAULT_SEED,
            size: DEFAULT_CORPUS_SIZE,
            margin: DEFAULT_MARGIN,
            max_gamma: 1.5,
            perturbation_radius: 3,
        }
    }
}

fn random_coin(rng: &mut ChaCha8Rng) -> (f64, Complex64) {
    let p: f64 = rng.gen_range(-1.0..=1.0);
    let phase = rng.gen_range(0.0..TAU);
    (
        p,
        Complex64::from_polar((1.0 - p * p).max(0.0).sqrt(), phase),
    )
}

/// A profile pair `(p, q)` with the given limits and a few random interior
/// values, all satisfying `p^2 + |q|^2 = 1`.
fn coin_profiles(
    rng: &mut ChaCha8Rng,
    minus: (f64, Complex64),
    plus: (f64, Complex64),
    radius: i64,
) -> (ParameterProfile, ParameterProfile) {
    let count = rng.gen_range(0..=3);
    let sites: Vec<(i64, (f64, Complex64))> = (0..count)
        .map(|_| (rng.gen_range(-radius..=radius), random_coin(rng)))
        .collect();
    let p = ParameterProfile::new(
        Complex64::new(minus.0, 0.0),
        Complex64::new(plus.0, 0.0),
        sites.iter().map(|&(x, (p, _))| (x, Complex64::new(p, 0.0))),
        ValueKind::Real,
    )
    .expect("finite values");
    let q = ParameterProfile::new(
        minus.1,
        plus.1,
        sites.iter().map(|&(x, (_, q))| (x, q)),
        ValueKind::Complex,
    )
    .expect("finite values");
    (p, q)
}

/// Draws Fredholm parameter sets with every endpoint at least `margin` away
/// from the tie `|p_gamma| = |a|`. Deterministic in `opts.seed`.
pub fn random_fredholm_corpus(opts: &CorpusOptions) -> Vec<ModelParamsUm> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(opts.size);
    while out.len() < opts.size {
        let m = M_VALUES[out.len() % M_VALUES.len()];
        let (pm, pp) = (random_coin(&mut rng), random_coin(&mut rng));
        let (am, ap) = (random_coin(&mut rng), random_coin(&mut rng));
        let (gm, gp) = (
            rng.gen_range(-opts.max_gamma..=opts.max_gamma),
            rng.gen_range(-opts.max_gamma..=opts.max_gamma),
        );
        let (p, q) = coin_profiles(&mut rng, pm, pp, opts.perturbation_radius);
        let (a, b) = coin_profiles(&mut rng, am, ap, opts.perturbation_radius);
        let gamma = ParameterProfile::real_two_phase(gm, gp).with_override(
            rng.gen_range(-opts.perturbation_radius..=opts.perturbation_radius),
            Complex64::new(rng.gen_range(-opts.max_gamma..=opts.max_gamma), 0.0),
        );
        let Ok(params) = ModelParamsUm::new(m, gamma, p, a, q, b) else {
            continue;
        };
        let check = is_fredholm(
            &params.asymptotic(Endpoint::MinusInfinity),
            &params.asymptotic(Endpoint::PlusInfinity),
        );
        if check.minus.margin.abs() >= opts.margin && check.plus.margin.abs() >= opts.margin {
            out.push(params);
        }
    }
    out
}

/// All sixteen two-phase instances with `p(-inf), p(+inf)` in `{-0.2, 0.2}` and
/// `a(-inf), a(+inf)` in `{-0.1, 0.1}` at a common `gamma`.
pub fn sign_combinations(m: i64, gamma: f64) -> Vec<ModelParamsUm> {
    let mut out = Vec::with_capacity(16);
    for pm in [-0.2, 0.2] {
        for pp in [-0.2, 0.2] {
            for am in [-0.1, 0.1] {
                for ap in [-0.1, 0.1] {
                    out.push(
                        ModelParamsUm::two_phase(
                            m,
                            PhaseValues::with_real_coins(gamma, pm, am),
                            PhaseValues::with_real_coins(gamma, pp, ap),
                        )
                        .expect("real coins satisfy the unit constraint"),
                    );
                }
            }
        }
    }
    out
}
