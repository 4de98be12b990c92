//! Fixtures shared by the benchmarks.

use chiralwalk_core::{
    CorpusOptions, ModelParamsMko, ModelParamsUm, ParameterProfile, PhaseValues,
};

/// The two-phase walk with `p(+-inf) = +-0.2`, `a(+-inf) = +-0.1` and a
/// constant gain.
pub fn worked_example(m: i64, gamma: f64) -> ModelParamsUm {
    ModelParamsUm::two_phase(
        m,
        PhaseValues::with_real_coins(gamma, -0.2, -0.1),
        PhaseValues::with_real_coins(gamma, 0.2, 0.1),
    )
    .expect("valid parameters")
}

pub fn worked_example_mko() -> ModelParamsMko {
    let (t1, t2) = (0.2_f64.asin(), 0.1_f64.asin());
    ModelParamsMko::new(
        ParameterProfile::real(0.4),
        ParameterProfile::real(0.0),
        ParameterProfile::real_two_phase(t1, -t1),
        ParameterProfile::real_two_phase(-t2, t2),
    )
    .expect("valid parameters")
}

pub fn small_corpus(size: usize) -> Vec<ModelParamsUm> {
    chiralwalk_core::random_fredholm_corpus(&CorpusOptions {
        size,
        ..CorpusOptions::default()
    })
}
