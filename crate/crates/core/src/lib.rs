// Pulls in the LAPACK/BLAS link directives even before any solver is used.
use ndarray_linalg as _;

pub mod config;
pub mod corpus;
pub mod error;
pub mod export;
pub mod index;
pub mod lattice;
pub mod model;
pub mod numerics;
pub mod profile;
pub mod spectrum;

pub use config::{Model, ModelConfig, ModelKind};
pub use corpus::{random_fredholm_corpus, sign_combinations, CorpusOptions};
pub use error::{Error, Result};
pub use export::{cloud_csv, parse_spectrum_csv, render_svg, sigma_ess_csv, spectrum_csv};
pub use index::{
    index_mko, index_via_symbols, is_fredholm, p_gamma, sgn, witten_index_analytic, IndexReport,
    SymbolFunction,
};
pub use lattice::{adjoint, compose, finite_section, shift, BandedOperator, FiniteSection};
pub use model::{
    build_coin_c, build_epsilon, build_eta, build_gamma_m, build_gamma_mko, build_q_epsilon0,
    build_theta_pm, build_u_m, build_u_mko, mko_to_um, rephased_q_epsilon0, AsymptoticData,
    ModelParamsMko, ModelParamsUm, PhaseAssignment, PhaseValues,
};
pub use profile::{Endpoint, ParameterProfile, ValueKind};
pub use spectrum::{
    classify_case, endpoint_data, g_map, sigma_ess, sigma_star, symbol_eigenvalues, symbol_matrix,
    Arc, Segment, SigmaEss, SpectralCase, SpectralSet,
};
