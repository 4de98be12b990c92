//! Fredholmness and the Witten index of `(Gamma_m, U_m)`.
//!
//! The index is computed three ways and the answers must agree: the closed
//! four-branch formula in `p_gamma` and `a`, the ellipse rule for the winding
//! of each endpoint symbol `f(., star)`, and a sampled winding of the symbols
//! read off the rephased operator `Q_eps0` itself.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::BandedOperator;
use crate::model::{
    build_epsilon, build_gamma_m, build_u_m, rephased_q_epsilon0, AsymptoticData, ModelParamsMko,
    ModelParamsUm, PhaseAssignment,
};
use crate::profile::Endpoint;

/// `||p_gamma| - |a||` below this is reported as a tie, never as a side.
pub const FREDHOLM_TIE_TOL: f64 = 1e-10;

/// Minimum modulus a sampled symbol must keep before its winding is trusted.
pub const MIN_SYMBOL_MODULUS: f64 = 1e-8;

/// Upper limit on circle samples before numeric winding gives up.
pub const MAX_WINDING_SAMPLES: usize = 1 << 24;

/// Operator limits and closed-form symbol coefficients must agree to this.
const SYMBOL_MATCH_TOL: f64 = 1e-10;

const MINUS_TWO_I: Complex64 = Complex64 { re: 0.0, im: -2.0 };

/// Sign with `sgn 0 = 1`.
pub fn sgn(x: f64) -> i64 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// `p / sqrt(p^2 + |q|^2 cosh^2(2 gamma))`.
pub fn p_gamma(asym: &AsymptoticData) -> f64 {
    let ch = (2.0 * asym.gamma).cosh();
    let denom = (asym.p * asym.p + asym.q.norm_sqr() * ch * ch).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        asym.p / denom
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointDiagnostics {
    pub star: Endpoint,
    pub p_gamma: f64,
    pub abs_a: f64,
    /// `|p_gamma| - |a|`; positive means this endpoint contributes `m sgn p`.
    pub margin: f64,
}

impl EndpointDiagnostics {
    pub fn new(asym: &AsymptoticData) -> Self {
        let pg = p_gamma(asym);
        EndpointDiagnostics {
            star: asym.star,
            p_gamma: pg,
            abs_a: asym.a.abs(),
            margin: pg.abs() - asym.a.abs(),
        }
    }

    pub fn is_tie(&self) -> bool {
        self.margin.abs() < FREDHOLM_TIE_TOL
    }

    /// `|p_gamma| > |a|`, i.e. the endpoint symbol winds.
    pub fn is_topological(&self) -> bool {
        self.margin > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FredholmCheck {
    pub fredholm: bool,
    pub minus: EndpointDiagnostics,
    pub plus: EndpointDiagnostics,
}

impl FredholmCheck {
    pub fn endpoint(&self, star: Endpoint) -> &EndpointDiagnostics {
        match star {
            Endpoint::MinusInfinity => &self.minus,
            Endpoint::PlusInfinity => &self.plus,
        }
    }

    /// The endpoint with the smallest `||p_gamma| - |a||`.
    pub fn worst(&self) -> &EndpointDiagnostics {
        if self.minus.margin.abs() <= self.plus.margin.abs() {
            &self.minus
        } else {
            &self.plus
        }
    }

    fn require(&self) -> Result<()> {
        if self.fredholm {
            Ok(())
        } else {
            let worst = self.worst();
            Err(Error::NotFredholm {
                endpoint: worst.star,
                margin: worst.margin.abs(),
            })
        }
    }
}

pub fn is_fredholm(minus: &AsymptoticData, plus: &AsymptoticData) -> FredholmCheck {
    let minus = EndpointDiagnostics::new(minus);
    let plus = EndpointDiagnostics::new(plus);
    FredholmCheck {
        fredholm: !minus.is_tie() && !plus.is_tie(),
        minus,
        plus,
    }
}

/// The four-branch index formula, multiplied by `m`.
pub fn witten_index_analytic(minus: &AsymptoticData, plus: &AsymptoticData, m: i64) -> Result<i64> {
    let check = is_fredholm(minus, plus);
    check.require()?;
    let branch = match (check.minus.is_topological(), check.plus.is_topological()) {
        (false, false) => 0,
        (false, true) => sgn(plus.p),
        (true, false) => -sgn(minus.p),
        (true, true) => sgn(plus.p) - sgn(minus.p),
    };
    Ok(m * branch)
}

/// `f(z, star) = (-2i)^{-1} [lead z^m + trail z^{-m} - 2c]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymbolFunction {
    pub star: Endpoint,
    pub m: i64,
    pub c: f64,
    pub leading: Complex64,
    pub trailing: Complex64,
}

impl SymbolFunction {
    /// Coefficients from limit data: `c = |q| a cosh 2gamma`,
    /// `lead = (p + 1) b e^{i theta}`, `trail = (p - 1) b^* e^{-i theta}`.
    pub fn from_asymptotic(asym: &AsymptoticData, m: i64) -> Self {
        let phase = Complex64::from_polar(1.0, asym.theta);
        SymbolFunction {
            star: asym.star,
            m,
            c: asym.q.norm() * asym.a * (2.0 * asym.gamma).cosh(),
            leading: (asym.p + 1.0) * asym.b * phase,
            trailing: (asym.p - 1.0) * asym.b.conj() * phase.conj(),
        }
    }

    /// Coefficients read off the limit operator of a scalar strictly local
    /// operator with offsets in `{-m, 0, m}`.
    pub fn from_operator(op: &BandedOperator, star: Endpoint, m: i64) -> Result<Self> {
        if op.block_size() != 1 {
            return Err(Error::BlockSizeMismatch {
                left: op.block_size(),
                right: 1,
            });
        }
        let limit = |y: i64| {
            op.coefficient(0, 0, y)
                .map_or(Complex64::new(0.0, 0.0), |c| c.limit(star) * MINUS_TWO_I)
        };
        for (y, _) in op.coefficients(0, 0) {
            if y != 0 && y != m && y != -m && limit(y).norm() > SYMBOL_MATCH_TOL {
                return Err(Error::IndexDisagreement(format!(
                    "unexpected offset {y} in the symbol at {star}"
                )));
            }
        }
        let constant = limit(0);
        if constant.im.abs() > SYMBOL_MATCH_TOL {
            return Err(Error::IndexDisagreement(format!(
                "constant symbol coefficient at {star} is not real: {constant}"
            )));
        }
        Ok(SymbolFunction {
            star,
            m,
            c: -constant.re / 2.0,
            leading: limit(m),
            trailing: limit(-m),
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zm = z.powi(self.m as i32);
        (self.leading * zm + self.trailing / zm - 2.0 * self.c) / MINUS_TWO_I
    }

    pub fn eval_at_angle(&self, t: f64) -> Complex64 {
        self.eval(Complex64::from_polar(1.0, t))
    }

    /// Bound on `|d f(e^{it}) / dt|`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.m.unsigned_abs() as f64 * (self.leading.norm() + self.trailing.norm()) / 2.0
    }

    fn max_coefficient_diff(&self, other: &SymbolFunction) -> f64 {
        (self.leading - other.leading)
            .norm()
            .max((self.trailing - other.trailing).norm())
            .max((self.c - other.c).abs())
    }
}

/// Winding of `f(., star)` from the ellipse picture: `m sgn p` when the origin
/// lies inside the ellipse (`|p b| > |c|`), `0` when outside.
pub fn winding_analytic(sym: &SymbolFunction, asym: &AsymptoticData) -> Result<i64> {
    let pb = (asym.p * asym.b.norm()).abs();
    let c = sym.c.abs();
    let gap = pb - c;
    if gap.abs() < FREDHOLM_TIE_TOL {
        return Err(Error::SymbolVanishes {
            endpoint: sym.star,
            min_modulus: gap.abs(),
        });
    }
    Ok(if gap > 0.0 { sym.m * sgn(asym.p) } else { 0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindingEstimate {
    pub winding: i64,
    pub samples: usize,
    pub min_modulus: f64,
}

/// Sampled winding number of `f(., star)` with adaptive doubling, starting
/// from `samples` points (at least `64 (|m| + 1)`).
pub fn winding_numeric(sym: &SymbolFunction, samples: usize) -> Result<WindingEstimate> {
    let floor = 64 * (sym.m.unsigned_abs() as usize + 1);
    if samples < floor {
        return Err(Error::InvalidParams(format!(
            "winding needs at least {floor} samples, got {samples}"
        )));
    }
    sampled_winding(|t| sym.eval_at_angle(t), sym.lipschitz_bound(), samples).map_err(
        |min_modulus| Error::SymbolVanishes {
            endpoint: sym.star,
            min_modulus,
        },
    )
}

/// Accumulated-argument winding of `t -> f(t)` over `[0, 2pi]`. A pass is
/// accepted once every sample keeps at least ten times the per-step change
/// bound away from zero, and two accepted passes agree. On failure returns the
/// smallest sampled modulus.
fn sampled_winding(
    f: impl Fn(f64) -> Complex64,
    lipschitz: f64,
    start: usize,
) -> std::result::Result<WindingEstimate, f64> {
    let mut samples = start.max(8);
    let mut previous: Option<i64> = None;
    let mut last_min = f64::INFINITY;
    while samples <= MAX_WINDING_SAMPLES {
        let step = TAU / samples as f64;
        let first = f(0.0);
        let mut prev = first;
        let mut min_modulus = first.norm();
        let mut total = 0.0;
        for k in 1..=samples {
            let next = if k == samples {
                first
            } else {
                f(step * k as f64)
            };
            min_modulus = min_modulus.min(next.norm());
            total += (next / prev).arg();
            prev = next;
        }
        last_min = min_modulus;
        let trusted = min_modulus > MIN_SYMBOL_MODULUS && min_modulus > 10.0 * lipschitz * step;
        let winding = (total / TAU).round() as i64;
        if trusted {
            if previous == Some(winding) {
                return Ok(WindingEstimate {
                    winding,
                    samples,
                    min_modulus,
                });
            }
            previous = Some(winding);
        } else {
            previous = None;
        }
        samples *= 2;
    }
    Err(last_min)
}

fn default_samples(m: i64) -> usize {
    64 * (m.unsigned_abs() as usize + 1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport {
    pub m: i64,
    pub fredholm: FredholmCheck,
    /// Four-branch formula.
    pub analytic_index: i64,
    /// Ellipse-rule windings.
    pub wn_minus: i64,
    pub wn_plus: i64,
    /// Sampled windings of the operator-derived symbols.
    pub wn_minus_num: WindingEstimate,
    pub wn_plus_num: WindingEstimate,
    pub symbols: [SymbolFunction; 2],
}

impl IndexReport {
    pub fn index(&self) -> i64 {
        self.analytic_index
    }
}

/// Witten index of `(Gamma_m, U_m)` by all three routes, with `theta = arg q`
/// and `theta = 0` where `q` vanishes.
pub fn index_via_symbols(params: &ModelParamsUm) -> Result<IndexReport> {
    index_via_symbols_with_phase(params, &PhaseAssignment::canonical(&params.q))
}

pub fn index_via_symbols_with_phase(
    params: &ModelParamsUm,
    phase: &PhaseAssignment,
) -> Result<IndexReport> {
    let minus = params.asymptotic(Endpoint::MinusInfinity);
    let plus = params.asymptotic(Endpoint::PlusInfinity);
    let fredholm = is_fredholm(&minus, &plus);
    fredholm.require()?;
    let analytic_index = witten_index_analytic(&minus, &plus, params.m)?;

    let a_op = rephased_q_epsilon0(params, phase);
    let mut symbols = Vec::with_capacity(2);
    let mut windings = Vec::with_capacity(2);
    let mut numeric = Vec::with_capacity(2);
    for asym in [&minus, &plus] {
        let from_op = SymbolFunction::from_operator(&a_op, asym.star, params.m)?;
        let closed = SymbolFunction::from_asymptotic(asym, params.m);
        let diff = from_op.max_coefficient_diff(&closed);
        if diff > SYMBOL_MATCH_TOL {
            return Err(Error::IndexDisagreement(format!(
                "operator symbol at {} differs from the closed form by {diff:e}",
                asym.star
            )));
        }
        windings.push(winding_analytic(&closed, asym)?);
        numeric.push(winding_numeric(&from_op, default_samples(params.m))?);
        symbols.push(from_op);
    }
    let report = IndexReport {
        m: params.m,
        fredholm,
        analytic_index,
        wn_minus: windings[0],
        wn_plus: windings[1],
        wn_minus_num: numeric[0],
        wn_plus_num: numeric[1],
        symbols: [symbols[0], symbols[1]],
    };
    let by_ellipse = report.wn_plus - report.wn_minus;
    let by_sampling = report.wn_plus_num.winding - report.wn_minus_num.winding;
    if by_ellipse != analytic_index || by_sampling != analytic_index {
        return Err(Error::IndexDisagreement(format!(
            "formula {analytic_index}, ellipse windings {by_ellipse}, sampled windings {by_sampling}"
        )));
    }
    Ok(report)
}

/// Witten index of `(Gamma_mko, U_mko)`, through the equivalent m = 2 pair.
pub fn index_mko(params: &ModelParamsMko) -> Result<IndexReport> {
    let (um, _) = crate::model::mko_to_um(params)?;
    index_via_symbols(&um)
}

/// Fredholm index of a scalar strictly local operator: winding of its
/// `+inf` symbol minus winding of its `-inf` symbol.
pub fn strictly_local_index(op: &BandedOperator) -> Result<i64> {
    if op.block_size() != 1 {
        return Err(Error::BlockSizeMismatch {
            left: op.block_size(),
            right: 1,
        });
    }
    let k = op.bandwidth().max(1);
    let mut w = [0i64; 2];
    for (slot, star) in Endpoint::BOTH.into_iter().enumerate() {
        let coeffs: Vec<(i64, Complex64)> = op
            .coefficients(0, 0)
            .map(|(y, c)| (y, c.limit(star)))
            .collect();
        let lipschitz: f64 = coeffs
            .iter()
            .map(|(y, c)| y.unsigned_abs() as f64 * c.norm())
            .sum();
        let eval = |t: f64| {
            coeffs
                .iter()
                .map(|&(y, c)| c * Complex64::from_polar(1.0, y as f64 * t))
                .sum::<Complex64>()
        };
        w[slot] = sampled_winding(eval, lipschitz, 64 * (k + 1))
            .map_err(|min_modulus| Error::SymbolVanishes {
                endpoint: star,
                min_modulus,
            })?
            .winding;
    }
    Ok(w[1] - w[0])
}

/// Index of a chiral pair whose grading is already `diag(1, -1)`: the index
/// of the lower-left block of `(U - U^*) / 2i`.
pub fn graded_pair_index(gamma: &BandedOperator, u: &BandedOperator) -> Result<i64> {
    let standard = BandedOperator::diagonal(vec![
        crate::profile::ParameterProfile::real(1.0),
        crate::profile::ParameterProfile::real(-1.0),
    ]);
    let off = gamma.max_coefficient_diff(&standard)?;
    if off > SYMBOL_MATCH_TOL {
        return Err(Error::ResidualTooLarge {
            check: "grading",
            residual: off,
            tol: SYMBOL_MATCH_TOL,
        });
    }
    strictly_local_index(&u.imag_part().block(1, 0))
}

/// Conjugates `(Gamma_m, U_m)` by `epsilon` and returns the graded pair.
pub fn epsilon_graded_pair(
    params: &ModelParamsUm,
    phase: &PhaseAssignment,
) -> Result<(BandedOperator, BandedOperator)> {
    let eps = build_epsilon(params, phase);
    let eps_star = eps.adjoint();
    let gamma = BandedOperator::product(&[&eps_star, &build_gamma_m(params), &eps])?;
    let u = BandedOperator::product(&[&eps_star, &build_u_m(params), &eps])?;
    Ok((gamma, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_eta, build_gamma_mko, build_u_mko, PhaseValues};
    use crate::profile::ParameterProfile;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example1(m: i64, gamma: f64) -> ModelParamsUm {
        ModelParamsUm::two_phase(
            m,
            PhaseValues::with_real_coins(gamma, -0.2, -0.1),
            PhaseValues::with_real_coins(gamma, 0.2, 0.1),
        )
        .unwrap()
    }

    fn asym(star: Endpoint, gamma: f64, p: f64, a: f64) -> AsymptoticData {
        AsymptoticData::with_real_coins(star, gamma, p, a)
    }

    #[test]
    fn sign_of_zero_is_one() {
        assert_eq!(sgn(0.0), 1);
        assert_eq!(sgn(-0.0), 1);
        assert_eq!(sgn(-3.0), -1);
        assert_eq!(sgn(2.0), 1);
    }

    #[test]
    fn p_gamma_of_the_worked_example() {
        for p in [0.2, -0.2] {
            let v = p_gamma(&asym(Endpoint::PlusInfinity, 0.4, p, 0.1));
            assert!((v.abs() - 0.150876).abs() < 5e-7, "{v}");
            assert_eq!(v.signum(), p.signum());
        }
        assert_eq!(p_gamma(&asym(Endpoint::PlusInfinity, 0.4, 0.0, 0.1)), 0.0);
        let v = p_gamma(&asym(Endpoint::PlusInfinity, 0.0, 0.37, 0.1));
        assert!((v - 0.37).abs() < 1e-15);
    }

    #[test]
    fn fredholm_dichotomy_and_ties() {
        let minus = asym(Endpoint::MinusInfinity, 0.4, -0.2, -0.1);
        let plus = asym(Endpoint::PlusInfinity, 0.4, 0.2, 0.1);
        let check = is_fredholm(&minus, &plus);
        assert!(check.fredholm);
        assert!(check.plus.margin > 0.05);

        let zero_p = asym(Endpoint::PlusInfinity, 0.3, 0.0, 0.4);
        assert!(is_fredholm(&zero_p, &zero_p).fredholm);

        let (p, gamma) = (0.35, 0.2);
        let a = p_gamma(&asym(Endpoint::PlusInfinity, gamma, p, 0.0)).abs();
        let tie = asym(Endpoint::PlusInfinity, gamma, p, a);
        let check = is_fredholm(&minus, &tie);
        assert!(!check.fredholm);
        assert!(check.plus.is_tie());
        assert!(matches!(
            witten_index_analytic(&minus, &tie, 1),
            Err(Error::NotFredholm {
                endpoint: Endpoint::PlusInfinity,
                ..
            })
        ));
    }

    #[test]
    fn worked_example_index_is_twice_m() {
        for m in [1, 2, 3, -2] {
            let minus = asym(Endpoint::MinusInfinity, 0.4, -0.2, -0.1);
            let plus = asym(Endpoint::PlusInfinity, 0.4, 0.2, 0.1);
            assert_eq!(witten_index_analytic(&minus, &plus, m).unwrap(), 2 * m);
            assert_eq!(index_via_symbols(&example1(m, 0.4)).unwrap().index(), 2 * m);
        }
    }

    #[test]
    fn trivial_branch_gives_zero() {
        let minus = asym(Endpoint::MinusInfinity, 0.1, 0.05, 0.7);
        let plus = asym(Endpoint::PlusInfinity, 0.2, -0.1, 0.5);
        assert_eq!(witten_index_analytic(&minus, &plus, 3).unwrap(), 0);
    }

    #[test]
    fn zero_p_coin_walk_has_index_zero() {
        let b_minus = Complex64::from_polar(0.91_f64.sqrt(), 0.7);
        let b_plus = Complex64::from_polar(0.91_f64.sqrt(), -2.1);
        let minus = PhaseValues {
            gamma: 0.0,
            p: 0.0,
            a: 0.3,
            q: Complex64::new(1.0, 0.0),
            b: b_minus,
        };
        let plus = PhaseValues { b: b_plus, ..minus };
        let params = ModelParamsUm::two_phase(1, minus, plus).unwrap();
        let report = index_via_symbols(&params).unwrap();
        assert_eq!(report.index(), 0);
        assert_eq!((report.wn_minus, report.wn_plus), (0, 0));
    }

    #[test]
    fn zero_p_zero_a_is_a_tie() {
        // The symbol degenerates to 2 Im(b z^m) / (-2i), which vanishes on T.
        let b = Complex64::from_polar(1.0, 0.7);
        let side = PhaseValues {
            gamma: 0.0,
            p: 0.0,
            a: 0.0,
            q: Complex64::new(1.0, 0.0),
            b,
        };
        let params = ModelParamsUm::two_phase(1, side, side).unwrap();
        assert!(matches!(
            index_via_symbols(&params),
            Err(Error::NotFredholm { .. })
        ));
        let sym = SymbolFunction::from_asymptotic(&params.asymptotic(Endpoint::PlusInfinity), 1);
        assert!(winding_numeric(&sym, 128).is_err());
    }

    #[test]
    fn ellipse_rule_cases() {
        let inside = asym(Endpoint::PlusInfinity, 0.4, 0.2, 0.1);
        let sym = SymbolFunction::from_asymptotic(&inside, 2);
        assert_eq!(winding_analytic(&sym, &inside).unwrap(), 2);

        let flat = asym(Endpoint::PlusInfinity, 0.4, 0.0, 0.3);
        let sym = SymbolFunction::from_asymptotic(&flat, 2);
        assert_eq!(winding_analytic(&sym, &flat).unwrap(), 0);

        let outside = asym(Endpoint::PlusInfinity, 0.0, 0.1, 0.6);
        let sym = SymbolFunction::from_asymptotic(&outside, -3);
        assert_eq!(winding_analytic(&sym, &outside).unwrap(), 0);
    }

    #[test]
    fn numeric_winding_of_simple_symbols() {
        let constant = SymbolFunction {
            star: Endpoint::PlusInfinity,
            m: 2,
            c: 1.0,
            leading: Complex64::new(0.0, 0.0),
            trailing: Complex64::new(0.0, 0.0),
        };
        assert_eq!(winding_numeric(&constant, 192).unwrap().winding, 0);
        for m in [-3, -1, 1, 4] {
            let monomial = SymbolFunction {
                star: Endpoint::PlusInfinity,
                m,
                c: 0.0,
                leading: Complex64::new(0.0, -2.0),
                trailing: Complex64::new(0.0, 0.0),
            };
            let est = winding_numeric(&monomial, default_samples(m)).unwrap();
            assert_eq!(est.winding, m);
            assert!((est.min_modulus - 1.0).abs() < 1e-12);
        }
        assert!(winding_numeric(&constant, 10).is_err());
    }

    #[test]
    fn numeric_winding_refuses_a_vanishing_symbol() {
        let sym = SymbolFunction {
            star: Endpoint::MinusInfinity,
            m: 1,
            c: 0.5,
            leading: Complex64::new(1.0, 0.0),
            trailing: Complex64::new(0.0, 0.0),
        };
        // lead z - 2c vanishes at z = 1
        assert!(matches!(
            winding_numeric(&sym, 128),
            Err(Error::SymbolVanishes {
                endpoint: Endpoint::MinusInfinity,
                ..
            })
        ));
    }

    #[test]
    fn all_sign_combinations_agree() {
        for pm in [-0.2, 0.2] {
            for pp in [-0.2, 0.2] {
                for am in [-0.1, 0.1] {
                    for ap in [-0.1, 0.1] {
                        for m in [-2, 1, 3] {
                            let params = ModelParamsUm::two_phase(
                                m,
                                PhaseValues::with_real_coins(0.4, pm, am),
                                PhaseValues::with_real_coins(0.4, pp, ap),
                            )
                            .unwrap();
                            let report = index_via_symbols(&params).unwrap();
                            assert_eq!(report.index(), m * (sgn(pp) - sgn(pm)));
                        }
                    }
                }
            }
        }
    }

    fn pinned(m: i64) -> ModelParamsUm {
        let p = ParameterProfile::real_two_phase(-1.0, 1.0)
            .with_override(-1, Complex64::new(-0.6, 0.0))
            .with_override(0, Complex64::new(0.8, 0.0));
        let q = ParameterProfile::zero()
            .with_override(-1, Complex64::from_polar(0.8, 2.0))
            .with_override(0, Complex64::from_polar(0.6, -1.0));
        let b = ParameterProfile::constant(Complex64::from_polar(0.84_f64.sqrt(), 0.5));
        ModelParamsUm::new(
            m,
            ParameterProfile::real(0.2),
            p,
            ParameterProfile::real(0.4),
            q,
            b,
        )
        .unwrap()
    }

    #[test]
    fn index_ignores_phases_where_q_vanishes() {
        for m in [-2, 1, 3] {
            let params = pinned(m);
            let reference = index_via_symbols(&params).unwrap();
            assert_eq!(reference.index(), 2 * m);
            for seed in 0..6 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let phase = PhaseAssignment::randomized(&params.q, &mut rng);
                let report = index_via_symbols_with_phase(&params, &phase).unwrap();
                assert_eq!(report.index(), reference.index());
                assert_eq!(report.wn_plus_num.winding, reference.wn_plus_num.winding);
                assert_eq!(report.wn_minus_num.winding, reference.wn_minus_num.winding);
            }
        }
    }

    #[test]
    fn finite_perturbations_do_not_move_the_index() {
        let base = example1(2, 0.4);
        let mut bumped = base.clone();
        bumped.gamma = bumped.gamma.with_override(3, Complex64::new(1.5, 0.0));
        bumped.p = bumped.p.with_override(-2, Complex64::new(0.9, 0.0));
        bumped.q = bumped
            .q
            .with_override(-2, Complex64::from_polar(0.19_f64.sqrt(), 1.0));
        bumped.a = bumped.a.with_override(0, Complex64::new(-0.7, 0.0));
        bumped.b = bumped
            .b
            .with_override(0, Complex64::new(0.0, 0.51_f64.sqrt()));
        bumped.validate().unwrap();
        assert_eq!(
            index_via_symbols(&base).unwrap(),
            IndexReport {
                fredholm: index_via_symbols(&bumped).unwrap().fredholm,
                ..index_via_symbols(&bumped).unwrap()
            }
        );
    }

    #[test]
    fn epsilon_conjugation_preserves_the_index() {
        for m in [-1, 2] {
            for params in [example1(m, 0.4), pinned(m), example1(m, 0.0)] {
                let phase = PhaseAssignment::canonical(&params.q);
                let (gamma, u) = epsilon_graded_pair(&params, &phase).unwrap();
                let expected = index_via_symbols(&params).unwrap().index();
                assert_eq!(graded_pair_index(&gamma, &u).unwrap(), expected);

                // A further conjugation by a grading-preserving unitary
                // diag(e^{i phi} L^2, e^{i psi} L^{-1}).
                let phi = ParameterProfile::real_two_phase(0.3, -1.2)
                    .with_override(1, Complex64::new(2.0, 0.0))
                    .map(|t| Complex64::from_polar(1.0, t.re));
                let psi = ParameterProfile::real_two_phase(-0.5, 0.9)
                    .map(|t| Complex64::from_polar(1.0, t.re));
                let v = BandedOperator::from_blocks(vec![
                    vec![
                        BandedOperator::multiplication(phi)
                            .compose(&crate::lattice::shift(2))
                            .unwrap(),
                        BandedOperator::zero(1),
                    ],
                    vec![
                        BandedOperator::zero(1),
                        BandedOperator::multiplication(psi)
                            .compose(&crate::lattice::shift(-1))
                            .unwrap(),
                    ],
                ])
                .unwrap();
                let v_star = v.adjoint();
                let gamma2 = BandedOperator::product(&[&v_star, &gamma, &v]).unwrap();
                let u2 = BandedOperator::product(&[&v_star, &u, &v]).unwrap();
                assert_eq!(graded_pair_index(&gamma2, &u2).unwrap(), expected);
            }
        }
    }

    #[test]
    fn eta_conjugation_preserves_the_index() {
        let mko = ModelParamsMko::new(
            ParameterProfile::real(0.4),
            ParameterProfile::real(0.0),
            ParameterProfile::real_two_phase(0.2_f64.asin(), -(0.2_f64.asin())),
            ParameterProfile::real_two_phase(-(0.1_f64.asin()), 0.1_f64.asin()),
        )
        .unwrap();
        let (um, eta) = crate::model::mko_to_um(&mko).unwrap();
        assert!(eta.approx_eq(&build_eta(&mko), 0.0));
        let eta_star = eta.adjoint();
        let gamma =
            BandedOperator::product(&[&eta_star, &build_gamma_mko(&mko).unwrap(), &eta]).unwrap();
        let u = BandedOperator::product(&[&eta_star, &build_u_mko(&mko), &eta]).unwrap();
        assert!(gamma.max_coefficient_diff(&build_gamma_m(&um)).unwrap() < 1e-12);
        let phase = PhaseAssignment::canonical(&um.q);
        let eps = build_epsilon(&um, &phase);
        let eps_star = eps.adjoint();
        let gamma = BandedOperator::product(&[&eps_star, &gamma, &eps]).unwrap();
        let u = BandedOperator::product(&[&eps_star, &u, &eps]).unwrap();
        assert_eq!(graded_pair_index(&gamma, &u).unwrap(), 4);
        assert_eq!(index_mko(&mko).unwrap().index(), 4);
    }

    #[test]
    fn strictly_local_index_of_shifts() {
        assert_eq!(strictly_local_index(&crate::lattice::shift(3)).unwrap(), 0);
        // Two-phase: identity on the left, L on the right.
        let left = BandedOperator::multiplication(ParameterProfile::real_two_phase(1.0, 0.0));
        let right = BandedOperator::multiplication(ParameterProfile::real_two_phase(0.0, 1.0))
            .compose(&crate::lattice::shift(1))
            .unwrap();
        let op = left.add(&right).unwrap();
        assert_eq!(strictly_local_index(&op).unwrap(), 1);
    }

    fn fredholm_endpoint() -> impl Strategy<Value = (f64, f64, f64, f64, f64)> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.5..1.5f64, 0.0..TAU, 0.0..TAU)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn numeric_winding_matches_ellipse_rule(
            (p, a, gamma, tq, tb) in fredholm_endpoint(),
            m in prop_oneof![-3i64..=-1, 1i64..=3],
        ) {
            let q = Complex64::from_polar((1.0 - p * p).sqrt(), tq);
            let b = Complex64::from_polar((1.0 - a * a).sqrt(), tb);
            let data = AsymptoticData::new(Endpoint::PlusInfinity, gamma, p, a, q, b).unwrap();
            let diag = EndpointDiagnostics::new(&data);
            prop_assume!(diag.margin.abs() > 1e-3);
            let sym = SymbolFunction::from_asymptotic(&data, m);
            let analytic = winding_analytic(&sym, &data).unwrap();
            let numeric = winding_numeric(&sym, default_samples(m)).unwrap();
            prop_assert_eq!(analytic, numeric.winding);
        }

        #[test]
        fn three_routes_agree_on_two_phase_models(
            (pm, am, gm, tqm, tbm) in fredholm_endpoint(),
            (pp, ap, gp, tqp, tbp) in fredholm_endpoint(),
            m in prop_oneof![-3i64..=-1, 1i64..=3],
        ) {
            let side = |gamma: f64, p: f64, a: f64, tq: f64, tb: f64| PhaseValues {
                gamma,
                p,
                a,
                q: Complex64::from_polar((1.0 - p * p).sqrt(), tq),
                b: Complex64::from_polar((1.0 - a * a).sqrt(), tb),
            };
            let params = ModelParamsUm::two_phase(m, side(gm, pm, am, tqm, tbm), side(gp, pp, ap, tqp, tbp)).unwrap();
            let check = is_fredholm(&params.asymptotic(Endpoint::MinusInfinity), &params.asymptotic(Endpoint::PlusInfinity));
            prop_assume!(check.minus.margin.abs() > 1e-3 && check.plus.margin.abs() > 1e-3);
            let report = index_via_symbols(&params).unwrap();
            prop_assert_eq!(report.wn_plus - report.wn_minus, report.analytic_index);
        }
    }
}
