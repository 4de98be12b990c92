//! Concrete walk operators: the m-step pair `(Gamma_m, U_m)`, the
//! Mochizuki-Kim-Obuse evolution `U_mko`, the conjugation `eta` relating the
//! two, and the diagonalising unitary `epsilon` with the off-diagonal block
//! `Q_eps0` of the imaginary part.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::{shift, BandedOperator};
use crate::profile::{Endpoint, ParameterProfile};

/// Constraint tolerance for `p^2 + |q|^2 = 1` and `a^2 + |b|^2 = 1`.
pub const UNIT_CONSTRAINT_TOL: f64 = 1e-12;

/// Moduli at or below this are treated as an exact zero of `q` or `b` when
/// choosing phases.
pub const PHASE_ZERO_TOL: f64 = 1e-14;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `arg w` in `[0, 2pi)`, with the convention `arg 0 = 0`.
pub fn principal_arg(w: Complex64) -> f64 {
    if w.norm() <= PHASE_ZERO_TOL {
        return 0.0;
    }
    let t = w.arg();
    let t = if t < 0.0 { t + TAU } else { t };
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Parameters of the m-step walk: `gamma, p, a` real, `q, b` complex.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParamsUm {
    pub m: i64,
    pub gamma: ParameterProfile,
    pub p: ParameterProfile,
    pub a: ParameterProfile,
    pub q: ParameterProfile,
    pub b: ParameterProfile,
}

/// Values of the five coefficient sequences on one side of a two-phase model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseValues {
    pub gamma: f64,
    pub p: f64,
    pub a: f64,
    pub q: Complex64,
    pub b: Complex64,
}

impl PhaseValues {
    /// `q = sqrt(1 - p^2)` and `b = sqrt(1 - a^2)`, both real and nonnegative.
    pub fn with_real_coins(gamma: f64, p: f64, a: f64) -> Self {
        PhaseValues {
            gamma,
            p,
            a,
            q: cplx((1.0 - p * p).max(0.0).sqrt()),
            b: cplx((1.0 - a * a).max(0.0).sqrt()),
        }
    }
}

impl ModelParamsUm {
    pub fn new(
        m: i64,
        gamma: ParameterProfile,
        p: ParameterProfile,
        a: ParameterProfile,
        q: ParameterProfile,
        b: ParameterProfile,
    ) -> Result<Self> {
        let params = Self::new_unchecked(m, gamma, p, a, q, b);
        params.validate()?;
        Ok(params)
    }

    /// Skips validation. Only meant for negative controls.
    pub fn new_unchecked(
        m: i64,
        gamma: ParameterProfile,
        p: ParameterProfile,
        a: ParameterProfile,
        q: ParameterProfile,
        b: ParameterProfile,
    ) -> Self {
        ModelParamsUm {
            m,
            gamma,
            p,
            a,
            q,
            b,
        }
    }

    /// Two-phase model: constant `minus` on `x < 0`, constant `plus` on `x >= 0`.
    pub fn two_phase(m: i64, minus: PhaseValues, plus: PhaseValues) -> Result<Self> {
        Self::new(
            m,
            ParameterProfile::real_two_phase(minus.gamma, plus.gamma),
            ParameterProfile::real_two_phase(minus.p, plus.p),
            ParameterProfile::real_two_phase(minus.a, plus.a),
            ParameterProfile::two_phase(minus.q, plus.q),
            ParameterProfile::two_phase(minus.b, plus.b),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParams("m must be nonzero".into()));
        }
        for (name, profile) in [("gamma", &self.gamma), ("p", &self.p), ("a", &self.a)] {
            if !profile.is_real() {
                return Err(Error::InvalidParams(format!("{name} must be real-valued")));
            }
        }
        check_unit_pair("p^2 + |q|^2", &self.p, &self.q)?;
        check_unit_pair("a^2 + |b|^2", &self.a, &self.b)?;
        Ok(())
    }

    pub fn asymptotic(&self, star: Endpoint) -> AsymptoticData {
        AsymptoticData::from_values(
            star,
            self.gamma.limit(star).re,
            self.p.limit(star).re,
            self.a.limit(star).re,
            self.q.limit(star),
            self.b.limit(star),
        )
    }

    /// True when `gamma` vanishes identically, i.e. `U_m` is unitary.
    pub fn is_unitary(&self) -> bool {
        self.gamma.values().all(|(_, v)| v == cplx(0.0))
    }
}

fn check_unit_pair(label: &str, real: &ParameterProfile, cx: &ParameterProfile) -> Result<()> {
    let defect = real.zip_with(cx, |r, c| cplx(r.re * r.re + c.norm_sqr() - 1.0));
    for (site, v) in defect.values() {
        if v.re.abs() > UNIT_CONSTRAINT_TOL {
            let at = site.map_or_else(|| "a limit".to_string(), |x| format!("site {x}"));
            return Err(Error::InvalidParams(format!(
                "{label} deviates from 1 by {:e} at {at}",
                v.re
            )));
        }
    }
    Ok(())
}

/// Parameters of the Mochizuki-Kim-Obuse walk; all four sequences are real.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParamsMko {
    pub gamma: ParameterProfile,
    pub phi: ParameterProfile,
    pub theta1: ParameterProfile,
    pub theta2: ParameterProfile,
}

impl ModelParamsMko {
    pub fn new(
        gamma: ParameterProfile,
        phi: ParameterProfile,
        theta1: ParameterProfile,
        theta2: ParameterProfile,
    ) -> Result<Self> {
        for (name, profile) in [
            ("gamma", &gamma),
            ("phi", &phi),
            ("theta1", &theta1),
            ("theta2", &theta2),
        ] {
            if !profile.is_real() {
                return Err(Error::InvalidParams(format!("{name} must be real-valued")));
            }
        }
        Ok(ModelParamsMko {
            gamma,
            phi,
            theta1,
            theta2,
        })
    }
}

/// Limit values of the m-step parameters at one endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticData {
    pub star: Endpoint,
    pub gamma: f64,
    pub p: f64,
    pub a: f64,
    pub q: Complex64,
    pub b: Complex64,
    /// `arg q` in `[0, 2pi)`, zero when `q = 0`.
    pub theta: f64,
    /// `arg b` in `[0, 2pi)`, zero when `b = 0`.
    pub theta_prime: f64,
}

impl AsymptoticData {
    pub fn new(
        star: Endpoint,
        gamma: f64,
        p: f64,
        a: f64,
        q: Complex64,
        b: Complex64,
    ) -> Result<Self> {
        let data = Self::from_values(star, gamma, p, a, q, b);
        if (p * p + q.norm_sqr() - 1.0).abs() > UNIT_CONSTRAINT_TOL {
            return Err(Error::InvalidParams(format!("p^2 + |q|^2 != 1 at {star}")));
        }
        if (a * a + b.norm_sqr() - 1.0).abs() > UNIT_CONSTRAINT_TOL {
            return Err(Error::InvalidParams(format!("a^2 + |b|^2 != 1 at {star}")));
        }
        Ok(data)
    }

    fn from_values(star: Endpoint, gamma: f64, p: f64, a: f64, q: Complex64, b: Complex64) -> Self {
        AsymptoticData {
            star,
            gamma,
            p,
            a,
            q,
            b,
            theta: principal_arg(q),
            theta_prime: principal_arg(b),
        }
    }

    /// Real-coin data: `q = sqrt(1 - p^2)`, `b = sqrt(1 - a^2)`.
    pub fn with_real_coins(star: Endpoint, gamma: f64, p: f64, a: f64) -> Self {
        let v = PhaseValues::with_real_coins(gamma, p, a);
        Self::from_values(star, gamma, p, a, v.q, v.b)
    }
}

/// A choice of `theta(x)` with `q(x) = |q(x)| e^{i theta(x)}` at every site.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAssignment {
    theta: ParameterProfile,
}

impl PhaseAssignment {
    /// `theta = arg q` in `[0, 2pi)`, and `0` wherever `q` vanishes.
    pub fn canonical(q: &ParameterProfile) -> Self {
        PhaseAssignment {
            theta: q.map(|v| cplx(principal_arg(v))),
        }
    }

    /// Like [`canonical`](Self::canonical), but every site where `q` vanishes
    /// (including a vanishing tail) receives an arbitrary phase.
    pub fn randomized<R: Rng + ?Sized>(q: &ParameterProfile, rng: &mut R) -> Self {
        let canonical = Self::canonical(q).theta;
        let zero_at = |v: Complex64| v.norm() <= PHASE_ZERO_TOL;
        let mut draw = |v: Complex64, fallback: f64| {
            if zero_at(v) {
                rng.gen_range(0.0..TAU)
            } else {
                fallback
            }
        };
        let left = draw(q.left_limit(), canonical.left_limit().re);
        let right = draw(q.right_limit(), canonical.right_limit().re);
        let (lo, hi) = q.span();
        let sites: Vec<(i64, f64)> = (lo - 6..=hi + 6)
            .map(|x| (x, draw(q.value(x), canonical.value(x).re)))
            .collect();
        let theta = ParameterProfile::from_fn(cplx(left), cplx(right), lo - 6, hi + 6, |x| {
            cplx(sites[(x - (lo - 6)) as usize].1)
        });
        PhaseAssignment { theta }
    }

    pub fn from_profile(q: &ParameterProfile, theta: ParameterProfile) -> Result<Self> {
        if !theta.is_real() {
            return Err(Error::InvalidParams("theta must be real-valued".into()));
        }
        let defect = q.zip_with(&theta, |qv, t| {
            cplx((qv - Complex64::from_polar(qv.norm(), t.re)).norm())
        });
        for (site, v) in defect.values() {
            if v.re > UNIT_CONSTRAINT_TOL {
                return Err(Error::PhaseMismatch {
                    site: site.unwrap_or(i64::MAX),
                    residual: v.re,
                });
            }
        }
        Ok(PhaseAssignment { theta })
    }

    pub fn theta(&self) -> &ParameterProfile {
        &self.theta
    }
}

/// Pointwise entries of the coin `C = [[alpha1, beta^*], [beta, alpha2]]`.
#[derive(Clone, Debug)]
pub struct CoinEntries {
    pub alpha1: ParameterProfile,
    pub beta: ParameterProfile,
    pub alpha2: ParameterProfile,
}

/// `alpha1 = e^{-2 gamma(.+1)} a`, `beta = e^{gamma - gamma(.+1)} b`,
/// `alpha2 = -e^{2 gamma} a`.
pub fn coin_entries(params: &ModelParamsUm) -> CoinEntries {
    let g = &params.gamma;
    let g_next = g.shifted(1);
    let alpha1 = &g_next.map(|v| (-2.0 * v).exp()) * &params.a;
    let beta = &(g - &g_next).map(|v| v.exp()) * &params.b;
    let alpha2 = &g.map(|v| -(2.0 * v).exp()) * &params.a;
    CoinEntries {
        alpha1,
        beta,
        alpha2,
    }
}

fn mul(profile: ParameterProfile) -> BandedOperator {
    BandedOperator::multiplication(profile)
}

fn then(a: BandedOperator, b: BandedOperator) -> BandedOperator {
    a.compose(&b).expect("scalar operators")
}

/// `Gamma_m = [[p, q L^m], [L^{-m} q^*, -p(. - m)]]`.
pub fn build_gamma_m(params: &ModelParamsUm) -> BandedOperator {
    let m = params.m;
    BandedOperator::from_blocks(vec![
        vec![mul(params.p.clone()), then(mul(params.q.clone()), shift(m))],
        vec![
            then(shift(-m), mul(params.q.conj())),
            mul(-&params.p.shifted(-m)),
        ],
    ])
    .expect("2x2 scalar blocks")
}

/// The self-adjoint coin factor `C` with `U_m = Gamma_m C`.
pub fn build_coin_c(params: &ModelParamsUm) -> BandedOperator {
    let CoinEntries {
        alpha1,
        beta,
        alpha2,
    } = coin_entries(params);
    BandedOperator::from_blocks(vec![
        vec![mul(alpha1), mul(beta.conj())],
        vec![mul(beta), mul(alpha2)],
    ])
    .expect("2x2 scalar blocks")
}

pub fn build_u_m(params: &ModelParamsUm) -> BandedOperator {
    build_gamma_m(params)
        .compose(&build_coin_c(params))
        .expect("both factors are 2x2")
}

fn shift_pair() -> BandedOperator {
    BandedOperator::from_blocks(vec![
        vec![shift(1), BandedOperator::zero(1)],
        vec![BandedOperator::zero(1), shift(-1)],
    ])
    .expect("2x2 scalar blocks")
}

fn rotation_coin(theta: &ParameterProfile) -> BandedOperator {
    let cos = theta.map(|t| cplx(t.re.cos()));
    let isin = theta.map(|t| I * t.re.sin());
    BandedOperator::from_blocks(vec![
        vec![mul(cos.clone()), mul(isin.clone())],
        vec![mul(isin), mul(cos)],
    ])
    .expect("2x2 scalar blocks")
}

fn pauli_y() -> BandedOperator {
    let zero = cplx(0.0);
    BandedOperator::constant_matrix(&[&[zero, -I], &[I, zero]])
}

/// `U_mko = S G Phi C_2 S G^{-1} Phi C_1`, composed factor by factor.
pub fn build_u_mko(params: &ModelParamsMko) -> BandedOperator {
    let g = &params.gamma;
    let g_next = g.shifted(1);
    let phi = &params.phi;
    let phi_next = phi.shifted(1);
    let s = shift_pair();
    let gain = BandedOperator::diagonal(vec![g.map(|v| v.exp()), g_next.map(|v| (-v).exp())]);
    let gain_inv = BandedOperator::diagonal(vec![g.map(|v| (-v).exp()), g_next.map(|v| v.exp())]);
    let phase = BandedOperator::diagonal(vec![
        phi.map(|v| (I * v).exp()),
        phi_next.map(|v| (-I * v).exp()),
    ]);
    let c1 = rotation_coin(&params.theta1);
    let c2 = rotation_coin(&params.theta2);
    BandedOperator::product(&[&s, &gain, &phase, &c2, &s, &gain_inv, &phase, &c1])
        .expect("all factors are 2x2")
}

/// Substituted m = 2 parameters and the unitary `eta = (sigma_2 C_1)(S sigma_2)`
/// with `eta^* U_mko eta = U_2`.
pub fn mko_to_um(params: &ModelParamsMko) -> Result<(ModelParamsUm, BandedOperator)> {
    let t1_next = params.theta1.shifted(1);
    let p = t1_next.map(|t| cplx(-t.re.sin()));
    let q = t1_next.map(|t| -I * t.re.cos());
    let a = params.theta2.map(|t| cplx(t.re.sin()));
    let phase_sum = &params.phi + &params.phi.shifted(1);
    let b = params
        .theta2
        .zip_with(&phase_sum, |t, s| I * t.re.cos() * (I * s.re).exp());
    let um = ModelParamsUm::new(2, params.gamma.clone(), p, a, q, b)?;
    Ok((um, build_eta(params)))
}

pub fn build_eta(params: &ModelParamsMko) -> BandedOperator {
    let sigma = pauli_y();
    let left = sigma.compose(&rotation_coin(&params.theta1)).expect("2x2");
    let right = shift_pair().compose(&sigma).expect("2x2");
    left.compose(&right).expect("2x2")
}

/// `Gamma_mko = eta Gamma_2 eta^*`.
pub fn build_gamma_mko(params: &ModelParamsMko) -> Result<BandedOperator> {
    let (um, eta) = mko_to_um(params)?;
    BandedOperator::product(&[&eta, &build_gamma_m(&um), &eta.adjoint()])
}

fn p_plus_minus(params: &ModelParamsUm) -> (ParameterProfile, ParameterProfile) {
    let p_plus = params.p.map(|v| cplx((1.0 + v.re).max(0.0).sqrt()));
    let p_minus = params.p.map(|v| cplx((1.0 - v.re).max(0.0).sqrt()));
    (p_plus, p_minus)
}

/// `epsilon = (1/sqrt 2) diag(1, L^{-m} e^{-i theta}) [[p+, -p-], [p-, p+]]`,
/// with `p+- = sqrt(1 +- p)`.
pub fn build_epsilon(params: &ModelParamsUm, phase: &PhaseAssignment) -> BandedOperator {
    let (p_plus, p_minus) = p_plus_minus(params);
    let s = cplx(FRAC_1_SQRT_2);
    let unphase = phase.theta().map(|t| (-I * t.re).exp());
    BandedOperator::from_blocks(vec![
        vec![mul(p_plus.scale(s)), mul(p_minus.scale(-s))],
        vec![
            then(shift(-params.m), mul((&unphase * &p_minus).scale(s))),
            then(shift(-params.m), mul((&unphase * &p_plus).scale(s))),
        ],
    ])
    .expect("2x2 scalar blocks")
}

/// Lower-left block `Q_eps0` of `epsilon^* Q epsilon`, from
/// `-2i Q_eps0 = p+ e^{i theta} L^m beta p+ - p- beta^* L^{-m} e^{-i theta} p-
///  - |q| (alpha1 - alpha2(. + m))`.
pub fn build_q_epsilon0(params: &ModelParamsUm, phase: &PhaseAssignment) -> BandedOperator {
    let m = params.m;
    let (p_plus, p_minus) = p_plus_minus(params);
    let CoinEntries {
        alpha1,
        beta,
        alpha2,
    } = coin_entries(params);
    let e_theta = phase.theta().map(|t| (I * t.re).exp());
    let leading = then(
        then(mul(&p_plus * &e_theta), shift(m)),
        mul(&beta * &p_plus),
    );
    let trailing = then(
        then(mul(&p_minus * &beta.conj()), shift(-m)),
        mul(&e_theta.conj() * &p_minus),
    );
    let q_abs = params.q.map(|v| cplx(v.norm()));
    let diagonal = mul(&q_abs * &(&alpha1 - &alpha2.shifted(m)));
    let minus_two_i_q = leading
        .sub(&trailing)
        .and_then(|op| op.sub(&diagonal))
        .expect("scalar operators");
    // Q = (-2i Q) / (-2i) = (i / 2) (-2i Q)
    minus_two_i_q.scale(Complex64::new(0.0, 0.5))
}

/// Sequences `theta_+, theta_-`: `theta_+-(x) = theta(x)` when
/// `p(star(x)) = +-1` and `0` otherwise, with `star(x) = +inf` for `x >= 0`.
pub fn build_theta_pm(
    params: &ModelParamsUm,
    phase: &PhaseAssignment,
) -> (ParameterProfile, ParameterProfile) {
    let pinned = |star: Endpoint, sign: f64| {
        let p = params.p.limit(star).re;
        params.q.limit(star).norm() <= PHASE_ZERO_TOL && p * sign > 0.0
    };
    let theta = phase.theta();
    let select = |sign: f64| {
        let (lo, hi) = theta.span();
        let pick = |x: i64| {
            if pinned(Endpoint::of_site(x), sign) {
                theta.value(x)
            } else {
                cplx(0.0)
            }
        };
        let left = if pinned(Endpoint::MinusInfinity, sign) {
            theta.left_limit()
        } else {
            cplx(0.0)
        };
        let right = if pinned(Endpoint::PlusInfinity, sign) {
            theta.right_limit()
        } else {
            cplx(0.0)
        };
        ParameterProfile::from_fn(left, right, lo, hi, pick)
    };
    (select(1.0), select(-1.0))
}

/// `e^{-i theta_+} Q_eps0 e^{i theta_-}`: same Fredholm index as `Q_eps0`,
/// with coefficient limits independent of how `theta` was chosen where `q = 0`.
pub fn rephased_q_epsilon0(params: &ModelParamsUm, phase: &PhaseAssignment) -> BandedOperator {
    let (theta_plus, theta_minus) = build_theta_pm(params, phase);
    let left = mul(theta_plus.map(|t| (-I * t.re).exp()));
    let right = mul(theta_minus.map(|t| (I * t.re).exp()));
    BandedOperator::product(&[&left, &build_q_epsilon0(params, phase), &right])
        .expect("scalar operators")
}
