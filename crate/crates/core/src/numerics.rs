//! Finite-section checks: dense residuals of the structural identities,
//! truncated spectra, near-kernel witnesses for `Q_eps0`, and the
//! bound-state count for unitary instances.
//!
//! Square finite sections always have index zero, so nothing here measures a
//! signed index. Near-kernel counts are witnesses only; the signed index comes
//! from [`crate::index`].

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigVals, EigValsh, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::index_via_symbols;
use crate::lattice::{dagger, BandedOperator, FiniteSection};
use crate::model::{
    build_coin_c, build_gamma_m, build_gamma_mko, build_q_epsilon0, build_u_m, build_u_mko,
    mko_to_um, ModelParamsMko, ModelParamsUm, PhaseAssignment,
};
use crate::spectrum::SigmaEss;

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
pub const DEFAULT_KERNEL_THRESHOLD: f64 = 1e-6;
/// Eigenvalues this close to `+-1` count as bound states.
pub const NEAR_UNIT_TOL: f64 = 1e-6;
/// Largest half-width handed to the dense eigensolver.
pub const MAX_DENSE_WINDOW: i64 = 2000;
/// Eigenvalue-to-set distance used when comparing truncated spectra with
/// the essential spectrum.
pub const CLUSTER_TOL: f64 = 0.05;

fn linalg(e: ndarray_linalg::error::LinalgError) -> Error {
    Error::Linalg(e.to_string())
}

/// Largest interior deviation between the dense product of the factors'
/// sections and the section of `target`. Rows closer to the edge than the
/// summed bandwidths of all factors but the last are skipped.
pub fn section_product_residual(
    factors: &[&BandedOperator],
    target: &BandedOperator,
    half_width: i64,
) -> Result<f64> {
    let (last, rest) = factors.split_last().expect("at least one factor");
    let margin: i64 = rest.iter().map(|f| f.bandwidth() as i64).sum();
    let needed = factors
        .iter()
        .map(|f| f.bandwidth() as i64)
        .chain([target.bandwidth() as i64, margin + 1])
        .max()
        .unwrap_or(0);
    if half_width < needed {
        return Err(Error::WindowTooSmall {
            window: half_width,
            required: needed,
        });
    }
    let want = target.finite_section(half_width)?;
    let mut product = last.finite_section(half_width)?.matrix;
    for f in rest.iter().rev() {
        product = f.finite_section(half_width)?.matrix.dot(&product);
    }
    Ok(FiniteSection::interior_max_diff(
        &product,
        &want.matrix,
        &want,
        margin,
    ))
}

/// A named residual and the tolerance it is held to.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual < self.tol
    }

    fn into_result(self) -> Result<f64> {
        if self.passed() {
            Ok(self.residual)
        } else {
            Err(Error::ResidualTooLarge {
                check: self.name,
                residual: self.residual,
                tol: self.tol,
            })
        }
    }
}

fn require_window(params_m: i64, half_width: i64, factor: i64) -> Result<()> {
    let required = factor * params_m.abs();
    if half_width < required {
        return Err(Error::WindowTooSmall {
            window: half_width,
            required,
        });
    }
    Ok(())
}

fn chiral_check(gamma: &BandedOperator, u: &BandedOperator, n: i64, tol: f64) -> Result<Check> {
    Ok(Check {
        name: "chiral",
        residual: section_product_residual(&[gamma, u, gamma], &u.adjoint(), n)?,
        tol,
    })
}

fn involution_check(gamma: &BandedOperator, n: i64, tol: f64) -> Result<Check> {
    Ok(Check {
        name: "involution",
        residual: section_product_residual(&[gamma, gamma], &BandedOperator::identity(2), n)?,
        tol,
    })
}

fn unitarity_check(u: &BandedOperator, n: i64, tol: f64) -> Result<Check> {
    Ok(Check {
        name: "unitarity",
        residual: section_product_residual(&[&u.adjoint(), u], &BandedOperator::identity(2), n)?,
        tol,
    })
}

/// Interior residual of `U^* = Gamma U Gamma`; an error when it reaches `tol`.
pub fn verify_chiral(params: &ModelParamsUm, half_width: i64, tol: f64) -> Result<f64> {
    require_window(params.m, half_width, 4)?;
    chiral_check(&build_gamma_m(params), &build_u_m(params), half_width, tol)?.into_result()
}

pub fn verify_chiral_mko(params: &ModelParamsMko, half_width: i64, tol: f64) -> Result<f64> {
    require_window(2, half_width, 4)?;
    chiral_check(
        &build_gamma_mko(params)?,
        &build_u_mko(params),
        half_width,
        tol,
    )?
    .into_result()
}

/// The coin with its gain stripped, `D^{-1} C D^{-1}` with
/// `D = diag(e^{-gamma(.+1)}, e^{gamma})`, must square to the identity.
fn coin_check(params: &ModelParamsUm, n: i64, tol: f64) -> Result<Check> {
    let g = &params.gamma;
    let d_inv =
        BandedOperator::diagonal(vec![g.shifted(1).map(|v| v.exp()), g.map(|v| (-v).exp())]);
    let bare = BandedOperator::product(&[&d_inv, &build_coin_c(params), &d_inv])?;
    Ok(Check {
        name: "coin",
        residual: section_product_residual(&[&bare, &bare], &BandedOperator::identity(2), n)?,
        tol,
    })
}

/// Residual checks for `(Gamma_m, U_m)`: chirality, `Gamma^2 = 1`, the bare
/// coin, and unitarity when the gain vanishes.
pub fn residual_checks(params: &ModelParamsUm, half_width: i64, tol: f64) -> Result<Vec<Check>> {
    require_window(params.m, half_width, 4)?;
    let gamma = build_gamma_m(params);
    let u = build_u_m(params);
    let mut checks = vec![
        chiral_check(&gamma, &u, half_width, tol)?,
        involution_check(&gamma, half_width, tol)?,
        coin_check(params, half_width, tol)?,
    ];
    if params.is_unitary() {
        checks.push(unitarity_check(&u, half_width, tol)?);
    }
    Ok(checks)
}

/// Residual checks for `(Gamma_mko, U_mko)`, including the equivalence
/// `eta^* U_mko eta = U_2`.
pub fn residual_checks_mko(
    params: &ModelParamsMko,
    half_width: i64,
    tol: f64,
) -> Result<Vec<Check>> {
    require_window(2, half_width, 4)?;
    let gamma = build_gamma_mko(params)?;
    let u = build_u_mko(params);
    let (um, eta) = mko_to_um(params)?;
    let mut checks = vec![
        chiral_check(&gamma, &u, half_width, tol)?,
        involution_check(&gamma, half_width, tol)?,
        Check {
            name: "equivalence",
            residual: section_product_residual(
                &[&eta.adjoint(), &u, &eta],
                &build_u_m(&um),
                half_width,
            )?,
            tol,
        },
    ];
    if params.gamma.is_zero() {
        checks.push(unitarity_check(&u, half_width, tol)?);
    }
    Ok(checks)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedEigenvalue {
    pub lambda: Complex64,
    /// Share of the eigenvector's l2 mass within the edge band.
    pub edge_mass: f64,
    pub boundary_affected: bool,
}

/// Eigenvalues of the section of `op`, each tagged by how much of its right
/// eigenvector sits within `edge_band` sites of the window edge.
pub fn section_spectrum(
    op: &BandedOperator,
    half_width: i64,
    edge_band: i64,
) -> Result<Vec<TruncatedEigenvalue>> {
    if half_width > MAX_DENSE_WINDOW {
        return Err(Error::WindowTooLarge {
            window: half_width,
            max: MAX_DENSE_WINDOW,
        });
    }
    let section = op.finite_section(half_width)?;
    let (values, vectors) = section.matrix.eig().map_err(linalg)?;
    let edge_rows: Vec<bool> = (0..section.dim())
        .map(|r| section.edge_distance(r) < edge_band)
        .collect();
    Ok(values
        .iter()
        .zip(vectors.columns())
        .map(|(&lambda, v)| {
            let total: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            let edge: f64 = v
                .iter()
                .zip(&edge_rows)
                .filter(|(_, &e)| e)
                .map(|(c, _)| c.norm_sqr())
                .sum();
            let edge_mass = if total > 0.0 { edge / total } else { 0.0 };
            TruncatedEigenvalue {
                lambda,
                edge_mass,
                boundary_affected: edge_mass >= 0.5,
            }
        })
        .collect())
}

/// Spectrum of the section of `U_m`; the edge band is `2|m|` sites.
pub fn truncated_spectrum(
    params: &ModelParamsUm,
    half_width: i64,
) -> Result<Vec<TruncatedEigenvalue>> {
    section_spectrum(&build_u_m(params), half_width, 2 * params.m.abs())
}

pub fn truncated_spectrum_mko(
    params: &ModelParamsMko,
    half_width: i64,
) -> Result<Vec<TruncatedEigenvalue>> {
    section_spectrum(&build_u_mko(params), half_width, 4)
}

/// Eigenvalues only, without localisation data.
pub fn section_eigenvalues(op: &BandedOperator, half_width: i64) -> Result<Array1<Complex64>> {
    op.finite_section(half_width)?
        .matrix
        .eigvals()
        .map_err(linalg)
}

/// Comparison of a truncated spectrum with the essential spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterReport {
    pub tol: f64,
    /// Largest distance from a point of `sigma_ess` to the nearest eigenvalue.
    pub coverage: f64,
    /// Interior eigenvalues farther than `tol` from `sigma_ess`.
    pub separated: Vec<Complex64>,
    /// Largest distance from an interior eigenvalue to `sigma_ess`, ignoring
    /// the separated ones.
    pub bulk_distance: f64,
}

pub fn cluster_report(
    spectrum: &[TruncatedEigenvalue],
    sigma: &SigmaEss,
    tol: f64,
) -> ClusterReport {
    let interior: Vec<Complex64> = spectrum
        .iter()
        .filter(|e| !e.boundary_affected)
        .map(|e| e.lambda)
        .collect();
    let mut separated = Vec::new();
    let mut bulk_distance: f64 = 0.0;
    for &z in &interior {
        let d = sigma.distance(z);
        if d > tol {
            separated.push(z);
        } else {
            bulk_distance = bulk_distance.max(d);
        }
    }
    let mut coverage: f64 = 0.0;
    for ep in sigma.endpoints() {
        for piece in ep.set.sample(400) {
            for w in piece {
                let d = interior
                    .iter()
                    .map(|&z| (z - w).norm())
                    .fold(f64::INFINITY, f64::min);
                coverage = coverage.max(d);
            }
        }
    }
    ClusterReport {
        tol,
        coverage,
        separated,
        bulk_distance,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelWitness {
    pub half_width: i64,
    pub threshold: f64,
    /// `(k, sigma_k)` for singular values below the threshold, ascending, with
    /// `k` counted from the smallest.
    pub small: Vec<(usize, f64)>,
    pub smallest: f64,
}

impl KernelWitness {
    pub fn count(&self) -> usize {
        self.small.len()
    }
}

/// Singular values of the section of `Q_eps0` below `threshold`.
pub fn kernel_witness(
    params: &ModelParamsUm,
    half_width: i64,
    threshold: f64,
) -> Result<KernelWitness> {
    require_window(params.m, half_width, 8)?;
    let q0 = build_q_epsilon0(params, &PhaseAssignment::canonical(&params.q));
    let section = q0.finite_section(half_width)?;
    let (_, sigma, _) = section.matrix.svd(false, false).map_err(linalg)?;
    let mut values: Vec<f64> = sigma.to_vec();
    values.sort_by(f64::total_cmp);
    Ok(KernelWitness {
        half_width,
        threshold,
        smallest: values.first().copied().unwrap_or(f64::INFINITY),
        small: values
            .iter()
            .copied()
            .enumerate()
            .take_while(|(_, s)| *s < threshold)
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundStateReport {
    pub half_width: i64,
    pub index_abs: u64,
    pub near_plus: usize,
    pub near_minus: usize,
    /// Near-`+-1` eigenvalues dropped because they sit at the window edge.
    pub boundary_excluded: usize,
}

impl BoundStateReport {
    pub fn count(&self) -> usize {
        self.near_plus + self.near_minus
    }

    /// `|ind| <= dim ker(U - 1) + dim ker(U + 1)`, estimated on the section.
    pub fn satisfied(&self) -> bool {
        self.count() as u64 >= self.index_abs
    }
}

pub fn bound_states_from_spectrum(
    spectrum: &[TruncatedEigenvalue],
    index_abs: u64,
    half_width: i64,
) -> BoundStateReport {
    let mut report = BoundStateReport {
        half_width,
        index_abs,
        near_plus: 0,
        near_minus: 0,
        boundary_excluded: 0,
    };
    for e in spectrum {
        let plus = (e.lambda - 1.0).norm() <= NEAR_UNIT_TOL;
        let minus = (e.lambda + 1.0).norm() <= NEAR_UNIT_TOL;
        if !(plus || minus) {
            continue;
        }
        if e.boundary_affected {
            report.boundary_excluded += 1;
        } else if plus {
            report.near_plus += 1;
        } else {
            report.near_minus += 1;
        }
    }
    report
}

/// Bound-state count for a unitary instance.
pub fn bound_state_check(params: &ModelParamsUm, half_width: i64) -> Result<BoundStateReport> {
    if !params.is_unitary() {
        return Err(Error::NotUnitary);
    }
    let index_abs = index_via_symbols(params)?.index().unsigned_abs();
    let spectrum = truncated_spectrum(params, half_width)?;
    Ok(bound_states_from_spectrum(&spectrum, index_abs, half_width))
}

/// Consistency of `sigma_ess(Q) = {Im z : z in sigma_ess(U)}` with the
/// spectrum of the Hermitian section of `Q = (U - U^*) / 2i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImProjectionReport {
    pub half_width: i64,
    pub tol: f64,
    /// Largest distance from a point of the projected set to an eigenvalue.
    pub coverage: f64,
    /// Eigenvalues farther than `tol` from the projected set.
    pub outliers: usize,
    pub outlier_allowance: usize,
    /// Hausdorff distance between `Im` of the symbol cloud and the projected set.
    pub cloud_distance: f64,
}

impl ImProjectionReport {
    pub fn passed(&self) -> bool {
        self.coverage <= self.tol
            && self.outliers <= self.outlier_allowance
            && self.cloud_distance <= self.tol
    }
}

pub const IM_PROJECTION_TOL: f64 = 0.02;

fn interval_distance(x: f64, intervals: &[(f64, f64)]) -> f64 {
    intervals
        .iter()
        .map(|&(lo, hi)| {
            if x < lo {
                lo - x
            } else if x > hi {
                x - hi
            } else {
                0.0
            }
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn im_projection_check(
    params: &ModelParamsUm,
    sigma: &SigmaEss,
    half_width: i64,
) -> Result<ImProjectionReport> {
    if !params.is_unitary() {
        return Err(Error::NotUnitary);
    }
    let q = build_u_m(params).imag_part();
    let section = q.finite_section(half_width)?;
    let eigs = section.matrix.eigvalsh(UPLO::Lower).map_err(linalg)?;
    let intervals: Vec<(f64, f64)> = sigma
        .endpoints()
        .iter()
        .flat_map(|ep| ep.set.imaginary_projection())
        .collect();

    let outliers = eigs
        .iter()
        .filter(|&&x| interval_distance(x, &intervals) > IM_PROJECTION_TOL)
        .count();
    let mut coverage: f64 = 0.0;
    for &(lo, hi) in &intervals {
        for k in 0..=400 {
            let x = lo + (hi - lo) * k as f64 / 400.0;
            let d = eigs
                .iter()
                .map(|&e| (e - x).abs())
                .fold(f64::INFINITY, f64::min);
            coverage = coverage.max(d);
        }
    }
    let cloud: Vec<f64> = sigma
        .endpoints()
        .iter()
        .flat_map(|ep| ep.cloud.iter().map(|c| c.lambda.im))
        .collect();
    let mut cloud_distance = cloud
        .iter()
        .map(|&x| interval_distance(x, &intervals))
        .fold(0.0, f64::max);
    for &(lo, hi) in &intervals {
        for k in 0..=400 {
            let x = lo + (hi - lo) * k as f64 / 400.0;
            let d = cloud
                .iter()
                .map(|&c| (c - x).abs())
                .fold(f64::INFINITY, f64::min);
            cloud_distance = cloud_distance.max(d);
        }
    }
    Ok(ImProjectionReport {
        half_width,
        tol: IM_PROJECTION_TOL,
        coverage,
        outliers,
        outlier_allowance: 8 * params.m.unsigned_abs() as usize + 8,
        cloud_distance,
    })
}

/// Everything the `verify` command reports.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub half_width: i64,
    pub checks: Vec<Check>,
    pub truncated_spectrum: Vec<TruncatedEigenvalue>,
    pub kernel: Option<KernelWitness>,
    pub bound_states: Option<BoundStateReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
            && self
                .bound_states
                .as_ref()
                .map_or(true, BoundStateReport::satisfied)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = self
            .checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect();
        if self.bound_states.as_ref().is_some_and(|b| !b.satisfied()) {
            out.push("bound-states");
        }
        out
    }
}

/// Residual suite plus truncated spectrum, kernel witness (Fredholm
/// instances) and bound-state count (unitary instances).
pub fn verify(
    params: &ModelParamsUm,
    half_width: i64,
    tol: f64,
    threshold: f64,
) -> Result<VerificationReport> {
    let checks = residual_checks(params, half_width, tol)?;
    let spectrum = truncated_spectrum(params, half_width)?;
    let index = index_via_symbols(params).ok().map(|r| r.index());
    let kernel = match index {
        Some(_) if half_width >= 8 * params.m.abs() => {
            Some(kernel_witness(params, half_width, threshold)?)
        }
        _ => None,
    };
    let bound_states = match index {
        Some(nu) if params.is_unitary() => Some(bound_states_from_spectrum(
            &spectrum,
            nu.unsigned_abs(),
            half_width,
        )),
        _ => None,
    };
    Ok(VerificationReport {
        half_width,
        checks,
        truncated_spectrum: spectrum,
        kernel,
        bound_states,
    })
}

pub fn verify_mko(
    params: &ModelParamsMko,
    half_width: i64,
    tol: f64,
    threshold: f64,
) -> Result<VerificationReport> {
    let checks = residual_checks_mko(params, half_width, tol)?;
    let spectrum = truncated_spectrum_mko(params, half_width)?;
    let (um, _) = mko_to_um(params)?;
    let index = index_via_symbols(&um).ok().map(|r| r.index());
    let kernel = match index {
        Some(_) if half_width >= 16 => Some(kernel_witness(&um, half_width, threshold)?),
        _ => None,
    };
    let bound_states = match index {
        Some(nu) if um.is_unitary() => Some(bound_states_from_spectrum(
            &spectrum,
            nu.unsigned_abs(),
            half_width,
        )),
        _ => None,
    };
    Ok(VerificationReport {
        half_width,
        checks,
        truncated_spectrum: spectrum,
        kernel,
        bound_states,
    })
}

/// Dense conjugate-transpose residual `max |A - A^*|` of a matrix.
pub fn hermiticity_defect(m: &Array2<Complex64>) -> f64 {
    (m - &dagger(m))
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Parameters with a deliberately broken hopping constraint
/// `p^2 + |q|^2 = 1.01`, for negative controls.
pub fn corrupt_hopping(params: &ModelParamsUm) -> ModelParamsUm {
    let scale = Complex64::new((1.01f64).sqrt(), 0.0);
    let p = params.p.scale(scale);
    let q = params.q.scale(scale);
    ModelParamsUm::new_unchecked(
        params.m,
        params.gamma.clone(),
        p,
        params.a.clone(),
        q,
        params.b.clone(),
    )
}

/// Parameters with a deliberately broken coin constraint
/// `a^2 + |b|^2 = 1.01`, for negative controls.
pub fn corrupt_coin(params: &ModelParamsUm) -> ModelParamsUm {
    let scale = Complex64::new((1.01f64).sqrt(), 0.0);
    ModelParamsUm::new_unchecked(
        params.m,
        params.gamma.clone(),
        params.p.clone(),
        params.a.scale(scale),
        params.q.clone(),
        params.b.scale(scale),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PhaseValues;
    use crate::profile::ParameterProfile;
    use crate::spectrum::sigma_ess;

    fn example1(m: i64, gamma: f64) -> ModelParamsUm {
        ModelParamsUm::two_phase(
            m,
            PhaseValues::with_real_coins(gamma, -0.2, -0.1),
            PhaseValues::with_real_coins(gamma, 0.2, 0.1),
        )
        .unwrap()
    }

    #[test]
    fn residuals_vanish_for_valid_parameters() {
        for m in [-2, 1, 3] {
            let params = example1(m, 0.4);
            assert!(verify_chiral(&params, 4 * m.abs() + 6, 1e-12).unwrap() < 1e-12);
            for check in residual_checks(&params, 20, 1e-12).unwrap() {
                assert!(check.passed(), "{check:?}");
            }
        }
    }

    #[test]
    fn window_must_cover_four_bandwidths() {
        let params = example1(3, 0.4);
        assert!(matches!(
            verify_chiral(&params, 11, 1e-12),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn corrupted_hopping_breaks_chirality() {
        let bad = corrupt_hopping(&example1(1, 0.4));
        assert!(matches!(
            verify_chiral(&bad, 20, 1e-10),
            Err(Error::ResidualTooLarge {
                check: "chiral",
                ..
            })
        ));
    }

    #[test]
    fn corrupted_coin_is_caught_by_the_coin_check_only() {
        let bad = corrupt_coin(&example1(1, 0.4));
        let checks = residual_checks(&bad, 20, 1e-10).unwrap();
        let by_name = |n: &str| checks.iter().find(|c| c.name == n).unwrap().clone();
        assert!(by_name("chiral").passed());
        assert!(!by_name("coin").passed());
        assert!(by_name("coin").residual > 1e-3);
    }

    #[test]
    fn unitarity_residual_only_for_gain_free_models() {
        let checks = residual_checks(&example1(2, 0.0), 20, 1e-12).unwrap();
        assert!(checks.iter().any(|c| c.name == "unitarity" && c.passed()));
        let checks = residual_checks(&example1(2, 0.4), 20, 1e-12).unwrap();
        assert!(checks.iter().all(|c| c.name != "unitarity"));
    }

    #[test]
    fn mko_residuals() {
        let params = ModelParamsMko::new(
            ParameterProfile::real_two_phase(0.4, 0.1).with_override(2, Complex64::new(-0.3, 0.0)),
            ParameterProfile::real_two_phase(0.2, 1.0),
            ParameterProfile::real_two_phase(0.3, -1.0),
            ParameterProfile::real_two_phase(1.3, 0.5),
        )
        .unwrap();
        assert!(verify_chiral_mko(&params, 20, 1e-10).unwrap() < 1e-12);
        for check in residual_checks_mko(&params, 20, 1e-10).unwrap() {
            assert!(check.passed(), "{check:?}");
        }
    }

    #[test]
    fn diagonal_q_has_closed_form_singular_values() {
        let p =
            ParameterProfile::real_two_phase(-0.6, 0.3).with_override(1, Complex64::new(0.9, 0.0));
        let q = p.map(|v| Complex64::new((1.0 - v.re * v.re).sqrt(), 0.0));
        let params = ModelParamsUm::new(
            1,
            ParameterProfile::real(0.0),
            p,
            ParameterProfile::real(1.0),
            q.clone(),
            ParameterProfile::real(0.0),
        )
        .unwrap();
        let n = 10;
        let w = kernel_witness(&params, n, 1e-6).unwrap();
        assert_eq!(w.count(), 0);
        let mut want: Vec<f64> = (-n..=n).map(|x| q.value(x).norm()).collect();
        want.sort_by(f64::total_cmp);
        assert!((w.smallest - want[0]).abs() < 1e-14);
        let section = build_q_epsilon0(&params, &PhaseAssignment::canonical(&params.q))
            .finite_section(n)
            .unwrap();
        let (_, s, _) = section.matrix.svd(false, false).unwrap();
        let mut got = s.to_vec();
        got.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn small_unitary_section_stays_in_the_disk() {
        let params = example1(1, 0.0);
        let eigs = truncated_spectrum(&params, 40).unwrap();
        assert_eq!(eigs.len(), 2 * 81);
        assert!(eigs.iter().all(|e| e.lambda.norm() <= 1.0 + 1e-8));
    }

    #[test]
    fn gapped_unitary_walk_without_index_has_no_bound_states() {
        let params = ModelParamsUm::two_phase(
            1,
            PhaseValues::with_real_coins(0.0, 0.0, 0.6),
            PhaseValues::with_real_coins(0.0, 0.0, 0.6),
        )
        .unwrap();
        let report = bound_state_check(&params, 60).unwrap();
        assert_eq!(report.index_abs, 0);
        assert_eq!(report.count(), 0);
        assert!(report.satisfied());
        assert!(matches!(
            bound_state_check(&example1(1, 0.4), 20),
            Err(Error::NotUnitary)
        ));
    }

    #[test]
    fn im_projection_on_a_small_unitary_instance() {
        let params = example1(1, 0.0);
        let sigma = sigma_ess(&params, 512).unwrap();
        let report = im_projection_check(&params, &sigma, 120).unwrap();
        assert!(report.passed(), "{report:?}");
    }
}
