//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! per criterion and exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use chiralwalk_core::corpus::M_VALUES;
use chiralwalk_core::index::{p_gamma, winding_analytic};
use chiralwalk_core::numerics::{
    bound_state_check, im_projection_check, kernel_witness, section_product_residual,
    DEFAULT_KERNEL_THRESHOLD,
};
use chiralwalk_core::spectrum::endpoint_data;
use chiralwalk_core::{
    build_coin_c, build_epsilon, build_gamma_m, build_u_m, build_u_mko, classify_case, index_mko,
    index_via_symbols, is_fredholm, mko_to_um, random_fredholm_corpus, sigma_ess,
    sign_combinations, witten_index_analytic, AsymptoticData, BandedOperator, CorpusOptions,
    Endpoint, ModelParamsMko, ModelParamsUm, ParameterProfile, PhaseAssignment, PhaseValues,
    SpectralCase,
};
use num_complex::Complex64;

// Pinned tolerances and budgets.
const PRINTED_VALUE_TOL: f64 = 1e-5;
const EQUIVALENCE_TOL: f64 = 1e-10;
const EQUIVALENCE_WINDOW: i64 = 100;
const CORPUS_MIN: usize = 200;
const SPECTRUM_RESOLUTION: usize = 2048;
const STRUCTURAL_TOL: f64 = 1e-12;
const STRUCTURAL_DRAWS: usize = 50;
const UNIT_CIRCLE_TOL: f64 = 1e-12;
const UNITARY_WINDOW: i64 = 300;
const KERNEL_LADDER: [i64; 3] = [100, 200, 300];

const BUDGET_1: Duration = Duration::from_secs(1);
const BUDGET_2: Duration = Duration::from_secs(10);
const BUDGET_3: Duration = Duration::from_secs(60);
const BUDGET_4: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn example1(m: i64, gamma: f64) -> ModelParamsUm {
    ModelParamsUm::two_phase(
        m,
        PhaseValues::with_real_coins(gamma, -0.2, -0.1),
        PhaseValues::with_real_coins(gamma, 0.2, 0.1),
    )
    .expect("valid worked example")
}

fn example2() -> ModelParamsMko {
    let (t1, t2) = (0.2_f64.asin(), 0.1_f64.asin());
    ModelParamsMko::new(
        ParameterProfile::real(0.4),
        ParameterProfile::real(0.0),
        ParameterProfile::real_two_phase(t1, -t1),
        ParameterProfile::real_two_phase(-t2, t2),
    )
    .expect("valid mko example")
}

fn corpus() -> Vec<ModelParamsUm> {
    let mut all = random_fredholm_corpus(&CorpusOptions::default());
    for m in M_VALUES {
        all.extend(sign_combinations(m, 0.4));
    }
    all
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<Duration, String> {
    let elapsed = start.elapsed();
    ensure(elapsed < budget, || {
        format!("runtime {elapsed:.2?} exceeds {budget:?}")
    })?;
    Ok(elapsed)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for m in [1, 2, 3] {
        let params = example1(m, 0.4);
        for star in Endpoint::BOTH {
            let asym = params.asymptotic(star);
            let data = endpoint_data(&asym);
            for (name, got, want) in [
                ("gamma_-", data.gamma_minus, 0.350396),
                ("gamma_+", data.gamma_plus, 2.64283),
                ("|p_gamma|", p_gamma(&asym).abs(), 0.150876),
            ] {
                ensure((got - want).abs() <= PRINTED_VALUE_TOL, || {
                    format!("{name} at {} is {got}, expected {want}", star.label())
                })?;
            }
            let case = classify_case(&data, asym.gamma);
            ensure(case == SpectralCase::II, || {
                format!("case {case} at {}", star.label())
            })?;
        }
        let index = index_via_symbols(&params)
            .map_err(|e| e.to_string())?
            .index();
        ensure(index == 2 * m, || format!("m = {m}: index {index}"))?;
    }
    let t = within_budget(start, BUDGET_1)?;
    Ok(format!(
        "index 2m for m = 1,2,3, Case II, printed values within {PRINTED_VALUE_TOL:e} ({t:.2?})"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mko = example2();
    let index = index_mko(&mko).map_err(|e| e.to_string())?.index();
    ensure(index == 4, || format!("index {index}, expected 4"))?;
    let (um, eta) = mko_to_um(&mko).map_err(|e| e.to_string())?;
    ensure(um.m == 2, || format!("equivalent walk has m = {}", um.m))?;
    let residual = section_product_residual(
        &[&eta.adjoint(), &build_u_mko(&mko), &eta],
        &build_u_m(&um),
        EQUIVALENCE_WINDOW,
    )
    .map_err(|e| e.to_string())?;
    ensure(residual < EQUIVALENCE_TOL, || {
        format!("equivalence residual {residual:e}")
    })?;
    let t = within_budget(start, BUDGET_2)?;
    Ok(format!(
        "index 4, equivalence residual {residual:.1e} at N = {EQUIVALENCE_WINDOW} ({t:.2?})"
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let all = corpus();
    ensure(all.len() >= CORPUS_MIN, || {
        format!("corpus has {} cases", all.len())
    })?;
    let mut nonzero = 0;
    for (i, params) in all.iter().enumerate() {
        let minus = params.asymptotic(Endpoint::MinusInfinity);
        let plus = params.asymptotic(Endpoint::PlusInfinity);
        ensure(is_fredholm(&minus, &plus).fredholm, || {
            format!("case {i} not Fredholm")
        })?;
        let report = index_via_symbols(params).map_err(|e| format!("case {i}: {e}"))?;
        let formula = witten_index_analytic(&minus, &plus, params.m).map_err(|e| e.to_string())?;
        let ellipse = report.wn_plus - report.wn_minus;
        let numeric = report.wn_plus_num.winding - report.wn_minus_num.winding;
        // The analytic windings are recomputed here from the closed-form symbols.
        let [sym_minus, sym_plus] = &report.symbols;
        let recomputed = winding_analytic(sym_plus, &plus).map_err(|e| e.to_string())?
            - winding_analytic(sym_minus, &minus).map_err(|e| e.to_string())?;
        ensure(
            formula == ellipse && ellipse == numeric && numeric == recomputed,
            || {
                format!("case {i} (m = {}): formula {formula}, ellipse {ellipse}, numeric {numeric}, recomputed {recomputed}", params.m)
            },
        )?;
        if formula != 0 {
            nonzero += 1;
        }
    }
    let t = within_budget(start, BUDGET_3)?;
    Ok(format!(
        "{} cases unanimous ({nonzero} with nonzero index) ({t:.2?})",
        all.len()
    ))
}

/// Case from the Lambda inequalities: I iff Lambda_+ <= 1, III iff Lambda_- >= 1.
fn case_from_lambdas(asym: &AsymptoticData) -> SpectralCase {
    let pa = (asym.p * asym.a).abs();
    let qb = (asym.q * asym.b).norm();
    let cosh = (2.0 * asym.gamma).cosh();
    let (lm, lp) = (pa * cosh - qb, pa * cosh + qb);
    if lp <= 1.0 {
        SpectralCase::I
    } else if lm >= 1.0 {
        SpectralCase::III
    } else {
        SpectralCase::II
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let all = corpus();
    let mut worst_ratio: f64 = 0.0;
    let mut cases = [0usize; 3];
    for (i, params) in all.iter().enumerate() {
        let sigma = sigma_ess(params, SPECTRUM_RESOLUTION).map_err(|e| format!("case {i}: {e}"))?;
        for ep in sigma.endpoints() {
            ensure(ep.within_tolerance(), || {
                format!(
                    "case {i} at {}: Hausdorff {:e} > tolerance {:e}",
                    ep.star.label(),
                    ep.hausdorff,
                    ep.tolerance
                )
            })?;
            worst_ratio = worst_ratio.max(ep.hausdorff / ep.tolerance);
            let want = case_from_lambdas(&params.asymptotic(ep.star));
            ensure(ep.set.case == want, || {
                format!(
                    "case {i} at {}: tag {} but inequalities give {want}",
                    ep.star.label(),
                    ep.set.case
                )
            })?;
            cases[match want {
                SpectralCase::I => 0,
                SpectralCase::II => 1,
                SpectralCase::III => 2,
            }] += 1;
        }
    }
    let t = within_budget(start, BUDGET_4)?;
    Ok(format!(
        "{} endpoints within tolerance (worst ratio {worst_ratio:.3}), cases I/II/III = {}/{}/{} ({t:.2?})",
        2 * all.len(),
        cases[0],
        cases[1],
        cases[2]
    ))
}

fn criterion_5() -> Outcome {
    let draws = random_fredholm_corpus(&CorpusOptions {
        seed: 5,
        size: STRUCTURAL_DRAWS,
        ..CorpusOptions::default()
    });
    let grading = BandedOperator::constant_matrix(&[
        &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        &[Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    ]);
    let mut worst: f64 = 0.0;
    let err = |e: chiralwalk_core::Error| e.to_string();
    for (i, params) in draws.iter().enumerate() {
        let gamma = build_gamma_m(params);
        let coin = build_coin_c(params);
        let u = build_u_m(params);
        let eps = build_epsilon(params, &PhaseAssignment::canonical(&params.q));
        let residuals = [
            (
                "chiral",
                BandedOperator::product(&[&gamma, &u, &gamma])
                    .and_then(|g| g.max_coefficient_diff(&u.adjoint()))
                    .map_err(err)?,
            ),
            (
                "involution",
                gamma
                    .compose(&gamma)
                    .and_then(|g| g.max_coefficient_diff(&BandedOperator::identity(2)))
                    .map_err(err)?,
            ),
            (
                "coin self-adjoint",
                coin.max_coefficient_diff(&coin.adjoint()).map_err(err)?,
            ),
            (
                "epsilon grading",
                BandedOperator::product(&[&eps.adjoint(), &gamma, &eps])
                    .and_then(|g| g.max_coefficient_diff(&grading))
                    .map_err(err)?,
            ),
        ];
        for (name, r) in residuals {
            ensure(r < STRUCTURAL_TOL, || {
                format!("draw {i}: {name} residual {r:e}")
            })?;
            worst = worst.max(r);
        }
    }
    Ok(format!(
        "{STRUCTURAL_DRAWS} draws, worst coefficient residual {worst:.1e}"
    ))
}

fn criterion_6() -> Outcome {
    let params = example1(1, 0.4);
    let sigma = sigma_ess(&params, SPECTRUM_RESOLUTION).map_err(|e| e.to_string())?;
    let one = Complex64::new(1.0, 0.0);
    let through_one = sigma
        .endpoints()
        .iter()
        .any(|ep| ep.set.case == SpectralCase::II && ep.set.sign == 1 && ep.set.contains(one, 0.0));
    ensure(through_one, || {
        "+1 not in a Case II, s = +1 piece of sigma_ess".into()
    })?;
    let report = index_via_symbols(&params).map_err(|e| e.to_string())?;
    ensure(report.fredholm.fredholm, || "not Fredholm".into())?;
    ensure(report.index() != 0, || "index is zero".into())?;
    Ok(format!(
        "+1 in sigma_ess (Case II, s = +1) and Fredholm with index {}",
        report.index()
    ))
}

fn criterion_7() -> Outcome {
    let mut instances = vec![("worked example, m = 1", example1(1, 0.0))];
    instances.push(("worked example, m = 2", example1(2, 0.0)));
    let mut out = Vec::new();
    for (name, params) in &instances {
        let sigma = sigma_ess(params, SPECTRUM_RESOLUTION).map_err(|e| e.to_string())?;
        let off_circle = sigma
            .endpoints()
            .iter()
            .flat_map(|ep| ep.cloud.iter())
            .map(|pt| (pt.lambda.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        ensure(off_circle < UNIT_CIRCLE_TOL, || {
            format!("{name}: cloud {off_circle:e} off the unit circle")
        })?;
        let projection =
            im_projection_check(params, &sigma, UNITARY_WINDOW).map_err(|e| e.to_string())?;
        ensure(projection.passed(), || format!("{name}: {projection:?}"))?;
        let bound = bound_state_check(params, UNITARY_WINDOW).map_err(|e| e.to_string())?;
        ensure(bound.satisfied(), || format!("{name}: {bound:?}"))?;
        out.push(format!(
            "{name}: |nu| = {} <= {} near +-1",
            bound.index_abs,
            bound.count()
        ));
    }
    Ok(format!(
        "sigma_ess on T, Im-projection consistent, {}",
        out.join("; ")
    ))
}

fn kernel_ladder(name: &str, params: &ModelParamsUm, ladder: &[i64]) -> Result<Vec<usize>, String> {
    let mut counts = Vec::new();
    for &n in ladder {
        let w = kernel_witness(params, n, DEFAULT_KERNEL_THRESHOLD).map_err(|e| e.to_string())?;
        counts.push(w.count());
    }
    ensure(counts.windows(2).all(|w| w[0] <= w[1]), || {
        format!("{name}: counts {counts:?} on {ladder:?} not monotone")
    })?;
    Ok(counts)
}

fn criterion_8() -> Outcome {
    let mko = example2();
    let (mko_um, _) = mko_to_um(&mko).map_err(|e| e.to_string())?;
    let mko_index = index_mko(&mko).map_err(|e| e.to_string())?.index();
    let mut golden: Vec<(String, ModelParamsUm, i64)> = [1, 2, 3]
        .into_iter()
        .map(|m| (format!("worked example m = {m}"), example1(m, 0.4), 2 * m))
        .collect();
    golden.push(("mko example".into(), mko_um, mko_index));
    let mut out = Vec::new();
    for (name, params, nu) in &golden {
        let literal = kernel_ladder(name, params, &KERNEL_LADDER)?;
        let scaled_ladder: Vec<i64> = KERNEL_LADDER.iter().map(|n| n * params.m.abs()).collect();
        let scaled = kernel_ladder(name, params, &scaled_ladder)?;
        let last = *scaled.last().expect("nonempty ladder");
        ensure(last as u64 >= nu.unsigned_abs(), || {
            format!(
                "{name}: {last} small singular values at N = {}, |nu| = {}",
                scaled_ladder[2],
                nu.abs()
            )
        })?;
        out.push(format!(
            "{name} |nu| = {} counts {literal:?} / {scaled:?}",
            nu.abs()
        ));
    }
    Ok(out.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked example 1 reproduction", criterion_1),
        ("worked example 2 (mko) reproduction", criterion_2),
        ("index unanimity corpus", criterion_3),
        ("spectrum oracle", criterion_4),
        ("structural residuals", criterion_5),
        ("gapless yet Fredholm", criterion_6),
        ("unitary cross-checks", criterion_7),
        ("kernel witness", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
