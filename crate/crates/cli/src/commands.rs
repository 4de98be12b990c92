use std::path::{Path, PathBuf};

use chiralwalk_core::index::{index_via_symbols_with_phase, FredholmCheck};
use chiralwalk_core::numerics::{self, cluster_report, VerificationReport, CLUSTER_TOL};
use chiralwalk_core::{
    build_u_m, build_u_mko, cloud_csv, index_via_symbols, is_fredholm, render_svg, sigma_ess,
    sigma_ess_csv, Endpoint, Error, Model, ModelConfig, ModelParamsUm, PhaseAssignment, SigmaEss,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::CommonArgs;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::NotFredholm { .. } | Error::SymbolVanishes { .. }) => 2,
            CliError::Core(Error::IndexDisagreement(_) | Error::ResidualTooLarge { .. }) => 3,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}

type CliResult = Result<(), CliError>;

struct Loaded {
    config: ModelConfig,
    model: Model,
}

impl Loaded {
    fn new(args: &CommonArgs) -> Result<Self, CliError> {
        let config = ModelConfig::from_path(&args.config)?;
        let model = config.build()?;
        Ok(Loaded { config, model })
    }

    fn kind(&self) -> &'static str {
        match self.model {
            Model::Um(_) => "um",
            Model::Mko(_) => "mko",
        }
    }

    fn resolution(&self, args: &CommonArgs) -> usize {
        args.resolution.unwrap_or(self.config.options.resolution())
    }

    fn window(&self, args: &CommonArgs) -> i64 {
        args.window.unwrap_or(self.config.options.window())
    }
}

fn emit(out: Option<&Path>, content: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn header(loaded: &Loaded, um: &ModelParamsUm) {
    match loaded.model {
        Model::Um(_) => println!("model: um, m = {}", um.m),
        Model::Mko(_) => println!("model: mko (through the equivalent m = 2 walk)"),
    }
}

fn print_fredholm(check: &FredholmCheck) {
    for star in Endpoint::BOTH {
        let d = check.endpoint(star);
        let branch = if d.is_tie() {
            "tie (not Fredholm)"
        } else if d.is_topological() {
            "|p_gamma| > |a|"
        } else {
            "|p_gamma| < |a|"
        };
        println!(
            "endpoint {:>4}: p_gamma = {:+.6}, |a| = {:.6}, margin = {:+.3e}, branch {branch}",
            star.label(),
            d.p_gamma,
            d.abs_a,
            d.margin
        );
    }
}

pub fn index(args: &CommonArgs) -> CliResult {
    let loaded = Loaded::new(args)?;
    let um = loaded.model.um_params()?;
    header(&loaded, &um);
    let check = is_fredholm(
        &um.asymptotic(Endpoint::MinusInfinity),
        &um.asymptotic(Endpoint::PlusInfinity),
    );
    print_fredholm(&check);
    if !check.fredholm {
        println!("not Fredholm: the index is undefined");
    }
    let report = index_via_symbols(&um)?;
    println!("formula index: {}", report.analytic_index);
    println!(
        "ellipse windings: wn(-inf) = {}, wn(+inf) = {}",
        report.wn_minus, report.wn_plus
    );
    for (label, w) in [
        ("-inf", &report.wn_minus_num),
        ("+inf", &report.wn_plus_num),
    ] {
        println!(
            "sampled winding at {label}: {} ({} samples, min |f| = {:.3e})",
            w.winding, w.samples, w.min_modulus
        );
    }
    println!("routes unanimous: yes");

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let phase = PhaseAssignment::randomized(&um.q, &mut rng);
    let rephased = index_via_symbols_with_phase(&um, &phase)?;
    if rephased.index() != report.index() {
        return Err(CliError::Verification(format!(
            "index {} under randomized phases (seed {}) differs from {}",
            rephased.index(),
            args.seed,
            report.index()
        )));
    }
    println!(
        "randomized phase assignment (seed {}): same index",
        args.seed
    );
    println!("index = {}", report.index());
    Ok(())
}

fn print_spectrum_summary(sigma: &SigmaEss) {
    for ep in sigma.endpoints() {
        let d = &ep.data;
        println!(
            "endpoint {:>4}: case {}, s = {:+}, Lambda_- = {:.6}, Lambda_+ = {:.6}, gamma_- = {:.6}, gamma_+ = {:.6}",
            ep.star.label(),
            ep.set.case,
            ep.set.sign,
            d.lambda_minus,
            d.lambda_plus,
            d.gamma_minus,
            d.gamma_plus
        );
        for arc in &ep.set.arcs {
            println!("  arc      Re z in [{:.6}, {:.6}]", arc.re_lo, arc.re_hi);
        }
        for seg in &ep.set.segments {
            println!("  segment  [{:.6}, {:.6}]", seg.lo, seg.hi);
        }
        println!(
            "  sampled cloud: Hausdorff distance {:.3e} (tolerance {:.3e})",
            ep.hausdorff, ep.tolerance
        );
    }
}

pub fn spectrum(args: &CommonArgs, cloud: Option<&Path>) -> CliResult {
    let loaded = Loaded::new(args)?;
    let um = loaded.model.um_params()?;
    let sigma = sigma_ess(&um, loaded.resolution(args))?;
    let csv = sigma_ess_csv(&sigma)?;
    if args.out.is_some() {
        header(&loaded, &um);
        print_spectrum_summary(&sigma);
    }
    emit(args.out.as_deref(), &csv)?;
    if let Some(path) = cloud {
        emit(Some(path), &cloud_csv(&sigma)?)?;
    }
    let off: Vec<&str> = sigma
        .endpoints()
        .iter()
        .filter(|ep| !ep.within_tolerance())
        .map(|ep| ep.star.label())
        .collect();
    if !off.is_empty() {
        return Err(CliError::Verification(format!(
            "sampled cloud departs from the closed form at {}",
            off.join(", ")
        )));
    }
    Ok(())
}

fn print_verification(report: &VerificationReport, tol: f64, sigma: Option<&SigmaEss>) {
    println!("window: sites -{0}..={0}", report.half_width);
    println!("{:<12} {:>12} {:>10}  status", "check", "residual", "tol");
    for c in &report.checks {
        println!(
            "{:<12} {:>12.3e} {:>10.1e}  {}",
            c.name,
            c.residual,
            tol,
            if c.passed() { "pass" } else { "FAIL" }
        );
    }
    let spectrum = &report.truncated_spectrum;
    let edge = spectrum.iter().filter(|e| e.boundary_affected).count();
    println!(
        "truncated spectrum: {} eigenvalues, {edge} boundary-affected",
        spectrum.len()
    );
    if let Some(sigma) = sigma {
        let c = cluster_report(spectrum, sigma, CLUSTER_TOL);
        println!(
            "  interior eigenvalues vs sigma_ess: coverage {:.4}, bulk distance {:.4}, {} separated",
            c.coverage,
            c.bulk_distance,
            c.separated.len()
        );
    }
    match &report.kernel {
        Some(k) => println!(
            "kernel witness: {} singular values of Q_eps0 below {:.1e} (smallest {:.3e})",
            k.count(),
            k.threshold,
            k.smallest
        ),
        None => println!("kernel witness: skipped (no index or window below 8|m|)"),
    }
    if let Some(b) = &report.bound_states {
        println!(
            "bound_state_check: |index| = {}, near +1: {}, near -1: {}, edge-excluded: {}, {}",
            b.index_abs,
            b.near_plus,
            b.near_minus,
            b.boundary_excluded,
            if b.satisfied() { "pass" } else { "FAIL" }
        );
    }
}

pub fn verify(args: &CommonArgs) -> CliResult {
    let loaded = Loaded::new(args)?;
    let window = loaded.window(args);
    let tol = args.tol.unwrap_or(loaded.config.options.residual_tol());
    let threshold = loaded.config.options.kernel_threshold();
    let report = match &loaded.model {
        Model::Um(p) => numerics::verify(p, window, tol, threshold)?,
        Model::Mko(p) => numerics::verify_mko(p, window, tol, threshold)?,
    };
    println!("model: {}", loaded.kind());
    let sigma = loaded
        .model
        .um_params()
        .ok()
        .and_then(|um| sigma_ess(&um, loaded.resolution(args)).ok());
    print_verification(&report, tol, sigma.as_ref());
    if report.passed() {
        println!("result: pass");
        Ok(())
    } else {
        let failures = report.failures().join(", ");
        println!("result: FAIL ({failures})");
        Err(CliError::Verification(failures))
    }
}

pub fn plot(args: &CommonArgs, eigenvalues: bool) -> CliResult {
    let loaded = Loaded::new(args)?;
    let um = loaded.model.um_params()?;
    let sigma = sigma_ess(&um, loaded.resolution(args))?;
    let overlay = if eigenvalues {
        let op = match &loaded.model {
            Model::Um(p) => build_u_m(p),
            Model::Mko(p) => build_u_mko(p),
        };
        Some(numerics::section_eigenvalues(&op, loaded.window(args))?.to_vec())
    } else {
        None
    };
    emit(args.out.as_deref(), &render_svg(&sigma, overlay.as_deref()))
}
