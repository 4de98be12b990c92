//! Essential spectrum of `U_m` in closed form, and a sampling oracle built
//! from the eigenvalues of the operator's endpoint symbols.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::sgn;
use crate::model::{build_u_m, AsymptoticData, ModelParamsUm};
use crate::profile::Endpoint;

/// Smallest resolution accepted by [`sigma_ess`].
pub const MIN_RESOLUTION: usize = 256;

pub const DEFAULT_RESOLUTION: usize = 2048;

/// Eigenvalues near the double root `+-1` are only accurate to about
/// `sqrt(machine epsilon)`; Hausdorff tolerances never drop below this.
pub const HAUSDORFF_FLOOR: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralCase {
    I,
    II,
    III,
}

impl SpectralCase {
    pub fn label(self) -> &'static str {
        match self {
            SpectralCase::I => "I",
            SpectralCase::II => "II",
            SpectralCase::III => "III",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "I" => Some(SpectralCase::I),
            "II" => Some(SpectralCase::II),
            "III" => Some(SpectralCase::III),
            _ => None,
        }
    }
}

impl fmt::Display for SpectralCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// `{z in T : Re z in [re_lo, re_hi]}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub re_lo: f64,
    pub re_hi: f64,
}

/// The real interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSet {
    pub arcs: Vec<Arc>,
    pub segments: Vec<Segment>,
    pub case: SpectralCase,
    pub sign: i64,
}

/// A connected one-dimensional piece of a spectral set, parametrised by arc
/// length (angle) for circle pieces and by the real coordinate for segments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Circle { from: f64, to: f64 },
    Real { lo: f64, hi: f64 },
}

impl Piece {
    /// Nearest point of the piece to `z`: `(distance, parameter)`.
    pub fn project(&self, z: Complex64) -> (f64, f64) {
        match *self {
            Piece::Circle { from, to } => {
                let angle = z.arg();
                // Candidates: the radial projection if it lies inside, else an end.
                let mut best = (f64::INFINITY, from);
                for t in [from, to, angle.clamp(from, to)] {
                    let d = (z - Complex64::from_polar(1.0, t)).norm();
                    if d < best.0 {
                        best = (d, t);
                    }
                }
                best
            }
            Piece::Real { lo, hi } => {
                let x = z.re.clamp(lo, hi);
                ((z - Complex64::new(x, 0.0)).norm(), x)
            }
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match *self {
            Piece::Circle { from, to } => (from, to),
            Piece::Real { lo, hi } => (lo, hi),
        }
    }

    pub fn point(&self, param: f64) -> Complex64 {
        match self {
            Piece::Circle { .. } => Complex64::from_polar(1.0, param),
            Piece::Real { .. } => Complex64::new(param, 0.0),
        }
    }
}

impl SpectralSet {
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        for arc in &self.arcs {
            let a1 = arc.re_hi.clamp(-1.0, 1.0).acos();
            let a2 = arc.re_lo.clamp(-1.0, 1.0).acos();
            out.push(Piece::Circle { from: a1, to: a2 });
            out.push(Piece::Circle { from: -a2, to: -a1 });
        }
        for seg in &self.segments {
            out.push(Piece::Real {
                lo: seg.lo,
                hi: seg.hi,
            });
        }
        out
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.pieces()
            .iter()
            .map(|p| p.project(z).0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    /// Evenly spaced points along every piece, `n` per piece (at least 2).
    pub fn sample(&self, n: usize) -> Vec<Vec<Complex64>> {
        let n = n.max(2);
        self.pieces()
            .iter()
            .map(|piece| {
                let (lo, hi) = piece.range();
                (0..n)
                    .map(|k| piece.point(lo + (hi - lo) * k as f64 / (n - 1) as f64))
                    .collect()
            })
            .collect()
    }

    /// The set `{(z - z^*) / 2i : z in self}` as a union of closed intervals.
    pub fn imaginary_projection(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for arc in &self.arcs {
            let (u, v) = (arc.re_lo.clamp(-1.0, 1.0), arc.re_hi.clamp(-1.0, 1.0));
            let outer = u.abs().max(v.abs());
            let inner = if u <= 0.0 && v >= 0.0 {
                0.0
            } else {
                u.abs().min(v.abs())
            };
            let (r_lo, r_hi) = ((1.0 - outer * outer).sqrt(), (1.0 - inner * inner).sqrt());
            out.push((r_lo, r_hi));
            out.push((-r_hi, -r_lo));
        }
        if !self.segments.is_empty() {
            out.push((0.0, 0.0));
        }
        out
    }

    /// Structural invariants: bounds ordered, arcs inside `[-1, 1]`, segments
    /// on the `s` side of the origin, and pieces present as the case demands.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        for arc in &self.arcs {
            if !(-1.0 <= arc.re_lo && arc.re_lo <= arc.re_hi && arc.re_hi <= 1.0) {
                return bad(format!("arc bounds out of order: {arc:?}"));
            }
        }
        for seg in &self.segments {
            let side_ok = if self.sign > 0 {
                seg.lo > 0.0
            } else {
                seg.hi < 0.0
            };
            if seg.lo.is_nan() || seg.hi.is_nan() || seg.lo > seg.hi || !side_ok {
                return bad(format!(
                    "segment bounds invalid for s = {}: {seg:?}",
                    self.sign
                ));
            }
        }
        let shape_ok = match self.case {
            SpectralCase::I => self.segments.is_empty() && !self.arcs.is_empty(),
            SpectralCase::II => {
                self.arcs.len() == 1 && self.segments.len() == 1 && self.touches(self.sign as f64)
            }
            SpectralCase::III => self.arcs.is_empty() && !self.segments.is_empty(),
        };
        if !shape_ok {
            return bad(format!("set does not have the shape of case {}", self.case));
        }
        Ok(())
    }

    /// Whether the real point `x` belongs to every piece family present,
    /// i.e. the arc and segment families are joined at `x`.
    pub fn touches(&self, x: f64) -> bool {
        let on_arcs = x.abs() == 1.0 && self.arcs.iter().any(|a| a.re_lo <= x && x <= a.re_hi);
        let on_segments = self.segments.iter().any(|s| s.lo <= x && x <= s.hi);
        (self.arcs.is_empty() || on_arcs) && (self.segments.is_empty() || on_segments)
    }
}

/// `s = sgn(pa)`, `Lambda_+- = |pa| cosh 2gamma +- |qb|` and the thresholds
/// `gamma_+- = acosh((1 +- |qb|) / |pa|) / 2` (infinite when `pa = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndpointSpectrumData {
    pub s: i64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
}

pub fn endpoint_data(asym: &AsymptoticData) -> EndpointSpectrumData {
    let pa = asym.p * asym.a;
    let qb = asym.q.norm() * asym.b.norm();
    let base = pa.abs() * (2.0 * asym.gamma).cosh();
    let threshold = |x: f64| {
        if pa == 0.0 {
            f64::INFINITY
        } else {
            0.5 * (x / pa.abs()).max(1.0).acosh()
        }
    };
    EndpointSpectrumData {
        s: sgn(pa),
        lambda_minus: base - qb,
        lambda_plus: base + qb,
        gamma_minus: threshold(1.0 - qb),
        gamma_plus: threshold(1.0 + qb),
    }
}

/// Case I for `|gamma| <= gamma_-`, III for `gamma_+ <= |gamma|`, else II.
pub fn classify_case(data: &EndpointSpectrumData, gamma_star: f64) -> SpectralCase {
    let g = gamma_star.abs();
    if g <= data.gamma_minus {
        SpectralCase::I
    } else if data.gamma_plus <= g {
        SpectralCase::III
    } else {
        SpectralCase::II
    }
}

/// `g(x) = x + sqrt(x^2 - 1)` for `|x| >= 1`.
pub fn g_map(x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() < 1.0 {
        return Err(Error::OutsideDomain(x));
    }
    Ok(x + (x * x - 1.0).sqrt())
}

/// Closed-form `sigma(star)`.
pub fn sigma_star(asym: &AsymptoticData) -> SpectralSet {
    let data = endpoint_data(asym);
    let case = classify_case(&data, asym.gamma);
    let (lm, lp) = (data.lambda_minus, data.lambda_plus);
    let g = |x: f64| g_map(x.max(1.0)).expect("argument clamped to the domain");
    let mut arcs = Vec::new();
    let mut segments = Vec::new();
    match case {
        SpectralCase::I => arcs.push(Arc {
            re_lo: lm.max(-1.0),
            re_hi: lp.min(1.0),
        }),
        SpectralCase::II => {
            arcs.push(Arc {
                re_lo: lm.max(-1.0),
                re_hi: 1.0,
            });
            segments.push(Segment {
                lo: 1.0 / g(lp),
                hi: g(lp),
            });
        }
        SpectralCase::III => {
            segments.push(Segment {
                lo: 1.0 / g(lp),
                hi: 1.0 / g(lm),
            });
            segments.push(Segment {
                lo: g(lm),
                hi: g(lp),
            });
        }
    }
    if data.s < 0 {
        for arc in &mut arcs {
            *arc = Arc {
                re_lo: -arc.re_hi,
                re_hi: -arc.re_lo,
            };
        }
        for seg in &mut segments {
            *seg = Segment {
                lo: -seg.hi,
                hi: -seg.lo,
            };
        }
        segments.reverse();
    }
    SpectralSet {
        arcs,
        segments,
        case,
        sign: data.s,
    }
}

/// The endpoint symbol of `U_m` at `z` in closed form.
pub fn symbol_matrix(asym: &AsymptoticData, z: Complex64, m: i64) -> [[Complex64; 2]; 2] {
    let zm = z.powi(m as i32);
    let (p, a, q, b) = (asym.p, asym.a, asym.q, asym.b);
    let loss = (-2.0 * asym.gamma).exp();
    let gain = (2.0 * asym.gamma).exp();
    [
        [q * b * zm + p * a * loss, p * b.conj() - q * a * gain * zm],
        [
            q.conj() * a * loss / zm - p * b,
            q.conj() * b.conj() / zm + p * a * gain,
        ],
    ]
}

/// Roots of `lambda^2 - tr lambda + det`, larger modulus first; the smaller
/// one is taken as `det / lambda_1` for accuracy.
pub fn eigenvalues_2x2(m: &[[Complex64; 2]; 2]) -> (Complex64, Complex64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let root = (tr * tr - 4.0 * det).sqrt();
    let big = if (tr + root).norm() >= (tr - root).norm() {
        (tr + root) / 2.0
    } else {
        (tr - root) / 2.0
    };
    if big.norm() == 0.0 {
        return (big, big);
    }
    (big, det / big)
}

pub fn symbol_eigenvalues(asym: &AsymptoticData, z: Complex64, m: i64) -> (Complex64, Complex64) {
    eigenvalues_2x2(&symbol_matrix(asym, z, m))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudPoint {
    pub t: f64,
    pub lambda: Complex64,
}

#[derive(Clone, Debug)]
pub struct EndpointSpectrum {
    pub star: Endpoint,
    pub data: EndpointSpectrumData,
    pub set: SpectralSet,
    pub cloud: Vec<CloudPoint>,
    pub hausdorff: f64,
    pub tolerance: f64,
}

impl EndpointSpectrum {
    pub fn within_tolerance(&self) -> bool {
        self.hausdorff <= self.tolerance
    }
}

#[derive(Clone, Debug)]
pub struct SigmaEss {
    pub resolution: usize,
    pub minus: EndpointSpectrum,
    pub plus: EndpointSpectrum,
}

impl SigmaEss {
    pub fn endpoints(&self) -> [&EndpointSpectrum; 2] {
        [&self.minus, &self.plus]
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.minus.set.contains(z, tol) || self.plus.set.contains(z, tol)
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        self.minus.set.distance(z).min(self.plus.set.distance(z))
    }
}

/// Sampling tolerance for the two-sided Hausdorff check.
///
/// Neighbouring samples move `Lambda` by at most `delta = |m||qb| pi / R`.
/// The map `Lambda -> lambda` is only Hoelder-1/2 at `Lambda = +-1`, with
/// modulus `w(delta) = delta + sqrt(2 max(1, Lambda_+) delta)`; a point can
/// cross from the arc to the segment, hence the factor two.
pub fn hausdorff_tolerance(asym: &AsymptoticData, m: i64, resolution: usize) -> f64 {
    let data = endpoint_data(asym);
    let qb = asym.q.norm() * asym.b.norm();
    let delta = m.unsigned_abs() as f64 * qb * PI / resolution as f64;
    let reach = data.lambda_plus.abs().max(1.0);
    let omega = delta + (2.0 * reach * delta).sqrt();
    2.0 * omega + HAUSDORFF_FLOOR
}

/// Two-sided Hausdorff distance between a point cloud and a spectral set.
///
/// Cloud to set is exact. Set to cloud is bounded from above by projecting
/// every cloud point onto its nearest piece and measuring, per piece, the
/// largest parameter gap left uncovered plus the largest projection distance.
pub fn hausdorff_distance(cloud: &[Complex64], set: &SpectralSet) -> f64 {
    let pieces = set.pieces();
    let mut to_set: f64 = 0.0;
    let mut per_piece: Vec<Vec<(f64, f64)>> = vec![Vec::new(); pieces.len()];
    for &z in cloud {
        let (slot, (d, param)) = pieces
            .iter()
            .map(|p| p.project(z))
            .enumerate()
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
            .expect("spectral sets have at least one piece");
        to_set = to_set.max(d);
        per_piece[slot].push((param, d));
    }
    let mut to_cloud: f64 = 0.0;
    for (piece, hits) in pieces.iter().zip(per_piece.iter_mut()) {
        let (lo, hi) = piece.range();
        if hits.is_empty() {
            // Nothing projected here: measure directly on a fine sampling.
            let n = 256;
            let step = (hi - lo) / (n - 1) as f64;
            let worst = (0..n)
                .map(|k| {
                    let w = piece.point(lo + step * k as f64);
                    cloud
                        .iter()
                        .map(|&z| (z - w).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            to_cloud = to_cloud.max(worst + step.abs() / 2.0);
            continue;
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut gap = (hits[0].0 - lo).max(hi - hits[hits.len() - 1].0);
        for pair in hits.windows(2) {
            gap = gap.max((pair[1].0 - pair[0].0) / 2.0);
        }
        let slack = hits.iter().map(|h| h.1).fold(0.0, f64::max);
        to_cloud = to_cloud.max(gap + slack);
    }
    to_set.max(to_cloud)
}

/// Eigenvalues of the endpoint symbols of the built operator `U_m` at
/// `resolution` equally spaced circle points.
pub fn symbol_cloud(params: &ModelParamsUm, star: Endpoint, resolution: usize) -> Vec<CloudPoint> {
    let u = build_u_m(params);
    let mut out = Vec::with_capacity(2 * resolution);
    for k in 0..resolution {
        let t = 2.0 * PI * k as f64 / resolution as f64;
        let sym = u.symbol(star, Complex64::from_polar(1.0, t));
        let matrix = [[sym[[0, 0]], sym[[0, 1]]], [sym[[1, 0]], sym[[1, 1]]]];
        let (l1, l2) = eigenvalues_2x2(&matrix);
        out.push(CloudPoint { t, lambda: l1 });
        out.push(CloudPoint { t, lambda: l2 });
    }
    out
}

/// Closed-form `sigma(-inf)` and `sigma(+inf)` with their sampled clouds and
/// Hausdorff diagnostics.
pub fn sigma_ess(params: &ModelParamsUm, resolution: usize) -> Result<SigmaEss> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::InvalidParams(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    let build = |star: Endpoint| {
        let asym = params.asymptotic(star);
        let set = sigma_star(&asym);
        let cloud = symbol_cloud(params, star, resolution);
        let points: Vec<Complex64> = cloud.iter().map(|c| c.lambda).collect();
        EndpointSpectrum {
            star,
            data: endpoint_data(&asym),
            hausdorff: hausdorff_distance(&points, &set),
            tolerance: hausdorff_tolerance(&asym, params.m, resolution),
            set,
            cloud,
        }
    };
    Ok(SigmaEss {
        resolution,
        minus: build(Endpoint::MinusInfinity),
        plus: build(Endpoint::PlusInfinity),
    })
}
