//! CSV and SVG output for essential spectra.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::Endpoint;
use crate::spectrum::{Arc, Segment, SigmaEss, SpectralCase, SpectralSet};

pub const SPECTRUM_HEADER: [&str; 6] = ["endpoint", "kind", "lo", "hi", "case", "s"];
pub const CLOUD_HEADER: [&str; 4] = ["endpoint", "t", "re_lambda", "im_lambda"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PieceKind {
    Arc,
    Segment,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumRow {
    endpoint: Endpoint,
    kind: PieceKind,
    lo: String,
    hi: String,
    case: String,
    s: i64,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Csv(e.to_string())
}

/// One row per arc or segment, arcs given by their real-part range.
pub fn spectrum_csv(sets: &[(Endpoint, &SpectralSet)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for &(star, set) in sets {
        let case = set.case.label().to_string();
        let rows = set
            .arcs
            .iter()
            .map(|a| (PieceKind::Arc, a.re_lo, a.re_hi))
            .chain(
                set.segments
                    .iter()
                    .map(|s| (PieceKind::Segment, s.lo, s.hi)),
            );
        for (kind, lo, hi) in rows {
            w.serialize(SpectrumRow {
                endpoint: star,
                kind,
                lo: num(lo),
                hi: num(hi),
                case: case.clone(),
                s: set.sign,
            })
            .map_err(csv_err)?;
        }
    }
    finish(w)
}

pub fn sigma_ess_csv(sigma: &SigmaEss) -> Result<String> {
    spectrum_csv(&[
        (Endpoint::MinusInfinity, &sigma.minus.set),
        (Endpoint::PlusInfinity, &sigma.plus.set),
    ])
}

/// Inverse of [`spectrum_csv`]. Every parsed set is validated.
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<(Endpoint, SpectralSet)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header != SPECTRUM_HEADER {
        return Err(Error::Csv(format!("unexpected header {header:?}")));
    }
    let mut out: Vec<(Endpoint, SpectralSet)> = Vec::new();
    for (line, row) in r.deserialize::<SpectrumRow>().enumerate() {
        let row = row.map_err(csv_err)?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Csv(format!("row {}: {v:?}: {e}", line + 1)))
        };
        let (lo, hi) = (parse(&row.lo)?, parse(&row.hi)?);
        let case = SpectralCase::parse(&row.case)
            .ok_or_else(|| Error::Csv(format!("row {}: unknown case {:?}", line + 1, row.case)))?;
        if row.s != 1 && row.s != -1 {
            return Err(Error::Csv(format!("row {}: s must be +1 or -1", line + 1)));
        }
        let idx = match out.iter().position(|(e, _)| *e == row.endpoint) {
            Some(i) => i,
            None => {
                out.push((
                    row.endpoint,
                    SpectralSet {
                        arcs: Vec::new(),
                        segments: Vec::new(),
                        case,
                        sign: row.s,
                    },
                ));
                out.len() - 1
            }
        };
        let set = &mut out[idx].1;
        if set.case != case || set.sign != row.s {
            return Err(Error::Csv(format!(
                "row {}: case/sign differ from earlier rows of endpoint {}",
                line + 1,
                row.endpoint.label()
            )));
        }
        match row.kind {
            PieceKind::Arc => set.arcs.push(Arc {
                re_lo: lo,
                re_hi: hi,
            }),
            PieceKind::Segment => set.segments.push(Segment { lo, hi }),
        }
    }
    for (_, set) in &out {
        set.validate()?;
    }
    Ok(out)
}

/// The raw symbol eigenvalue cloud of both endpoints.
pub fn cloud_csv(sigma: &SigmaEss) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CLOUD_HEADER).map_err(csv_err)?;
    for ep in sigma.endpoints() {
        for pt in &ep.cloud {
            w.write_record([
                ep.star.label().to_string(),
                num(pt.t),
                num(pt.lambda.re),
                num(pt.lambda.im),
            ])
            .map_err(csv_err)?;
        }
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_err)?;
    String::from_utf8(bytes).map_err(csv_err)
}

const CANVAS_PX: f64 = 640.0;
const ARC_SAMPLES: usize = 256;

fn extent(sets: &[&SpectralSet], points: &[Complex64]) -> f64 {
    let seg = sets
        .iter()
        .flat_map(|s| s.segments.iter())
        .map(|s| s.lo.abs().max(s.hi.abs()));
    let pts = points
        .iter()
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .map(|z| z.norm());
    seg.chain(pts).fold(1.0, f64::max) * 1.15
}

fn polyline(out: &mut String, pts: &[Complex64], color: &str, width: f64) {
    let coords: Vec<String> = pts
        .iter()
        .map(|z| format!("{:.6},{:.6}", z.re, -z.im))
        .collect();
    let _ = writeln!(
        out,
        r#"  <polyline points="{}" fill="none" stroke="{color}" stroke-width="{width}" stroke-linecap="round" vector-effect="non-scaling-stroke"/>"#,
        coords.join(" ")
    );
}

/// Plot of both endpoint sets in the complex plane: s = +1 pieces black,
/// s = -1 pieces gray, the unit circle dashed, optional eigenvalues as dots.
pub fn render_svg(sigma: &SigmaEss, eigenvalues: Option<&[Complex64]>) -> String {
    let sets = [&sigma.minus.set, &sigma.plus.set];
    let r = extent(&sets, eigenvalues.unwrap_or(&[]));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_PX}" height="{CANVAS_PX}" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        -r,
        -r,
        2.0 * r,
        2.0 * r
    );
    let _ = writeln!(
        out,
        "  <title>essential spectrum: -inf case {} (s={}), +inf case {} (s={})</title>",
        sigma.minus.set.case, sigma.minus.set.sign, sigma.plus.set.case, sigma.plus.set.sign
    );
    let _ = writeln!(
        out,
        r##"  <rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="#ffffff"/>"##,
        -r,
        -r,
        2.0 * r,
        2.0 * r
    );
    for (x1, y1, x2, y2) in [(-r, 0.0, r, 0.0), (0.0, -r, 0.0, r)] {
        let _ = writeln!(
            out,
            r##"  <line x1="{x1:.6}" y1="{y1:.6}" x2="{x2:.6}" y2="{y2:.6}" stroke="#cccccc" stroke-width="0.5" vector-effect="non-scaling-stroke"/>"##
        );
    }
    let _ = writeln!(
        out,
        r##"  <circle class="unit-circle" cx="0" cy="0" r="1" fill="none" stroke="#888888" stroke-width="1" stroke-dasharray="4 4" vector-effect="non-scaling-stroke"/>"##
    );
    for set in sets {
        let color = if set.sign > 0 { "#000000" } else { "#999999" };
        for piece in set.sample(ARC_SAMPLES) {
            polyline(&mut out, &piece, color, 4.0);
        }
    }
    if let Some(eigs) = eigenvalues {
        let dot = 0.006 * r;
        for z in eigs.iter().filter(|z| z.re.is_finite() && z.im.is_finite()) {
            let _ = writeln!(
                out,
                r##"  <circle class="eigenvalue" cx="{:.6}" cy="{:.6}" r="{dot:.6}" fill="#d62728"/>"##,
                z.re, -z.im
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
