//! Eventually constant coefficient sequences on the integer lattice.
//!
//! A [`ParameterProfile`] stores one value for the far left (`x < 0`), one for
//! the far right (`x >= 0`) and a finite table of overrides. The two-sided
//! limits are therefore exact, and every shift, product or sum of profiles is
//! again a profile of the same kind.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two ends of the lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Endpoint {
    #[serde(rename = "-inf")]
    MinusInfinity,
    #[serde(rename = "+inf")]
    PlusInfinity,
}

impl Endpoint {
    pub const BOTH: [Endpoint; 2] = [Endpoint::MinusInfinity, Endpoint::PlusInfinity];

    /// The endpoint whose tail a site belongs to: `x >= 0` is `+inf`, `x < 0` is `-inf`.
    pub fn of_site(x: i64) -> Endpoint {
        if x >= 0 {
            Endpoint::PlusInfinity
        } else {
            Endpoint::MinusInfinity
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Endpoint::MinusInfinity => "-inf",
            Endpoint::PlusInfinity => "+inf",
        }
    }

    pub fn parse(s: &str) -> Option<Endpoint> {
        match s {
            "-inf" => Some(Endpoint::MinusInfinity),
            "+inf" => Some(Endpoint::PlusInfinity),
            _ => None,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Real,
    Complex,
}

/// An eventually constant complex sequence `(xi(x))_{x in Z}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterProfile {
    left: Complex64,
    right: Complex64,
    overrides: BTreeMap<i64, Complex64>,
    kind: ValueKind,
}

impl ParameterProfile {
    /// Builds a profile, rejecting non-finite values and, for `ValueKind::Real`,
    /// any value with a nonzero imaginary part.
    pub fn new(
        left: Complex64,
        right: Complex64,
        overrides: impl IntoIterator<Item = (i64, Complex64)>,
        kind: ValueKind,
    ) -> Result<Self> {
        let overrides: BTreeMap<i64, Complex64> = overrides.into_iter().collect();
        let check = |what: String, v: Complex64| -> Result<()> {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidParams(format!("{what} is not finite")));
            }
            if kind == ValueKind::Real && v.im != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{what} = {v} has a nonzero imaginary part in a real profile"
                )));
            }
            Ok(())
        };
        check("left limit".into(), left)?;
        check("right limit".into(), right)?;
        for (&x, &v) in &overrides {
            check(format!("value at site {x}"), v)?;
        }
        let mut profile = ParameterProfile {
            left,
            right,
            overrides,
            kind,
        };
        profile.canonicalize();
        Ok(profile)
    }

    pub fn constant(value: Complex64) -> Self {
        Self::two_phase(value, value)
    }

    pub fn real(value: f64) -> Self {
        Self::real_two_phase(value, value)
    }

    pub fn two_phase(left: Complex64, right: Complex64) -> Self {
        ParameterProfile {
            left,
            right,
            overrides: BTreeMap::new(),
            kind: detect_kind(left, right, std::iter::empty()),
        }
    }

    pub fn real_two_phase(left: f64, right: f64) -> Self {
        ParameterProfile {
            left: Complex64::new(left, 0.0),
            right: Complex64::new(right, 0.0),
            overrides: BTreeMap::new(),
            kind: ValueKind::Real,
        }
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    /// Replaces the value at one site. A real profile stays real only if
    /// `value` is real.
    pub fn with_override(mut self, site: i64, value: Complex64) -> Self {
        self.overrides.insert(site, value);
        if value.im != 0.0 {
            self.kind = ValueKind::Complex;
        }
        self.canonicalize();
        self
    }

    /// Samples `f` on `lo..=hi`; outside that window the profile takes the
    /// given limits.
    pub fn from_fn(
        left: Complex64,
        right: Complex64,
        lo: i64,
        hi: i64,
        f: impl Fn(i64) -> Complex64,
    ) -> Self {
        let overrides: BTreeMap<i64, Complex64> = (lo..=hi).map(|x| (x, f(x))).collect();
        let kind = detect_kind(left, right, overrides.values().copied());
        let mut profile = ParameterProfile {
            left,
            right,
            overrides,
            kind,
        };
        profile.canonicalize();
        profile
    }

    fn canonicalize(&mut self) {
        let (left, right) = (self.left, self.right);
        self.overrides
            .retain(|&x, v| *v != if x < 0 { left } else { right });
    }

    pub fn value(&self, x: i64) -> Complex64 {
        match self.overrides.get(&x) {
            Some(&v) => v,
            None if x < 0 => self.left,
            None => self.right,
        }
    }

    pub fn real_value(&self, x: i64) -> f64 {
        self.value(x).re
    }

    pub fn limit(&self, star: Endpoint) -> Complex64 {
        match star {
            Endpoint::MinusInfinity => self.left,
            Endpoint::PlusInfinity => self.right,
        }
    }

    pub fn left_limit(&self) -> Complex64 {
        self.left
    }

    pub fn right_limit(&self) -> Complex64 {
        self.right
    }

    pub fn overrides(&self) -> &BTreeMap<i64, Complex64> {
        &self.overrides
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn is_real(&self) -> bool {
        self.kind == ValueKind::Real
    }

    /// Smallest interval containing site 0 and every override. Outside it the
    /// profile equals its left or right limit.
    pub fn span(&self) -> (i64, i64) {
        let lo = self.overrides.keys().next().copied().unwrap_or(0).min(0);
        let hi = self
            .overrides
            .keys()
            .next_back()
            .copied()
            .unwrap_or(0)
            .max(0);
        (lo, hi)
    }

    /// The profile `x -> self(x + s)`.
    pub fn shifted(&self, s: i64) -> Self {
        if s == 0 {
            return self.clone();
        }
        let (lo, hi) = self.span();
        let lo = (lo - s).min(-s.abs());
        let hi = (hi - s).max(s.abs());
        let mut out = Self::from_fn(self.left, self.right, lo, hi, |x| self.value(x + s));
        out.kind = self.kind;
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let left = f(self.left);
        let right = f(self.right);
        let overrides: BTreeMap<i64, Complex64> =
            self.overrides.iter().map(|(&x, &v)| (x, f(v))).collect();
        let kind = detect_kind(left, right, overrides.values().copied());
        let mut out = ParameterProfile {
            left,
            right,
            overrides,
            kind,
        };
        out.canonicalize();
        out
    }

    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Self {
        self.map(|v| Complex64::new(f(v.re), 0.0))
    }

    pub fn zip_with(
        &self,
        other: &ParameterProfile,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Self {
        let (lo1, hi1) = self.span();
        let (lo2, hi2) = other.span();
        Self::from_fn(
            f(self.left, other.left),
            f(self.right, other.right),
            lo1.min(lo2),
            hi1.max(hi2),
            |x| f(self.value(x), other.value(x)),
        )
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn is_zero(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        self.left == zero && self.right == zero && self.overrides.is_empty()
    }

    /// Every distinct value the profile takes: both limits and all overrides.
    pub fn values(&self) -> impl Iterator<Item = (Option<i64>, Complex64)> + '_ {
        [(None, self.left), (None, self.right)]
            .into_iter()
            .chain(self.overrides.iter().map(|(&x, &v)| (Some(x), v)))
    }

    /// Supremum over the lattice of `|self(x) - other(x)|`, exact for
    /// eventually constant profiles.
    pub fn max_abs_diff(&self, other: &ParameterProfile) -> f64 {
        self.zip_with(other, |a, b| a - b)
            .values()
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ParameterProfile, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

fn detect_kind(
    left: Complex64,
    right: Complex64,
    rest: impl Iterator<Item = Complex64>,
) -> ValueKind {
    let mut all = [left, right].into_iter().chain(rest);
    if all.all(|v| v.im == 0.0) {
        ValueKind::Real
    } else {
        ValueKind::Complex
    }
}

impl Add for &ParameterProfile {
    type Output = ParameterProfile;
    fn add(self, rhs: &ParameterProfile) -> ParameterProfile {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &ParameterProfile {
    type Output = ParameterProfile;
    fn sub(self, rhs: &ParameterProfile) -> ParameterProfile {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul for &ParameterProfile {
    type Output = ParameterProfile;
    fn mul(self, rhs: &ParameterProfile) -> ParameterProfile {
        self.zip_with(rhs, |a, b| a * b)
    }
}

impl Neg for &ParameterProfile {
    type Output = ParameterProfile;
    fn neg(self) -> ParameterProfile {
        self.map(|v| -v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tails_follow_sign_convention() {
        let p = ParameterProfile::real_two_phase(-0.2, 0.2).with_override(3, c(0.5, 0.0));
        assert_eq!(p.value(-1).re, -0.2);
        assert_eq!(p.value(0).re, 0.2);
        assert_eq!(p.value(3).re, 0.5);
        assert_eq!(p.value(-1000).re, -0.2);
        assert_eq!(p.limit(Endpoint::PlusInfinity).re, 0.2);
        assert!(p.is_real());
    }

    #[test]
    fn real_kind_rejects_imaginary_values() {
        let err = ParameterProfile::new(c(0.0, 0.0), c(0.0, 1.0), [], ValueKind::Real);
        assert!(err.is_err());
        let ok = ParameterProfile::new(c(0.0, 0.0), c(0.0, 1.0), [], ValueKind::Complex);
        assert!(ok.is_ok());
    }

    #[test]
    fn redundant_overrides_are_dropped() {
        let p = ParameterProfile::new(
            c(1.0, 0.0),
            c(2.0, 0.0),
            [(-3, c(1.0, 0.0)), (4, c(2.0, 0.0))],
            ValueKind::Real,
        )
        .unwrap();
        assert!(p.overrides().is_empty());
    }

    #[test]
    fn shift_moves_the_domain_wall() {
        let p = ParameterProfile::real_two_phase(-1.0, 1.0).with_override(2, c(7.0, 0.0));
        let s = p.shifted(3);
        for x in -20..20 {
            assert_eq!(s.value(x), p.value(x + 3), "site {x}");
        }
        let s = p.shifted(-4);
        for x in -20..20 {
            assert_eq!(s.value(x), p.value(x - 4), "site {x}");
        }
        assert_eq!(
            s.limit(Endpoint::MinusInfinity),
            p.limit(Endpoint::MinusInfinity)
        );
    }

    #[test]
    fn products_stay_eventually_constant() {
        let p = ParameterProfile::real_two_phase(-0.5, 0.5).with_override(-2, c(3.0, 0.0));
        let q = ParameterProfile::two_phase(c(0.0, 1.0), c(2.0, 0.0)).with_override(5, c(1.0, 1.0));
        let r = &p * &q;
        for x in -30..30 {
            assert_eq!(r.value(x), p.value(x) * q.value(x));
        }
        assert_eq!(r.limit(Endpoint::MinusInfinity), c(0.0, -0.5));
        assert_eq!(r.kind(), ValueKind::Complex);
    }

    #[test]
    fn max_abs_diff_sees_overrides_and_tails() {
        let p = ParameterProfile::real(1.0);
        let q = ParameterProfile::real(1.0).with_override(10, c(1.5, 0.0));
        assert_eq!(p.max_abs_diff(&q), 0.5);
        let r = ParameterProfile::real_two_phase(1.0, 1.25);
        assert_eq!(p.max_abs_diff(&r), 0.25);
    }
}
