//! JSON model configuration.
//!
//! ```json
//! {
//!   "model": "um",
//!   "m": 1,
//!   "profiles": {
//!     "gamma": { "left": 0.4, "right": 0.4 },
//!     "p": { "left": -0.2, "right": 0.2, "overrides": [{ "site": 0, "value": 0.5 }] },
//!     "a": { "left": -0.1, "right": 0.1 },
//!     "b": { "left": { "abs": 0.99498743710662, "arg": 0.3 }, "right": 0.99498743710662 }
//!   },
//!   "options": { "resolution": 2048, "window": 100, "tolerances": { "residual": 1e-10 } }
//! }
//! ```
//!
//! Values are a number, `{"re", "im"}` or `{"abs", "arg"}` (radians). For the
//! m-step model `q` and `b` may be omitted, in which case they are the real
//! nonnegative `sqrt(1 - p^2)` and `sqrt(1 - a^2)`. `gamma` (and `phi` for the
//! MKO model) default to zero. `options.unchecked` skips the unit constraints
//! so that deliberately corrupted walks can be fed to `verify`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParamsMko, ModelParamsUm};
use crate::numerics::{DEFAULT_KERNEL_THRESHOLD, DEFAULT_RESIDUAL_TOL};
use crate::profile::{ParameterProfile, ValueKind};
use crate::spectrum::DEFAULT_RESOLUTION;

pub const DEFAULT_WINDOW: i64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Um,
    Mko,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    Real(f64),
    Cartesian { re: f64, im: f64 },
    Polar { abs: f64, arg: f64 },
}

impl ValueSpec {
    pub fn value(self) -> Complex64 {
        match self {
            ValueSpec::Real(x) => Complex64::new(x, 0.0),
            ValueSpec::Cartesian { re, im } => Complex64::new(re, im),
            ValueSpec::Polar { abs, arg } => Complex64::from_polar(abs, arg),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub site: i64,
    pub value: ValueSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub left: ValueSpec,
    pub right: ValueSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideSpec>,
}

impl ProfileSpec {
    fn build(&self, path: &str, kind: ValueKind) -> Result<ParameterProfile> {
        let overrides: Vec<(i64, Complex64)> = self
            .overrides
            .iter()
            .map(|o| (o.site, o.value.value()))
            .collect();
        let mut sites = overrides.iter().map(|o| o.0).collect::<Vec<_>>();
        sites.sort_unstable();
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config(format!("{path}.overrides"), "duplicate site"));
        }
        ParameterProfile::new(self.left.value(), self.right.value(), overrides, kind)
            .map_err(|e| Error::config(path, e.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profiles {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta1: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta2: Option<ProfileSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Skips the unit constraints on the coins. Only meant for negative
    /// controls, whose residual checks are expected to fail.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unchecked: bool,
}

impl Options {
    pub fn resolution(&self) -> usize {
        self.resolution.unwrap_or(DEFAULT_RESOLUTION)
    }

    pub fn window(&self) -> i64 {
        self.window.unwrap_or(DEFAULT_WINDOW)
    }

    pub fn residual_tol(&self) -> f64 {
        self.tolerances.residual.unwrap_or(DEFAULT_RESIDUAL_TOL)
    }

    pub fn kernel_threshold(&self) -> f64 {
        self.tolerances.kernel.unwrap_or(DEFAULT_KERNEL_THRESHOLD)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    pub profiles: Profiles,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Um(ModelParamsUm),
    Mko(ModelParamsMko),
}

impl Model {
    /// The m-step parameters themselves, or the m = 2 parameters equivalent
    /// to an MKO model.
    pub fn um_params(&self) -> Result<ModelParamsUm> {
        match self {
            Model::Um(p) => Ok(p.clone()),
            Model::Mko(p) => crate::model::mko_to_um(p).map(|(um, _)| um),
        }
    }

    pub fn m(&self) -> i64 {
        match self {
            Model::Um(p) => p.m,
            Model::Mko(_) => 2,
        }
    }
}

fn required<'a>(spec: &'a Option<ProfileSpec>, name: &str) -> Result<&'a ProfileSpec> {
    spec.as_ref()
        .ok_or_else(|| Error::config(format!("profiles.{name}"), "missing profile"))
}

fn forbid(spec: &Option<ProfileSpec>, name: &str, model: &str) -> Result<()> {
    match spec {
        Some(_) => Err(Error::config(
            format!("profiles.{name}"),
            format!("not a parameter of the {model} model"),
        )),
        None => Ok(()),
    }
}

fn real_profile(spec: &Option<ProfileSpec>, name: &str) -> Result<ParameterProfile> {
    let path = format!("profiles.{name}");
    match spec {
        Some(s) => s.build(&path, ValueKind::Real),
        None => Ok(ParameterProfile::real(0.0)),
    }
}

fn complement(profile: &ParameterProfile) -> ParameterProfile {
    profile.map(|v| Complex64::new((1.0 - v.re * v.re).max(0.0).sqrt(), 0.0))
}

impl ModelConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }

    pub fn build(&self) -> Result<Model> {
        let pr = &self.profiles;
        match self.model {
            ModelKind::Um => {
                for (spec, name) in [
                    (&pr.phi, "phi"),
                    (&pr.theta1, "theta1"),
                    (&pr.theta2, "theta2"),
                ] {
                    forbid(spec, name, "um")?;
                }
                let m = self
                    .m
                    .ok_or_else(|| Error::config("m", "missing for model \"um\""))?;
                if m == 0 {
                    return Err(Error::config("m", "must be nonzero"));
                }
                let gamma = real_profile(&pr.gamma, "gamma")?;
                required(&pr.p, "p")?;
                required(&pr.a, "a")?;
                let p = real_profile(&pr.p, "p")?;
                let a = real_profile(&pr.a, "a")?;
                let q = match &pr.q {
                    Some(s) => s.build("profiles.q", ValueKind::Complex)?,
                    None => complement(&p),
                };
                let b = match &pr.b {
                    Some(s) => s.build("profiles.b", ValueKind::Complex)?,
                    None => complement(&a),
                };
                if self.options.unchecked {
                    return Ok(Model::Um(ModelParamsUm::new_unchecked(
                        m, gamma, p, a, q, b,
                    )));
                }
                ModelParamsUm::new(m, gamma, p, a, q, b)
                    .map(Model::Um)
                    .map_err(|e| Error::config("profiles", e.to_string()))
            }
            ModelKind::Mko => {
                for (spec, name) in [(&pr.p, "p"), (&pr.a, "a"), (&pr.q, "q"), (&pr.b, "b")] {
                    forbid(spec, name, "mko")?;
                }
                if let Some(m) = self.m {
                    if m != 2 {
                        return Err(Error::config("m", "the mko model always has m = 2"));
                    }
                }
                required(&pr.theta1, "theta1")?;
                required(&pr.theta2, "theta2")?;
                ModelParamsMko::new(
                    real_profile(&pr.gamma, "gamma")?,
                    real_profile(&pr.phi, "phi")?,
                    real_profile(&pr.theta1, "theta1")?,
                    real_profile(&pr.theta2, "theta2")?,
                )
                .map(Model::Mko)
                .map_err(|e| Error::config("profiles", e.to_string()))
            }
        }
    }
}
