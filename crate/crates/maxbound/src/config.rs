//! TOML run configuration: one optional table per subcommand.
//!
//! ```toml
//! [bound]
//! ineq = "poisson_upper"
//! lambda = 1.0
//! gamma = 1.0
//! tau = 1.0
//! ```
//!
//! Unknown keys are rejected. Command-line flags override file values.

use std::fmt;
use std::path::PathBuf;

use maxbound_core::bounds::{
    azuma_bound, cbb_bounds, doob_exp_bound, eta_bound, expfam_bound, line_bound, optimized_line_bound,
    poisson_bounds, supermartingale_sup_bound, vee_bound, AzumaKind, BoundReport, CbbKind, EtaVariant, ExpFamily,
    ExpFamilyKind, InequalityId,
};
use maxbound_core::mgf::{make_phi, MgfBound, PhiKind, Side};
use maxbound_core::optimize::DEFAULT_TOL;
use maxbound_core::sim::ProcessSpec;
use serde::{Deserialize, Serialize};

pub const OUT_DIR_ENV: &str = "MAXBOUND_OUT_DIR";

/// A configuration problem tied to one key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { key: key.into(), message: message.into() }
    }

    fn missing(key: &str) -> Self {
        Self::new(key, "is required")
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key `{}` {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validate: Option<ValidateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new(offending_key(&e), e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are representable in TOML")
    }
}

/// Best-effort name of the key a TOML error refers to.
fn offending_key(e: &toml::de::Error) -> String {
    let msg = e.message();
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        return rest.split('`').next().unwrap_or("?").to_string();
    }
    if let Some(rest) = msg.strip_prefix("missing field `") {
        return rest.split('`').next().unwrap_or("?").to_string();
    }
    "<file>".to_string()
}

/// Parameters for one inequality.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ineq: Option<InequalityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// `V_τ`; also `V_m` for the bounded-increment bounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vtau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ExpFamilyKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuous: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims_equality: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Why a bound could not be computed.
#[derive(Debug)]
pub enum BoundError {
    Config(ConfigError),
    Core(maxbound_core::Error),
}

impl From<ConfigError> for BoundError {
    fn from(e: ConfigError) -> Self {
        BoundError::Config(e)
    }
}

impl From<maxbound_core::Error> for BoundError {
    fn from(e: maxbound_core::Error) -> Self {
        BoundError::Core(e)
    }
}

impl fmt::Display for BoundError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundError::Config(e) => e.fmt(f),
            BoundError::Core(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for BoundError {}

fn req<T: Copy>(v: Option<T>, key: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::missing(key))
}

impl BoundConfig {
    fn phi(&self) -> Result<MgfBound, BoundError> {
        Ok(make_phi(req(self.phi, "phi")?)?)
    }

    /// Evaluates the selected inequality.
    pub fn compute(&self) -> Result<BoundReport, BoundError> {
        use InequalityId::*;
        let id = req(self.ineq, "ineq")?;
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        let side = match id {
            GenLineLower | VeeLower | EtaRayLower | EtaVeeLower | AzumaLower | ExpFamLower | PoissonLower => Side::Lower,
            _ => Side::Upper,
        };
        let gamma = || req(self.gamma, "gamma");
        let vtau = || req(self.vtau, "vtau");
        let r = match id {
            GenLineUpper | GenLineLower => match self.s {
                Some(s) => line_bound(&self.phi()?, s, gamma()?, vtau()?, side)?,
                None => optimized_line_bound(&self.phi()?, gamma()?, vtau()?, side, tol)?,
            },
            VeeUpper | VeeLower => vee_bound(&self.phi()?, gamma()?, vtau()?, side, tol)?,
            EtaRayUpper | EtaRayLower => {
                eta_bound(&self.phi()?, gamma()?, req(self.eta, "eta")?, 0.0, side, EtaVariant::Ray, tol)?
            }
            EtaVeeUpper | EtaVeeLower => {
                eta_bound(&self.phi()?, gamma()?, req(self.eta, "eta")?, vtau()?, side, EtaVariant::Vee, tol)?
            }
            AzumaUpper => azuma_bound(gamma()?, vtau()?, AzumaKind::Upper)?,
            AzumaLower => azuma_bound(gamma()?, vtau()?, AzumaKind::Lower)?,
            AzumaTwoSided => azuma_bound(gamma()?, vtau()?, AzumaKind::TwoSided)?,
            BennettCbb => cbb_bounds(gamma()?, vtau()?, req(self.b, "b")?, CbbKind::Bennett)?,
            BernsteinCbb => cbb_bounds(gamma()?, vtau()?, req(self.b, "b")?, CbbKind::Bernstein)?,
            ChernoffSub => cbb_bounds(gamma()?, vtau()?, self.b.unwrap_or(1.0), CbbKind::ChernoffSub)?,
            ExpFamUpper | ExpFamLower => {
                let fam = ExpFamily::builtin(req(self.family, "family")?);
                expfam_bound(&fam, req(self.theta, "theta")?, gamma()?, req(self.m, "m")?, side)?
            }
            PoissonUpper | PoissonLower => poisson_bounds(req(self.lambda, "lambda")?, gamma()?, req(self.tau, "tau")?, side)?,
            SupermartingaleSup => supermartingale_sup_bound(
                req(self.mean0, "mean0")?,
                self.c.unwrap_or(0.0),
                gamma()?,
                self.continuous.unwrap_or(false),
            )?,
            DoobExp => doob_exp_bound(gamma()?, self.claims_equality.unwrap_or(false))?,
        };
        Ok(r)
    }
}

/// One explicit validation row: a bound whose event is simulated.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RowConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub bound: BoundConfig,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    /// Process for explicit rows; ignored when a preset is named.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<RowConfig>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Parses the compact `--phi` form: `kind` or `kind:key=value,key=value`.
///
/// `gaussian` alone means `v = 1`.
pub fn parse_phi(text: &str) -> Result<PhiKind, ConfigError> {
    let (kind, args) = text.split_once(':').unwrap_or((text, ""));
    let mut table = format!("kind = \"{}\"\n", kind.trim());
    let mut has_v = false;
    for kv in args.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::new("phi", format!("expected key=value, got `{kv}`")))?;
        let v: f64 = v.trim().parse().map_err(|_| ConfigError::new("phi", format!("`{v}` is not a number")))?;
        has_v |= k.trim() == "v";
        table.push_str(&format!("{} = {v:?}\n", k.trim()));
    }
    if kind.trim() == "gaussian" && !has_v {
        table.push_str("v = 1.0\n");
    }
    toml::from_str(&table).map_err(|e| ConfigError::new("phi", e.message().to_string()))
}
