//! Experiment configuration: JSON schema, unit ingestion and sweep
//! expansion.
//!
//! Rates and frequencies enter as `{value, unit}` pairs with units `rad_s`
//! or `hz_cycles` (the latter multiplied by 2*pi on ingestion), or as ratio
//! conveniences: `kappa` of `omega_m`, `kappa_ex` of `kappa`, `omega_0` of
//! `omega_m`. The bath is given either as `n_th` or as `temperature_K`,
//! exactly one of the two.

use fourwave::params::thermal_occupation;
use fourwave::SystemParams;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Physical parameters. Required for every mode except `preset`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSpec>,
    pub mode: Mode,
    /// Preset name, only for `mode = "preset"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Which gain component a `gain_spectrum` run reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<WhichField>,
    /// Spectrum modes: enumerates curves. Summary modes: the x-axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    /// Summary modes only: an outer curve family on top of `sweep`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SweepSpec>,
    /// Explicit frequency grid (rad/s). Defaults are resonance-centered and
    /// scale with the effective linewidth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Tolerance override for `oracle_check`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))
    }

    /// Canonical hash of the parsed configuration.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    GainSpectrum,
    NoiseSpectrum,
    SMaxSweep,
    StabilityScan,
    PeakGainSweep,
    OracleCheck,
    Preset,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::GainSpectrum => "gain_spectrum",
            Mode::NoiseSpectrum => "noise_spectrum",
            Mode::SMaxSweep => "s_max_sweep",
            Mode::StabilityScan => "stability_scan",
            Mode::PeakGainSweep => "peak_gain_sweep",
            Mode::OracleCheck => "oracle_check",
            Mode::Preset => "preset",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhichField {
    Signal,
    Fwm,
    Both,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    pub omega_m: Quantity,
    pub gamma_m: Quantity,
    pub kappa: Quantity,
    pub kappa_ex: Quantity,
    pub omega_0: Quantity,
    pub g_minus: Quantity,
    pub g_plus: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    #[serde(rename = "temperature_K", default, skip_serializing_if = "Option::is_none")]
    pub temperature_k: Option<f64>,
}

impl ParamsSpec {
    pub fn resolve(&self) -> Result<SystemParams, CliError> {
        let omega_m = self.omega_m.resolve("omega_m", &[])?;
        let gamma_m = self.gamma_m.resolve("gamma_m", &[])?;
        let kappa = self.kappa.resolve("kappa", &[("omega_m", omega_m)])?;
        let kappa_ex = self.kappa_ex.resolve("kappa_ex", &[("kappa", kappa)])?;
        let omega_0 = self.omega_0.resolve("omega_0", &[("omega_m", omega_m)])?;
        let g_minus = self.g_minus.resolve("g_minus", &[])?;
        let g_plus = self.g_plus.resolve("g_plus", &[])?;
        let n_th = match (self.n_th, self.temperature_k) {
            (Some(n), None) => n,
            (None, Some(t)) => thermal_occupation(omega_m, t),
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either n_th or temperature_K, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Config(
                    "one of n_th or temperature_K is required".into(),
                ))
            }
        };
        SystemParams::new(
            omega_m, gamma_m, kappa, kappa_ex, omega_0, g_minus, g_plus, n_th,
        )
        .map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

/// One physical quantity: `{value, unit}` or `{ratio_of, value}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Unit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_of: Option<String>,
}

impl Quantity {
    pub fn rad_s(value: f64) -> Self {
        Self {
            value,
            unit: Some(Unit::RadS),
            ratio_of: None,
        }
    }

    pub fn hz_cycles(value: f64) -> Self {
        Self {
            value,
            unit: Some(Unit::HzCycles),
            ratio_of: None,
        }
    }

    pub fn ratio_of(base: &str, value: f64) -> Self {
        Self {
            value,
            unit: None,
            ratio_of: Some(base.to_string()),
        }
    }

    fn resolve(&self, field: &str, allowed_bases: &[(&str, f64)]) -> Result<f64, CliError> {
        match (&self.unit, &self.ratio_of) {
            (Some(unit), None) => {
                let scale = match unit {
                    Unit::RadS => 1.0,
                    Unit::HzCycles => TAU,
                };
                Ok(self.value * scale)
            }
            (None, Some(base)) => allowed_bases
                .iter()
                .find(|(name, _)| name == base)
                .map(|(_, base_value)| self.value * base_value)
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "{field}: ratio_of \"{base}\" is not allowed here \
                         (allowed: {:?})",
                        allowed_bases.iter().map(|(n, _)| *n).collect::<Vec<_>>()
                    ))
                }),
            (Some(_), Some(_)) => Err(CliError::Config(format!(
                "{field}: give unit or ratio_of, not both"
            ))),
            (None, None) => Err(CliError::Config(format!(
                "{field}: a unit (rad_s | hz_cycles) or ratio_of is required"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    RadS,
    HzCycles,
}

/// A swept quantity: explicit `values` or a `{from, to, steps, scale}`
/// range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

impl SweepSpec {
    pub fn list(variable: SweepVariable, values: Vec<f64>) -> Self {
        Self {
            variable,
            values: Some(values),
            from: None,
            to: None,
            steps: None,
            scale: None,
        }
    }

    pub fn range(variable: SweepVariable, from: f64, to: f64, steps: usize, scale: Scale) -> Self {
        Self {
            variable,
            values: None,
            from: Some(from),
            to: Some(to),
            steps: Some(steps),
            scale: Some(scale),
        }
    }

    pub fn expand(&self) -> Result<Vec<f64>, CliError> {
        if let Some(values) = &self.values {
            if self.from.is_some() || self.to.is_some() || self.steps.is_some() {
                return Err(CliError::Config(
                    "sweep: give values or a from/to/steps range, not both".into(),
                ));
            }
            if values.is_empty() {
                return Err(CliError::Config("sweep: values list is empty".into()));
            }
            return Ok(values.clone());
        }
        let (from, to, steps) = match (self.from, self.to, self.steps) {
            (Some(f), Some(t), Some(s)) => (f, t, s),
            _ => {
                return Err(CliError::Config(
                    "sweep: either values or all of from/to/steps are required".into(),
                ))
            }
        };
        if steps < 2 {
            return Err(CliError::Config("sweep: steps must be >= 2".into()));
        }
        if !(from.is_finite() && to.is_finite() && from < to) {
            return Err(CliError::Config("sweep: need finite from < to".into()));
        }
        let scale = self.scale.unwrap_or(Scale::Lin);
        let points = match scale {
            Scale::Lin => linspace(from, to, steps),
            Scale::Log => {
                if from <= 0.0 {
                    return Err(CliError::Config("sweep: log scale needs from > 0".into()));
                }
                linspace(from.ln(), to.ln(), steps)
                    .into_iter()
                    .map(f64::exp)
                    .collect()
            }
        };
        Ok(points)
    }

    pub fn describe(&self) -> String {
        match &self.values {
            Some(values) => format!("{} in {:?}", self.variable.name(), values),
            None => format!(
                "{} from {} to {} in {} steps ({})",
                self.variable.name(),
                self.from.unwrap_or(f64::NAN),
                self.to.unwrap_or(f64::NAN),
                self.steps.unwrap_or(0),
                match self.scale.unwrap_or(Scale::Lin) {
                    Scale::Lin => "lin",
                    Scale::Log => "log",
                }
            ),
        }
    }
}

pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    let step = (to - from) / (steps - 1) as f64;
    (0..steps).map(|i| from + i as f64 * step).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    OmegaM,
    GammaM,
    Kappa,
    KappaEx,
    Omega0,
    GMinus,
    GPlus,
    NTh,
    #[serde(rename = "temperature_K")]
    TemperatureK,
    /// Sets `g_plus = value * g_minus`.
    Sigma,
    /// Sets `g_minus = value`, rescaling `g_plus` to keep the current
    /// ratio.
    GMinusFixedSigma,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::OmegaM => "omega_m",
            SweepVariable::GammaM => "gamma_m",
            SweepVariable::Kappa => "kappa",
            SweepVariable::KappaEx => "kappa_ex",
            SweepVariable::Omega0 => "omega_0",
            SweepVariable::GMinus => "g_minus",
            SweepVariable::GPlus => "g_plus",
            SweepVariable::NTh => "n_th",
            SweepVariable::TemperatureK => "temperature_K",
            SweepVariable::Sigma => "sigma",
            SweepVariable::GMinusFixedSigma => "g_minus_fixed_sigma",
        }
    }

    /// Applies one sweep value to a parameter set.
    pub fn apply(&self, base: &SystemParams, value: f64) -> SystemParams {
        let mut p = *base;
        match self {
            SweepVariable::OmegaM => p.omega_m = value,
            SweepVariable::GammaM => p.gamma_m = value,
            SweepVariable::Kappa => p.kappa = value,
            SweepVariable::KappaEx => p.kappa_ex = value,
            SweepVariable::Omega0 => p.omega_0 = value,
            SweepVariable::GMinus => p.g_minus = value,
            SweepVariable::GPlus => p.g_plus = value,
            SweepVariable::NTh => p.n_th = value,
            SweepVariable::TemperatureK => p.n_th = thermal_occupation(p.omega_m, value),
            SweepVariable::Sigma => p.g_plus = value * p.g_minus,
            SweepVariable::GMinusFixedSigma => {
                let sigma = p.sigma();
                p.g_minus = value;
                p.g_plus = sigma * value;
            }
        }
        p
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn expand(&self) -> Result<Vec<f64>, CliError> {
        if self.steps < 2 || !(self.from.is_finite() && self.to.is_finite()) || self.from >= self.to
        {
            return Err(CliError::Config(
                "grid: need finite from < to and steps >= 2".into(),
            ));
        }
        Ok(linspace(self.from, self.to, self.steps))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_oracle_points")]
    pub grid_points: usize,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            grid_points: default_oracle_points(),
            tol: default_oracle_tol(),
        }
    }
}

fn default_oracle_points() -> usize {
    16
}

fn default_oracle_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}
