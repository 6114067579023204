//! Physical parameter model and unit discipline.
//!
//! Every rate and frequency stored here is in rad/s. Quantities quoted in
//! cyclic Hz must be multiplied by 2*pi before they enter a [`SystemParams`];
//! the CLI does this on ingestion for `hz_cycles` inputs. The bath is
//! described by its mean phonon occupation `n_th`; a temperature is a
//! convenience that converts to `n_th` through [`thermal_occupation`] at
//! ingestion time.

use serde::Serialize;
use std::fmt;

/// Physical constants (CODATA 2018).
pub mod constants {
    /// Reduced Planck constant (J s).
    pub const HBAR: f64 = 1.054571817e-34;
    /// Boltzmann constant (J/K).
    pub const K_B: f64 = 1.380649e-23;
}

/// All physical rates and frequencies of the optomechanical system, in
/// rad/s, plus the bath occupation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Mechanical resonance frequency (rad/s).
    pub omega_m: f64,
    /// Intrinsic mechanical damping rate (rad/s).
    pub gamma_m: f64,
    /// Total cavity decay rate (rad/s).
    pub kappa: f64,
    /// External decay rate through the input mirror (rad/s).
    pub kappa_ex: f64,
    /// Two-tone modulation frequency: offset of each pump sideband from the
    /// cavity resonance (rad/s).
    pub omega_0: f64,
    /// Beam-splitter coupling strength, driven by the red sideband (rad/s).
    pub g_minus: f64,
    /// Two-mode-squeezing coupling strength, driven by the blue sideband
    /// (rad/s).
    pub g_plus: f64,
    /// Mean thermal phonon occupation of the mechanical bath.
    pub n_th: f64,
}

impl SystemParams {
    /// Builds a parameter set, rejecting structural invariant violations.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        omega_m: f64,
        gamma_m: f64,
        kappa: f64,
        kappa_ex: f64,
        omega_0: f64,
        g_minus: f64,
        g_plus: f64,
        n_th: f64,
    ) -> crate::Result<Self> {
        let p = Self {
            omega_m,
            gamma_m,
            kappa,
            kappa_ex,
            omega_0,
            g_minus,
            g_plus,
            n_th,
        };
        let structural = p.structural_report();
        if structural.has_errors() {
            return Err(crate::Error::InvalidParams(structural));
        }
        Ok(p)
    }

    /// Internal loss rate `kappa - kappa_ex` (rad/s).
    pub fn kappa_0(&self) -> f64 {
        self.kappa - self.kappa_ex
    }

    /// Mechanical frequency detuning `omega_m - omega_0` (rad/s).
    pub fn delta_m(&self) -> f64 {
        self.omega_m - self.omega_0
    }

    /// Coupling ratio `g_plus / g_minus`. Meaningful only for `g_minus > 0`.
    pub fn sigma(&self) -> f64 {
        self.g_plus / self.g_minus
    }

    /// Escape efficiency `kappa_ex / kappa`.
    pub fn escape_efficiency(&self) -> f64 {
        self.kappa_ex / self.kappa
    }

    /// Full validation: structural invariants, regime assumptions and
    /// mechanical stability.
    ///
    /// Structural violations and instability are errors; a violated regime
    /// assumption (resolved sideband, weak coupling) is a warning. An empty
    /// report means every model assumption is comfortably satisfied.
    pub fn validate(&self) -> ValidationReport {
        let mut report = self.structural_report();
        if report.has_errors() {
            return report;
        }
        if self.kappa > 0.2 * self.omega_m {
            report.push(
                Severity::Warning,
                ValidationCode::SidebandResolution,
                format!(
                    "kappa = {:.3e} rad/s exceeds 0.2*omega_m = {:.3e} rad/s; \
                     the rotating-wave treatment degrades outside the \
                     resolved-sideband regime",
                    self.kappa,
                    0.2 * self.omega_m
                ),
            );
        }
        let g_max = self.g_minus.max(self.g_plus);
        if g_max > 0.1 * self.kappa {
            report.push(
                Severity::Warning,
                ValidationCode::WeakCoupling,
                format!(
                    "max(g_minus, g_plus) = {:.3e} rad/s exceeds 0.1*kappa = \
                     {:.3e} rad/s; weak-coupling expressions lose accuracy",
                    g_max,
                    0.1 * self.kappa
                ),
            );
        }
        let mech = crate::response::mechanical_response(self);
        if mech.gamma_eff <= 0.0 {
            report.push(
                Severity::Error,
                ValidationCode::Unstable,
                format!(
                    "gamma_eff = {:.6e} rad/s <= 0; reduce g_plus below the \
                     stability boundary",
                    mech.gamma_eff
                ),
            );
        }
        report
    }

    /// Checks only the structural field invariants.
    pub(crate) fn structural_report(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let fields = [
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("kappa", self.kappa),
            ("kappa_ex", self.kappa_ex),
            ("omega_0", self.omega_0),
            ("g_minus", self.g_minus),
            ("g_plus", self.g_plus),
            ("n_th", self.n_th),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                report.push(
                    Severity::Error,
                    ValidationCode::NonFinite,
                    format!("{name} = {value} is not finite"),
                );
            }
        }
        if report.has_errors() {
            return report;
        }
        for (name, value) in [
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("kappa", self.kappa),
        ] {
            if value <= 0.0 {
                report.push(
                    Severity::Error,
                    ValidationCode::NonPositiveRate,
                    format!("{name} = {value:.6e} rad/s must be > 0"),
                );
            }
        }
        if self.kappa_ex <= 0.0 || self.kappa_ex > self.kappa {
            report.push(
                Severity::Error,
                ValidationCode::KappaExOutOfRange,
                format!(
                    "kappa_ex = {:.6e} rad/s must satisfy 0 < kappa_ex <= \
                     kappa = {:.6e} rad/s",
                    self.kappa_ex, self.kappa
                ),
            );
        }
        for (name, value) in [("g_minus", self.g_minus), ("g_plus", self.g_plus)] {
            if value < 0.0 {
                report.push(
                    Severity::Error,
                    ValidationCode::NegativeCoupling,
                    format!("{name} = {value:.6e} rad/s must be >= 0"),
                );
            }
        }
        if self.n_th < 0.0 {
            report.push(
                Severity::Error,
                ValidationCode::NegativeOccupation,
                format!("n_th = {:.6e} must be >= 0", self.n_th),
            );
        }
        report
    }
}

/// Pump tone description for the coupling-strength helper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveConfig {
    /// Single-photon optomechanical coupling (rad/s).
    pub g0: f64,
    /// Optical power of one pump tone (W).
    pub pump_power: f64,
    /// Absolute optical frequency of that tone (rad/s).
    pub pump_frequency: f64,
}

impl DriveConfig {
    pub fn new(g0: f64, pump_power: f64, pump_frequency: f64) -> crate::Result<Self> {
        for (name, value) in [
            ("g0", g0),
            ("pump_power", pump_power),
            ("pump_frequency", pump_frequency),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(crate::Error::Domain(format!(
                    "DriveConfig::{name} = {value} must be finite and > 0"
                )));
            }
        }
        Ok(Self {
            g0,
            pump_power,
            pump_frequency,
        })
    }
}

/// Which pump sideband a drive populates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sideband {
    /// Red-shifted tone at `omega_c - omega_0`; feeds the beam-splitter
    /// coupling `g_minus`.
    Lower,
    /// Blue-shifted tone at `omega_c + omega_0`; feeds the two-mode-squeezing
    /// coupling `g_plus`.
    Upper,
}

/// Severity of a validation finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// Machine-readable validation codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationCode {
    NonFinite,
    NonPositiveRate,
    KappaExOutOfRange,
    NegativeCoupling,
    NegativeOccupation,
    SidebandResolution,
    WeakCoupling,
    Unstable,
}

/// One validation finding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub severity: Severity,
    pub code: ValidationCode,
    pub message: String,
}

/// Outcome of [`SystemParams::validate`].
///
/// Any entry with [`Severity::Error`] makes downstream driven-response
/// computations refuse the parameter set.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    fn push(&mut self, severity: Severity, code: ValidationCode, message: String) {
        self.entries.push(ValidationEntry {
            severity,
            code,
            message,
        });
    }

    pub fn has_errors(&self) -> bool {
        self.entries
            .iter()
            .any(|e| e.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries
            .iter()
            .filter(|e| e.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationEntry> {
        self.entries
            .iter()
            .filter(|e| e.severity == Severity::Warning)
    }

    /// True when no assumption is violated at all, not even at warning level.
    pub fn is_clean(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "ok");
        }
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let tag = match e.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            write!(f, "{tag}[{:?}]: {}", e.code, e.message)?;
        }
        Ok(())
    }
}

/// Mean thermal phonon occupation of an oscillator at `omega_m` (rad/s)
/// coupled to a bath at `temperature` (K).
///
/// Bose-Einstein: `n = 1 / (exp(hbar w / kB T) - 1)`, evaluated through
/// `exp_m1` so the high-temperature regime keeps full precision. A bath at
/// 0 K returns exactly 0.
pub fn thermal_occupation(omega_m: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = constants::HBAR * omega_m / (constants::K_B * temperature);
    1.0 / x.exp_m1()
}

/// Coupling strength produced by one pump tone of the two-tone drive.
///
/// The tone builds a mean intracavity amplitude
/// `sqrt(kappa_ex) * sqrt(P / hbar w_pump) / |(-+ i omega_0) + kappa/2|`
/// and the linearized coupling is `g0` times that amplitude. Both sidebands
/// see the same denominator magnitude `sqrt(omega_0^2 + kappa^2/4)`, so
/// equal pump powers give equal couplings.
pub fn coupling_from_pump(drive: &DriveConfig, p: &SystemParams, _sideband: Sideband) -> f64 {
    let photon_flux_amplitude =
        (drive.pump_power / (constants::HBAR * drive.pump_frequency)).sqrt();
    let denominator = f64::hypot(p.omega_0, p.kappa / 2.0);
    drive.g0 * p.kappa_ex.sqrt() * photon_flux_amplitude / denominator
}
