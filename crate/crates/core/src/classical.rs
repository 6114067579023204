//! Classical reflected field: signal and four-wave-mixing amplitudes and
//! intensity-gain spectra.
//!
//! A monochromatic probe at detuning `delta_s` from the effective cavity
//! resonance reflects into two components: the amplified signal at
//! `delta_s` and a conjugate four-wave-mixing field at `-delta_s`. Gains
//! are intensity ratios relative to the probe and need no absolute probe
//! amplitude.

use num_complex::Complex64;

use crate::params::SystemParams;
use crate::response::{self, coefficients};
use crate::{Error, Result};

/// Probe field description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    /// Signal detuning from the effective cavity resonance (rad/s).
    pub delta_s: f64,
    /// Complex probe amplitude, arbitrary units. Only needed when absolute
    /// output amplitudes are requested; gains are ratios.
    pub alpha_s: Complex64,
}

/// Which reflected component a gain spectrum tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Signal,
    Fwm,
}

/// What a [`SpectrumSeries`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    GainSignal,
    GainFwm,
    NoiseDb,
    NoiseRaw,
}

/// A frequency grid with one real value per point and the parameter set
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    /// Strictly increasing grid (rad/s). For gain spectra this is the probe
    /// detuning `delta_s`; for noise spectra the analysis frequency.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
    pub params: SystemParams,
}

/// Reflected amplitudes produced by one probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedAmplitudes {
    /// Component at the probe detuning `delta_s`.
    pub signal: Complex64,
    /// Conjugate component at `-delta_s`.
    pub fwm: Complex64,
}

/// Reflected signal and four-wave-mixing amplitudes for a probe.
///
/// `signal = (a[delta_s] kappa_ex - 1) alpha_s` and
/// `fwm = b[-delta_s] kappa_ex alpha_s*`.
pub fn reflected_amplitudes(probe: &ProbeConfig, p: &SystemParams) -> Result<ReflectedAmplitudes> {
    response::require_stable(p)?;
    let direct = coefficients(probe.delta_s, p).a;
    let conjugate = coefficients(-probe.delta_s, p).b;
    Ok(ReflectedAmplitudes {
        signal: (direct * p.kappa_ex - 1.0) * probe.alpha_s,
        fwm: conjugate * p.kappa_ex * probe.alpha_s.conj(),
    })
}

/// Intensity gain of the reflected signal field,
/// `|a[delta_s] kappa_ex - 1|^2`.
pub fn gain_signal(delta_s: f64, p: &SystemParams) -> Result<f64> {
    response::require_stable(p)?;
    Ok(gain_signal_unchecked(delta_s, p))
}

/// Intensity gain of the four-wave-mixing field,
/// `|b[-delta_s] kappa_ex|^2`.
pub fn gain_fwm(delta_s: f64, p: &SystemParams) -> Result<f64> {
    response::require_stable(p)?;
    Ok(gain_fwm_unchecked(delta_s, p))
}

fn gain_signal_unchecked(delta_s: f64, p: &SystemParams) -> f64 {
    (coefficients(delta_s, p).a * p.kappa_ex - 1.0).norm_sqr()
}

fn gain_fwm_unchecked(delta_s: f64, p: &SystemParams) -> f64 {
    (coefficients(-delta_s, p).b * p.kappa_ex).norm_sqr()
}

/// Peak gains and their center frequencies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PeakGains {
    /// Signal gain at `delta_s = -delta_m_eff`.
    pub r_s: f64,
    /// Four-wave-mixing gain at the conjugate resonance.
    pub r_c: f64,
    /// Probe detuning of the signal peak, `-delta_m_eff` (rad/s).
    pub center_signal: f64,
    /// Output frequency of the four-wave-mixing peak, `+delta_m_eff`
    /// (rad/s).
    pub center_fwm: f64,
}

/// Peak gains evaluated at the closed-form centers `-+delta_m_eff`.
pub fn peak_gains(p: &SystemParams) -> Result<PeakGains> {
    let mech = response::require_stable(p)?;
    let center = -mech.delta_m_eff;
    Ok(PeakGains {
        r_s: gain_signal_unchecked(center, p),
        r_c: gain_fwm_unchecked(center, p),
        center_signal: center,
        center_fwm: -center,
    })
}

/// Default probe grid: `delta_s` spanning 40 effective linewidths on each
/// side of the signal resonance, 2001 points.
///
/// The resonant feature is `gamma_eff` narrow, so a fixed absolute grid
/// would undersample it; this one keeps tens of points across the width
/// for any stable parameter set.
pub fn default_grid(p: &SystemParams) -> Result<Vec<f64>> {
    let mech = response::require_stable(p)?;
    let center = -mech.delta_m_eff;
    let half_span = 40.0 * mech.gamma_eff;
    let n = 2001usize;
    let step = 2.0 * half_span / (n - 1) as f64;
    Ok((0..n).map(|i| center - half_span + i as f64 * step).collect())
}

/// Gain spectrum over an explicit probe-detuning grid.
pub fn gain_spectrum(grid: &[f64], p: &SystemParams, which: Field) -> Result<SpectrumSeries> {
    response::require_stable(p)?;
    check_grid(grid)?;
    let (kind, eval): (_, fn(f64, &SystemParams) -> f64) = match which {
        Field::Signal => (SpectrumKind::GainSignal, gain_signal_unchecked),
        Field::Fwm => (SpectrumKind::GainFwm, gain_fwm_unchecked),
    };
    Ok(SpectrumSeries {
        grid: grid.to_vec(),
        values: grid.iter().map(|&d| eval(d, p)).collect(),
        kind,
        params: *p,
    })
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("grid must not be empty".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("grid contains a non-finite value".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}
