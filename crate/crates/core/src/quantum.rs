//! Quadrature correlation spectra of the combined signal and
//! four-wave-mixing output field.
//!
//! The two output components live at `+-delta_s`. Their amplitude
//! quadrature sum and phase quadrature difference share one noise power
//! spectrum `S_sq[w]`; values below the shot-noise level 1/2 certify
//! two-color quantum correlation. Spectra are reported both raw and in dB
//! of suppression, `S = -10 log10(S_sq / (1/2))`, so positive dB means
//! squeezing below shot noise.
//!
//! Complex arithmetic is carried through every intermediate product; the
//! real part is taken only after the four correlation terms are combined,
//! where the imaginary parts cancel.

use num_complex::Complex64;

use crate::params::SystemParams;
use crate::response::{self, coefficients, CoefficientSet};
use crate::{Error, Result};

/// The four correlation terms at one analysis frequency, kept complex until
/// combination.
///
/// `s_ss`/`s_cc` are the self-correlations of the signal and conjugate
/// components; `s_sc`/`s_cs` the cross-correlations that generate the
/// entanglement. The phase-quadrature versions follow by flipping the sign
/// of the two cross terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTerms {
    pub omega: f64,
    pub s_ss: Complex64,
    pub s_cc: Complex64,
    pub s_sc: Complex64,
    pub s_cs: Complex64,
}

impl CorrelationTerms {
    /// Amplitude-quadrature-sum spectrum value (complex; physical value is
    /// the real part).
    pub fn s_xx_plus(&self) -> Complex64 {
        (self.s_ss + self.s_cc + self.s_sc + self.s_cs) / 2.0
    }

    /// Phase-quadrature-difference spectrum value, combined from the
    /// Y-quadrature terms `(s_ss, s_cc, -s_sc, -s_cs)` with the difference
    /// signs.
    pub fn s_yy_minus(&self) -> Complex64 {
        let (yy_sc, yy_cs) = (-self.s_sc, -self.s_cs);
        (self.s_ss + self.s_cc - yy_sc - yy_cs) / 2.0
    }
}

struct BlockSets {
    /// Coefficients at `w1 = w - delta_s` and `-w1`.
    co: (CoefficientSet, CoefficientSet),
    /// Coefficients at `w2 = w + delta_s` and `-w2`.
    conj: (CoefficientSet, CoefficientSet),
}

fn block_sets(omega: f64, delta_s: f64, p: &SystemParams) -> BlockSets {
    let w1 = omega - delta_s;
    let w2 = omega + delta_s;
    BlockSets {
        co: (coefficients(w1, p), coefficients(-w1, p)),
        conj: (coefficients(w2, p), coefficients(-w2, p)),
    }
}

/// Self-correlation of one output component.
///
/// `(fa, fb)` are the coefficient sets at that component's frequency and
/// its negative; `(ga, gb)` the sets of the partner component.
fn self_term(
    fa: &CoefficientSet,
    fb: &CoefficientSet,
    ga: &CoefficientSet,
    gb: &CoefficientSet,
    p: &SystemParams,
) -> Complex64 {
    let kx = p.kappa_ex;
    let k0 = p.kappa_0();
    let n = p.n_th;
    0.5 * ((fa.a * kx - 1.0) * (fb.n * kx - 1.0)
        + ga.m * gb.b * kx * kx
        + (fa.a * fb.n + ga.m * gb.b) * kx * k0
        + kx * p.gamma_m
            * ((fa.c * fb.q + ga.p * gb.d) * (n + 1.0) + (fa.d * fb.p + ga.q * gb.c) * n))
}

/// Cross-correlation between the two output components (X-quadrature sign).
fn cross_term(
    fa: &CoefficientSet,
    fb: &CoefficientSet,
    ga: &CoefficientSet,
    gb: &CoefficientSet,
    p: &SystemParams,
) -> Complex64 {
    let kx = p.kappa_ex;
    let k0 = p.kappa_0();
    let n = p.n_th;
    0.5 * (((fa.a * kx - 1.0) * fb.b + ga.m * (gb.n * kx - 1.0)) * kx
        + (fa.a * fb.b + ga.m * gb.n) * kx * k0
        + kx * p.gamma_m
            * ((fa.c * fb.d + ga.p * gb.q) * (n + 1.0) + (fa.d * fb.c + ga.q * gb.p) * n))
}

/// Evaluates the four correlation terms at analysis frequency `omega` for a
/// probe at `delta_s`.
pub fn correlation_terms(omega: f64, delta_s: f64, p: &SystemParams) -> Result<CorrelationTerms> {
    response::require_stable(p)?;
    Ok(correlation_terms_unchecked(omega, delta_s, p))
}

fn correlation_terms_unchecked(omega: f64, delta_s: f64, p: &SystemParams) -> CorrelationTerms {
    let s = block_sets(omega, delta_s, p);
    let (c1, c1n) = (&s.co.0, &s.co.1);
    let (c2, c2n) = (&s.conj.0, &s.conj.1);
    CorrelationTerms {
        omega,
        s_ss: self_term(c1, c1n, c2, c2n, p),
        s_cc: self_term(c2, c2n, c1, c1n, p),
        s_sc: cross_term(c1, c1n, c2, c2n, p),
        s_cs: cross_term(c2, c2n, c1, c1n, p),
    }
}

/// Variant of the self-correlation terms with the conjugate thermal
/// partners swapped inside the `(n_th + 1)`-weighted products.
///
/// This pairing is not self-consistent with the equations of motion (the
/// matrix solve in [`crate::oracle`] disagrees with it whenever the thermal
/// load matters); it is retained so comparison reports can itemize its
/// deviation as a regression guard. The cross terms are unaffected.
pub(crate) fn correlation_terms_swapped_thermal(
    omega: f64,
    delta_s: f64,
    p: &SystemParams,
) -> CorrelationTerms {
    let s = block_sets(omega, delta_s, p);
    let (c1, c1n) = (&s.co.0, &s.co.1);
    let (c2, c2n) = (&s.conj.0, &s.conj.1);
    let kx = p.kappa_ex;
    let k0 = p.kappa_0();
    let n = p.n_th;
    let swapped_self = |fa: &CoefficientSet,
                        fb: &CoefficientSet,
                        ga: &CoefficientSet,
                        gb: &CoefficientSet,
                        amplified: Complex64| {
        0.5 * ((fa.a * kx - 1.0) * (fb.n * kx - 1.0)
            + ga.m * gb.b * kx * kx
            + (fa.a * fb.n + ga.m * gb.b) * kx * k0
            + kx * p.gamma_m * (amplified * (n + 1.0) + (fa.d * fb.p + ga.q * gb.c) * n))
    };
    CorrelationTerms {
        omega,
        s_ss: swapped_self(c1, c1n, c2, c2n, c1.c * c1n.q + c2.p * c2n.q),
        s_cc: swapped_self(c2, c2n, c1, c1n, c2.c * c2n.p + c1.p * c1n.q),
        s_sc: cross_term(c1, c1n, c2, c2n, p),
        s_cs: cross_term(c2, c2n, c1, c1n, p),
    }
}

/// Noise power spectra of the combined quadratures over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpectra {
    /// Analysis frequencies (rad/s).
    pub grid: Vec<f64>,
    /// Amplitude-quadrature-sum noise power per point.
    pub s_xx_plus: Vec<f64>,
    /// Phase-quadrature-difference noise power per point.
    pub s_yy_minus: Vec<f64>,
    /// Suppression relative to shot noise, dB, per point.
    pub s_db: Vec<f64>,
    /// Probe detuning the spectra were evaluated at (rad/s).
    pub delta_s_used: f64,
    /// Bath occupation the spectra were evaluated at.
    pub n_th_used: f64,
}

/// Shot-noise (vacuum) level of the combined quadrature spectra.
pub const SHOT_NOISE: f64 = 0.5;

/// Suppression below shot noise in dB: `-10 log10(s_sq / 0.5)`.
///
/// Positive values mean squeezing below the shot-noise level.
pub fn normalized_db(s_sq: f64) -> Result<f64> {
    if !(s_sq > 0.0 && s_sq.is_finite()) {
        return Err(Error::Domain(format!(
            "noise power {s_sq} must be finite and > 0"
        )));
    }
    Ok(-10.0 * (s_sq / SHOT_NOISE).log10())
}

fn spectrum_point(omega: f64, delta_s: f64, p: &SystemParams) -> (f64, f64) {
    let terms = correlation_terms_unchecked(omega, delta_s, p);
    let xx = terms.s_xx_plus();
    let yy = terms.s_yy_minus();
    debug_assert!(
        xx.im.abs() <= 1e-10 * xx.norm() + f64::MIN_POSITIVE,
        "imaginary residual {} on |S| = {}",
        xx.im,
        xx.norm()
    );
    (xx.re, yy.re)
}

/// Combined-quadrature spectra with the probe at the default detuning
/// `-delta_m_eff`, where the analysis frequency 0 coincides with the peak
/// of the intensity gain.
pub fn combined_spectra(grid: &[f64], p: &SystemParams) -> Result<QuadratureSpectra> {
    let mech = response::require_stable(p)?;
    combined_spectra_at(grid, -mech.delta_m_eff, p)
}

/// Combined-quadrature spectra at an explicit probe detuning.
pub fn combined_spectra_at(
    grid: &[f64],
    delta_s: f64,
    p: &SystemParams,
) -> Result<QuadratureSpectra> {
    response::require_stable(p)?;
    crate::classical::check_grid(grid)?;
    let mut s_xx_plus = Vec::with_capacity(grid.len());
    let mut s_yy_minus = Vec::with_capacity(grid.len());
    let mut s_db = Vec::with_capacity(grid.len());
    for &omega in grid {
        let (xx, yy) = spectrum_point(omega, delta_s, p);
        s_db.push(normalized_db(xx)?);
        s_xx_plus.push(xx);
        s_yy_minus.push(yy);
    }
    Ok(QuadratureSpectra {
        grid: grid.to_vec(),
        s_xx_plus,
        s_yy_minus,
        s_db,
        delta_s_used: delta_s,
        n_th_used: p.n_th,
    })
}

/// Entanglement summary at the center analysis frequency.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EntanglementReport {
    /// Suppression at `omega = 0`, dB.
    pub s_max_db: f64,
    /// Full width of the contiguous band around `omega = 0` where the
    /// suppression exceeds half its center value in dB (rad/s). Zero when
    /// the center shows no suppression.
    pub bandwidth: f64,
    /// True when `s_max_db > 0`.
    pub entangled: bool,
    pub params: SystemParams,
}

/// Center-frequency entanglement metric with a local bandwidth scan.
///
/// Evaluates the combined spectra at `omega = 0` with the probe at
/// `-delta_m_eff` and walks outward for the half-maximum crossings.
pub fn s_max(p: &SystemParams) -> Result<EntanglementReport> {
    let mech = response::require_stable(p)?;
    let delta_s = -mech.delta_m_eff;
    let s0 = spectrum_point(0.0, delta_s, p).0;
    let s_max_db = normalized_db(s0)?;
    let entangled = s_max_db > 0.0;
    let bandwidth = if entangled {
        let half = s_max_db / 2.0;
        let right = half_crossing(half, delta_s, p, mech.gamma_eff, 1.0)?;
        let left = half_crossing(half, delta_s, p, mech.gamma_eff, -1.0)?;
        right + left
    } else {
        0.0
    };
    Ok(EntanglementReport {
        s_max_db,
        bandwidth,
        entangled,
        params: *p,
    })
}

/// Distance from `omega = 0` to the first crossing of `threshold` dB in the
/// given direction, found by an outward grid walk with linear
/// interpolation.
fn half_crossing(
    threshold: f64,
    delta_s: f64,
    p: &SystemParams,
    gamma_eff: f64,
    direction: f64,
) -> Result<f64> {
    let mut span = 40.0 * gamma_eff;
    for _ in 0..12 {
        let n = 4001usize;
        let step = span / (n - 1) as f64;
        let mut prev_omega = 0.0;
        let mut prev_db = normalized_db(spectrum_point(0.0, delta_s, p).0)?;
        for i in 1..n {
            let omega = direction * i as f64 * step;
            let db = normalized_db(spectrum_point(omega, delta_s, p).0)?;
            if db < threshold {
                let frac = (prev_db - threshold) / (prev_db - db);
                return Ok((prev_omega + frac * (omega - prev_omega)).abs());
            }
            prev_omega = omega;
            prev_db = db;
        }
        span *= 4.0;
    }
    Err(Error::Domain(
        "half-maximum crossing not found within the scan range".into(),
    ))
}
