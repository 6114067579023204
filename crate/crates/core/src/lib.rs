//! Frequency-domain model of an optomechanical cavity driven by a two-tone
//! pump field.
//!
//! The pump sidebands sit at the cavity resonance plus/minus a modulation
//! frequency `omega_0`. In the resolved-sideband regime the red sideband
//! drives a beam-splitter (photon-phonon exchange) interaction of strength
//! `g_minus` and the blue sideband drives a two-mode-squeezing (pair
//! creation) interaction of strength `g_plus`. Together they dress the
//! mechanical response and convert a weak probe at detuning `delta_s` into a
//! conjugate four-wave-mixing field at `-delta_s`.
//!
//! The crate computes, entirely in the frequency domain:
//!
//! * [`response`] — cavity/mechanical susceptibilities, the optomechanical
//!   self-energy, effective damping and detuning, the stability boundary,
//!   and the eight transfer coefficients of the intracavity field.
//! * [`classical`] — reflected signal/four-wave-mixing amplitudes and
//!   intensity-gain spectra.
//! * [`quantum`] — quadrature correlation spectra of the combined
//!   signal + conjugate output field, normalized to shot noise, and
//!   entanglement summary metrics.
//! * [`oracle`] — an independent reconstruction of every coefficient and
//!   spectrum from a direct dense solve of the 4x4 frequency-domain linear
//!   system, used to cross-validate the closed forms.
//! * [`params`] — the parameter model, unit discipline and validation.
//!
//! All rates and frequencies are expressed in rad/s. See the book under
//! `book/` for a guided tour; every code block there compiles and runs as a
//! documentation test.

pub mod classical;
pub mod oracle;
pub mod params;
pub mod quantum;
pub mod response;

pub use num_complex::Complex64;
pub use params::{DriveConfig, Sideband, SystemParams, ValidationReport};

/// Crate-wide error type.
///
/// Operations that evaluate the driven response refuse parameter sets that
/// are structurally invalid or mechanically unstable instead of returning
/// unphysical numbers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The parameter set violates a structural invariant.
    #[error("parameter set rejected:\n{0}")]
    InvalidParams(ValidationReport),
    /// The effective mechanical damping is non-positive; the linearized
    /// dynamics have no stationary solution.
    #[error("mechanical system unstable: gamma_eff = {gamma_eff:.6e} rad/s <= 0")]
    Unstable { gamma_eff: f64 },
    /// The frequency-domain linear system is numerically singular.
    #[error(
        "linear system near-singular at omega = {omega:.6e} rad/s \
         (condition estimate {condition:.3e})"
    )]
    DegenerateSystem { omega: f64, condition: f64 },
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
