//! Frequency-domain linear response of the driven system.
//!
//! Conventions. Fourier transform `o[w] = integral o(t) e^{iwt} dt`, so
//! `d/dt -> -iw` and a passive cavity has susceptibility
//! `chi_c[w] = 1/(kappa/2 - iw)`. Conjugation acts as `(o[w])+ = o+[-w]`,
//! which is why the conjugate mechanical response enters every expression
//! as `chi_m*[-w] = 1/(gamma_m/2 - i(w + delta_m))`. This is the unique
//! sign choice under which the undriven cavity conserves the photon-number
//! budget (|reflection|^2 plus loss equals one) and the vacuum output
//! normalizes to the shot-noise level; the [`crate::oracle`] module checks
//! both directly from the equations of motion.

use num_complex::Complex64;

use crate::params::SystemParams;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Complex susceptibility value, units 1/(rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Susceptibility {
    pub value: Complex64,
}

impl Susceptibility {
    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }
}

/// Cavity susceptibility `1/(kappa/2 - iw)`.
///
/// Peaks at `w = 0` with magnitude `2/kappa`; half-power points at
/// `w = +-kappa/2`.
pub fn chi_c(omega: f64, kappa: f64) -> Susceptibility {
    Susceptibility {
        value: 1.0 / Complex64::new(kappa / 2.0, -omega),
    }
}

/// Mechanical susceptibility `1/(gamma_m/2 - i(w - delta_m))`.
///
/// Pole at `w ~ delta_m` with linewidth `gamma_m`.
pub fn chi_m(omega: f64, delta_m: f64, gamma_m: f64) -> Susceptibility {
    Susceptibility {
        value: 1.0 / Complex64::new(gamma_m / 2.0, -(omega - delta_m)),
    }
}

/// Optomechanical self-energy `Sigma[w] = chi_c[w] (g_minus^2 - g_plus^2)`,
/// in rad/s.
///
/// Vanishes identically for balanced couplings. Its real part damps the
/// mechanical mode, its imaginary part shifts it.
pub fn self_energy(omega: f64, p: &SystemParams) -> Complex64 {
    chi_c(omega, p.kappa).value * (p.g_minus * p.g_minus - p.g_plus * p.g_plus)
}

/// Frequency-dependent optomechanical damping rate `2 Re Sigma[w]` (rad/s).
///
/// Diagnostic companion to the weak-coupling form [`opt_damping_wc`]; the
/// two coincide at `w = delta_m`.
pub fn opt_damping_at(omega: f64, p: &SystemParams) -> f64 {
    2.0 * self_energy(omega, p).re
}

/// Frequency-dependent mechanical frequency shift `Im Sigma[w]` (rad/s).
pub fn freq_shift_at(omega: f64, p: &SystemParams) -> f64 {
    self_energy(omega, p).im
}

/// Weak-coupling optomechanical damping rate (rad/s):
/// `kappa (g_minus^2 - g_plus^2) / (delta_m^2 + kappa^2/4)`.
pub fn opt_damping_wc(p: &SystemParams) -> f64 {
    let dm = p.delta_m();
    p.kappa * (p.g_minus * p.g_minus - p.g_plus * p.g_plus) / (dm * dm + p.kappa * p.kappa / 4.0)
}

/// Weak-coupling mechanical frequency shift (rad/s):
/// `delta_m (g_minus^2 - g_plus^2) / (delta_m^2 + kappa^2/4)`.
///
/// The ratio `freq_shift_wc / opt_damping_wc` equals `delta_m / kappa`
/// exactly.
pub fn freq_shift_wc(p: &SystemParams) -> f64 {
    let dm = p.delta_m();
    dm * (p.g_minus * p.g_minus - p.g_plus * p.g_plus) / (dm * dm + p.kappa * p.kappa / 4.0)
}

/// Dressed mechanical rates: damping and detuning after the optical spring.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MechanicalResponse {
    /// Optomechanical damping rate (rad/s).
    pub gamma_opt: f64,
    /// Optomechanical frequency shift (rad/s).
    pub delta_omega_m: f64,
    /// Effective damping `gamma_m + gamma_opt` (rad/s).
    pub gamma_eff: f64,
    /// Effective detuning `delta_m + delta_omega_m` (rad/s).
    pub delta_m_eff: f64,
}

/// Bundles the weak-coupling damping and shift with their dressed totals.
pub fn mechanical_response(p: &SystemParams) -> MechanicalResponse {
    let gamma_opt = opt_damping_wc(p);
    let delta_omega_m = freq_shift_wc(p);
    MechanicalResponse {
        gamma_opt,
        delta_omega_m,
        gamma_eff: p.gamma_m + gamma_opt,
        delta_m_eff: p.delta_m() + delta_omega_m,
    }
}

/// Stability summary at fixed `g_minus`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StabilityMargin {
    /// Effective damping at the current couplings (rad/s).
    pub gamma_eff: f64,
    /// Largest `g_plus` with `gamma_eff > 0` (rad/s):
    /// `sqrt(g_minus^2 + gamma_m (delta_m^2 + kappa^2/4) / kappa)`.
    pub g_plus_max: f64,
}

impl StabilityMargin {
    pub fn is_stable(&self) -> bool {
        self.gamma_eff > 0.0
    }
}

/// Root of `gamma_eff(g_plus) = 0` with every other parameter held fixed.
///
/// In the lossless limit `gamma_m -> 0` the boundary collapses onto
/// `g_plus = g_minus`.
pub fn stability_margin(p: &SystemParams) -> StabilityMargin {
    let dm = p.delta_m();
    let g_plus_max =
        (p.g_minus * p.g_minus + p.gamma_m * (dm * dm + p.kappa * p.kappa / 4.0) / p.kappa).sqrt();
    StabilityMargin {
        gamma_eff: mechanical_response(p).gamma_eff,
        g_plus_max,
    }
}

/// The eight transfer coefficients of the intracavity field at one
/// frequency.
///
/// The fluctuation field obeys
/// `a1[w] = a.(optical in) + b.(optical in+) + c.(thermal in) + d.(thermal in+)`
/// and its conjugate
/// `a1+[w] = m.(optical in) + n.(optical in+) + p.(thermal in) + q.(thermal in+)`,
/// where each optical input carries its port amplitude `sqrt(kappa_ex)` or
/// `sqrt(kappa_0)` and the thermal input carries `sqrt(gamma_m)`. The
/// coefficients have units 1/(rad/s) and become dimensionless reflection
/// entries once multiplied by those rate prefactors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    /// Evaluation frequency (rad/s).
    pub omega: f64,
    /// Optical input -> field (co-rotating).
    pub a: Complex64,
    /// Conjugated optical input -> field; the four-wave-mixing conversion,
    /// proportional to `g_minus * g_plus`.
    pub b: Complex64,
    /// Thermal input -> field, proportional to `g_minus`.
    pub c: Complex64,
    /// Conjugated thermal input -> field, proportional to `g_plus`.
    pub d: Complex64,
    /// Optical input -> conjugate field; equals `-b`.
    pub m: Complex64,
    /// Conjugated optical input -> conjugate field; `a` with the two
    /// mechanical branches swapped.
    pub n: Complex64,
    /// Thermal input -> conjugate field, proportional to `g_plus`.
    pub p: Complex64,
    /// Conjugated thermal input -> conjugate field, proportional to
    /// `g_minus`.
    pub q: Complex64,
}

impl CoefficientSet {
    /// Coefficients as a fixed-order array, paired with their names.
    /// Ordering matches [`COEFFICIENT_NAMES`].
    pub fn as_array(&self) -> [Complex64; 8] {
        [
            self.a, self.b, self.c, self.d, self.m, self.n, self.p, self.q,
        ]
    }
}

/// Names matching [`CoefficientSet::as_array`].
pub const COEFFICIENT_NAMES: [&str; 8] = ["a", "b", "c", "d", "m", "n", "p", "q"];

/// Evaluates all eight transfer coefficients at `omega`.
///
/// Uses the closed forms obtained by eliminating the mechanical mode from
/// the frequency-domain equations of motion. The resonant denominators
/// `1 + chi Sigma` place the dressed mechanical poles; stable parameters
/// keep them away from the real axis.
pub fn coefficients(omega: f64, p: &SystemParams) -> CoefficientSet {
    let cav = chi_c(omega, p.kappa).value;
    let dm = p.delta_m();
    // Co-rotating branch chi_m[w] and conjugate branch chi_m*[-w].
    let mech_co = chi_m(omega, dm, p.gamma_m).value;
    let mech_conj = chi_m(-omega, dm, p.gamma_m).value.conj();
    let g2 = p.g_minus * p.g_minus;
    let h2 = p.g_plus * p.g_plus;
    let sigma = cav * (g2 - h2);
    let den_co = 1.0 + mech_co * sigma;
    let den_conj = 1.0 + mech_conj * sigma;
    let den = den_co * den_conj;
    let gh = p.g_minus * p.g_plus;

    CoefficientSet {
        omega,
        a: cav * (1.0 + cav * (g2 * mech_conj - h2 * mech_co)) / den,
        b: cav * cav * gh * (mech_conj - mech_co) / den,
        c: -I * cav * mech_co * p.g_minus / den_co,
        d: -I * cav * mech_conj * p.g_plus / den_conj,
        m: cav * cav * gh * (mech_co - mech_conj) / den,
        n: cav * (1.0 + cav * (g2 * mech_co - h2 * mech_conj)) / den,
        p: I * cav * mech_co * p.g_plus / den_co,
        q: I * cav * mech_conj * p.g_minus / den_conj,
    }
}

/// Refuses structurally invalid or unstable parameter sets, returning the
/// dressed mechanical response otherwise.
///
/// Shared gate for every operation that evaluates the driven system.
pub fn require_stable(p: &SystemParams) -> Result<MechanicalResponse> {
    let structural = p.structural_report();
    if structural.has_errors() {
        return Err(Error::InvalidParams(structural));
    }
    let mech = mechanical_response(p);
    if !(mech.gamma_eff > 0.0) {
        return Err(Error::Unstable {
            gamma_eff: mech.gamma_eff,
        });
    }
    Ok(mech)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn fig2(g_plus: f64) -> SystemParams {
        let omega_m = TAU * 5.85e5;
        SystemParams {
            omega_m,
            gamma_m: TAU * 5.0,
            kappa: 0.1 * omega_m,
            kappa_ex: 0.98 * 0.1 * omega_m,
            omega_0: 0.95 * omega_m,
            g_minus: 3.0e4,
            g_plus,
            n_th: 0.0,
        }
    }

    #[test]
    fn chi_c_reference_points() {
        let kappa = 2.0e5;
        let on_res = chi_c(0.0, kappa);
        assert_relative_eq!(on_res.value.re, 2.0 / kappa, max_relative = 1e-15);
        assert_eq!(on_res.value.im, 0.0);

        let half = chi_c(kappa / 2.0, kappa);
        assert_relative_eq!(
            half.magnitude(),
            2.0f64.sqrt() / kappa,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            chi_c(-kappa / 2.0, kappa).magnitude(),
            on_res.magnitude() / 2.0f64.sqrt(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn chi_m_reference_points() {
        let (dm, gm) = (1.5e5, 40.0);
        assert_relative_eq!(
            chi_m(dm, dm, gm).magnitude(),
            2.0 / gm,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            chi_m(0.0, 0.0, gm).magnitude(),
            2.0 / gm,
            max_relative = 1e-15
        );
        // half-power points one half-linewidth off resonance
        assert_relative_eq!(
            chi_m(dm + gm / 2.0, dm, gm).magnitude(),
            2.0f64.sqrt() / gm,
            max_relative = 1e-15
        );
    }

    #[test]
    fn self_energy_balanced_and_dc() {
        let p = fig2(3.0e4);
        let s = self_energy(1.0e4, &p);
        assert_eq!(s, Complex64::new(0.0, 0.0));

        let mut p = fig2(0.0);
        p.g_minus = 2.0e4;
        let x = p.g_minus * p.g_minus;
        let s = self_energy(0.0, &p);
        assert_relative_eq!(s.re, 2.0 * x / p.kappa, max_relative = 1e-14);
        assert_eq!(s.im, 0.0);
    }

    // Frozen by hand evaluation of Sigma at w = delta_m before the build.
    #[test]
    fn self_energy_reference_value() {
        let p = fig2(2.99e4);
        let s = self_energy(p.delta_m(), &p);
        assert_relative_eq!(s.re, 16.296377933682962, max_relative = 1e-12);
        assert_relative_eq!(s.im, 16.296377933682958, max_relative = 1e-12);
        // weak-coupling consistency: 2 Re Sigma[delta_m] is the closed form
        assert_relative_eq!(2.0 * s.re, opt_damping_wc(&p), max_relative = 1e-12);
        assert_relative_eq!(opt_damping_at(p.delta_m(), &p), opt_damping_wc(&p));
    }

    #[test]
    fn damping_triple_matches_reference() {
        for (g_plus, gamma_eff) in [
            (2.99e4, 64.008682403263862),
            (3.0e4, 31.415926535897931),
            (3.007e4, 8.536247212577905),
        ] {
            let mech = mechanical_response(&fig2(g_plus));
            assert_relative_eq!(mech.gamma_eff, gamma_eff, max_relative = 1e-9);
        }
    }

    #[test]
    fn shift_to_damping_ratio_is_detuning_over_kappa() {
        let p = fig2(2.99e4);
        let ratio = freq_shift_wc(&p) / opt_damping_wc(&p);
        assert_relative_eq!(ratio, p.delta_m() / p.kappa, max_relative = 1e-14);
        // frozen value for the shift itself
        assert_relative_eq!(
            freq_shift_wc(&p),
            16.296377933682958,
            max_relative = 1e-12
        );
        let mut p0 = p;
        p0.omega_0 = p0.omega_m; // delta_m = 0
        assert_eq!(freq_shift_wc(&p0), 0.0);
    }

    #[test]
    fn balanced_couplings_leave_mechanics_bare() {
        let p = fig2(3.0e4);
        let mech = mechanical_response(&p);
        assert_eq!(mech.gamma_opt, 0.0);
        assert_eq!(mech.delta_omega_m, 0.0);
        assert_eq!(mech.gamma_eff, p.gamma_m);
        assert_eq!(mech.delta_m_eff, p.delta_m());
    }

    #[test]
    fn stability_margin_reference_root() {
        let p = fig2(3.0e4);
        let margin = stability_margin(&p);
        assert_relative_eq!(margin.g_plus_max, 30096.074803446332, max_relative = 1e-12);

        // substituting the root back gives gamma_eff = 0 within 1e-9 gamma_m
        let mut at_root = p;
        at_root.g_plus = margin.g_plus_max;
        let residual = mechanical_response(&at_root).gamma_eff.abs();
        assert!(residual < 1e-9 * p.gamma_m, "residual {residual}");

        // lossless limit: boundary collapses onto g_minus
        let mut lossless = p;
        lossless.gamma_m = 1e-12;
        assert_relative_eq!(
            stability_margin(&lossless).g_plus_max,
            p.g_minus,
            max_relative = 1e-9
        );
    }

    #[test]
    fn bare_cavity_coefficients() {
        let mut p = fig2(0.0);
        p.g_minus = 0.0;
        let omega = 0.37 * p.kappa;
        let cs = coefficients(omega, &p);
        let cav = chi_c(omega, p.kappa).value;
        assert_eq!(cs.a, cav);
        assert_eq!(cs.n, cav);
        for z in [cs.b, cs.c, cs.d, cs.m, cs.p, cs.q] {
            assert_eq!(z, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn beam_splitter_only_coefficient_pattern() {
        let p = fig2(0.0);
        let cs = coefficients(0.4 * p.kappa, &p);
        for z in [cs.b, cs.m, cs.d, cs.p] {
            assert_eq!(z, Complex64::new(0.0, 0.0));
        }
        for z in [cs.a, cs.n, cs.c, cs.q] {
            assert!(z.norm() > 0.0);
        }
    }

    #[test]
    fn conjugate_pair_structure() {
        let p = fig2(2.95e4);
        for omega in [-1.7 * p.kappa, -p.delta_m(), 0.3, 0.6 * p.kappa] {
            let cs = coefficients(omega, &p);
            // m = -b
            assert_relative_eq!((cs.m + cs.b).norm(), 0.0, epsilon = 1e-12 * cs.b.norm());
            // p g_minus = -c g_plus ; q g_plus = -d g_minus
            assert!(
                (cs.p * p.g_minus + cs.c * p.g_plus).norm() <= 1e-12 * (cs.c * p.g_plus).norm()
            );
            assert!(
                (cs.q * p.g_plus + cs.d * p.g_minus).norm() <= 1e-12 * (cs.d * p.g_minus).norm()
            );
            // n equals a with the mechanical branches swapped
            let dm = p.delta_m();
            let cav = chi_c(omega, p.kappa).value;
            let x = chi_m(omega, dm, p.gamma_m).value;
            let y = chi_m(-omega, dm, p.gamma_m).value.conj();
            let sigma = cav * (p.g_minus * p.g_minus - p.g_plus * p.g_plus);
            let den = (1.0 + x * sigma) * (1.0 + y * sigma);
            let swapped = cav
                * (1.0 + cav * (p.g_minus * p.g_minus * x - p.g_plus * p.g_plus * y))
                / den;
            assert!((cs.n - swapped).norm() <= 1e-12 * swapped.norm());
            // fundamental conjugation identities
            let cs_neg = coefficients(-omega, &p);
            assert!((cs.n - cs_neg.a.conj()).norm() <= 1e-12 * cs.n.norm());
            assert!((cs.q - cs_neg.c.conj()).norm() <= 1e-12 * cs.q.norm().max(1e-300));
            assert!((cs.p - cs_neg.d.conj()).norm() <= 1e-12 * cs.p.norm().max(1e-300));
        }
    }

    #[test]
    fn require_stable_gates() {
        assert!(require_stable(&fig2(3.0e4)).is_ok());
        match require_stable(&fig2(3.2e4)) {
            Err(Error::Unstable { gamma_eff }) => assert!(gamma_eff < 0.0),
            other => panic!("expected instability, got {other:?}"),
        }
        let mut bad = fig2(3.0e4);
        bad.kappa_ex = 2.0 * bad.kappa;
        assert!(matches!(
            require_stable(&bad),
            Err(Error::InvalidParams(_))
        ));
    }
}
