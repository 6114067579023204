//! Independent numerical reconstruction of the driven response.
//!
//! Everything here is assembled directly from the frequency-domain
//! equations of motion: the 4x4 linear system in
//! `(a1[w], a1+[w], b1[w], b1+[w])` driven by the six noise inputs
//! `(a_in, a_in+, a_v, a_v+, eta, eta+)`. No closed-form coefficient or
//! correlation expression from [`crate::response`] / [`crate::quantum`]
//! enters at any point, which makes this module the arbiter for sign
//! conventions and transcription slips in those closed forms.

use nalgebra::{Matrix4, Matrix4x2, SMatrix};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::params::SystemParams;
use crate::quantum::{self, QuadratureSpectra};
use crate::response::{self, CoefficientSet, COEFFICIENT_NAMES};
use crate::{Error, Result};

type C64 = Complex64;
type Matrix4x6 = SMatrix<C64, 4, 6>;

/// Condition-estimate ceiling beyond which a solve is refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Solved frequency-domain response at one frequency.
///
/// Columns of `matrix` map the port inputs `(a_in, a_in+, eta, eta+)` to
/// the intracavity vector `(a1, a1+, b1, b1+)`; `vacuum` is the companion
/// block for the internal-loss port `(a_v, a_v+)`. Port amplitudes
/// `sqrt(kappa_ex)`, `sqrt(kappa_0)`, `sqrt(gamma_m)` are already folded
/// in.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub omega: f64,
    pub matrix: Matrix4<C64>,
    pub vacuum: Matrix4x2<C64>,
    /// One-norm condition estimate of the solved system.
    pub condition: f64,
}

impl TransferMatrix {
    /// Extracts the eight transfer coefficients by dividing out the port
    /// amplitudes, for comparison against the closed forms.
    pub fn coefficient_set(&self, p: &SystemParams) -> CoefficientSet {
        let skex = p.kappa_ex.sqrt();
        let sgm = p.gamma_m.sqrt();
        CoefficientSet {
            omega: self.omega,
            a: self.matrix[(0, 0)] / skex,
            b: self.matrix[(0, 1)] / skex,
            c: self.matrix[(0, 2)] / sgm,
            d: self.matrix[(0, 3)] / sgm,
            m: self.matrix[(1, 0)] / skex,
            n: self.matrix[(1, 1)] / skex,
            p: self.matrix[(1, 2)] / sgm,
            q: self.matrix[(1, 3)] / sgm,
        }
    }

    /// Coefficient vectors of the reflected fluctuation field and its
    /// conjugate over the noise inputs
    /// `(a_in, a_in+, a_v, a_v+, eta, eta+)`, after the input-output map
    /// `a_out = -a_in + sqrt(kappa_ex) a1`.
    fn output_rows(&self, p: &SystemParams) -> ([C64; 6], [C64; 6]) {
        let skex = C64::from(p.kappa_ex.sqrt());
        let mut direct = [C64::new(0.0, 0.0); 6];
        let mut conjugate = [C64::new(0.0, 0.0); 6];
        for (out, row) in [(&mut direct, 0), (&mut conjugate, 1)] {
            out[0] = skex * self.matrix[(row, 0)];
            out[1] = skex * self.matrix[(row, 1)];
            out[2] = skex * self.vacuum[(row, 0)];
            out[3] = skex * self.vacuum[(row, 1)];
            out[4] = skex * self.matrix[(row, 2)];
            out[5] = skex * self.matrix[(row, 3)];
        }
        direct[0] -= 1.0;
        conjugate[1] -= 1.0;
        (direct, conjugate)
    }
}

fn one_norm<const C: usize>(m: &SMatrix<C64, 4, C>) -> f64 {
    (0..C)
        .map(|j| (0..4).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Assembles and solves the 4x4 frequency-domain system at `omega`.
///
/// System rows, with `d/dt -> -iw`:
/// `(kappa/2 - iw) a1 + i g_minus b1 + i g_plus b1+ = inputs` and its
/// conjugate, plus the mechanical pair with detunings `-+delta_m`.
pub fn transfer_matrix(omega: f64, p: &SystemParams) -> Result<TransferMatrix> {
    response::require_stable(p)?;
    let zero = C64::new(0.0, 0.0);
    let i_gm = C64::new(0.0, p.g_minus);
    let i_gp = C64::new(0.0, p.g_plus);
    let cav = C64::new(p.kappa / 2.0, -omega);
    let mech_co = C64::new(p.gamma_m / 2.0, -(omega - p.delta_m()));
    let mech_conj = C64::new(p.gamma_m / 2.0, -(omega + p.delta_m()));

    #[rustfmt::skip]
    let system = Matrix4::new(
        cav,   zero,  i_gm,     i_gp,
        zero,  cav,   -i_gp,    -i_gm,
        i_gm,  i_gp,  mech_co,  zero,
        -i_gp, -i_gm, zero,     mech_conj,
    );

    let skex = C64::from(p.kappa_ex.sqrt());
    let sk0 = C64::from(p.kappa_0().max(0.0).sqrt());
    let sgm = C64::from(p.gamma_m.sqrt());
    let mut drive = Matrix4x6::zeros();
    drive[(0, 0)] = skex;
    drive[(1, 1)] = skex;
    drive[(0, 2)] = sk0;
    drive[(1, 3)] = sk0;
    drive[(2, 4)] = sgm;
    drive[(3, 5)] = sgm;

    let lu = system.lu();
    let degenerate = |condition| Error::DegenerateSystem { omega, condition };
    let inverse = lu.try_inverse().ok_or_else(|| degenerate(f64::INFINITY))?;
    let condition = one_norm(&system) * one_norm(&inverse);
    if !(condition < CONDITION_LIMIT) {
        return Err(degenerate(condition));
    }
    let solved = lu.solve(&drive).ok_or_else(|| degenerate(condition))?;

    let mut matrix = Matrix4::zeros();
    let mut vacuum = Matrix4x2::zeros();
    for row in 0..4 {
        matrix[(row, 0)] = solved[(row, 0)];
        matrix[(row, 1)] = solved[(row, 1)];
        matrix[(row, 2)] = solved[(row, 4)];
        matrix[(row, 3)] = solved[(row, 5)];
        vacuum[(row, 0)] = solved[(row, 2)];
        vacuum[(row, 1)] = solved[(row, 3)];
    }
    Ok(TransferMatrix {
        omega,
        matrix,
        vacuum,
        condition,
    })
}

/// Stationary contraction `sum_ij v_i K_ij w_j` with the noise correlator
/// matrix: unit `a a+` vacuum blocks and `(n_th + 1, n_th)` thermal
/// weights.
fn contract(v: &[C64; 6], w: &[C64; 6], n_th: f64) -> C64 {
    v[0] * w[1] + v[2] * w[3] + v[4] * w[5] * (n_th + 1.0) + v[5] * w[4] * n_th
}

struct OutputBlocks {
    t1: [C64; 6],
    u1: [C64; 6],
    t2: [C64; 6],
    u2: [C64; 6],
    t1n: [C64; 6],
    u1n: [C64; 6],
    t2n: [C64; 6],
    u2n: [C64; 6],
}

fn output_blocks(omega: f64, delta_s: f64, p: &SystemParams) -> Result<OutputBlocks> {
    let w1 = omega - delta_s;
    let w2 = omega + delta_s;
    let (t1, u1) = transfer_matrix(w1, p)?.output_rows(p);
    let (t2, u2) = transfer_matrix(w2, p)?.output_rows(p);
    let (t1n, u1n) = transfer_matrix(-w1, p)?.output_rows(p);
    let (t2n, u2n) = transfer_matrix(-w2, p)?.output_rows(p);
    Ok(OutputBlocks {
        t1,
        u1,
        t2,
        u2,
        t1n,
        u1n,
        t2n,
        u2n,
    })
}

/// One point of the combined-quadrature spectra from the matrix solve.
///
/// The amplitude-quadrature sum is contracted through its four correlation
/// terms; the phase-quadrature difference directly through its `-i` phase
/// vectors. Neither path touches the closed-form expressions.
fn spectra_point_via_matrix(omega: f64, delta_s: f64, p: &SystemParams) -> Result<(f64, f64)> {
    let b = output_blocks(omega, delta_s, p)?;
    let n = p.n_th;
    let s_ss = 0.5 * (contract(&b.t1, &b.u1n, n) + contract(&b.u2, &b.t2n, n));
    let s_cc = 0.5 * (contract(&b.t2, &b.u2n, n) + contract(&b.u1, &b.t1n, n));
    let s_sc = 0.5 * (contract(&b.t1, &b.t1n, n) + contract(&b.u2, &b.u2n, n));
    let s_cs = 0.5 * (contract(&b.t2, &b.t2n, n) + contract(&b.u1, &b.u1n, n));
    let xx = (s_ss + s_cc + s_sc + s_cs) / 2.0;

    let minus_i = C64::new(0.0, -1.0);
    let mut y1 = [C64::new(0.0, 0.0); 6];
    let mut y2 = y1;
    let mut y1n = y1;
    let mut y2n = y1;
    for k in 0..6 {
        y1[k] = minus_i * 0.5 * (b.t1[k] + b.u1[k]);
        y2[k] = -minus_i * 0.5 * (b.t2[k] + b.u2[k]);
        y1n[k] = -minus_i * 0.5 * (b.t1n[k] + b.u1n[k]);
        y2n[k] = minus_i * 0.5 * (b.t2n[k] + b.u2n[k]);
    }
    // block at w1 pairs with the analysis-frequency mirror at -w1, and w2
    // with -w2
    let yy = contract(&y1, &y1n, n) + contract(&y2, &y2n, n);
    Ok((xx.re, yy.re))
}

/// Combined-quadrature spectra reconstructed from the matrix solve alone.
pub fn spectra_via_matrix(grid: &[f64], delta_s: f64, p: &SystemParams) -> Result<QuadratureSpectra> {
    response::require_stable(p)?;
    crate::classical::check_grid(grid)?;
    let mut s_xx_plus = Vec::with_capacity(grid.len());
    let mut s_yy_minus = Vec::with_capacity(grid.len());
    let mut s_db = Vec::with_capacity(grid.len());
    for &omega in grid {
        let (xx, yy) = spectra_point_via_matrix(omega, delta_s, p)?;
        s_db.push(quantum::normalized_db(xx)?);
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

/// Worst-case relative error of one tracked quantity across a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonItem {
    pub name: String,
    pub max_rel_error: f64,
    /// Frequency at which the worst error occurred (rad/s).
    pub worst_omega: f64,
}

/// Exhaustive closed-form versus matrix-solve comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub tol: f64,
    /// Worst error across all pass/fail tracked items.
    pub max_rel_error: f64,
    pub passed: bool,
    /// The eight coefficients plus the two combined spectra.
    pub items: Vec<ComparisonItem>,
    /// Deviations of the swapped-thermal-pairing variant of the correlation
    /// terms. Recorded as data; never part of pass/fail. A large value here
    /// is expected whenever the thermal load matters and guards against
    /// reintroducing that pairing into the production path.
    pub variant_deviations: Vec<ComparisonItem>,
}

fn rel_err(a: C64, b: C64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale <= f64::MIN_POSITIVE {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

struct WorstTracker {
    name: &'static str,
    max_rel_error: f64,
    worst_omega: f64,
}

impl WorstTracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            max_rel_error: 0.0,
            worst_omega: f64::NAN,
        }
    }

    fn update(&mut self, err: f64, omega: f64) {
        if err > self.max_rel_error {
            self.max_rel_error = err;
            self.worst_omega = omega;
        }
    }

    fn into_item(self) -> ComparisonItem {
        ComparisonItem {
            name: self.name.to_string(),
            max_rel_error: self.max_rel_error,
            worst_omega: self.worst_omega,
        }
    }
}

/// Compares the production closed forms against the matrix solve over a
/// frequency grid.
///
/// Coefficient comparisons run at every grid frequency; spectrum
/// comparisons use the same grid as analysis frequencies with the probe at
/// the default `-delta_m_eff`. Failures are data: the report always comes
/// back, with `passed` summarizing the tolerance check.
pub fn compare(p: &SystemParams, grid: &[f64], tol: f64) -> Result<OracleComparison> {
    compare_with(p, grid, tol, response::coefficients)
}

/// [`compare`] with a caller-supplied closed-form coefficient provider.
///
/// Exists so convention regressions (for example a sign flip in the cavity
/// susceptibility) can be demonstrated to produce loud, structured
/// failures.
pub fn compare_with<F>(p: &SystemParams, grid: &[f64], tol: f64, closed: F) -> Result<OracleComparison>
where
    F: Fn(f64, &SystemParams) -> CoefficientSet,
{
    let mech = response::require_stable(p)?;
    if grid.is_empty() {
        return Err(Error::Domain("comparison grid must not be empty".into()));
    }
    let mut coeff_trackers: Vec<WorstTracker> =
        COEFFICIENT_NAMES.iter().map(|n| WorstTracker::new(n)).collect();
    for &omega in grid {
        let closed_set = closed(omega, p).as_array();
        let solved_set = transfer_matrix(omega, p)?.coefficient_set(p).as_array();
        for (tracker, (&c, &s)) in coeff_trackers
            .iter_mut()
            .zip(closed_set.iter().zip(solved_set.iter()))
        {
            tracker.update(rel_err(c, s), omega);
        }
    }

    let delta_s = -mech.delta_m_eff;
    let mut xx_tracker = WorstTracker::new("s_xx_plus");
    let mut yy_tracker = WorstTracker::new("s_yy_minus");
    let mut variant_tracker = WorstTracker::new("s_xx_plus_swapped_thermal_pairing");
    for &omega in grid {
        let (oracle_xx, oracle_yy) = spectra_point_via_matrix(omega, delta_s, p)?;
        let terms = quantum::correlation_terms(omega, delta_s, p)?;
        xx_tracker.update(rel_err(terms.s_xx_plus(), C64::from(oracle_xx)), omega);
        yy_tracker.update(rel_err(terms.s_yy_minus(), C64::from(oracle_yy)), omega);
        let variant = quantum::correlation_terms_swapped_thermal(omega, delta_s, p);
        variant_tracker.update(rel_err(variant.s_xx_plus(), C64::from(oracle_xx)), omega);
    }

    let mut items: Vec<ComparisonItem> =
        coeff_trackers.into_iter().map(WorstTracker::into_item).collect();
    items.push(xx_tracker.into_item());
    items.push(yy_tracker.into_item());
    let max_rel_error = items
        .iter()
        .map(|i| i.max_rel_error)
        .fold(0.0, f64::max);
    Ok(OracleComparison {
        tol,
        max_rel_error,
        passed: max_rel_error <= tol,
        items,
        variant_deviations: vec![variant_tracker.into_item()],
    })
}

/// Draws a random structurally valid, mechanically stable parameter set.
///
/// Used by the oracle CLI subcommand and the property suites. `g_plus` is
/// placed strictly inside the stability boundary.
pub fn random_stable_params<R: Rng + ?Sized>(rng: &mut R) -> SystemParams {
    let omega_m = 10f64.powf(rng.random_range(5.0..7.0));
    let kappa = omega_m * rng.random_range(0.02..0.2);
    let kappa_ex = kappa * rng.random_range(0.5..1.0);
    let omega_0 = omega_m * rng.random_range(0.9..0.999);
    let quality = 10f64.powf(rng.random_range(3.0..9.0));
    let gamma_m = omega_m / quality;
    let g_minus = kappa * rng.random_range(0.001..0.1);
    let n_th = if rng.random_bool(0.2) {
        0.0
    } else {
        10f64.powf(rng.random_range(-2.0..7.0))
    };
    let mut p = SystemParams {
        omega_m,
        gamma_m,
        kappa,
        kappa_ex,
        omega_0,
        g_minus,
        g_plus: 0.0,
        n_th,
    };
    let margin = response::stability_margin(&p);
    p.g_plus = margin.g_plus_max * rng.random_range(0.0..0.98);
    debug_assert!(!p.validate().has_errors());
    p
}

/// Samples analysis frequencies for a comparison grid: the structural
/// points (0 and the dressed resonances) plus uniform draws within two
/// cavity linewidths.
pub fn sample_omegas<R: Rng + ?Sized>(rng: &mut R, p: &SystemParams, n: usize) -> Vec<f64> {
    let mech = response::mechanical_response(p);
    let mut omegas = vec![0.0, mech.delta_m_eff, -mech.delta_m_eff];
    omegas.truncate(n);
    while omegas.len() < n {
        omegas.push(rng.random_range(-2.0 * p.kappa..2.0 * p.kappa));
    }
    omegas.sort_by(f64::total_cmp);
    omegas.dedup();
    omegas
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
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
    fn undriven_system_is_block_diagonal() {
        let mut p = fig2(0.0);
        p.g_minus = 0.0;
        let omega = 0.21 * p.kappa;
        let tm = transfer_matrix(omega, &p).unwrap();
        // optical block decouples from the mechanical block
        for (row, col) in [(0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (2, 1), (3, 0), (3, 1)] {
            assert_eq!(tm.matrix[(row, col)], C64::new(0.0, 0.0));
        }
        let cs = tm.coefficient_set(&p);
        let bare = response::chi_c(omega, p.kappa).value;
        assert_relative_eq!((cs.a - bare).norm(), 0.0, epsilon = 1e-16 * bare.norm());
        assert_eq!(cs.b, C64::new(0.0, 0.0));
    }

    #[test]
    fn closed_forms_match_matrix_solve_at_reference_params() {
        let p = fig2(2.99e4);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let omegas = sample_omegas(&mut rng, &p, 12);
        let report = compare(&p, &omegas, 1e-10).unwrap();
        assert!(
            report.passed,
            "max rel error {:.3e} at items {:?}",
            report.max_rel_error, report.items
        );
    }

    #[test]
    fn sign_flipped_convention_is_loudly_detected() {
        let p = fig2(2.99e4);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let omegas = sample_omegas(&mut rng, &p, 8);
        let flipped = |omega: f64, p: &SystemParams| {
            let mut cs = response::coefficients(omega, p);
            // the conventional slip: chi_c with the opposite frequency sign
            let wrong = response::chi_c(-omega, p.kappa).value;
            let right = response::chi_c(omega, p.kappa).value;
            cs.a *= wrong / right;
            cs.n *= wrong / right;
            cs
        };
        let report = compare_with(&p, &omegas, 1e-9, flipped).unwrap();
        assert!(!report.passed);
        assert!(report.max_rel_error > 1e-2);
        // the damage is structured: it shows up in the flipped entries
        let item_a = report.items.iter().find(|i| i.name == "a").unwrap();
        assert!(item_a.max_rel_error > 1e-2);
    }

    #[test]
    fn passive_output_holds_shot_noise_for_any_bath() {
        let mut p = fig2(0.0);
        p.g_minus = 0.0;
        p.n_th = 4.2e6;
        p.kappa_ex = 0.7 * p.kappa;
        let spectra = spectra_via_matrix(&[-1.0e4, 0.0, 2.0e4], -1.5e5, &p).unwrap();
        for (&xx, &yy) in spectra.s_xx_plus.iter().zip(&spectra.s_yy_minus) {
            assert_relative_eq!(xx, 0.5, max_relative = 1e-12);
            assert_relative_eq!(yy, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn conditioning_degrades_at_the_stability_boundary() {
        let p0 = fig2(3.0e4);
        let margin = response::stability_margin(&p0);
        let mut boundary = p0;
        // just inside the boundary so the stability gate admits it
        boundary.g_plus = margin.g_plus_max * (1.0 - 1e-12);
        let mech = response::mechanical_response(&boundary);
        let at_res = transfer_matrix(-mech.delta_m_eff, &boundary);
        let off_res = transfer_matrix(-mech.delta_m_eff + 1.0e4, &boundary).unwrap();
        match at_res {
            Err(Error::DegenerateSystem { condition, .. }) => {
                assert!(condition > CONDITION_LIMIT)
            }
            Ok(tm) => assert!(
                tm.condition > 1e3 * off_res.condition,
                "resonant condition {:.3e} vs off-resonant {:.3e}",
                tm.condition,
                off_res.condition
            ),
            Err(other) => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn near_boundary_comparison_still_passes_with_loose_tolerance() {
        let p0 = fig2(3.0e4);
        let margin = response::stability_margin(&p0);
        let mut p = p0;
        p.g_plus = 0.999 * margin.g_plus_max;
        let mech = response::mechanical_response(&p);
        // probe away from the nearly-real pole
        let omegas = [
            -2.0 * p.kappa,
            -mech.delta_m_eff - 50.0 * mech.gamma_eff,
            0.0,
            mech.delta_m_eff + 50.0 * mech.gamma_eff,
            1.7 * p.kappa,
        ];
        let report = compare(&p, &omegas, 1e-6).unwrap();
        assert!(report.passed, "max rel error {:.3e}", report.max_rel_error);
    }

    #[test]
    fn random_draws_stay_stable_and_comparable() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..25 {
            let p = random_stable_params(&mut rng);
            assert!(!p.validate().has_errors());
            let omegas = sample_omegas(&mut rng, &p, 6);
            let report = compare(&p, &omegas, 1e-9).unwrap();
            assert!(
                report.passed,
                "params {p:?} failed: max {:.3e}",
                report.max_rel_error
            );
        }
    }

    #[test]
    fn swapped_thermal_variant_deviates_when_thermal_load_matters() {
        let omega_m = TAU * 1.14e6;
        let g_minus = 1.2e5;
        let p = SystemParams {
            omega_m,
            gamma_m: omega_m / 1.03e9,
            kappa: 0.1 * omega_m,
            kappa_ex: 0.98 * 0.1 * omega_m,
            omega_0: 0.95 * omega_m,
            g_minus,
            g_plus: 0.95 * g_minus,
            n_th: crate::params::thermal_occupation(omega_m, 1.0),
        };
        let report = compare(&p, &[0.0, 1.0e3, 4.0e3], 1e-9).unwrap();
        assert!(report.passed, "production path must match the solve");
        let variant = &report.variant_deviations[0];
        assert!(
            variant.max_rel_error > 1e-2,
            "variant deviation unexpectedly small: {:.3e}",
            variant.max_rel_error
        );
    }
}
