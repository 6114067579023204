//! Bundled demonstration presets.
//!
//! Each preset is an ordinary [`ExperimentConfig`] with the parameters
//! pinned in canonical units; `--emit-config` prints the expansion so a
//! preset can serve as a starting point for custom runs. Axis ranges are
//! recorded in the output metadata.

use std::f64::consts::TAU;

use crate::config::{
    ExperimentConfig, Mode, OutputFormat, OutputSpec, ParamsSpec, Quantity, Scale, SweepSpec,
    SweepVariable, WhichField,
};

pub const PRESET_NAMES: [&str; 7] = ["fig2a", "fig2b", "fig3", "fig4", "fig5", "fig6", "fig7"];

/// Gain-study system: 585 kHz mechanical mode, 2pi x 5 rad/s intrinsic
/// damping, kappa = 0.1 omega_m at 98% escape, pump offset 0.95 omega_m.
fn gain_system(g_plus_rad_s: f64) -> ParamsSpec {
    ParamsSpec {
        omega_m: Quantity::hz_cycles(5.85e5),
        gamma_m: Quantity::hz_cycles(5.0),
        kappa: Quantity::ratio_of("omega_m", 0.1),
        kappa_ex: Quantity::ratio_of("kappa", 0.98),
        omega_0: Quantity::ratio_of("omega_m", 0.95),
        g_minus: Quantity::rad_s(3.0e4),
        g_plus: Quantity::rad_s(g_plus_rad_s),
        n_th: Some(0.0),
        temperature_k: None,
    }
}

/// Entanglement-study system: ultracoherent 1.14 MHz membrane with quality
/// factor 1.03e9, same cavity ratios, bath at 1 K.
fn entanglement_system(g_minus_rad_s: f64, sigma: f64) -> ParamsSpec {
    let omega_m = TAU * 1.14e6;
    let quality = 1.03e9;
    ParamsSpec {
        omega_m: Quantity::hz_cycles(1.14e6),
        gamma_m: Quantity::rad_s(omega_m / quality),
        kappa: Quantity::ratio_of("omega_m", 0.1),
        kappa_ex: Quantity::ratio_of("kappa", 0.98),
        omega_0: Quantity::ratio_of("omega_m", 0.95),
        g_minus: Quantity::rad_s(g_minus_rad_s),
        g_plus: Quantity::rad_s(sigma * g_minus_rad_s),
        n_th: None,
        temperature_k: Some(1.0),
    }
}

fn output(name: &str) -> OutputSpec {
    OutputSpec {
        path: format!("{name}.csv").into(),
        format: OutputFormat::Csv,
    }
}

/// Expands a preset name into its full configuration.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let tms_triple = vec![2.99e4, 3.0e4, 3.007e4];
    let sigma_triple = vec![0.75, 0.85, 0.95];
    let config = match name {
        // gain spectra of the three coupling settings, signal component
        "fig2a" => ExperimentConfig {
            params: Some(gain_system(3.0e4)),
            mode: Mode::GainSpectrum,
            preset: None,
            which: Some(WhichField::Signal),
            sweep: Some(SweepSpec::list(SweepVariable::GPlus, tms_triple)),
            series: None,
            grid: None,
            oracle: None,
            output: output("fig2a"),
        },
        // same settings, four-wave-mixing component
        "fig2b" => ExperimentConfig {
            which: Some(WhichField::Fwm),
            output: output("fig2b"),
            ..preset("fig2a")?
        },
        // dressed damping and detuning across the tuning range, past the
        // stability boundary
        "fig3" => ExperimentConfig {
            params: Some(gain_system(3.0e4)),
            mode: Mode::StabilityScan,
            preset: None,
            which: None,
            sweep: Some(SweepSpec::range(
                SweepVariable::GPlus,
                2.9e4,
                3.01e4,
                221,
                Scale::Lin,
            )),
            series: None,
            grid: None,
            oracle: None,
            output: output("fig3"),
        },
        // peak gains versus intrinsic damping at balanced couplings
        "fig4" => ExperimentConfig {
            params: Some(gain_system(3.0e4)),
            mode: Mode::PeakGainSweep,
            preset: None,
            which: None,
            sweep: Some(SweepSpec::range(
                SweepVariable::GammaM,
                1.0,
                100.0,
                41,
                Scale::Log,
            )),
            series: None,
            grid: None,
            oracle: None,
            output: output("fig4"),
        },
        // noise spectra for three coupling ratios at 1 K
        "fig5" => ExperimentConfig {
            params: Some(entanglement_system(1.2e5, 0.95)),
            mode: Mode::NoiseSpectrum,
            preset: None,
            which: None,
            sweep: Some(SweepSpec::list(SweepVariable::Sigma, sigma_triple)),
            series: None,
            grid: None,
            oracle: None,
            output: output("fig5"),
        },
        // center-frequency suppression versus escape efficiency
        "fig6" => {
            let kappa = 0.1 * TAU * 1.14e6;
            ExperimentConfig {
                params: Some(entanglement_system(1.2e5, 0.95)),
                mode: Mode::SMaxSweep,
                preset: None,
                which: None,
                sweep: Some(SweepSpec::range(
                    SweepVariable::KappaEx,
                    0.5 * kappa,
                    0.98 * kappa,
                    25,
                    Scale::Lin,
                )),
                series: Some(SweepSpec::list(SweepVariable::Sigma, sigma_triple)),
                grid: None,
                oracle: None,
                output: output("fig6"),
            }
        }
        // suppression versus bath temperature; the middle coupling value
        // 1.5e5 interpolates between the two quoted settings
        "fig7" => ExperimentConfig {
            params: Some(entanglement_system(1.2e5, 0.95)),
            mode: Mode::SMaxSweep,
            preset: None,
            which: None,
            sweep: Some(SweepSpec::range(
                SweepVariable::TemperatureK,
                1.0,
                400.0,
                25,
                Scale::Log,
            )),
            series: Some(SweepSpec::list(
                SweepVariable::GMinusFixedSigma,
                vec![1.2e5, 1.5e5, 1.8e5],
            )),
            grid: None,
            oracle: None,
            output: output("fig7"),
        },
        _ => return None,
    };
    Some(config)
}
