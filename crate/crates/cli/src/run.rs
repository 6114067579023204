//! Experiment orchestration: expand sweeps, evaluate points in parallel,
//! assemble deterministic tables.

use std::path::{Path, PathBuf};

use fourwave::classical::{self, Field};
use fourwave::oracle;
use fourwave::quantum;
use fourwave::response::{mechanical_response, stability_margin};
use fourwave::SystemParams;
use rayon::prelude::*;

use crate::config::{
    ExperimentConfig, Mode, OracleSpec, SweepSpec, WhichField,
};
use crate::output::{Metadata, Table, Value};
use crate::{CliError, RunManifest};

/// Executes a configuration and writes its outputs.
///
/// Relative output paths are joined onto `out_dir` when given. Sweep and
/// grid points evaluate in parallel; row order always follows the declared
/// sweep order.
pub fn run(config: &ExperimentConfig, out_dir: Option<&Path>) -> Result<RunManifest, CliError> {
    if config.mode == Mode::Preset {
        let name = config.preset.as_deref().ok_or_else(|| {
            CliError::Config("mode \"preset\" requires a preset name".into())
        })?;
        let mut expanded = crate::preset::preset(name)
            .ok_or_else(|| CliError::Config(format!("unknown preset \"{name}\"")))?;
        expanded.output = config.output.clone();
        return run(&expanded, out_dir);
    }

    let params_spec = config
        .params
        .as_ref()
        .ok_or_else(|| CliError::Config("params are required for this mode".into()))?;
    let base = params_spec.resolve()?;
    let warnings: Vec<String> = base
        .validate()
        .warnings()
        .map(|w| w.message.clone())
        .collect();

    let hash = config.hash();
    let table = match config.mode {
        Mode::GainSpectrum => gain_table(config, &base, &hash)?,
        Mode::NoiseSpectrum => noise_table(config, &base, &hash)?,
        Mode::SMaxSweep => s_max_table(config, &base, &hash)?,
        Mode::StabilityScan => stability_table(config, &base, &hash)?,
        Mode::PeakGainSweep => peak_gain_table(config, &base, &hash)?,
        Mode::OracleCheck => oracle_table(config, &base, &hash)?,
        Mode::Preset => unreachable!("handled above"),
    };

    let path = resolve_path(&config.output.path, out_dir);
    table.write(&path, config.output.format)?;

    let manifest = RunManifest {
        config_hash: hash,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        warnings,
        outputs: vec![path.display().to_string()],
    };
    crate::output::write_manifest(&manifest, &path)?;
    Ok(manifest)
}

fn resolve_path(path: &Path, out_dir: Option<&Path>) -> PathBuf {
    match out_dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

/// Expands the curve enumerator of a spectrum mode: the sweep values paired
/// with their parameter sets, or a single unlabelled entry.
fn curve_points(
    sweep: &Option<SweepSpec>,
    base: &SystemParams,
) -> Result<(Option<&'static str>, Vec<(Option<f64>, SystemParams)>), CliError> {
    match sweep {
        Some(spec) => {
            let values = spec.expand()?;
            let points = values
                .into_iter()
                .map(|v| (Some(v), spec.variable.apply(base, v)))
                .collect();
            Ok((Some(spec.variable.name()), points))
        }
        None => Ok((None, vec![(None, *base)])),
    }
}

fn reject_series(config: &ExperimentConfig) -> Result<(), CliError> {
    if config.series.is_some() {
        return Err(CliError::Config(format!(
            "mode \"{}\" takes curves from `sweep`; `series` is not \
             accepted here",
            config.mode.name()
        )));
    }
    Ok(())
}

fn base_metadata(config: &ExperimentConfig, base: &SystemParams, hash: &str) -> Metadata {
    let mut meta = Metadata::new(hash, config.mode.name());
    meta.params(base);
    if let Some(sweep) = &config.sweep {
        meta.text("sweep", &sweep.describe());
    }
    if let Some(series) = &config.series {
        meta.text("series", &series.describe());
    }
    if let Some(grid) = &config.grid {
        meta.text(
            "grid",
            &format!("{} points in [{}, {}] rad/s", grid.steps, grid.from, grid.to),
        );
    }
    meta
}

fn gain_table(
    config: &ExperimentConfig,
    base: &SystemParams,
    hash: &str,
) -> Result<Table, CliError> {
    reject_series(config)?;
    let which = config.which.unwrap_or(WhichField::Both);
    let (label, points) = curve_points(&config.sweep, base)?;
    let explicit_grid = config.grid.map(|g| g.expand()).transpose()?;

    let curves: Vec<Vec<Vec<Value>>> = points
        .par_iter()
        .map(|(value, p)| -> Result<Vec<Vec<Value>>, CliError> {
            let grid = match &explicit_grid {
                Some(g) => g.clone(),
                None => classical::default_grid(p)?,
            };
            let signal = matches!(which, WhichField::Signal | WhichField::Both)
                .then(|| classical::gain_spectrum(&grid, p, Field::Signal))
                .transpose()?;
            let fwm = matches!(which, WhichField::Fwm | WhichField::Both)
                .then(|| classical::gain_spectrum(&grid, p, Field::Fwm))
                .transpose()?;
            Ok(grid
                .iter()
                .enumerate()
                .map(|(i, &delta_s)| {
                    let mut row: Vec<Value> = Vec::with_capacity(4);
                    if let Some(v) = value {
                        row.push(v.into());
                    }
                    row.push(delta_s.into());
                    if let Some(s) = &signal {
                        row.push(s.values[i].into());
                    }
                    if let Some(f) = &fwm {
                        row.push(f.values[i].into());
                    }
                    row
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;

    let mut columns = Vec::new();
    columns.extend(label.map(str::to_string));
    columns.push("delta_s_rad_s".into());
    if matches!(which, WhichField::Signal | WhichField::Both) {
        columns.push("gain_signal".into());
    }
    if matches!(which, WhichField::Fwm | WhichField::Both) {
        columns.push("gain_fwm".into());
    }

    let mut meta = base_metadata(config, base, hash);
    if explicit_grid.is_none() {
        meta.text(
            "grid",
            "default: delta_s within 40 gamma_eff of -delta_m_eff, 2001 points, per curve",
        );
    }
    Ok(Table {
        metadata: meta.finish(),
        columns,
        rows: curves.into_iter().flatten().collect(),
    })
}

fn noise_table(
    config: &ExperimentConfig,
    base: &SystemParams,
    hash: &str,
) -> Result<Table, CliError> {
    reject_series(config)?;
    let (label, points) = curve_points(&config.sweep, base)?;
    let explicit_grid = config.grid.map(|g| g.expand()).transpose()?;

    let curves: Vec<Vec<Vec<Value>>> = points
        .par_iter()
        .map(|(value, p)| -> Result<Vec<Vec<Value>>, CliError> {
            let grid = match &explicit_grid {
                Some(g) => g.clone(),
                None => {
                    let mech = fourwave::response::require_stable(p)?;
                    crate::config::linspace(
                        -10.0 * mech.gamma_eff,
                        10.0 * mech.gamma_eff,
                        1001,
                    )
                }
            };
            let spectra = quantum::combined_spectra(&grid, p)?;
            Ok((0..grid.len())
                .map(|i| {
                    let mut row: Vec<Value> = Vec::with_capacity(5);
                    if let Some(v) = value {
                        row.push(v.into());
                    }
                    row.push(spectra.grid[i].into());
                    row.push(spectra.s_xx_plus[i].into());
                    row.push(spectra.s_yy_minus[i].into());
                    row.push(spectra.s_db[i].into());
                    row
                })
                .collect())
        })
        .collect::<Result<_, _>>()?;

    let mut columns = Vec::new();
    columns.extend(label.map(str::to_string));
    columns.extend(
        ["omega_rad_s", "s_xx_plus", "s_yy_minus", "s_db"]
            .map(String::from),
    );

    let mut meta = base_metadata(config, base, hash);
    meta.text("probe", "delta_s = -delta_m_eff per curve");
    if explicit_grid.is_none() {
        meta.text(
            "grid",
            "default: omega within 10 gamma_eff of 0, 1001 points, per curve",
        );
    }
    Ok(Table {
        metadata: meta.finish(),
        columns,
        rows: curves.into_iter().flatten().collect(),
    })
}

/// Outer x inner sweep expansion shared by the summary modes.
fn summary_points(
    config: &ExperimentConfig,
    base: &SystemParams,
) -> Result<(Vec<String>, Vec<(Vec<f64>, SystemParams)>), CliError> {
    let sweep = config.sweep.as_ref().ok_or_else(|| {
        CliError::Config(format!("mode \"{}\" requires a sweep", config.mode.name()))
    })?;
    let axis = sweep.expand()?;
    let mut labels = Vec::new();
    let mut points = Vec::new();
    match &config.series {
        Some(series) => {
            labels.push(series.variable.name().to_string());
            labels.push(sweep.variable.name().to_string());
            for &s in &series.expand()? {
                let with_series = series.variable.apply(base, s);
                for &x in &axis {
                    points.push((vec![s, x], sweep.variable.apply(&with_series, x)));
                }
            }
        }
        None => {
            labels.push(sweep.variable.name().to_string());
            for &x in &axis {
                points.push((vec![x], sweep.variable.apply(base, x)));
            }
        }
    }
    Ok((labels, points))
}

fn s_max_table(
    config: &ExperimentConfig,
    base: &SystemParams,
    hash: &str,
) -> Result<Table, CliError> {
    let (labels, points) = summary_points(config, base)?;
    let rows: Vec<Vec<Value>> = points
        .par_iter()
        .map(|(keys, p)| -> Result<Vec<Value>, CliError> {
            let report = quantum::s_max(p)?;
            let mut row: Vec<Value> = keys.iter().map(|&k| Value::from(k)).collect();
            row.push(report.s_max_db.into());
            row.push(report.bandwidth.into());
            row.push(report.entangled.into());
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let mut columns = labels;
    columns.extend(["s_max_db", "bandwidth_rad_s", "entangled"].map(String::from));
    let mut meta = base_metadata(config, base, hash);
    meta.text(
        "bandwidth_definition",
        "full width around omega = 0 where the suppression exceeds half its center value in dB",
    );
    Ok(Table {
        metadata: meta.finish(),
        columns,
        rows,
    })
}

fn stability_table(
    config: &ExperimentConfig,
    base: &SystemParams,
    hash: &str,
) -> Result<Table, CliError> {
    reject_series(config)?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("stability_scan requires a sweep".into()))?;
    let values = sweep.expand()?;
    // pure closed forms: the scan crosses the instability boundary on
    // purpose, so no stability gate applies here
    let rows: Vec<Vec<Value>> = values
        .iter()
        .map(|&v| {
            let mech = mechanical_response(&sweep.variable.apply(base, v));
            vec![v.into(), mech.delta_m_eff.into(), mech.gamma_eff.into()]
        })
        .collect();

    let mut meta = base_metadata(config, base, hash);
    meta.number(
        "stability.g_plus_max_rad_s",
        stability_margin(base).g_plus_max,
    );
    Ok(Table {
        metadata: meta.finish(),
        columns: vec![
            sweep.variable.name().to_string(),
            "delta_m_eff_rad_s".into(),
            "gamma_eff_rad_s".into(),
        ],
        rows,
    })
}

fn peak_gain_table(
    config: &ExperimentConfig,
    base: &SystemParams,
    hash: &str,
) -> Result<Table, CliError> {
    let (labels, points) = summary_points(config, base)?;
    let rows: Vec<Vec<Value>> = points
        .par_iter()
        .map(|(keys, p)| -> Result<Vec<Value>, CliError> {
            let peaks = classical::peak_gains(p)?;
            let mut row: Vec<Value> = keys.iter().map(|&k| Value::from(k)).collect();
            row.push(peaks.r_s.into());
            row.push(peaks.r_c.into());
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let mut columns = labels;
    columns.extend(["r_s_peak", "r_c_peak"].map(String::from));
    Ok(Table {
        metadata: base_metadata(config, base, hash).finish(),
        columns,
        rows,
    })
}

fn oracle_table(
    config: &ExperimentConfig,
    base: &SystemParams,
    hash: &str,
) -> Result<Table, CliError> {
    reject_series(config)?;
    let spec = config.oracle.unwrap_or_default();
    let grid = match config.grid {
        Some(g) => g.expand()?,
        None => oracle_grid(base, spec.grid_points),
    };
    let report = oracle::compare(base, &grid, spec.tol)?;

    let mut rows = Vec::new();
    for item in &report.items {
        rows.push(vec![
            Value::from(item.max_rel_error),
            item.worst_omega.into(),
            (item.max_rel_error <= report.tol).into(),
            false.into(),
        ]);
    }
    for item in &report.variant_deviations {
        rows.push(vec![
            Value::from(item.max_rel_error),
            item.worst_omega.into(),
            true.into(),
            true.into(),
        ]);
    }

    let mut meta = base_metadata(config, base, hash);
    meta.number("oracle.tol", report.tol);
    meta.number("oracle.max_rel_error", report.max_rel_error);
    meta.text("oracle.passed", &report.passed.to_string());
    meta.text(
        "oracle.items",
        &report
            .items
            .iter()
            .chain(&report.variant_deviations)
            .map(|i| i.name.clone())
            .collect::<Vec<_>>()
            .join(","),
    );
    Ok(Table {
        metadata: meta.finish(),
        columns: vec![
            "max_rel_error".into(),
            "worst_omega_rad_s".into(),
            "within_tol".into(),
            "informational_variant".into(),
        ],
        rows,
    })
}

/// Deterministic comparison grid: structural frequencies plus a uniform
/// band of two cavity linewidths.
fn oracle_grid(p: &SystemParams, extra_points: usize) -> Vec<f64> {
    let mech = mechanical_response(p);
    let mut grid = vec![
        0.0,
        mech.delta_m_eff,
        -mech.delta_m_eff,
        p.delta_m(),
        -p.delta_m(),
        p.kappa / 2.0,
        -p.kappa / 2.0,
    ];
    grid.extend(crate::config::linspace(
        -2.0 * p.kappa,
        2.0 * p.kappa,
        extra_points.max(2),
    ));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}
