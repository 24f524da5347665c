//! `run`, `figure`, `sweep` and `check`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use trilevel::algebra::GeneratorSet;
use trilevel::config::eval_expr;
use trilevel::presets::{figure_presets, preset};
use trilevel::selfcheck::self_check_with;
use trilevel::{simulate, ConfigError, RunConfig, Trajectory};

use crate::csv::to_csv;
use crate::svg::{line_plot, Series};
use crate::{CliError, Overrides};

/// Panel groups written by `figure`: file suffix, title and CSV columns.
pub const FIGURE_PANELS: [(&str, &str, &[&str]); 4] = [
    ("diagonal", "Populations", &["pop1", "pop2", "pop3"]),
    ("offdiag_re", "Off-diagonal elements, real part", &["re12", "re13", "re23"]),
    ("offdiag_im", "Off-diagonal elements, imaginary part", &["im12", "im13", "im23"]),
    ("entropy", "Entropy", &["entropy"]),
];

/// Field parameters accepted by `sweep --param`.
pub const SWEEP_KEYS: [&str; 6] = ["A", "Omega", "B", "omega", "delta", "Gamma"];

const DEFAULT_QUANTITIES: [&str; 3] = ["pop1", "pop2", "pop3"];

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg = RunConfig::parse(&text)?;
    overrides.apply(&mut cfg)?;
    Ok(cfg)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn plot(traj: &Trajectory, title: &str, columns: &[&str]) -> String {
    let series: Vec<Series> = columns
        .iter()
        .map(|&c| Series {
            label: c,
            values: traj.observables.iter().map(|r| r.get(c).unwrap_or(f64::NAN)).collect(),
        })
        .collect();
    line_plot(title, "t", "value", &traj.grid, &series)
}

/// Runs a config file. The CSV goes to the `csv` path if set, else to `stdout`.
pub fn cmd_run(config: &Path, overrides: &Overrides, stdout: &mut dyn Write) -> Result<Trajectory, CliError> {
    let cfg = load_config(config, overrides)?;
    let traj = simulate(&cfg)?;
    let csv = to_csv(&traj);
    match &cfg.outputs.csv {
        Some(path) => write_file(path, &csv)?,
        None => stdout
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e))?,
    }
    if let Some(path) = &cfg.outputs.svg {
        let quantities: Vec<&str> = if cfg.outputs.quantities.is_empty() {
            DEFAULT_QUANTITIES.to_vec()
        } else {
            cfg.outputs.quantities.iter().map(String::as_str).collect()
        };
        let title = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        write_file(path, &plot(&traj, &title, &quantities))?;
    }
    Ok(traj)
}

/// Runs a figure preset and writes `<name>.csv` plus one SVG per panel group.
pub fn cmd_figure(name: &str, out_dir: &Path, overrides: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    let valid: Vec<&str> = figure_presets().map(|p| p.name).collect();
    if !valid.contains(&name) {
        return Err(ConfigError::new(
            "figure",
            format!("unknown figure {name:?}; valid names: {}", valid.join(", ")),
        )
        .into());
    }
    let p = preset(name).map_err(|e| ConfigError::new("figure", e.to_string()))?;
    let mut cfg = p.run_config();
    overrides.apply(&mut cfg)?;
    let traj = simulate(&cfg)?;

    create_dir(out_dir)?;
    let mut written = Vec::new();
    let csv_path = out_dir.join(format!("{name}.csv"));
    write_file(&csv_path, &to_csv(&traj))?;
    written.push(csv_path);
    for (suffix, title, columns) in FIGURE_PANELS {
        let path = out_dir.join(format!("{name}_{suffix}.svg"));
        write_file(&path, &plot(&traj, &format!("{name}: {title}"), columns))?;
        written.push(path);
    }
    Ok(written)
}

/// Runs the config once per value of `param` (in parallel) and writes
/// `<stem>_<param>_<k>.csv` into `out_dir`.
pub fn cmd_sweep(
    config: &Path,
    param: &str,
    values: &[String],
    out_dir: &Path,
    overrides: &Overrides,
) -> Result<Vec<(String, PathBuf)>, CliError> {
    if !SWEEP_KEYS.contains(&param) {
        return Err(ConfigError::new(
            "param",
            format!("cannot sweep {param:?}; expected one of {}", SWEEP_KEYS.join(", ")),
        )
        .into());
    }
    let values: Vec<&str> = values.iter().map(|v| v.trim()).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(ConfigError::new("values", "empty value list").into());
    }
    let base = load_config(config, overrides)?;

    let mut runs = Vec::with_capacity(values.len());
    for v in &values {
        let x = eval_expr(v).map_err(|e| ConfigError::new("values", e))?;
        let mut cfg = base.clone();
        let field = &mut cfg.field;
        match param {
            "A" => field.eps_amplitude = x,
            "Omega" => field.eps_frequency = x,
            "B" => field.j_amplitude = x,
            "omega" => field.j_frequency = x,
            "delta" => field.phase = x,
            _ => field.gamma = x,
        }
        cfg.validate()?;
        runs.push(cfg);
    }

    let results: Vec<Result<Trajectory, _>> = runs.par_iter().map(simulate).collect();
    let stem = config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    create_dir(out_dir)?;
    let mut written = Vec::with_capacity(results.len());
    for (k, (value, result)) in values.iter().zip(results).enumerate() {
        let traj = result?;
        let path = out_dir.join(format!("{stem}_{param}_{k}.csv"));
        write_file(&path, &to_csv(&traj))?;
        written.push((value.to_string(), path));
    }
    Ok(written)
}

/// Prints the self-check table; fails if any check fails.
pub fn cmd_check(out: &mut dyn Write) -> Result<(), CliError> {
    check_with(GeneratorSet::standard(), out)
}

pub fn check_with(generators: &GeneratorSet, out: &mut dyn Write) -> Result<(), CliError> {
    let results = self_check_with(generators);
    let failed = results.iter().filter(|r| !r.passed).count();
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    text.push_str(&format!("{} passed, {failed} failed\n", results.len() - failed));
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?;
    if failed > 0 {
        return Err(CliError::CheckFailed {
            failed,
            total: results.len(),
        });
    }
    Ok(())
}
