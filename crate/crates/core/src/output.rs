//! Flat-file artifacts: one CSV per curve and per set of long-time values,
//! `verdicts.json`, and a `manifest.json` naming every file.
//!
//! Nothing time- or host-dependent is written, so the same configuration
//! always produces byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner::{FigureDataset, QuantitySeries, VerdictRecord};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Twelve significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn stem(series: &QuantitySeries) -> String {
    format!("{}_{}", series.quantity.label().to_ascii_lowercase(), series.bond)
}

fn metadata(out: &mut String, config: &ExperimentConfig, series: &QuantitySeries, lines: &[(&str, String)]) {
    let mut push = |k: &str, v: &str| writeln!(out, "# {k}: {v}").expect("writing to a String");
    push("quantity", series.quantity.label());
    push("bond", &series.bond);
    push("geometry", &config.geometry.to_string());
    push("gamma", &format_float(config.gamma));
    push("coupling_j", &format_float(config.coupling_j));
    for (k, v) in lines {
        push(k, v);
    }
}

pub fn equilibrium_csv(config: &ExperimentConfig, series: &QuantitySeries) -> String {
    let mut out = String::new();
    metadata(
        &mut out,
        config,
        series,
        &[("state", "canonical at zero field".to_string())],
    );
    out.push_str("beta_tilde,value,err\n");
    for p in &series.curve.points {
        writeln!(
            out,
            "{},{},{}",
            format_float(p.beta_tilde),
            format_float(p.value),
            format_float(p.error)
        )
        .expect("writing to a String");
    }
    out
}

pub fn long_time_csv(config: &ExperimentConfig, series: &QuantitySeries) -> String {
    let mut out = String::new();
    metadata(
        &mut out,
        config,
        series,
        &[
            ("beta_tilde_init", format_float(config.beta_tilde_init)),
            ("method", series.method.clone()),
            ("sampling_seed", config.sampling.seed.to_string()),
        ],
    );
    // the diagnostic column appears only where every row carries it
    let diagnostic = !series.long_time.is_empty() && series.long_time.iter().all(|v| v.of_averaged_state.is_some());
    out.push_str("a_over_J,long_time_value,std_error");
    out.push_str(if diagnostic { ",of_averaged_state\n" } else { "\n" });
    for v in &series.long_time {
        write!(
            out,
            "{},{},{}",
            format_float(v.a_over_j),
            format_float(v.value),
            format_float(v.std_error)
        )
        .expect("writing to a String");
        match v.of_averaged_state {
            Some(d) if diagnostic => writeln!(out, ",{}", format_float(d)),
            _ => writeln!(out),
        }
        .expect("writing to a String");
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    code_version: &'a str,
    geometry: String,
    seed: u64,
    config: &'a ExperimentConfig,
    files: Vec<String>,
}

/// Writes the dataset under `dir` and returns the paths written, manifest
/// last.
pub fn write_dataset(dataset: &FigureDataset, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let config = &dataset.config;
    let mut names = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        fs::write(dir.join(&name), body)?;
        names.push(name);
        Ok(())
    };
    for s in &dataset.series {
        write(format!("equilibrium_{}.csv", stem(s)), equilibrium_csv(config, s))?;
        write(format!("long_time_{}.csv", stem(s)), long_time_csv(config, s))?;
    }
    let verdicts: Vec<VerdictRecord> = dataset.verdicts();
    write("verdicts.json".into(), serde_json::to_string_pretty(&verdicts)? + "\n")?;

    let manifest = Manifest {
        code_version: CODE_VERSION,
        geometry: config.geometry.to_string(),
        seed: config.sampling.seed,
        config,
        files: names.clone(),
    };
    let manifest_name = "manifest.json".to_string();
    fs::write(
        dir.join(&manifest_name),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    names.push(manifest_name);
    Ok(names.into_iter().map(|n| dir.join(n)).collect())
}
