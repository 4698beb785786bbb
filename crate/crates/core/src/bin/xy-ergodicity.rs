use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use xy_ergodicity::config::{parse_override, ExperimentConfig, SystemGeometry, OUTPUT_DIR_ENV};
use xy_ergodicity::ergodicity::{classify, ClassifyOptions};
use xy_ergodicity::output::{format_float, write_dataset};
use xy_ergodicity::runner::{run, FigureDataset, Quantity};

#[derive(Parser)]
#[command(
    version,
    about = "Quench dynamics and ergodicity of correlations in the transverse-field XY model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Produce the dataset behind figure 1 (infinite chain), 2 (12-site chain),
    /// 4 (2x4 ladder) or 6 (3x4 torus).
    ReproduceFigure {
        #[arg(value_parser = ["1", "2", "4", "6"])]
        figure: String,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form infinite chain.
    InfiniteChain {
        #[command(flatten)]
        common: Common,
    },
    /// Exact diagonalization of a finite lattice.
    Finite {
        /// `chain:N`, `ladder:L` or `torus:RxC`.
        #[arg(long)]
        geometry: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Classify a given long-time value against a canonical curve.
    Classify {
        #[arg(long)]
        quantity: String,
        /// Long-time value to compare against the curve.
        #[arg(long, allow_hyphen_values = true)]
        value: f64,
        /// Bond type for two-site quantities (`chain`, `rail`, `rung`, `row`,
        /// `column` or `average`); defaults to the lattice summary.
        #[arg(long)]
        bond: Option<String>,
        /// `infinite-chain` or a finite geometry.
        #[arg(long)]
        geometry: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Long-time values and verdicts over an evenly spaced range of fields.
    Sweep {
        #[arg(long)]
        geometry: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        a_min: f64,
        #[arg(long, default_value_t = 3.0)]
        a_max: f64,
        #[arg(long, default_value_t = 31)]
        a_count: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any configuration key, e.g. `--set sampling.n_samples=500`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Comma-separated pre-quench fields a/J.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    fields: Option<Vec<f64>>,
    #[arg(long)]
    beta_init: Option<f64>,
    #[arg(long)]
    band_factor: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    output_dir: Option<PathBuf>,
    /// Compute and print, but write no files.
    #[arg(long)]
    dry_run: bool,
}

impl Common {
    fn resolve(&self, base: ExperimentConfig, geometry: Option<&str>) -> anyhow::Result<ExperimentConfig> {
        let mut overrides = self
            .overrides
            .iter()
            .map(|s| parse_override(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut flag = |k: &str, v: String| overrides.push((k.to_string(), v));
        if let Some(g) = geometry {
            flag("geometry", format!("\"{}\"", g.parse::<SystemGeometry>()?));
        }
        if let Some(v) = self.gamma {
            flag("gamma", format!("{v:?}"));
        }
        if let Some(v) = &self.fields {
            let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            flag("fields", format!("[{}]", items.join(", ")));
        }
        if let Some(v) = self.beta_init {
            flag("beta_tilde_init", format!("{v:?}"));
        }
        if let Some(v) = self.band_factor {
            flag("band_factor", format!("{v:?}"));
        }
        if let Some(v) = self.seed {
            flag("sampling.seed", v.to_string());
        }
        if let Some(v) = &self.output_dir {
            flag("output_dir", format!("{:?}", v.display().to_string()));
        }
        let mut table: toml::Table = base.to_toml().parse()?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let file: toml::Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
            merge(&mut table, file);
        }
        Ok(ExperimentConfig::from_toml_str(&table.to_string(), &overrides)?)
    }
}

/// Keys in `over` replace those in `base`; nested tables merge.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn emit(dataset: &FigureDataset, common: &Common) -> anyhow::Result<()> {
    println!("geometry {}", dataset.config.geometry);
    for s in &dataset.series {
        for (lt, v) in s.long_time.iter().zip(&s.verdicts) {
            println!(
                "{:<5} {:<8} a/J={:<6} long-time={} ± {}  {:?}",
                s.quantity.label(),
                s.bond,
                lt.a_over_j,
                format_float(lt.value),
                format_float(lt.std_error),
                v.verdict
            );
        }
    }
    if !common.dry_run {
        let files = write_dataset(dataset, &dataset.config.output_dir)?;
        println!("wrote {} files to {}", files.len(), dataset.config.output_dir.display());
    }
    Ok(())
}

fn main_inner(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::ReproduceFigure { figure, common } => {
            let base = ExperimentConfig::for_figure(figure.parse()?)?;
            let geometry = base.geometry.to_string();
            let config = common.resolve(base, Some(&geometry))?;
            emit(&run(&config)?, &common)
        }
        Command::InfiniteChain { common } => {
            let config = common.resolve(ExperimentConfig::default(), Some("infinite-chain"))?;
            emit(&run(&config)?, &common)
        }
        Command::Finite { geometry, common } => {
            let base = ExperimentConfig {
                geometry: "chain:12".parse()?,
                ..ExperimentConfig::default()
            };
            let config = common.resolve(base, geometry.as_deref())?;
            if config.geometry == SystemGeometry::InfiniteChain {
                bail!("`finite` needs a finite geometry");
            }
            emit(&run(&config)?, &common)
        }
        Command::Sweep {
            geometry,
            a_min,
            a_max,
            a_count,
            common,
        } => {
            if a_count < 1 || a_max.partial_cmp(&a_min).is_none_or(|o| o.is_lt()) {
                bail!("sweep needs a_count >= 1 and a_max >= a_min");
            }
            let step = if a_count > 1 {
                (a_max - a_min) / (a_count - 1) as f64
            } else {
                0.0
            };
            let fields: Vec<String> = (0..a_count).map(|i| format!("{:?}", a_min + step * i as f64)).collect();
            let mut config = common.resolve(ExperimentConfig::default(), geometry.as_deref())?;
            config = ExperimentConfig::from_toml_str(
                &config.to_toml(),
                &[("fields".to_string(), format!("[{}]", fields.join(", ")))],
            )?;
            emit(&run(&config)?, &common)
        }
        Command::Classify {
            quantity,
            value,
            bond,
            geometry,
            common,
        } => {
            let quantity: Quantity = quantity.parse()?;
            let mut config = common.resolve(ExperimentConfig::default(), geometry.as_deref())?;
            // the curve does not depend on the fields; keep the run minimal
            config.fields = vec![0.0];
            let dataset = run(&config)?;
            let bond = bond.unwrap_or_else(|| dataset.primary_bond(quantity).to_string());
            let series = dataset
                .series(quantity, &bond)
                .with_context(|| format!("no {} series for bond `{bond}`", quantity.label()))?;
            let options = ClassifyOptions {
                band_factor: config.band_factor,
                match_tol: config.match_tol,
            };
            let verdict = classify(value, &series.curve, None, config.beta_tilde_init, &options)?;
            let record = serde_json::json!({
                "quantity": quantity,
                "bond": bond,
                "geometry": config.geometry.to_string(),
                "gamma": config.gamma,
                "beta_init": config.beta_tilde_init,
                "long_time_value": value,
                "verdict": verdict.verdict,
                "crossing_beta_tilde": verdict.crossing_beta_tilde,
                "crossings": verdict.crossings,
                "band": verdict.band,
            });
            println!("{}", serde_json::to_string_pretty(&record)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
