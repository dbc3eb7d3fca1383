//! Command-line frontend: run config-driven experiments or the named
//! scenario catalog, writing CSV/SVG/metrics files.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use spinwave::{
    apply_overrides, config_to_toml, output, parse_config, run_experiment, scenario,
    scenario_catalog, ExperimentConfig, OutputKind, Result, ScenarioId, Trajectory, WaveMetrics,
};

#[derive(Parser)]
#[command(
    name = "spinwave",
    version,
    about = "Simulate stimulated polarization waves in spin-1/2 chains and rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config file.
    Run {
        /// Path to the config document.
        config: PathBuf,
        /// Directory for output files.
        #[arg(long, default_value = "./out")]
        out_dir: PathBuf,
        /// Override config keys, e.g. --set omega1=0.05 --set gammas.H=42.58.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Run a named scenario from the catalog.
    Scenario {
        /// Scenario id (see list-scenarios).
        id: String,
        #[arg(long, default_value = "./out")]
        out_dir: PathBuf,
        /// Override config keys on every run of the scenario.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the scenario catalog.
    ListScenarios,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out_dir, set } => {
            let mut text = fs::read_to_string(&config)?;
            if !set.is_empty() {
                text = apply_overrides(&text, &set)?;
            }
            let parsed = parse_config(&text)?;
            let name = config
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run")
                .to_string();
            execute_run(&parsed, &out_dir, &name)?;
            Ok(())
        }
        Command::Scenario { id, out_dir, set } => {
            let id: ScenarioId = id.parse()?;
            let sc = scenario(id);
            let mut results: Vec<(&'static str, Trajectory)> = Vec::new();
            for run in &sc.runs {
                let config = if set.is_empty() {
                    run.config.clone()
                } else {
                    let text = apply_overrides(&config_to_toml(&run.config)?, &set)?;
                    parse_config(&text)?
                };
                let name = match run.curve {
                    Some(curve) => format!("{id}-{curve}"),
                    None => id.to_string(),
                };
                let (traj, _) = execute_run(&config, &out_dir, &name)?;
                if let Some(curve) = run.curve {
                    results.push((curve, traj));
                }
            }
            // bundles get one combined total-polarization table
            if results.len() > 1 && results.iter().all(|(_, t)| t.n_samples() > 0) {
                let path = out_dir.join(format!("{id}.csv"));
                let file = BufWriter::new(fs::File::create(&path)?);
                let curves: Vec<(&str, &Trajectory)> =
                    results.iter().map(|(c, t)| (*c, t)).collect();
                output::write_totals_csv(&curves, file)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::ListScenarios => {
            for sc in scenario_catalog() {
                println!("{:<6} {}", sc.id.as_str(), sc.id.description());
            }
            Ok(())
        }
    }
}

fn execute_run(
    config: &ExperimentConfig,
    out_dir: &Path,
    name: &str,
) -> Result<(Trajectory, WaveMetrics)> {
    fs::create_dir_all(out_dir)?;
    let (traj, metrics) = run_experiment(config)?;
    for kind in &config.outputs {
        let path = match kind {
            OutputKind::Csv => out_dir.join(format!("{name}.csv")),
            OutputKind::Svg => out_dir.join(format!("{name}.svg")),
            OutputKind::Metrics => out_dir.join(format!("{name}.metrics.toml")),
        };
        let file = BufWriter::new(fs::File::create(&path)?);
        match kind {
            OutputKind::Csv => output::write_trajectory_csv(&traj, file)?,
            OutputKind::Svg => output::render_svg(&traj, file)?,
            OutputKind::Metrics => output::write_metrics(&metrics, file)?,
        }
        println!("wrote {}", path.display());
    }
    Ok((traj, metrics))
}
