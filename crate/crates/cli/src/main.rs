use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isospec_cli::{describe, experiment_names, run, ExperimentConfig};

#[derive(Parser)]
#[command(name = "isospec", about = "Certification runs for isospectral potentials and conformally equivalent metrics", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named experiment and write its certificates.
    Run {
        /// Experiment name (see `isospec list`).
        name: String,
        /// JSON config file; flags below override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Trial-space polynomial degree.
        #[arg(long)]
        degree: Option<usize>,
        /// Seed for every randomized subroutine.
        #[arg(long)]
        seed: Option<u64>,
        /// Quadrature sample budget.
        #[arg(long)]
        samples: Option<usize>,
        /// Output directory (reports under <out>/<name>/).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Perturb the second family's mixed entry (negative control).
        #[arg(long)]
        perturb: Option<f64>,
        /// Restart budget for the equivalence / equation searches.
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// List the experiment catalog.
    List,
    /// Describe one experiment.
    Describe { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for name in experiment_names() {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Describe { name } => match describe(&name) {
            Some(text) => {
                println!("{name}\n{text}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("unknown experiment {name:?}; see `isospec list`");
                ExitCode::from(2)
            }
        },
        Command::Run { name, config, degree, seed, samples, out, perturb, restarts } => {
            let mut cfg = match config {
                Some(path) => match std::fs::read_to_string(&path)
                    .map_err(anyhow::Error::from)
                    .and_then(|t| serde_json::from_str::<ExperimentConfig>(&t).map_err(Into::into))
                {
                    Ok(c) => c,
                    Err(e) => {
                        eprintln!("failed to load config {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                },
                None => match ExperimentConfig::for_name(&name) {
                    Some(c) => c,
                    None => {
                        eprintln!("unknown experiment {name:?}; see `isospec list`");
                        return ExitCode::from(2);
                    }
                },
            };
            cfg.name = name;
            if cfg.construction.is_none() {
                cfg.construction = isospec_cli::parse_name(&cfg.name);
                if cfg.construction.is_none() {
                    eprintln!("unknown experiment {:?}", cfg.name);
                    return ExitCode::from(2);
                }
            }
            if let Some(d) = degree {
                cfg.degree = d;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(s) = samples {
                cfg.samples = s;
            }
            if out.is_some() {
                cfg.out_dir = out;
            }
            if perturb.is_some() {
                cfg.perturb = perturb;
            }
            if let Some(r) = restarts {
                cfg.search_restarts = r;
            }
            match run(&cfg) {
                Ok(report) => {
                    for cert in &report.certificates {
                        println!(
                            "{:<40} {}",
                            cert.name,
                            if cert.pass {
                                "pass"
                            } else if cert.required {
                                "FAIL"
                            } else {
                                "fail (advisory)"
                            }
                        );
                    }
                    println!(
                        "{}: {} in {:.2}s",
                        report.config.name,
                        if report.overall_pass { "PASS" } else { "FAIL" },
                        report.wall_clock_sec
                    );
                    if report.overall_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
