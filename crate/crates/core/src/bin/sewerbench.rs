use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use sewerbench::gasdata::SynthConfig;
use sewerbench::harness::{
    cmd_bench, cmd_detect, cmd_export, cmd_ks, cmd_synth, exit, exit_code, load_eval, resolve_jobs, BenchConfig,
    JOBS_ENV,
};
use sewerbench::learner::ModelEnvelope;
use sewerbench::{Error, Result};

/// Sewer-gas hazard classification benchmark.
#[derive(Debug, Parser)]
#[command(name = "sewerbench", version, about)]
struct Cli {
    /// JSON configuration (a synthesis config for `synth`, a bench config
    /// otherwise).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed (the noise seed for `synth`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path: CSV file for `synth`, directory for `bench`, model file
    /// for `export`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reduced profile: 2,048-row dataset and three repeats.
    #[arg(long, global = true)]
    fast: bool,
    /// Worker threads (overridden by SEWERBENCH_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the synthetic sensor dataset as CSV.
    Synth,
    /// Cross-validate the roster and write the report tables.
    Bench,
    /// Compare two learners from an evaluation file with the KS test.
    Ks {
        /// `eval.json` written by `bench`.
        eval: PathBuf,
        a: String,
        b: String,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Refit a roster learner on the full dataset and save it.
    Export {
        /// Roster name, e.g. SVM or IBK.
        name: String,
    },
    /// Classify sensor rows and report the indicator state of each.
    Detect {
        /// Model envelope written by `export`.
        #[arg(long)]
        model: PathBuf,
        /// Input CSV; standard input when omitted or `-`.
        input: Option<PathBuf>,
    },
}

fn bench_config(cli: &Cli) -> Result<BenchConfig> {
    let mut c = match &cli.config {
        Some(p) => BenchConfig::load(p)?,
        None => BenchConfig::default(),
    };
    if cli.fast {
        c.apply_fast();
    }
    if let Some(s) = cli.seed {
        c.root_seed = s;
    }
    Ok(c)
}

fn run(cli: Cli) -> Result<i32> {
    let env_jobs = std::env::var(JOBS_ENV).ok();
    match &cli.command {
        Command::Synth => {
            let mut c = match &cli.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                    serde_json::from_str::<SynthConfig>(&text)
                        .map_err(|e| Error::Config(format!("invalid synthesis config: {e}")))?
                }
                None if cli.fast => SynthConfig::fast(),
                None => SynthConfig::default(),
            };
            if let Some(s) = cli.seed {
                c.seed = s;
            }
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("dataset.csv"));
            let data = cmd_synth(&c, &out)?;
            let [safe, unsafe_] = data.class_counts();
            println!(
                "wrote {} rows ({safe} safe, {unsafe_} unsafe) to {}",
                data.len(),
                out.display()
            );
            Ok(exit::SUCCESS)
        }
        Command::Bench => {
            let mut c = bench_config(&cli)?;
            if let Some(o) = &cli.out {
                c.out_dir = o.clone();
            }
            let jobs = resolve_jobs(cli.jobs, env_jobs.as_deref(), c.jobs)?;
            let outcome = cmd_bench(&c, jobs)?;
            let ranks = sewerbench::stats::build_rank_table(&outcome.samples);
            print!("{}", ranks.to_markdown());
            println!(
                "artifacts in {} ({:.1} s, config {})",
                outcome.out_dir.display(),
                outcome.manifest.total_seconds,
                &outcome.manifest.config_hash[..12]
            );
            if outcome.failures.is_empty() {
                Ok(exit::SUCCESS)
            } else {
                for f in &outcome.failures {
                    eprintln!("error: {f}");
                }
                Ok(exit::CLASSIFIER)
            }
        }
        Command::Ks { eval, a, b, alpha } => {
            let file = load_eval(eval)?;
            let o = cmd_ks(&file, a, b, *alpha)?;
            println!(
                "{a} {} {b}  (D = {:.6}, critical = {:.6}, alpha = {})",
                o.relation.symbol(),
                o.d_statistic,
                o.critical_value,
                o.alpha
            );
            Ok(exit::SUCCESS)
        }
        Command::Export { name } => {
            let c = bench_config(&cli)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{name}.model.json")));
            let s = cmd_export(&c, name, &out)?;
            println!(
                "{}: {} parameters, {} bytes, refit on {} rows, written to {}",
                s.name,
                s.parameter_count,
                s.payload_bytes,
                s.training_rows,
                s.path.display()
            );
            Ok(exit::SUCCESS)
        }
        Command::Detect { model, input } => {
            let text = std::fs::read_to_string(model)?;
            let model = ModelEnvelope::from_json(&text)?.model;
            let stdout = std::io::stdout();
            let report = match input.as_ref().filter(|p| p.as_os_str() != "-") {
                Some(p) => cmd_detect(&model, BufReader::new(std::fs::File::open(p)?), stdout.lock())?,
                None => cmd_detect(&model, std::io::stdin().lock(), stdout.lock())?,
            };
            let mut out = stdout.lock();
            writeln!(out, "{}", report.summary())?;
            Ok(if report.errors > 0 { exit::DATA } else { exit::SUCCESS })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::SUCCESS,
                _ => exit::USAGE,
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
