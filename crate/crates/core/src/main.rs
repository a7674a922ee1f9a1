use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lpbm::experiment::{self, Overrides, EXIT_ERROR};

#[derive(Parser, Debug)]
#[command(name = "lpbm", version, about = "Numerical checks of L_p Brunn-Minkowski type inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Replace the configured seed.
    #[arg(long, global = true)]
    seed_override: Option<u64>,

    /// Replace the configured number of Monte Carlo samples.
    #[arg(long, global = true)]
    samples_override: Option<usize>,

    /// Output directory for the report and summary.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Execute every suite and write the reports.
    Run { config: PathBuf },
    /// Print the plan without executing it.
    Describe { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed_override,
        n_samples: cli.samples_override,
        out_dir: cli.out,
    };
    let (Command::Run { config } | Command::Describe { config }) = &cli.command;
    let cfg = match experiment::load(config, &overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    match cli.command {
        Command::Describe { .. } => {
            print!("{}", experiment::describe(&cfg));
            ExitCode::SUCCESS
        }
        Command::Run { .. } => match experiment::run_with_progress(&cfg, |r, t| {
            eprintln!("{:<32} {:>5} records in {:.1}s", r.name, r.records.len(), t.as_secs_f64())
        }) {
            Ok(out) => {
                for s in out.summaries() {
                    println!(
                        "{:<32} records={:<5} pass={:<5} fail={:<3} inconclusive={:<4} error={:<3} min_slack_sigma={}",
                        s.suite,
                        s.records,
                        s.pass,
                        s.fail,
                        s.inconclusive,
                        s.error,
                        s.min_slack_in_sigma.map_or("-".into(), |v| format!("{v:.3}"))
                    );
                }
                println!("report: {}", out.report_path.display());
                println!("summary: {}", out.summary_path.display());
                ExitCode::from(out.exit_code() as u8)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_ERROR as u8)
            }
        },
    }
}
