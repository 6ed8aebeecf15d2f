use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracemix_core::harness::bench::{bench, write_csv};
use tracemix_core::harness::config::DEFAULT_PAILLIER_BITS;
use tracemix_core::harness::{run_session, verify_transcript_file, SessionConfig, Verdict};
use tracemix_core::mixnet::QueryOutcome;
use tracemix_core::runtime::TamperDirective;

#[derive(Parser)]
#[command(name = "mixnet", version, about = "Traceable mixnet session driver")]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tamper directive `party:phase:index[:inc|fake[:primary|complement|both]]`; repeatable.
    #[arg(long, global = true)]
    tamper: Vec<TamperDirective>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a session from a TOML config and write its transcript.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Transcript path; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a transcript offline.
    Verify { transcript: PathBuf },
    /// Time every phase per role and write a CSV table.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "256,512")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_PAILLIER_BITS)]
        paillier_bits: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> tracemix_core::Result<ExitCode> {
    match cli.command {
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = SessionConfig::from_toml(&text)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            cfg.tamper.0.extend(cli.tamper);
            if out.is_some() {
                cfg.output = out;
            }
            let session = run_session(&cfg)?;
            for (k, r) in session.results.iter().enumerate() {
                match &r.outcome {
                    QueryOutcome::Output(set) => println!("query {k} {}: output {:?}", r.kind, set),
                    QueryOutcome::Abort(a) => println!("query {k} {}: abort ({a})", r.kind),
                }
            }
            if let Some(path) = &cfg.output {
                println!("transcript written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { transcript } => {
            let verdict = verify_transcript_file(&transcript)?;
            println!("{verdict}");
            Ok(match verdict {
                Verdict::Accept { .. } => ExitCode::SUCCESS,
                Verdict::Reject { .. } => ExitCode::FAILURE,
            })
        }
        Command::Bench { n_list, m, paillier_bits, out } => {
            let rows = bench(&n_list, m, cli.seed.unwrap_or(0), paillier_bits)?;
            write_csv(&rows, std::fs::File::create(&out)?)?;
            println!("{} rows written to {}", rows.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
