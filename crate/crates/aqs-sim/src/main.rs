use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use aqs_sim::cli::{self, commands};

#[derive(Parser)]
#[command(
    name = "aqs-sim",
    version,
    about = "Arbitrated quantum signature scheme simulator: honest sessions, tamper statistics, and the chosen-message forgery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay the built-in worked example and check its golden values
    DemoExample {
        /// Corrupt an internal constant so the golden check fails (self-test)
        #[arg(long, hide = true)]
        perturb_golden: bool,
    },
    /// Run one honest session from a config file and write the transcript
    RunHonest {
        /// Path to the JSON run configuration
        #[arg(long)]
        config: String,
        /// Override the config's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Transcript output path
        #[arg(long, default_value = "transcript.json")]
        out: String,
    },
    /// Run the chosen-message forgery and write a report
    RunAttack {
        /// Path to the JSON run configuration
        #[arg(long)]
        config: String,
        /// Ops spec: `all:GATE` or `RANK:GATE` entries joined by `;`,
        /// gates X, Z, H, I, or a JSON 2x2 matrix of [re, im] pairs
        #[arg(long)]
        ops: String,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Report output path
        #[arg(long, default_value = "attack_report.json")]
        out: String,
        /// Success-rate bar for exit 0 under the swap comparator
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        /// Also record the plan's true message positions in the report
        #[arg(long)]
        oracle: bool,
    },
    /// Measure cipher-layer tamper detection rates
    TamperStats {
        /// Position class to tamper with: decoy or message
        #[arg(long)]
        class: String,
        /// Gate to apply: X, Z, H, or I
        #[arg(long)]
        op: String,
        #[arg(long)]
        trials: u64,
        /// Config to use instead of the built-in example
        #[arg(long)]
        config: Option<String>,
        /// Override the seed the trials derive from
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare swap-test false-equal rates against the analytic model
    SwapStats {
        /// Comma-separated repetition counts, e.g. 1,3,5
        #[arg(long)]
        m: String,
        /// Comma-separated pair fidelities, e.g. 0,0.5,1
        #[arg(long)]
        cases: String,
        #[arg(long)]
        trials: u64,
        /// Override the seed the trials derive from
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => cli::EXIT_OK,
                _ => cli::EXIT_CONFIG,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    let result = match &cli.command {
        Command::DemoExample { perturb_golden } => Ok(commands::cmd_demo_example(*perturb_golden)),
        Command::RunHonest { config, seed, out } => {
            commands::cmd_run_honest(config, *seed, Some(out))
        }
        Command::RunAttack {
            config,
            ops,
            trials,
            out,
            threshold,
            oracle,
        } => commands::cmd_run_attack(config, ops, *trials, Some(out), *threshold, *oracle),
        Command::TamperStats {
            class,
            op,
            trials,
            config,
            seed,
        } => commands::cmd_tamper_stats(class, op, *trials, config.as_deref(), *seed),
        Command::SwapStats {
            m,
            cases,
            trials,
            seed,
        } => commands::cmd_swap_stats(m, cases, *trials, *seed),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(cli::EXIT_CONFIG);
        }
    }
}
