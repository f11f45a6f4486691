use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use resqfi_cli::config::{parse_entries, RunConfig};
use resqfi_cli::verify::{self, Level};
use resqfi_cli::{commands, output, write_artifacts, CliError};

#[derive(Parser)]
#[command(name = "resqfi", version, about = "Quantum Fisher information of a bosonic probe in a structured reservoir")]
struct Cli {
    /// Worker threads for parallel solves (default: all cores).
    #[arg(long, global = true, env = "RESQFI_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// key = value config file; unset keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot next to each CSV.
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// u(t), |u|^2, gamma(t), Omega(t) and the final Wigner function.
    Dynamics(RunArgs),
    /// J(omega), the self-energy and the bound-state solution.
    Spectrum(RunArgs),
    /// QFI against time, the (beta, theta) advantage surface, or nbar.
    Qfi(RunArgs),
    /// Homodyne error-propagation precision against the asymptotic bound.
    Measure(RunArgs),
    /// Photonic-crystal dynamics for a sweep of omega0.
    Photonic(RunArgs),
    /// Run the oracle and analytic-limit checks and write verify.json.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    let text = match &args.config {
        Some(p) => fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut entries = parse_entries(&text)?;
    if let Some(out) = &args.out {
        entries.insert("output.dir".into(), out.display().to_string());
    }
    Ok(RunConfig::from_entries(entries)?)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let (args, f): (&RunArgs, fn(&RunConfig, bool) -> Result<Vec<commands::Artifact>, CliError>) = match &cli.command {
        Command::Dynamics(a) => (a, commands::dynamics),
        Command::Spectrum(a) => (a, commands::spectrum),
        Command::Qfi(a) => (a, commands::qfi),
        Command::Measure(a) => (a, commands::measure),
        Command::Photonic(a) => (a, commands::photonic),
        Command::Verify { level, out } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = verify::run(level);
            for c in &report.checks {
                println!("{} {:<24} {:>8.2}s  {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.seconds, c.detail);
            }
            let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numerical(e.to_string()))?;
            let path = output::write_file(out, "verify.json", &json)?;
            println!("wrote {}", path.display());
            if !report.passed {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id.as_str()).collect();
                return Err(CliError::Verification(failed.join(", ")));
            }
            return Ok(());
        }
    };
    let cfg = load(args)?;
    let artifacts = f(&cfg, args.svg)?;
    for p in write_artifacts(&cfg.out_dir, &artifacts)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
