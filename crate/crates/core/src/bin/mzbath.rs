use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use mzbath::acceptance::{results_csv, SuiteOptions, CRITERIA, DEFAULT_SEED};
use mzbath::commands::{cmd_coeffs, cmd_evolve, cmd_interfere, cmd_sweep};
use mzbath::config::RunConfig;
use mzbath::output::render_svg;
use mzbath::Error;

/// Open-system simulations of a Mach-Zehnder interferometer coupled to a
/// thermal bath.
///
/// Any config field can be overridden with `--section.key=value`
/// (for example `--bath.temperature=50`); overrides win over the file.
#[derive(Debug, Parser)]
#[command(name = "mzbath", version)]
struct Cli {
    /// TOML config file (falls back to $MZBATH_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output CSV path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write SVG plots next to the CSV.
    #[arg(long, global = true)]
    svg: bool,
    /// Seed for randomized sampling in selftest.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// No progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Multiplies every selftest tolerance (test hook).
    #[arg(long, global = true, hide = true, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time-dependent bath coefficients Δ(t), γ(t).
    Coeffs,
    /// Markovian evolution with entropy, coherence and heat series.
    Evolve,
    /// Pointer distributions along X and P at snapshot times.
    Interfere,
    /// Stationary quantities swept over Ω/T, temperature or time.
    Sweep,
    /// Run the acceptance suite.
    Selftest,
}

/// Pull `--section.key=value` items out of argv before clap sees them.
fn split_overrides(args: Vec<String>) -> (Vec<String>, Vec<String>) {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for (i, a) in args.into_iter().enumerate() {
        let is_override = i > 0
            && a.starts_with("--")
            && a.split_once('=').is_some_and(|(k, _)| k.contains('.'));
        if is_override {
            overrides.push(a);
        } else {
            rest.push(a);
        }
    }
    (rest, overrides)
}

fn write_text(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn svg_path(csv: Option<&Path>, suffix: &str) -> PathBuf {
    let base = csv.map_or_else(|| PathBuf::from("mzbath"), |p| p.with_extension(""));
    let mut name = base.into_os_string();
    name.push(suffix);
    name.push(".svg");
    PathBuf::from(name)
}

fn run(cli: Cli, overrides: &[String]) -> Result<u8, Error> {
    if let Command::Selftest = cli.command {
        let opts = SuiteOptions {
            seed: cli.seed.unwrap_or(DEFAULT_SEED),
            tolerance_scale: cli.tolerance_scale,
        };
        let mut outcomes = Vec::new();
        for criterion in CRITERIA {
            let start = Instant::now();
            let o = criterion(&opts);
            if !cli.quiet {
                eprintln!("{} ({:.2} s)", o.line(), start.elapsed().as_secs_f64());
            }
            outcomes.push(o);
        }
        if let Some(p) = cli.out.as_deref() {
            let mut text = format!("# mzbath {} selftest seed={}\n", mzbath::VERSION, opts.seed);
            text.push_str(&results_csv(&outcomes)?);
            write_text(Some(p), &text)?;
        }
        return Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 });
    }

    let cfg = RunConfig::load(cli.config.as_deref(), overrides)?;
    let out = cli.out.clone().or_else(|| cfg.output.path.clone().map(PathBuf::from));
    let svg = cli.svg || cfg.output.svg;
    let doc = match cli.command {
        Command::Coeffs => cmd_coeffs(&cfg)?,
        Command::Evolve => cmd_evolve(&cfg)?,
        Command::Sweep => cmd_sweep(&cfg)?,
        Command::Interfere => {
            let res = cmd_interfere(&cfg)?;
            if svg {
                for (k, (_, panels)) in res.snapshots.iter().enumerate() {
                    let path = svg_path(out.as_deref(), &format!("_snapshot{k}"));
                    write_text(Some(&path), &render_svg(panels))?;
                }
            }
            res.csv
        }
        Command::Selftest => unreachable!("handled above"),
    };
    write_text(out.as_deref(), &doc.render()?)?;
    if !cli.quiet {
        if let Some(p) = out {
            eprintln!("wrote {} rows to {}", doc.rows.len(), p.display());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let (args, overrides) = split_overrides(std::env::args().collect());
    let cli = Cli::parse_from(args);
    match run(cli, &overrides) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mzbath: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
