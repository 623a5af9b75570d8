//! Command-line front end for the stimvco behavioral models. Every
//! subcommand reads one JSON config, runs deterministically, and writes one
//! CSV or JSON result to `--out` or stdout.

mod cmd_codec;
mod cmd_isf;
mod cmd_load;
mod cmd_pump;
mod cmd_radar;
mod cmd_refclock;
mod cmd_stim;
mod cmd_tline;
mod support;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use support::{CliError, Format};

#[derive(Parser)]
#[command(
    name = "stimvco",
    version,
    about = "Behavioral model runner for an implant stimulator and radar VCO tool chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Result file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Result encoding; every subcommand has a natural default.
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    format: Option<Format>,
    /// Worker threads for grid sweeps; defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Reserved for scripting compatibility; no current operation draws
    /// randomness.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Electrode load impedance across a frequency axis.
    LoadZ,
    /// Stimulation waveform synthesis, load response, and charge balance.
    StimSim,
    /// Charge pump output voltage and efficiency versus load current.
    PumpSweep,
    /// Regulated charge pump transient under hysteretic feedback.
    PumpSim,
    /// Bandgap reference current and oscillator frequency over temperature.
    RefclockSweep,
    /// Pack a stimulation program into its telemetry stream.
    CodecEncode,
    /// Recover a stimulation program from a telemetry stream.
    CodecDecode,
    /// Impulse sensitivity and noise modulation maps.
    IsfSweep,
    /// Feedback line length optimum and ratio sweep.
    TlineOpt,
    /// Scalar oscillator, PLL, and FMCW link formulas.
    RadarCalc,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config(String::from("--threads must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let config = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config(String::from("--config is required")))?;
    let out = cli.out.as_deref();
    let format = |natural: Format| cli.format.unwrap_or(natural);

    match cli.command {
        Command::LoadZ => cmd_load::run(config, format(Format::Csv), out),
        Command::StimSim => cmd_stim::run(config, format(Format::Csv), out),
        Command::PumpSweep => cmd_pump::run_sweep(config, format(Format::Csv), out),
        Command::PumpSim => cmd_pump::run_sim(config, format(Format::Csv), out),
        Command::RefclockSweep => cmd_refclock::run(config, format(Format::Csv), out),
        Command::CodecEncode => cmd_codec::run_encode(config, format(Format::Json), out),
        Command::CodecDecode => cmd_codec::run_decode(config, format(Format::Json), out),
        Command::IsfSweep => cmd_isf::run(config, format(Format::Csv), out),
        Command::TlineOpt => cmd_tline::run(config, format(Format::Json), out),
        Command::RadarCalc => cmd_radar::run(config, format(Format::Json), out),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}
