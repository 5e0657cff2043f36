use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rqisim::commands;
use rqisim::config::{Overrides, RunConfig};
use rqisim::netsim::SimMode;
use rqisim::Error;

#[derive(Parser)]
#[command(name = "rqisim", version, about = "DWDM quantum network rate, fidelity and noise modeling")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
    /// Use the worst-case mechanical switch loss.
    #[arg(long, global = true)]
    worst_case: bool,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long, global = true)]
    plot: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Det,
    Stoch,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rate sweep over communication-qubit counts.
    Rate,
    /// Fidelity against node count.
    Fidelity,
    /// Raman noise spectra over pump wavelength and temperature.
    Raman,
    /// Pump wavelength and temperature step for retuning a DFG converter.
    Tune {
        #[arg(long, default_value_t = 780.0)]
        signal: f64,
        /// Target idler wavelength; snapped to the nearest grid channel.
        #[arg(long)]
        target: f64,
        /// Idler wavelength the converter is currently phase-matched to.
        #[arg(long)]
        current: Option<f64>,
    },
    /// Event-driven execution of an entanglement-demand job.
    Simulate,
    /// Comparison table of rates and fidelities.
    Table1,
}

fn run(cli: Cli) -> rqisim::Result<Vec<PathBuf>> {
    let ov = Overrides {
        output_dir: cli.out,
        seed: cli.seed,
        mode: cli.mode.map(|m| match m {
            Mode::Det => SimMode::Deterministic,
            Mode::Stoch => SimMode::Stochastic,
        }),
        worst_case: cli.worst_case,
    };
    let cfg = RunConfig::load(cli.config.as_deref(), &ov)?;
    match cli.cmd {
        Cmd::Rate => commands::cmd_rate(&cfg, cli.plot),
        Cmd::Fidelity => commands::cmd_fidelity(&cfg, cli.plot),
        Cmd::Raman => commands::cmd_raman(&cfg, cli.plot),
        Cmd::Tune { signal, target, current } => commands::cmd_tune(&cfg, signal, target, current),
        Cmd::Simulate => commands::cmd_simulate(&cfg),
        Cmd::Table1 => commands::cmd_table1(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("rqisim: {e}");
            ExitCode::from(match &e {
                Error::Config(_) | Error::Json { .. } => 2,
                Error::Io { source, .. } if source.kind() == std::io::ErrorKind::NotFound => 2,
                Error::Domain(_) => 3,
                _ => 1,
            })
        }
    }
}
