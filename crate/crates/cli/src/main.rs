use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dirac_cli::{load_scene, run, Command, Flags};
use dirac_core::scenes::write_scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Verb {
    Check,
    Reduce,
    Bracket,
    Average,
    Hamiltonian,
    Probe,
    Flow,
    /// Print the scene in the scene file format.
    Export,
}

/// Exact checks and singular reduction of Dirac structures.
#[derive(Debug, Parser)]
#[command(name = "dirac", version)]
struct Args {
    #[arg(value_enum)]
    command: Verb,
    /// Scene file path or `builtin:NAME`.
    scene: String,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
    /// Restrict stratum checks to one stratum.
    #[arg(long, value_name = "NAME")]
    stratum: Option<String>,
    /// Degree bound for re-expressing invariants.
    #[arg(long, value_name = "K", default_value_t = 4)]
    bound: u32,
    /// Seed for random sample points.
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Number of random sample points for the probe.
    #[arg(long, value_name = "K", default_value_t = 20)]
    samples: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let scene = match load_scene(&args.scene) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let command = match args.command {
        Verb::Export => {
            print!("{}", write_scene(&scene.spec));
            return ExitCode::SUCCESS;
        }
        Verb::Check => Command::Check,
        Verb::Reduce => Command::Reduce,
        Verb::Bracket => Command::Bracket,
        Verb::Average => Command::Average,
        Verb::Hamiltonian => Command::Hamiltonian,
        Verb::Probe => Command::Probe,
        Verb::Flow => Command::Flow,
    };
    let flags = Flags { json: args.json, stratum: args.stratum, bound: args.bound, seed: args.seed, samples: args.samples };
    let report = run(command, &scene, &flags);
    if flags.json {
        println!("{}", report.to_json_string());
    } else {
        print!("{report}");
    }
    ExitCode::from(u8::try_from(report.exit_code()).unwrap_or(1))
}
