use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use trustroute::generator::{GeneratorConfig, DEFAULT_BANDWIDTH_MAX};
use trustroute::propagation::DEFAULT_MAX_HOPS;
use trustroute::sim::SweepAxis;
use trustroute::GeneratorSpec;
use trustroute_cli::{cmd_generate, cmd_simulate, cmd_sweep, cmd_trust, GenerateArgs, PipelineConfig};

/// Social-trust scoring and trust-aware onion routing simulation.
#[derive(Parser)]
#[command(name = "trustroute", version)]
struct Cli {
    /// Seed for every random choice; overrides the scenario's own seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic social graph with trust values.
    Generate {
        #[arg(long, default_value_t = 500)]
        n: usize,
        /// `erdos:<p>` or `calibrated[:<fraction>]`.
        #[arg(long, default_value = "calibrated:0.8")]
        generator: GeneratorSpec,
        #[arg(long, default_value_t = 1)]
        networks: u16,
        #[arg(long, default_value_t = DEFAULT_BANDWIDTH_MAX)]
        bandwidth_max: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
        hops: usize,
        /// Rule file; defaults to the built-in major/relationship rules.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Compute link trust values and trust scores of a graph file.
    Trust {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_HOPS)]
        hops: usize,
    },
    /// Run one scenario.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Run a scenario once per value of one parameter.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// omega, ts_h, fraction or n.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated ascending values.
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
        values: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = PipelineConfig {
        out: cli.out,
        quiet: cli.quiet,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Generate {
            n,
            generator,
            networks,
            bandwidth_max,
            hops,
            rules,
        } => cmd_generate(
            &cfg,
            &GenerateArgs {
                config: GeneratorConfig {
                    n,
                    spec: generator,
                    bandwidth_max,
                    networks,
                    max_hops: hops,
                },
                rules,
            },
        ),
        Command::Trust { graph, rules, hops } => cmd_trust(&cfg, &graph, rules.as_deref(), hops),
        Command::Simulate { scenario } => cmd_simulate(&cfg, &scenario),
        Command::Sweep { scenario, axis, values } => cmd_sweep(&cfg, &scenario, axis, &values),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
