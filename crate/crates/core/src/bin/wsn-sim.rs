use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wsn_sim::output::{emit_comparison, emit_run, Format, RunManifest};
use wsn_sim::runner::{parse_seeds, parse_strategies, run_compare};
use wsn_sim::{load_config, Result, SimConfig, Simulation, Strategy, Topology};

#[derive(Parser)]
#[command(name = "wsn-sim", version, about = "Energy-balancing routing simulator for wireless sensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation to network extinction.
    Simulate {
        /// key=value configuration file or a manifest.json from an earlier run.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        seed: Option<u64>,
        /// Use node positions from a node_id,x,y CSV instead of random placement.
        #[arg(long)]
        topology: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Run several strategies over several seeds and tabulate lifetimes.
    Compare {
        #[arg(long, default_value = "direct,mte,diffusion")]
        strategies: String,
        /// Seeds as a range and/or list, e.g. 1..10 or 1,4,9.
        #[arg(long, default_value = "1..10")]
        seeds: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Write the node placement for a configuration as node_id,x,y CSV.
    ExportTopology {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn config_from(path: Option<&Path>) -> Result<SimConfig> {
    path.map_or_else(|| Ok(SimConfig::default()), load_config)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, strategy, seed, topology, out, format } => {
            let mut config = config_from(config.as_deref())?;
            if let Some(s) = strategy {
                config.strategy = s;
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            let sim = match &topology {
                Some(path) => {
                    let topo = Topology::read_csv(path, config.area_side)?;
                    Simulation::with_topology(config, topo)?
                },
                None => Simulation::new(config)?,
            };
            let config = sim.config().clone();
            let result = sim.run();
            let mut manifest = RunManifest::new("simulate", &config);
            manifest.topology_file = topology;
            emit_run(&result, &manifest, format, &out)?;
            let show = |v: Option<u64>| v.map_or_else(|| "-".to_string(), |v| v.to_string());
            println!(
                "{} seed {}: first death {}, last death {}, utility {}{}",
                result.strategy,
                result.seed,
                show(result.first_death_round),
                show(result.last_death_round),
                result.utility_pct.map_or_else(|| "-".to_string(), |u| format!("{u:.2}%")),
                if result.truncated { " (truncated)" } else { "" },
            );
        }
        Command::Compare { strategies, seeds, config, out, format } => {
            let config = config_from(config.as_deref())?;
            let strategies = parse_strategies(&strategies)?;
            let seeds = parse_seeds(&seeds)?;
            let cmp = run_compare(&config, &strategies, &seeds)?;
            let mut manifest = RunManifest::new("compare", &config);
            manifest.seeds = Some(seeds);
            manifest.strategies = Some(strategies);
            emit_comparison(&cmp, &manifest, format, &out)?;
            println!("{:<10} {:>5} {:>14} {:>14} {:>14}", "strategy", "runs", "first death", "last death", "utility %");
            for s in &cmp.summaries {
                let cell = |m: Option<wsn_sim::runner::MeanStd>| {
                    m.map_or_else(|| "-".to_string(), |m| format!("{:.1}±{:.1}", m.mean, m.std))
                };
                println!(
                    "{:<10} {:>5} {:>14} {:>14} {:>14}",
                    s.strategy.to_string(),
                    s.runs,
                    cell(s.first_death),
                    cell(s.last_death),
                    cell(s.utility_pct)
                );
                if s.truncated_runs > 0 {
                    eprintln!("warning: {} {} run(s) hit max_rounds", s.truncated_runs, s.strategy);
                }
            }
        }
        Command::ExportTopology { config, seed, out } => {
            let mut config = config_from(config.as_deref())?;
            if let Some(s) = seed {
                config.seed = s;
            }
            let sim = Simulation::new(config)?;
            sim.topology().write_csv(&out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
