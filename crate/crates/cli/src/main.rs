use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use downlink_sched::builder::DistributionKind;
use downlink_sched::segmentation::SegmentationStrategy;
use downlink_sched::{EvolutionConfig, SelectionMode};
use downlink_sched_cli::{
    cmd_experiment, cmd_gen, cmd_solve, cmd_validate, load_instance, thread_pool, ExperimentSpec, Failure, Sweep,
    EXIT_CONFIG, EXIT_OTHER, EXIT_VALIDATION,
};

#[derive(Parser)]
#[command(name = "downlink-sched", version, about = "Satellite image data downlink scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[arg(long)]
        kind: DistributionKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; defaults to `<KIND>-<n>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve an instance and write the run trace, front and best schedule.
    Solve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        solver: Solver,
        /// Solver seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Check a schedule dump against an instance.
    Validate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Sweep one parameter over several seeds.
    Experiment {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        solver: Solver,
        /// Instance seed when generating.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// none, ir, mr, strategy or selection.
        #[arg(long, default_value = "none")]
        sweep: String,
        /// Comma-separated sweep values; defaults to the full axis.
        #[arg(long)]
        values: Option<String>,
        /// Comma-separated solver seeds.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        #[arg(long, default_value = "experiment")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Source {
    /// Instance file; otherwise one is generated from --kind and --n.
    #[arg(long, conflicts_with_all = ["kind", "n"])]
    instance: Option<PathBuf>,
    #[arg(long)]
    kind: Option<DistributionKind>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct Solver {
    #[arg(long, default_value = "min")]
    strategy: SegmentationStrategy,
    #[arg(long, default_value_t = 0.4)]
    ir: f64,
    #[arg(long, default_value_t = 0.8)]
    mr: f64,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 100)]
    archive: usize,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    #[arg(long, default_value = "nsga2")]
    selection: SelectionMode,
    /// Hypervolume reference point `FR,ST`.
    #[arg(long, value_parser = parse_ref, default_value = "1,1")]
    r#ref: [f64; 2],
}

fn parse_ref(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [fr, st] => Ok([fr, st]),
        _ => Err(format!("expected FR,ST, got {s:?}")),
    }
}

impl Solver {
    fn config(&self, seed: u64) -> EvolutionConfig {
        EvolutionConfig {
            pop_size: self.pop,
            archive_size: self.archive,
            max_iter: self.iters,
            ir: self.ir,
            mr: self.mr,
            seed,
            selection: self.selection,
            reference: self.r#ref,
            ..EvolutionConfig::default()
        }
    }
}

fn instance(source: &Source, seed: u64) -> Result<downlink_sched::model::Instance, Failure> {
    match (&source.instance, source.kind, source.n) {
        (Some(path), _, _) => load_instance(path),
        (None, Some(kind), Some(n)) => downlink_sched::builder::generate_instance(kind, n, seed)
            .map_err(|e| Failure::new(downlink_sched_cli::EXIT_GENERATION, e)),
        _ => Err(Failure::config("give --instance, or both --kind and --n")),
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen { kind, n, seed, out } => {
            let out = out.unwrap_or_else(|| PathBuf::from(format!("{kind}-{n}.json")));
            let inst = cmd_gen(kind, n, seed, &out)?;
            println!("{}: {} OIDs, {} windows", out.display(), inst.oids.len(), inst.vtws.len());
        }
        Command::Solve { source, solver, seed, out } => {
            let inst = instance(&source, seed)?;
            let pool = thread_pool()?;
            let cfg = EvolutionConfig { parallel: pool.current_num_threads() > 1, ..solver.config(seed) };
            let (trace, files) = pool.install(|| cmd_solve(inst, solver.strategy, &cfg, &out))?;
            println!("final HV {:.6}, {} front members", trace.final_hv(), trace.front().len());
            println!("{}\n{}\n{}", files.trace.display(), files.front.display(), files.schedule.display());
        }
        Command::Validate { instance, schedule } => {
            let violations = cmd_validate(&instance, &schedule)?;
            if !violations.is_empty() {
                for v in &violations {
                    println!("{v}");
                }
                return Err(Failure::new(EXIT_VALIDATION, format!("{} violations", violations.len())).into());
            }
            println!("clean");
        }
        Command::Experiment { source, solver, seed, sweep, values, seeds, out } => {
            let spec = ExperimentSpec {
                instance: instance(&source, seed)?,
                strategy: solver.strategy,
                base: solver.config(0),
                sweep: Sweep::parse(&sweep, values.as_deref())?,
                seeds,
                out: out.clone(),
            };
            let result = cmd_experiment(&spec).context("experiment failed")?;
            for row in &result.summary {
                println!("{}: mean HV {:.6} over {} runs", row.cell, row.hv, row.runs);
            }
            println!("results in {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.downcast_ref::<Failure>().map_or(EXIT_OTHER, |f| f.code);
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
