//! Commands behind the `downlink-sched` binary.
//!
//! Each command returns [`Failure`] on error; its `code` is the process exit
//! status (1 validation failures, 2 generation error, 3 config error).

pub mod experiment;
pub mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use downlink_sched::builder::{generate_instance, io, DistributionKind};
use downlink_sched::metrics::summarize_front;
use downlink_sched::model::Instance;
use downlink_sched::schedule::ScheduleDump;
use downlink_sched::segmentation::{build_nt, SegmentationConfig, SegmentationStrategy};
use downlink_sched::{run, validate_schedule, EvolutionConfig, Problem, RunTrace};

pub use experiment::{cmd_experiment, ExperimentSpec, Sweep};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "DOWNLINK_SCHED_THREADS";

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_GENERATION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
/// Anything else, such as an unreadable file.
pub const EXIT_OTHER: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl fmt::Display) -> Self {
        Failure { code, message: message.to_string() }
    }

    pub fn config(message: impl fmt::Display) -> Self {
        Failure::new(EXIT_CONFIG, message)
    }

    pub fn other(message: impl fmt::Display) -> Self {
        Failure::new(EXIT_OTHER, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

pub type CmdResult<T> = Result<T, Failure>;

/// A rayon pool sized by [`THREADS_ENV`], or rayon's default when unset.
pub fn thread_pool() -> CmdResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(Failure::other)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CmdResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::other(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> CmdResult<Instance> {
    io::load_instance(path).map_err(Failure::other)
}

/// Generates an instance and writes it to `out`. Sizes off the standard grid
/// are allowed; the builder logs a warning.
pub fn cmd_gen(kind: DistributionKind, n: usize, seed: u64, out: &Path) -> CmdResult<Instance> {
    let inst = generate_instance(kind, n, seed).map_err(|e| Failure::new(EXIT_GENERATION, e))?;
    write(out, io::to_json(&inst))?;
    Ok(inst)
}

/// Segments `inst` and builds the problem tables.
pub fn build_problem(inst: Instance, strategy: SegmentationStrategy) -> CmdResult<Problem> {
    let nt = build_nt(&inst, &SegmentationConfig::new(strategy)).map_err(Failure::config)?;
    Problem::new(inst, nt).map_err(Failure::config)
}

/// Writes `fr,st` rows, one per point, with round-trip float formatting.
pub fn front_csv(points: &[(f64, f64)]) -> CmdResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["fr", "st"]).map_err(Failure::other)?;
    for &(fr, st) in points {
        w.write_record([fr.to_string(), st.to_string()]).map_err(Failure::other)?;
    }
    String::from_utf8(w.into_inner().map_err(Failure::other)?).map_err(Failure::other)
}

/// The front member with the largest dominated rectangle against `reference`.
pub fn best_member(trace: &RunTrace) -> Option<&downlink_sched::evolution::Individual> {
    let [rf, rs] = trace.config.reference;
    trace.front().into_iter().max_by(|a, b| {
        let area = |i: &downlink_sched::evolution::Individual| (rf - i.objectives.fr) * (rs - i.objectives.st);
        area(a).total_cmp(&area(b))
    })
}

/// Output files of a solve.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub trace: PathBuf,
    pub front: PathBuf,
    pub schedule: PathBuf,
}

/// Solves `inst` and writes `trace.json`, `front.csv` and `schedule.json`
/// under `out`.
pub fn cmd_solve(
    inst: Instance,
    strategy: SegmentationStrategy,
    cfg: &EvolutionConfig,
    out: &Path,
) -> CmdResult<(RunTrace, SolveOutput)> {
    cfg.validate().map_err(Failure::config)?;
    let p = build_problem(inst, strategy)?;
    let trace = run(&p, cfg).map_err(Failure::config)?;
    log::info!(
        "{} iterations, final HV {:.6}, {} front members, {:.1?}",
        trace.hv.len(),
        trace.final_hv(),
        trace.front().len(),
        trace.wall_time
    );
    let files = SolveOutput {
        trace: out.join("trace.json"),
        front: out.join("front.csv"),
        schedule: out.join("schedule.json"),
    };
    write(&files.trace, trace.to_json().map_err(Failure::other)?)?;
    let summary = summarize_front(&trace.objectives(), cfg.reference).map_err(Failure::other)?;
    let points: Vec<(f64, f64)> = summary.points.iter().map(|v| (v.fr, v.st)).collect();
    write(&files.front, front_csv(&points)?)?;
    let best = best_member(&trace).ok_or_else(|| Failure::other("empty archive"))?;
    let dump = ScheduleDump::new(&best.schedule, &p.inst, &p.nt);
    write(&files.schedule, dump.to_json().map_err(Failure::other)?)?;
    Ok((trace, files))
}

/// Checks a schedule dump against an instance. Returns one line per
/// violation; an empty list means the schedule is clean.
pub fn cmd_validate(instance: &Path, schedule: &Path) -> CmdResult<Vec<String>> {
    let inst = load_instance(instance)?;
    let text = fs::read_to_string(schedule).map_err(|e| Failure::other(format!("{}: {e}", schedule.display())))?;
    let dump = ScheduleDump::from_json(&text).map_err(Failure::other)?;
    let (s, nt) = dump.into_schedule(&inst).map_err(Failure::other)?;
    Ok(validate_schedule(&s, &inst, &nt).iter().map(ToString::to_string).collect())
}
