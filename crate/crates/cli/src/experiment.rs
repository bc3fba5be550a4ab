//! Parameter sweeps over seeds with CSV and SVG output.
//!
//! Layout under the output directory:
//!
//! - `hv/<cell>_seed<k>.csv`: `iteration,hv`, iteration 0 being the initial archive
//! - `fronts/<cell>_seed<k>.csv`: `fr,st` of the final first front
//! - `runs.csv`: one row per run (final HV and front statistics)
//! - `summary.csv`: one row per cell, the seed means of the `runs.csv` columns
//! - `ssr.csv`: per run and satellite class, min and max SSR over the front
//! - `fronts.svg`, `hv.svg`: charts of all fronts and seed-mean HV traces

use std::fs;
use std::path::{Path, PathBuf};

use downlink_sched::builder::SatelliteClass;
use downlink_sched::metrics::{single_success_rate, summarize_front, FrontSummary};
use downlink_sched::model::Instance;
use downlink_sched::segmentation::SegmentationStrategy;
use downlink_sched::{run, EvolutionConfig, Problem, RunTrace, SelectionMode};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::svg::{Chart, Mark, Series};
use crate::{build_problem, front_csv, thread_pool, write, CmdResult, Failure};

/// The parameter an experiment varies.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    None,
    Ir(Vec<f64>),
    Mr(Vec<f64>),
    Strategy(Vec<SegmentationStrategy>),
    Selection(Vec<SelectionMode>),
}

impl Sweep {
    /// `0, 0.1, …, 1`.
    pub fn unit_grid() -> Vec<f64> {
        (0..=10).map(|k| f64::from(k) / 10.0).collect()
    }

    /// Parses an axis name with optional explicit values; ir and mr default
    /// to the unit grid, strategy and selection to all variants.
    pub fn parse(axis: &str, values: Option<&str>) -> CmdResult<Sweep> {
        let items = || -> Vec<&str> { values.map(|v| v.split(',').map(str::trim).collect()).unwrap_or_default() };
        let floats = || -> CmdResult<Vec<f64>> {
            match values {
                None => Ok(Sweep::unit_grid()),
                Some(_) => items()
                    .into_iter()
                    .map(|s| s.parse().map_err(|_| Failure::config(format!("bad sweep value {s:?}"))))
                    .collect(),
            }
        };
        match axis.to_ascii_lowercase().as_str() {
            "none" => Ok(Sweep::None),
            "ir" => Ok(Sweep::Ir(floats()?)),
            "mr" => Ok(Sweep::Mr(floats()?)),
            "strategy" => Ok(Sweep::Strategy(match values {
                None => SegmentationStrategy::ALL.to_vec(),
                Some(_) => items().into_iter().map(|s| s.parse().map_err(Failure::config)).collect::<CmdResult<_>>()?,
            })),
            "selection" => Ok(Sweep::Selection(match values {
                None => vec![SelectionMode::Nsga2, SelectionMode::Crem],
                Some(_) => items().into_iter().map(|s| s.parse().map_err(Failure::config)).collect::<CmdResult<_>>()?,
            })),
            other => Err(Failure::config(format!("unknown sweep axis {other:?}"))),
        }
    }

    fn axis(&self) -> &'static str {
        match self {
            Sweep::None => "none",
            Sweep::Ir(_) => "ir",
            Sweep::Mr(_) => "mr",
            Sweep::Strategy(_) => "strategy",
            Sweep::Selection(_) => "selection",
        }
    }
}

/// A sweep over one axis, run for every seed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub instance: Instance,
    pub strategy: SegmentationStrategy,
    pub base: EvolutionConfig,
    pub sweep: Sweep,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
}

struct Cell {
    label: String,
    value: String,
    strategy: SegmentationStrategy,
    cfg: EvolutionConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> CmdResult<()> {
        if self.seeds.is_empty() {
            return Err(Failure::config("an experiment needs at least one seed"));
        }
        self.base.validate().map_err(Failure::config)?;
        if let Sweep::Ir(v) | Sweep::Mr(v) = &self.sweep {
            if v.is_empty() || v.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Failure::config(format!("{} values must lie in [0, 1]: {v:?}", self.sweep.axis())));
            }
        }
        Ok(())
    }

    fn cells(&self) -> Vec<Cell> {
        let cell = |value: String, strategy, cfg| Cell {
            label: format!("{}-{value}", self.sweep.axis()),
            value,
            strategy,
            cfg,
        };
        let base = &self.base;
        match &self.sweep {
            Sweep::None => vec![Cell { label: "base".into(), value: String::new(), strategy: self.strategy, cfg: base.clone() }],
            Sweep::Ir(v) => v
                .iter()
                .map(|&ir| cell(format!("{ir:.2}"), self.strategy, EvolutionConfig { ir, ..base.clone() }))
                .collect(),
            Sweep::Mr(v) => v
                .iter()
                .map(|&mr| cell(format!("{mr:.2}"), self.strategy, EvolutionConfig { mr, ..base.clone() }))
                .collect(),
            Sweep::Strategy(v) => v.iter().map(|&s| cell(s.label().into(), s, base.clone())).collect(),
            Sweep::Selection(v) => v
                .iter()
                .map(|&m| cell(m.to_string(), self.strategy, EvolutionConfig { selection: m, ..base.clone() }))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRow {
    pub cell: String,
    pub value: String,
    pub seed: u64,
    pub hv: f64,
    pub fr_max: f64,
    pub fr_mean: f64,
    pub fr_min: f64,
    pub st_max: f64,
    pub st_mean: f64,
    pub st_min: f64,
}

impl RunRow {
    fn new(cell: &Cell, seed: u64, s: &FrontSummary) -> Self {
        RunRow {
            cell: cell.label.clone(),
            value: cell.value.clone(),
            seed,
            hv: s.hv,
            fr_max: s.fr_max,
            fr_mean: s.fr_mean,
            fr_min: s.fr_min,
            st_max: s.st_max,
            st_mean: s.st_mean,
            st_min: s.st_min,
        }
    }
}

/// One summary row: the seed means of the run rows of a cell.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub cell: String,
    pub value: String,
    pub runs: usize,
    pub hv: f64,
    pub fr_max: f64,
    pub fr_mean: f64,
    pub fr_min: f64,
    pub st_max: f64,
    pub st_mean: f64,
    pub st_min: f64,
}

pub fn summarize(rows: &[RunRow]) -> SummaryRow {
    let n = rows.len() as f64;
    let avg = |f: fn(&RunRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    SummaryRow {
        cell: rows[0].cell.clone(),
        value: rows[0].value.clone(),
        runs: rows.len(),
        hv: avg(|r| r.hv),
        fr_max: avg(|r| r.fr_max),
        fr_mean: avg(|r| r.fr_mean),
        fr_min: avg(|r| r.fr_min),
        st_max: avg(|r| r.st_max),
        st_mean: avg(|r| r.st_mean),
        st_min: avg(|r| r.st_min),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SsrRow {
    pub cell: String,
    pub seed: u64,
    pub class: String,
    pub ssr_min: f64,
    pub ssr_max: f64,
}

/// Everything an experiment wrote, for callers that want the numbers.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub runs: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
    pub ssr: Vec<SsrRow>,
}

fn to_csv<T: Serialize>(rows: &[T]) -> CmdResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(Failure::other)?;
    }
    String::from_utf8(w.into_inner().map_err(Failure::other)?).map_err(Failure::other)
}

fn hv_csv(trace: &RunTrace) -> CmdResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iteration", "hv"]).map_err(Failure::other)?;
    for (g, h) in std::iter::once(trace.initial_hv).chain(trace.hv.iter().copied()).enumerate() {
        w.write_record([g.to_string(), h.to_string()]).map_err(Failure::other)?;
    }
    String::from_utf8(w.into_inner().map_err(Failure::other)?).map_err(Failure::other)
}

fn ssr_rows(cell: &Cell, seed: u64, trace: &RunTrace, inst: &Instance) -> Vec<SsrRow> {
    let front = trace.front();
    SatelliteClass::ALL
        .iter()
        .map(|&class| {
            let v: Vec<f64> = front.iter().map(|i| single_success_rate(&i.schedule, inst, class)).collect();
            SsrRow {
                cell: cell.label.clone(),
                seed,
                class: class.label().into(),
                ssr_min: v.iter().copied().fold(f64::INFINITY, f64::min),
                ssr_max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

struct Finished {
    trace: RunTrace,
    summary: FrontSummary,
}

/// Runs every (cell, seed) pair as an independent job and writes the result
/// tree under `spec.out`.
pub fn cmd_experiment(spec: &ExperimentSpec) -> CmdResult<ExperimentResult> {
    spec.validate()?;
    let cells = spec.cells();
    let mut problems: Vec<(SegmentationStrategy, Problem)> = Vec::new();
    for c in &cells {
        if !problems.iter().any(|(s, _)| *s == c.strategy) {
            problems.push((c.strategy, build_problem(spec.instance.clone(), c.strategy)?));
        }
    }
    let problem = |s: SegmentationStrategy| &problems.iter().find(|(k, _)| *k == s).unwrap().1;

    let jobs: Vec<(usize, u64)> = (0..cells.len()).flat_map(|c| spec.seeds.iter().map(move |&s| (c, s))).collect();
    let pool = thread_pool()?;
    let finished: Vec<CmdResult<Finished>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, seed)| {
                let cell = &cells[c];
                let cfg = EvolutionConfig { seed, parallel: false, ..cell.cfg.clone() };
                let trace = run(problem(cell.strategy), &cfg).map_err(Failure::config)?;
                let summary = summarize_front(&trace.objectives(), cfg.reference).map_err(Failure::other)?;
                let stem = format!("{}_seed{seed}.csv", cell.label);
                write(&spec.out.join("hv").join(&stem), hv_csv(&trace)?)?;
                let pts: Vec<(f64, f64)> = summary.points.iter().map(|v| (v.fr, v.st)).collect();
                write(&spec.out.join("fronts").join(&stem), front_csv(&pts)?)?;
                log::info!("{} seed {seed}: HV {:.6}", cell.label, summary.hv);
                Ok(Finished { trace, summary })
            })
            .collect()
    });
    let finished: Vec<Finished> = finished.into_iter().collect::<CmdResult<_>>()?;

    let mut runs = Vec::new();
    let mut ssr = Vec::new();
    for (&(c, seed), f) in jobs.iter().zip(&finished) {
        runs.push(RunRow::new(&cells[c], seed, &f.summary));
        ssr.extend(ssr_rows(&cells[c], seed, &f.trace, &problem(cells[c].strategy).inst));
    }
    let k = spec.seeds.len();
    let summary: Vec<SummaryRow> = runs.chunks(k).map(summarize).collect();
    write(&spec.out.join("runs.csv"), to_csv(&runs)?)?;
    write(&spec.out.join("summary.csv"), to_csv(&summary)?)?;
    write(&spec.out.join("ssr.csv"), to_csv(&ssr)?)?;

    let fronts = Chart {
        title: "Final fronts".into(),
        x_label: "failure rate".into(),
        y_label: "segmentation times".into(),
        series: cells
            .iter()
            .enumerate()
            .map(|(c, cell)| Series {
                name: cell.label.clone(),
                mark: Mark::Scatter,
                points: finished[c * k..(c + 1) * k]
                    .iter()
                    .flat_map(|f| f.summary.points.iter().map(|v| (v.fr, v.st)))
                    .collect(),
            })
            .collect(),
    };
    let traces = Chart {
        title: "Hypervolume by iteration (seed mean)".into(),
        x_label: "iteration".into(),
        y_label: "hypervolume".into(),
        series: cells
            .iter()
            .enumerate()
            .map(|(c, cell)| {
                let group = &finished[c * k..(c + 1) * k];
                let len = group[0].trace.hv.len() + 1;
                let at = |f: &Finished, g: usize| if g == 0 { f.trace.initial_hv } else { f.trace.hv[g - 1] };
                Series {
                    name: cell.label.clone(),
                    mark: Mark::Line,
                    points: (0..len)
                        .map(|g| (g as f64, group.iter().map(|f| at(f, g)).sum::<f64>() / k as f64))
                        .collect(),
                }
            })
            .collect(),
    };
    write(&spec.out.join("fronts.svg"), fronts.render())?;
    write(&spec.out.join("hv.svg"), traces.render())?;
    Ok(ExperimentResult { runs, summary, ssr })
}

/// Reads a `fr,st` front file back.
pub fn read_front(path: &Path) -> CmdResult<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Failure::other(format!("{}: {e}", path.display())))?;
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Failure::other)).collect()
}
