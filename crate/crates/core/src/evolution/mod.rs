//! The two-stage evolutionary search over chromosomes.
//!
//! One run:
//!
//! 1. builds `pop_size` random individuals, improves each with the insert and
//!    reorder operators and keeps `archive_size` elites;
//! 2. for `max_iter` iterations, breeds `pop_size` offspring from shuffled
//!    pairs of elites (mutation, crossover, in-place swap), improves them,
//!    filters them into the elite pool with the box method and selects the
//!    next elites;
//! 3. records the hypervolume of the elites after every iteration.
//!
//! Every individual draws from its own random stream keyed by the seed, the
//! iteration and its position, so serial and parallel runs agree exactly.

pub mod operators;
pub mod plan;
pub mod selection;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use operators::{trigger, OperatorStats};
pub use plan::Plan;
pub use selection::{box_combine, crowding_distance, elitist_select, nondominated_sort, SelectionMode};

use crate::error::{Error, Result};
use crate::metrics::{self, DEFAULT_REFERENCE};
use crate::objectives::{evaluate_in, ObjectiveVector};
use crate::problem::Problem;
use crate::rng::{stream, Rng as StreamRng};
use crate::schedule::{decode, encode, Chromosome, Schedule};

const INIT_STREAM: u64 = 1;
const OFFSPRING_STREAM: u64 = 2;
const SELECT_STREAM: u64 = 3;
const PAIRING_STREAM: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub pop_size: usize,
    pub archive_size: usize,
    pub max_iter: usize,
    /// Insert threshold: an unscheduled OID is offered when `u > ir`.
    pub ir: f64,
    /// Mutation/swap threshold: they fire when `u > mr`.
    pub mr: f64,
    pub seed: u64,
    pub selection: SelectionMode,
    /// Boxes per axis for the acceptance filter.
    pub box_grid: usize,
    /// Hypervolume reference point.
    pub reference: [f64; 2],
    /// Breed offspring on the rayon pool. Left out of dumps: it never
    /// changes the result.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            pop_size: 100,
            archive_size: 100,
            max_iter: 50,
            ir: 0.4,
            mr: 0.8,
            seed: 0,
            selection: SelectionMode::Nsga2,
            box_grid: 100,
            reference: DEFAULT_REFERENCE,
            parallel: false,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("ir", self.ir), ("mr", self.mr)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if self.pop_size < 2 || self.archive_size < 2 {
            return Err(Error::Domain("population and archive sizes must be at least 2".into()));
        }
        if self.box_grid == 0 {
            return Err(Error::Domain("box grid must be positive".into()));
        }
        if !self.reference.iter().all(|r| r.is_finite()) {
            return Err(Error::Domain("reference point must be finite".into()));
        }
        Ok(())
    }
}

/// A decoded individual with its objectives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    #[serde(skip)]
    pub chromosome: Chromosome,
    pub objectives: ObjectiveVector,
    pub schedule: Schedule,
}

impl Individual {
    pub fn new(mut schedule: Schedule, p: &Problem) -> Self {
        let objectives = evaluate_in(&schedule, p);
        schedule.objectives = Some(objectives);
        Individual {
            chromosome: encode(&schedule, p),
            objectives,
            schedule,
        }
    }
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub config: EvolutionConfig,
    /// Hypervolume of the elites before the first iteration.
    pub initial_hv: f64,
    /// Hypervolume of the elites after each iteration.
    pub hv: Vec<f64>,
    pub stats: OperatorStats,
    pub archive: Vec<Individual>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunTrace {
    pub fn final_hv(&self) -> f64 {
        self.hv.last().copied().unwrap_or(self.initial_hv)
    }

    pub fn objectives(&self) -> Vec<ObjectiveVector> {
        self.archive.iter().map(|ind| ind.objectives).collect()
    }

    /// Archive members on the first nondominated front.
    pub fn front(&self) -> Vec<&Individual> {
        let objs = self.objectives();
        let mut f1 = nondominated_sort(&objs).into_iter().next().unwrap_or_default();
        f1.sort_by(|&a, &b| {
            objs[a]
                .fr
                .total_cmp(&objs[b].fr)
                .then(objs[a].st.total_cmp(&objs[b].st))
                .then(a.cmp(&b))
        });
        f1.into_iter().map(|i| &self.archive[i]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::parse("run trace", e.to_string()))
    }
}

/// A chromosome scheduling each OID with probability ½ and assigning each
/// piece of a scheduled OID a uniform candidate window.
pub fn random_chromosome(p: &Problem, rng: &mut impl Rng) -> Chromosome {
    let mut ch = Chromosome::empty(p);
    for i in 0..p.n_oids() {
        if rng.gen_bool(0.5) && !p.candidates[i].is_empty() {
            ch.scheduled[i] = true;
            for &k in &p.families[i] {
                let c = &p.candidates[i];
                ch.assignment[k] = Some(c[rng.gen_range(0..c.len())] as u32);
            }
        }
    }
    ch
}

/// Insert followed by reorder.
pub fn improve(plan: &mut Plan, ir: f64, rng: &mut impl Rng, stats: &mut OperatorStats) {
    operators::insert(plan, ir, rng, stats);
    operators::reorder(plan, stats);
}

fn finish(plan: &Plan, p: &Problem) -> Result<Individual> {
    Ok(Individual::new(decode(&plan.to_chromosome(), p)?, p))
}

fn indexed<T: Send>(
    n: usize,
    parallel: bool,
    f: impl Fn(usize) -> Result<(T, OperatorStats)> + Sync + Send,
) -> Result<(Vec<T>, OperatorStats)> {
    let results: Vec<Result<(T, OperatorStats)>> = if parallel {
        (0..n).into_par_iter().map(&f).collect()
    } else {
        (0..n).map(&f).collect()
    };
    let mut stats = OperatorStats::default();
    let mut out = Vec::with_capacity(n);
    for r in results {
        let (item, s) = r?;
        stats.merge(&s);
        out.push(item);
    }
    Ok((out, stats))
}

/// The improved, decoded initial population.
pub fn initialize(p: &Problem, cfg: &EvolutionConfig) -> Result<(Vec<Individual>, OperatorStats)> {
    indexed(cfg.pop_size, cfg.parallel, |idx| {
        let mut rng = stream(cfg.seed, &[INIT_STREAM, idx as u64]);
        let mut stats = OperatorStats::default();
        let s = decode(&random_chromosome(p, &mut rng), p)?;
        let mut plan = Plan::from_schedule(p, &s);
        improve(&mut plan, cfg.ir, &mut rng, &mut stats);
        Ok((finish(&plan, p)?, stats))
    })
}

fn breed(
    p: &Problem,
    cfg: &EvolutionConfig,
    a: &Individual,
    b: &Individual,
    rng: &mut StreamRng,
) -> Result<([Individual; 2], OperatorStats)> {
    let mut stats = OperatorStats::default();
    let [ca, cb] = [a, b].map(|parent| {
        let mut plan = Plan::from_individual(p, parent);
        operators::mutation(&mut plan, cfg.mr, rng, &mut stats);
        plan.to_chromosome()
    });
    let (x, y) = operators::swap_between(&ca, &cb, p, cfg.mr, rng, &mut stats)?;
    let mut child = |s: Schedule| -> Result<Individual> {
        let mut plan = Plan::from_schedule(p, &s);
        operators::swap_within(&mut plan, cfg.mr, rng, &mut stats);
        improve(&mut plan, cfg.ir, rng, &mut stats);
        finish(&plan, p)
    };
    let children = [child(x)?, child(y)?];
    Ok((children, stats))
}

fn archive_hv(archive: &[Individual], reference: [f64; 2]) -> Result<f64> {
    let objs: Vec<ObjectiveVector> = archive.iter().map(|i| i.objectives).collect();
    metrics::hypervolume_2d(&objs, reference)
}

fn select(pool: Vec<Individual>, cfg: &EvolutionConfig, iteration: u64) -> Vec<Individual> {
    let objs: Vec<ObjectiveVector> = pool.iter().map(|i| i.objectives).collect();
    let mut rng = stream(cfg.seed, &[SELECT_STREAM, iteration]);
    let keep = elitist_select(&objs, cfg.archive_size, cfg.selection, &mut rng);
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

/// Runs the search on `p`.
pub fn run(p: &Problem, cfg: &EvolutionConfig) -> Result<RunTrace> {
    cfg.validate()?;
    let started = Instant::now();
    let (population, mut stats) = initialize(p, cfg)?;
    let mut archive = select(population, cfg, 0);
    let initial_hv = archive_hv(&archive, cfg.reference)?;
    let mut hv = Vec::with_capacity(cfg.max_iter);

    for g in 1..=cfg.max_iter as u64 {
        let mut order: Vec<usize> = (0..archive.len()).collect();
        order.shuffle(&mut stream(cfg.seed, &[PAIRING_STREAM, g]));
        let pairs = cfg.pop_size.div_ceil(2);
        let m = order.len();
        let (broods, s) = indexed(pairs, cfg.parallel, |k| {
            let mut rng = stream(cfg.seed, &[OFFSPRING_STREAM, g, k as u64]);
            let a = &archive[order[(2 * k) % m]];
            let b = &archive[order[(2 * k + 1) % m]];
            breed(p, cfg, a, b, &mut rng)
        })?;
        stats.merge(&s);
        let mut offspring: Vec<Individual> = broods.into_iter().flatten().collect();
        offspring.truncate(cfg.pop_size);

        let best: Vec<ObjectiveVector> = archive.iter().map(|i| i.objectives).collect();
        let kids: Vec<ObjectiveVector> = offspring.iter().map(|i| i.objectives).collect();
        let keep = box_combine(&best, &kids, cfg.box_grid);
        let mut slots: Vec<Option<Individual>> = archive.into_iter().chain(offspring).map(Some).collect();
        let pool: Vec<Individual> = keep.into_iter().map(|i| slots[i].take().unwrap()).collect();
        archive = select(pool, cfg, g);
        hv.push(archive_hv(&archive, cfg.reference)?);
        log::debug!("iteration {g}: hv {:.6}, archive {}", hv.last().unwrap(), archive.len());
    }

    Ok(RunTrace {
        config: cfg.clone(),
        initial_hv,
        hv,
        stats,
        archive,
        wall_time: started.elapsed(),
    })
}
