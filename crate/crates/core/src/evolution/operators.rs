//! The bi-stage operators. Each edits a [`Plan`] and keeps it feasible; the
//! `*_operator` wrappers take and return decoded schedules.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::plan::Plan;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::schedule::{decode, Chromosome, Schedule};

/// Attempts at finding a swappable pair before [`swap_within`] gives up.
pub const SWAP_WITHIN_ATTEMPTS: usize = 10;

/// Call counters, summed over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorStats {
    /// OIDs offered to the insert operator, and how many of those fired.
    pub insert_checks: u64,
    pub insert_fired: u64,
    pub insert_placed: u64,
    /// Scheduled OIDs offered to mutation, and removals.
    pub mutation_checks: u64,
    pub mutation_fired: u64,
    pub swap_within_checks: u64,
    pub swap_within_fired: u64,
    pub swap_within_applied: u64,
    pub swap_between_checks: u64,
    pub swap_between_fired: u64,
    pub reorder_moves: u64,
}

impl OperatorStats {
    pub fn merge(&mut self, o: &OperatorStats) {
        self.insert_checks += o.insert_checks;
        self.insert_fired += o.insert_fired;
        self.insert_placed += o.insert_placed;
        self.mutation_checks += o.mutation_checks;
        self.mutation_fired += o.mutation_fired;
        self.swap_within_checks += o.swap_within_checks;
        self.swap_within_fired += o.swap_within_fired;
        self.swap_within_applied += o.swap_within_applied;
        self.swap_between_checks += o.swap_between_checks;
        self.swap_between_fired += o.swap_between_fired;
        self.reorder_moves += o.reorder_moves;
    }
}

/// Draws `u ~ U(0, 1)` and fires when `u > threshold`: threshold 0 fires
/// (almost) always, threshold 1 never.
pub fn trigger(rng: &mut impl Rng, threshold: f64) -> bool {
    rng.gen::<f64>() > threshold
}

/// Offers each unscheduled OID, in random order, to a trigger with
/// probability `ir`; when it fires the whole family is placed first-fit or
/// not at all.
pub fn insert(plan: &mut Plan, ir: f64, rng: &mut impl Rng, stats: &mut OperatorStats) {
    let p = plan.problem();
    let mut order: Vec<usize> = (0..p.n_oids())
        .filter(|&i| !plan.is_scheduled(i) && !p.families[i].is_empty())
        .collect();
    order.shuffle(rng);
    for i in order {
        stats.insert_checks += 1;
        if trigger(rng, ir) {
            stats.insert_fired += 1;
            if plan.place_family(i) {
                stats.insert_placed += 1;
            }
        }
    }
}

/// Pulls each scheduled family's pieces together: windows are tried in
/// decreasing order of the family's share, and every piece elsewhere moves
/// into the target when it fits. Never adds a window to a family.
pub fn reorder(plan: &mut Plan, stats: &mut OperatorStats) {
    let p = plan.problem();
    for i in 0..p.n_oids() {
        if !plan.is_scheduled(i) || p.families[i].len() < 2 {
            continue;
        }
        let fam = &p.families[i];
        let mut shares: Vec<(usize, f64)> = Vec::new();
        for &k in fam {
            let j = plan.window_of(k).expect("scheduled family is fully assigned");
            match shares.iter_mut().find(|(w, _)| *w == j) {
                Some(s) => s.1 += p.nt[k].nd,
                None => shares.push((j, p.nt[k].nd)),
            }
        }
        if shares.len() < 2 {
            continue;
        }
        shares.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let targets: Vec<usize> = shares.iter().map(|s| s.0).collect();
        for (t, &target) in targets.iter().enumerate() {
            for &k in fam {
                let from = plan.window_of(k).unwrap();
                // only pull from windows ranked below the target
                if from == target || targets[..t].contains(&from) {
                    continue;
                }
                if plan.can_hold(target, plan.load(target) + p.nt[k].nd) {
                    plan.unassign(k);
                    plan.assign(k, target);
                    stats.reorder_moves += 1;
                }
            }
        }
    }
}

/// Offers each scheduled OID to a trigger with probability `mr`; when it
/// fires the whole family is removed.
pub fn mutation(plan: &mut Plan, mr: f64, rng: &mut impl Rng, stats: &mut OperatorStats) {
    for i in 0..plan.problem().n_oids() {
        if plan.is_scheduled(i) {
            stats.mutation_checks += 1;
            if trigger(rng, mr) {
                stats.mutation_fired += 1;
                plan.remove_family(i);
            }
        }
    }
}

/// When the trigger fires, tries up to [`SWAP_WITHIN_ATTEMPTS`] random pairs
/// of assigned pieces from different families and different windows, and
/// exchanges the first pair whose moves keep both windows feasible.
pub fn swap_within(plan: &mut Plan, mr: f64, rng: &mut impl Rng, stats: &mut OperatorStats) {
    stats.swap_within_checks += 1;
    if !trigger(rng, mr) {
        return;
    }
    stats.swap_within_fired += 1;
    let p = plan.problem();
    let assigned: Vec<usize> = (0..p.n_nt()).filter(|&k| plan.window_of(k).is_some()).collect();
    if assigned.len() < 2 {
        return;
    }
    for _ in 0..SWAP_WITHIN_ATTEMPTS {
        let a = assigned[rng.gen_range(0..assigned.len())];
        let b = assigned[rng.gen_range(0..assigned.len())];
        let (fa, fb) = (p.family_of[a], p.family_of[b]);
        let (ja, jb) = (plan.window_of(a).unwrap(), plan.window_of(b).unwrap());
        if fa == fb || ja == jb || !p.is_candidate(fa, jb) || !p.is_candidate(fb, ja) {
            continue;
        }
        let (na, nb) = (p.nt[a].nd, p.nt[b].nd);
        let new_a = plan.load(ja) - na + nb;
        let new_b = plan.load(jb) - nb + na;
        // a window whose load shrinks cannot become infeasible
        if (new_a > plan.load(ja) && !plan.can_hold(ja, new_a))
            || (new_b > plan.load(jb) && !plan.can_hold(jb, new_b))
        {
            continue;
        }
        plan.unassign(a);
        plan.unassign(b);
        plan.assign(a, jb);
        plan.assign(b, ja);
        stats.swap_within_applied += 1;
        return;
    }
}

/// One-point crossover over the OID index range: OIDs at or after `cut`
/// exchange their scheduled bit and all their pieces' windows.
pub fn crossover(a: &Chromosome, b: &Chromosome, cut: usize, p: &Problem) -> Result<(Chromosome, Chromosome)> {
    for ch in [a, b] {
        if ch.scheduled.len() != p.n_oids() || ch.assignment.len() != p.n_nt() {
            return Err(Error::Contract("parents do not belong to the same instance".into()));
        }
    }
    let (mut x, mut y) = (a.clone(), b.clone());
    for i in cut.min(p.n_oids())..p.n_oids() {
        std::mem::swap(&mut x.scheduled[i], &mut y.scheduled[i]);
        for &k in &p.families[i] {
            std::mem::swap(&mut x.assignment[k], &mut y.assignment[k]);
        }
    }
    Ok((x, y))
}

/// When the trigger fires, crosses `a` and `b` at a uniform cut in
/// `[0, n_t]` and decodes both children; otherwise returns the parents.
pub fn swap_between(
    a: &Chromosome,
    b: &Chromosome,
    p: &Problem,
    mr: f64,
    rng: &mut impl Rng,
    stats: &mut OperatorStats,
) -> Result<(Schedule, Schedule)> {
    stats.swap_between_checks += 1;
    let (x, y) = if trigger(rng, mr) {
        stats.swap_between_fired += 1;
        let cut = rng.gen_range(0..=p.n_oids());
        crossover(a, b, cut, p)?
    } else {
        (a.clone(), b.clone())
    };
    Ok((decode(&x, p)?, decode(&y, p)?))
}

fn via_plan(s: &Schedule, p: &Problem, f: impl FnOnce(&mut Plan)) -> Result<Schedule> {
    let mut plan = Plan::from_schedule(p, s);
    f(&mut plan);
    decode(&plan.to_chromosome(), p)
}

/// [`insert`] on a decoded schedule.
pub fn insert_operator(s: &Schedule, p: &Problem, ir: f64, rng: &mut impl Rng) -> Result<Schedule> {
    via_plan(s, p, |plan| insert(plan, ir, rng, &mut OperatorStats::default()))
}

/// [`reorder`] on a decoded schedule.
pub fn reorder_operator(s: &Schedule, p: &Problem) -> Result<Schedule> {
    via_plan(s, p, |plan| reorder(plan, &mut OperatorStats::default()))
}

/// [`mutation`] on a decoded schedule.
pub fn mutation_operator(s: &Schedule, p: &Problem, mr: f64, rng: &mut impl Rng) -> Result<Schedule> {
    via_plan(s, p, |plan| mutation(plan, mr, rng, &mut OperatorStats::default()))
}

/// [`swap_within`] on a decoded schedule.
pub fn swap_within_operator(s: &Schedule, p: &Problem, mr: f64, rng: &mut impl Rng) -> Result<Schedule> {
    via_plan(s, p, |plan| swap_within(plan, mr, rng, &mut OperatorStats::default()))
}
