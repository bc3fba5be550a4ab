//! Mutable working state of one individual while operators edit it.
//!
//! A plan tracks the per-window load so operators can ask whether a piece fits
//! somewhere without re-decoding. Its feasibility test has no tolerance, which
//! is stricter than the decoder's, so decoding a plan's chromosome keeps every
//! placement.

use crate::problem::Problem;
use crate::schedule::{Chromosome, Schedule};

use super::Individual;

#[derive(Debug, Clone)]
pub struct Plan<'p> {
    pub(crate) p: &'p Problem,
    scheduled: Vec<bool>,
    assignment: Vec<Option<u32>>,
    /// Σ nd per window.
    load: Vec<f64>,
    /// Assigned pieces per window.
    count: Vec<u32>,
}

impl<'p> Plan<'p> {
    /// Builds the plan of an already decoded chromosome.
    pub fn from_chromosome(p: &'p Problem, ch: &Chromosome) -> Self {
        let mut plan = Plan {
            p,
            scheduled: ch.scheduled.clone(),
            assignment: ch.assignment.clone(),
            load: vec![0.0; p.n_windows()],
            count: vec![0; p.n_windows()],
        };
        for (k, a) in ch.assignment.iter().enumerate() {
            if let Some(j) = a {
                plan.load[*j as usize] += p.nt[k].nd;
                plan.count[*j as usize] += 1;
            }
        }
        plan
    }

    pub fn from_schedule(p: &'p Problem, s: &Schedule) -> Self {
        Self::from_chromosome(p, &crate::schedule::encode(s, p))
    }

    pub fn from_individual(p: &'p Problem, ind: &Individual) -> Self {
        Self::from_chromosome(p, &ind.chromosome)
    }

    pub fn problem(&self) -> &'p Problem {
        self.p
    }

    pub fn to_chromosome(&self) -> Chromosome {
        Chromosome {
            scheduled: self.scheduled.clone(),
            assignment: self.assignment.clone(),
        }
    }

    pub fn is_scheduled(&self, i: usize) -> bool {
        self.scheduled[i]
    }

    pub fn window_of(&self, k: usize) -> Option<usize> {
        self.assignment[k].map(|j| j as usize)
    }

    pub fn load(&self, j: usize) -> f64 {
        self.load[j]
    }

    pub fn is_used(&self, j: usize) -> bool {
        self.count[j] > 0
    }

    fn end_with(&self, j: usize, load: f64) -> f64 {
        self.p.window_start(j) + self.p.inst.rp * load
    }

    /// Whether window `j` could carry a payload of `load` seconds (Σ nd)
    /// without exceeding its length or clashing with other used windows.
    pub fn can_hold(&self, j: usize, load: f64) -> bool {
        let p = self.p;
        if p.inst.rp * load > p.window_len(j) {
            return false;
        }
        let sw = p.window_start(j);
        let end = self.end_with(j, load);
        let sigma = p.inst.sigma;
        let sat = p.window_satellite[j];
        let lo = sw - p.max_window_len - sigma;

        let station = &p.station_windows[p.window_station[j]];
        let from = station.partition_point(|&a| p.window_start(a) < lo);
        for &a in &station[from..] {
            let swa = p.window_start(a);
            if swa >= end + sigma {
                break;
            }
            if a == j || !self.is_used(a) || p.window_satellite[a] == sat {
                continue;
            }
            let ok = if a < j {
                self.end_with(a, self.load[a]) + sigma <= sw
            } else {
                end + sigma <= swa
            };
            if !ok {
                return false;
            }
        }

        let own = &p.satellite_windows[sat];
        let from = own.partition_point(|&a| p.window_start(a) < lo);
        for &a in &own[from..] {
            let swa = p.window_start(a);
            if swa >= end {
                break;
            }
            if a == j || !self.is_used(a) {
                continue;
            }
            let ok = if a < j {
                self.end_with(a, self.load[a]) <= sw
            } else {
                end <= swa
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Whether piece `k` could be added to window `j`.
    pub fn fits(&self, k: usize, j: usize) -> bool {
        self.p.is_candidate(self.p.family_of[k], j) && self.can_hold(j, self.load[j] + self.p.nt[k].nd)
    }

    pub(crate) fn assign(&mut self, k: usize, j: usize) {
        debug_assert!(self.assignment[k].is_none());
        self.assignment[k] = Some(j as u32);
        self.load[j] += self.p.nt[k].nd;
        self.count[j] += 1;
    }

    pub(crate) fn unassign(&mut self, k: usize) {
        if let Some(j) = self.assignment[k].take() {
            let j = j as usize;
            self.count[j] -= 1;
            self.load[j] = if self.count[j] == 0 { 0.0 } else { self.load[j] - self.p.nt[k].nd };
        }
    }

    /// Unschedules OID `i`, freeing all its pieces.
    pub(crate) fn remove_family(&mut self, i: usize) {
        for &k in &self.p.families[i] {
            self.unassign(k);
        }
        self.scheduled[i] = false;
    }

    /// Places every piece of OID `i` first-fit over its candidate windows.
    /// Leaves the plan untouched and returns false if some piece has no room.
    pub(crate) fn place_family(&mut self, i: usize) -> bool {
        let fam = &self.p.families[i];
        if fam.is_empty() || self.scheduled[i] {
            return false;
        }
        for (n, &k) in fam.iter().enumerate() {
            let slot = self.p.candidates[i].iter().copied().find(|&j| self.fits(k, j));
            match slot {
                Some(j) => self.assign(k, j),
                None => {
                    for &done in &fam[..n] {
                        self.unassign(done);
                    }
                    return false;
                }
            }
        }
        self.scheduled[i] = true;
        true
    }
}
