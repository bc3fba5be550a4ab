//! Chromosomes, their decoding into mission plans, and plan validation.
//!
//! A [`Chromosome`] has two stages: one bit per OID saying whether it is
//! scheduled, and one window per image-data piece saying where the piece is
//! transmitted. [`decode`] turns it into a [`Schedule`], repairing whatever
//! the genes get wrong so the result always satisfies [`validate_schedule`]:
//!
//! 1. a scheduled OID with a piece that is unassigned or assigned to a window
//!    unable to serve it is unscheduled as a whole;
//! 2. every used window hosts one mission starting at the window start and
//!    lasting `rp` times the payload duration; a window too short for its
//!    payload evicts whole families, smallest `ω·d` first, until it fits;
//! 3. missions are then visited by window start; one that would begin less
//!    than `σ` after a mission of another satellite at the same station, or
//!    while its own satellite is still transmitting, loses all its families.
//!
//! Eviction always removes every piece of a family, so OIDs are transmitted
//! completely or not at all.

mod dump;
mod validate;

use serde::{Deserialize, Serialize};

pub use dump::ScheduleDump;
pub use validate::{validate_schedule, Violation, ViolationKind};

use crate::error::{Error, Result};
use crate::model::DownlinkMission;
use crate::objectives::ObjectiveVector;
use crate::problem::{Problem, TIME_EPS};

/// Two-stage encoding of a solution.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chromosome {
    /// Stage one: scheduled bit per OID (instance order).
    pub scheduled: Vec<bool>,
    /// Stage two: window position per NT piece, `None` when unassigned.
    pub assignment: Vec<Option<u32>>,
}

impl Chromosome {
    /// Nothing scheduled, nothing assigned.
    pub fn empty(p: &Problem) -> Self {
        Chromosome {
            scheduled: vec![false; p.n_oids()],
            assignment: vec![None; p.n_nt()],
        }
    }
}

/// A decoded mission plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub missions: Vec<DownlinkMission>,
    /// Scheduled bit per OID (instance order).
    pub scheduled: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objectives: Option<ObjectiveVector>,
}

impl Schedule {
    pub fn n_scheduled(&self) -> usize {
        self.scheduled.iter().filter(|&&x| x).count()
    }
}

struct Slot {
    window: usize,
    members: std::ops::Range<usize>,
}

/// Decodes `ch` into a feasible schedule, repairing as described in the
/// module documentation.
pub fn decode(ch: &Chromosome, p: &Problem) -> Result<Schedule> {
    if ch.scheduled.len() != p.n_oids() || ch.assignment.len() != p.n_nt() {
        return Err(Error::Contract(format!(
            "chromosome has {}/{} genes, problem has {} OIDs and {} pieces",
            ch.scheduled.len(),
            ch.assignment.len(),
            p.n_oids(),
            p.n_nt()
        )));
    }
    let rp = p.inst.rp;
    let sigma = p.inst.sigma;
    let mut scheduled = ch.scheduled.clone();

    for (i, bit) in scheduled.iter_mut().enumerate() {
        if *bit {
            let fam = &p.families[i];
            *bit = !fam.is_empty()
                && fam.iter().all(|&k| {
                    matches!(ch.assignment[k], Some(j) if p.is_candidate(i, j as usize))
                });
        }
    }

    // (window, piece) pairs of scheduled families, grouped by window
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (i, fam) in p.families.iter().enumerate() {
        if scheduled[i] {
            pairs.extend(fam.iter().map(|&k| (ch.assignment[k].unwrap(), k as u32)));
        }
    }
    pairs.sort_unstable();
    let mut slots: Vec<Slot> = Vec::new();
    let mut start = 0;
    while start < pairs.len() {
        let window = pairs[start].0;
        let mut end = start;
        while end < pairs.len() && pairs[end].0 == window {
            end += 1;
        }
        slots.push(Slot {
            window: window as usize,
            members: start..end,
        });
        start = end;
    }

    let load = |slot: &Slot, scheduled: &[bool]| -> f64 {
        pairs[slot.members.clone()]
            .iter()
            .map(|&(_, k)| k as usize)
            .filter(|&k| scheduled[p.family_of[k]])
            .map(|k| p.nt[k].nd)
            .sum()
    };
    let families_in = |slot: &Slot, scheduled: &[bool]| -> Vec<usize> {
        let mut fams: Vec<usize> = pairs[slot.members.clone()]
            .iter()
            .map(|&(_, k)| p.family_of[k as usize])
            .filter(|&i| scheduled[i])
            .collect();
        fams.sort_unstable();
        fams.dedup();
        fams
    };

    for slot in &slots {
        let capacity = p.window_len(slot.window) + TIME_EPS;
        if rp * load(slot, &scheduled) <= capacity {
            continue;
        }
        let mut fams = families_in(slot, &scheduled);
        fams.sort_by(|&a, &b| {
            p.inst.oids[a]
                .weight()
                .total_cmp(&p.inst.oids[b].weight())
                .then(a.cmp(&b))
        });
        for i in fams {
            scheduled[i] = false;
            if rp * load(slot, &scheduled) <= capacity {
                break;
            }
        }
    }

    let mut station_accepted: Vec<Vec<usize>> = vec![Vec::new(); p.inst.stations.len()];
    let mut satellite_accepted: Vec<Vec<usize>> = vec![Vec::new(); p.inst.satellites.len()];
    for (s, slot) in slots.iter().enumerate() {
        if load(slot, &scheduled) <= 0.0 {
            continue;
        }
        let j = slot.window;
        let sw = p.window_start(j);
        let sat = p.window_satellite[j];
        let station = p.window_station[j];
        let ends_after = |a: usize, gap: f64, scheduled: &[bool]| -> bool {
            let other = &slots[a];
            let l = load(other, scheduled);
            l > 0.0 && p.window_start(other.window) + rp * l + gap > sw + TIME_EPS
        };
        let horizon = p.max_window_len + sigma + TIME_EPS;
        let station_clash = station_accepted[station]
            .iter()
            .rev()
            .take_while(|&&a| p.window_start(slots[a].window) >= sw - horizon)
            .any(|&a| p.window_satellite[slots[a].window] != sat && ends_after(a, sigma, &scheduled));
        let satellite_clash = satellite_accepted[sat]
            .iter()
            .rev()
            .take_while(|&&a| p.window_start(slots[a].window) >= sw - horizon)
            .any(|&a| ends_after(a, 0.0, &scheduled));
        if station_clash || satellite_clash {
            for i in families_in(slot, &scheduled) {
                scheduled[i] = false;
            }
        } else {
            station_accepted[station].push(s);
            satellite_accepted[sat].push(s);
        }
    }

    let mut missions = Vec::new();
    for slot in &slots {
        let payload: Vec<u32> = pairs[slot.members.clone()]
            .iter()
            .map(|&(_, k)| k)
            .filter(|&k| scheduled[p.family_of[k as usize]])
            .collect();
        if payload.is_empty() {
            continue;
        }
        let w = &p.inst.vtws[slot.window];
        let nd: f64 = payload.iter().map(|&k| p.nt[k as usize].nd).sum();
        missions.push(DownlinkMission {
            id: missions.len() as u32 + 1,
            window: w.id,
            st: w.start,
            w: rp * nd,
            payload,
            satellite: w.satellite,
            station: w.station,
        });
    }
    Ok(Schedule {
        missions,
        scheduled,
        objectives: None,
    })
}

/// Reads the assignments of a schedule back into a chromosome. Unscheduled
/// pieces are left unassigned.
pub fn encode(s: &Schedule, p: &Problem) -> Chromosome {
    let mut ch = Chromosome {
        scheduled: s.scheduled.clone(),
        assignment: vec![None; p.n_nt()],
    };
    for m in &s.missions {
        let j = p
            .window_position(m.window)
            .expect("schedule refers to a window of another instance") as u32;
        for &k in &m.payload {
            ch.assignment[k as usize] = Some(j);
        }
    }
    ch
}

/// Downlink seconds booked in the window with id `window`: `rp` times the
/// payload duration of its mission, 0 when unused.
pub fn window_load(s: &Schedule, p: &Problem, window: u32) -> Result<f64> {
    if p.window_position(window).is_none() {
        return Err(Error::Domain(format!("unknown window {window}")));
    }
    Ok(s.missions
        .iter()
        .filter(|m| m.window == window)
        .flat_map(|m| m.payload.iter())
        .map(|&k| p.nt[k as usize].nd)
        .sum::<f64>()
        * p.inst.rp)
}

#[cfg(test)]
mod tests;
