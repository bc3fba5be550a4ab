//! The two minimisation objectives of a schedule.
//!
//! * Failure rate (FR): the share of priority-weighted observation time that
//!   is not downlinked, `1 - Σ x·ω·d / Σ ω·d`.
//! * Segmentation times (ST): the number of missions each scheduled OID is
//!   spread over, summed and normalised by `n_t · M_st`, where `M_st` is
//!   `floor(max d / msid)`.
//!
//! `n_t` counts every OID of the instance, including those the segmentation
//! step dropped as unplayable.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::model::{ImageData, Instance, OriginalImageData};
use crate::problem::Problem;
use crate::schedule::Schedule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub fr: f64,
    pub st: f64,
}

impl ObjectiveVector {
    pub fn as_array(self) -> [f64; 2] {
        [self.fr, self.st]
    }

    /// Pareto dominance for minimisation.
    pub fn dominates(self, other: ObjectiveVector) -> bool {
        self.fr <= other.fr && self.st <= other.st && (self.fr < other.fr || self.st < other.st)
    }
}

/// `1 - Σ x·ω·d / Σ ω·d` over the OIDs of the instance.
pub fn failure_rate(s: &Schedule, oids: &[OriginalImageData]) -> f64 {
    let total: f64 = oids.iter().map(OriginalImageData::weight).sum();
    let done: f64 = oids
        .iter()
        .zip(&s.scheduled)
        .filter(|(_, &x)| x)
        .map(|(t, _)| t.weight())
        .sum();
    (1.0 - done / total).clamp(0.0, 1.0)
}

/// Number of distinct missions carrying some piece of the OID with id `oid`.
pub fn segmentation_count(s: &Schedule, nt: &[ImageData], oid: u32) -> u32 {
    let family: HashSet<u32> = nt.iter().filter(|p| p.family == oid).map(|p| p.id).collect();
    s.missions
        .iter()
        .filter(|m| m.payload.iter().any(|k| family.contains(k)))
        .count() as u32
}

/// `floor(max d / msid)`, at least 1.
pub fn max_segmentation_times(oids: &[OriginalImageData], msid: f64) -> u32 {
    let max_d = oids.iter().map(|t| t.duration).fold(0.0, f64::max);
    ((max_d / msid).floor() as u32).max(1)
}

/// Normalised segmentation times of the scheduled OIDs.
pub fn segmentation_objective(s: &Schedule, inst: &Instance, nt: &[ImageData]) -> f64 {
    if inst.oids.is_empty() {
        return 0.0;
    }
    let family_of: HashMap<u32, u32> = nt.iter().map(|p| (p.id, p.family)).collect();
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for m in &s.missions {
        let mut fams: Vec<u32> = m.payload.iter().filter_map(|k| family_of.get(k).copied()).collect();
        fams.sort_unstable();
        fams.dedup();
        for f in fams {
            *counts.entry(f).or_default() += 1;
        }
    }
    let sum: u32 = inst
        .oids
        .iter()
        .zip(&s.scheduled)
        .filter(|(_, &x)| x)
        .map(|(t, _)| counts.get(&t.id).copied().unwrap_or(0))
        .sum();
    let m_st = max_segmentation_times(&inst.oids, inst.msid);
    f64::from(sum) / (inst.oids.len() as f64 * f64::from(m_st))
}

/// Both objectives of `s`.
pub fn evaluate(s: &Schedule, inst: &Instance, nt: &[ImageData]) -> ObjectiveVector {
    ObjectiveVector {
        fr: failure_rate(s, &inst.oids),
        st: segmentation_objective(s, inst, nt),
    }
}

/// [`evaluate`] using the precomputed tables of `p`; `s` must come from
/// decoding against `p`.
pub fn evaluate_in(s: &Schedule, p: &Problem) -> ObjectiveVector {
    let mut done = 0.0;
    for (t, &x) in p.inst.oids.iter().zip(&s.scheduled) {
        if x {
            done += t.weight();
        }
    }
    let mut last_mission = vec![u32::MAX; p.n_oids()];
    let mut count: u64 = 0;
    for m in &s.missions {
        for &k in &m.payload {
            let i = p.family_of[k as usize];
            if s.scheduled[i] && last_mission[i] != m.id {
                last_mission[i] = m.id;
                count += 1;
            }
        }
    }
    let fr = if p.total_weight > 0.0 {
        (1.0 - done / p.total_weight).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let st = if p.n_oids() == 0 {
        0.0
    } else {
        count as f64 / (p.n_oids() as f64 * f64::from(p.max_segmentation_times))
    };
    ObjectiveVector { fr, st }
}
