//! Constraint checks on a mission plan, written against the raw instance so
//! they share no bookkeeping with the decoder.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Schedule;
use crate::model::{self, DownlinkMission, ImageData, Instance, VisibleTimeWindow};
use crate::problem::{ND_EPS, TIME_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    /// An image-data piece is transmitted more than once.
    Uniqueness,
    /// A mission does not fit its window, or is shorter than its payload needs.
    Capacity,
    /// Two missions of different satellites at one station are closer than σ.
    SetupTime,
    /// Two missions of one satellite overlap in time.
    SatelliteOverlap,
    /// An OID is neither fully transmitted nor fully dropped, or its
    /// scheduled bit disagrees with what was transmitted.
    FamilyIncomplete,
    /// A window hosts more than one mission.
    WindowReuse,
    /// A mission references something that does not exist, or carries a
    /// piece its window cannot serve.
    Eligibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Ids of the missions, pieces, windows or OIDs involved.
    pub subjects: Vec<u32>,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} {:?}: {}", self.kind, self.subjects, self.detail)
    }
}

/// Every violated constraint of `s`; empty iff the plan is feasible.
pub fn validate_schedule(s: &Schedule, inst: &Instance, nt: &[ImageData]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, subjects: Vec<u32>, detail: String| {
        out.push(Violation { kind, subjects, detail })
    };
    let windows: HashMap<u32, &VisibleTimeWindow> = inst.vtws.iter().map(|w| (w.id, w)).collect();
    let pieces: HashMap<u32, &ImageData> = nt.iter().map(|p| (p.id, p)).collect();
    let oids: HashMap<u32, &model::OriginalImageData> = inst.oids.iter().map(|t| (t.id, t)).collect();

    let mut missions_per_window: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut sent: HashMap<u32, Vec<u32>> = HashMap::new();
    for m in &s.missions {
        missions_per_window.entry(m.window).or_default().push(m.id);
        let Some(w) = windows.get(&m.window) else {
            push(ViolationKind::Eligibility, vec![m.id], format!("unknown window {}", m.window));
            continue;
        };
        if w.satellite != m.satellite || w.station != m.station {
            push(
                ViolationKind::Eligibility,
                vec![m.id, w.id],
                "mission satellite/station differ from its window".into(),
            );
        }
        let mut nd = 0.0;
        for &k in &m.payload {
            sent.entry(k).or_default().push(m.id);
            let Some(piece) = pieces.get(&k) else {
                push(ViolationKind::Eligibility, vec![m.id, k], format!("unknown image data {k}"));
                continue;
            };
            nd += piece.nd;
            let served = oids.get(&piece.family).is_some_and(|t| model::serves(t, w));
            if !served {
                push(
                    ViolationKind::Eligibility,
                    vec![m.id, k],
                    format!("window {} cannot serve image data {k}", w.id),
                );
            }
        }
        if !(m.w <= w.len() + TIME_EPS && w.start <= m.st + TIME_EPS && m.end() <= w.end + TIME_EPS) {
            push(
                ViolationKind::Capacity,
                vec![m.id, w.id],
                format!("mission [{}, {}] exceeds window [{}, {}]", m.st, m.end(), w.start, w.end),
            );
        }
        if m.w + TIME_EPS < inst.rp * nd {
            push(
                ViolationKind::Capacity,
                vec![m.id],
                format!("work duration {} below rp * payload {}", m.w, inst.rp * nd),
            );
        }
    }

    let mut reused: Vec<_> = missions_per_window.into_iter().filter(|(_, ms)| ms.len() > 1).collect();
    reused.sort_unstable();
    for (w, ms) in reused {
        push(ViolationKind::WindowReuse, ms, format!("window {w} hosts several missions"));
    }
    let mut dup: Vec<_> = sent.iter().filter(|(_, ms)| ms.len() > 1).collect();
    dup.sort_unstable();
    for (&k, ms) in dup {
        push(ViolationKind::Uniqueness, ms.clone(), format!("image data {k} sent {} times", ms.len()));
    }

    let by_start = |key: fn(&DownlinkMission) -> u32| {
        let mut groups: HashMap<u32, Vec<&DownlinkMission>> = HashMap::new();
        for m in &s.missions {
            groups.entry(key(m)).or_default().push(m);
        }
        let mut groups: Vec<_> = groups.into_iter().collect();
        groups.sort_unstable_by_key(|(k, _)| *k);
        for (_, ms) in groups.iter_mut() {
            ms.sort_by(|a, b| a.st.total_cmp(&b.st).then(a.id.cmp(&b.id)));
        }
        groups
    };
    for (station, ms) in by_start(|m| m.station) {
        for (i, a) in ms.iter().enumerate() {
            for b in &ms[i + 1..] {
                if a.satellite != b.satellite && a.end() + inst.sigma > b.st + TIME_EPS {
                    push(
                        ViolationKind::SetupTime,
                        vec![a.id, b.id],
                        format!("station {station}: gap {} s below {} s", b.st - a.end(), inst.sigma),
                    );
                }
            }
        }
    }
    for (sat, ms) in by_start(|m| m.satellite) {
        for (i, a) in ms.iter().enumerate() {
            for b in &ms[i + 1..] {
                if a.end() > b.st + TIME_EPS {
                    push(
                        ViolationKind::SatelliteOverlap,
                        vec![a.id, b.id],
                        format!("satellite {sat} transmits twice at {}", b.st),
                    );
                }
            }
        }
    }

    if s.scheduled.len() != inst.oids.len() {
        push(
            ViolationKind::FamilyIncomplete,
            Vec::new(),
            format!("{} scheduled bits for {} OIDs", s.scheduled.len(), inst.oids.len()),
        );
        return out;
    }
    let mut transmitted: HashMap<u32, f64> = HashMap::new();
    for &k in sent.keys() {
        if let Some(piece) = pieces.get(&k) {
            *transmitted.entry(piece.family).or_default() += piece.nd;
        }
    }
    for (t, &x) in inst.oids.iter().zip(&s.scheduled) {
        let got = transmitted.get(&t.id).copied().unwrap_or(0.0);
        let want = if x { t.duration } else { 0.0 };
        if (got - want).abs() > ND_EPS {
            push(
                ViolationKind::FamilyIncomplete,
                vec![t.id],
                format!("{got} s of {} s transmitted with x = {}", t.duration, u8::from(x)),
            );
        }
    }
    out
}
