//! Instance synthesis: satellite/station catalogs, visibility windows and
//! random OID workloads, plus the instance file format.

pub mod catalog;
pub mod io;
pub mod orbit;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, Instance, OriginalImageData};
use crate::rng::stream;

pub use catalog::SatelliteClass;

/// Default visibility scan step, seconds.
pub const DEFAULT_SCAN_STEP_S: f64 = 10.0;

/// Release times are drawn from `[-RELEASE_SPAN_S, +RELEASE_SPAN_S]`.
pub const RELEASE_SPAN_S: f64 = 86_400.0;

/// Which stations an instance family uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistributionKind {
    /// The three mid-latitude stations.
    ND,
    /// The polar station only.
    PD,
    /// All four stations.
    MD,
}

impl DistributionKind {
    pub fn station_ids(self) -> &'static [u32] {
        use catalog::*;
        match self {
            DistributionKind::ND => &[MIYUN, KASHI, SANYA],
            DistributionKind::PD => &[KIRUNA],
            DistributionKind::MD => &[MIYUN, KASHI, SANYA, KIRUNA],
        }
    }

    /// The standard OID counts for this family.
    pub fn size_grid(self) -> Vec<usize> {
        match self {
            DistributionKind::ND | DistributionKind::PD => (1..=10).map(|k| 50 * k).collect(),
            DistributionKind::MD => (1..=10).map(|k| 100 * k).collect(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DistributionKind::ND => "ND",
            DistributionKind::PD => "PD",
            DistributionKind::MD => "MD",
        }
    }
}

impl std::str::FromStr for DistributionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ND" => Ok(DistributionKind::ND),
            "PD" => Ok(DistributionKind::PD),
            "MD" => Ok(DistributionKind::MD),
            other => Err(Error::Domain(format!("unknown distribution kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// An instance with the catalog satellites, the stations of `kind` and their
/// windows, but no OIDs yet.
pub fn base_instance(kind: DistributionKind) -> Result<Instance> {
    let mut inst = Instance::empty();
    inst.satellites = catalog::satellites();
    inst.stations = catalog::stations()
        .into_iter()
        .filter(|g| kind.station_ids().contains(&g.id))
        .collect();
    inst.vtws = orbit::compute_vtws(
        &inst.satellites,
        &inst.stations,
        inst.horizon,
        DEFAULT_SCAN_STEP_S,
        2.0 * inst.sigma,
    )?;
    Ok(inst)
}

/// Generates a complete instance of `kind` holding exactly `n_oid` OIDs that
/// each have at least one serving window. Deterministic in `(kind, n_oid, seed)`.
pub fn generate_instance(kind: DistributionKind, n_oid: usize, seed: u64) -> Result<Instance> {
    let mut inst = base_instance(kind)?;
    populate_oids(&mut inst, n_oid, seed, kind)?;
    Ok(inst)
}

/// Draws OIDs into `inst` until `n_oid` of them are servable.
pub fn populate_oids(
    inst: &mut Instance,
    n_oid: usize,
    seed: u64,
    kind: DistributionKind,
) -> Result<()> {
    if !kind.size_grid().contains(&n_oid) {
        log::warn!("{n_oid} OIDs is off the standard {kind} grid; generating anyway");
    }
    let mut rng = stream(seed, &[0x6f1d]);
    let budget = 100 * n_oid.max(1);
    let mut oids = Vec::with_capacity(n_oid);
    let mut draws = 0;
    while oids.len() < n_oid {
        if draws == budget {
            return Err(Error::Generation(format!(
                "only {} of {n_oid} OIDs had a serving window after {budget} draws",
                oids.len()
            )));
        }
        draws += 1;
        let sat = &inst.satellites[rng.gen_range(0..inst.satellites.len())];
        let class = sat.class().unwrap_or(SatelliteClass::SuperView);
        let (lo, hi) = class.duration_range();
        let priority: u8 = rng.gen_range(1..=10);
        let duration = rng.gen_range(lo..hi);
        let release = rng.gen_range(-RELEASE_SPAN_S..RELEASE_SPAN_S);
        let t = OriginalImageData {
            id: oids.len() as u32 + 1,
            priority,
            release,
            due_hours: model::due_time(priority)?,
            duration,
            satellite: sat.id,
        };
        if inst.vtws.iter().any(|w| model::serves(&t, w)) {
            oids.push(t);
        }
    }
    inst.oids = oids;
    Ok(())
}
