//! Domain entities of the downlink scheduling problem and the pure predicates
//! every other module builds on.
//!
//! All times are seconds relative to the start of the scheduling horizon.
//! Due times are kept in hours, the unit in which they are assigned, and
//! converted where windows are filtered.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seconds per hour, used to convert due times.
pub const SECONDS_PER_HOUR: f64 = 3600.0;

/// Default scheduling horizon length (24 h).
pub const DEFAULT_HORIZON_S: f64 = 86_400.0;

/// Default recording-to-playback ratio: one second of observation needs four
/// seconds of downlink.
pub const DEFAULT_RP: f64 = 4.0;

/// Default minimum size of image data, in seconds of observation.
pub const DEFAULT_MSID_S: f64 = 10.0;

/// Default station set-up time between missions of different satellites.
pub const DEFAULT_SIGMA_S: f64 = 60.0;

/// Scheduling epoch of the generated instances.
pub const DEFAULT_EPOCH: &str = "2020-10-15T00:00:00Z";

/// Current version of the instance file format.
pub const INSTANCE_FORMAT_VERSION: u32 = 1;

/// Earth equatorial radius, km.
pub const EARTH_RADIUS_KM: f64 = 6378.137;

/// An earth observation satellite with its classical orbital elements at the
/// scheduling epoch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Satellite {
    pub id: u32,
    /// Catalog name; its prefix identifies the satellite class.
    #[serde(default)]
    pub name: String,
    pub semi_major_axis_km: f64,
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
}

impl Satellite {
    pub fn check(&self) -> Result<()> {
        let record = || format!("satellite {}", self.id);
        if !(self.semi_major_axis_km > 6378.0) {
            return Err(Error::parse(record(), "semi-major axis must exceed 6378 km"));
        }
        if !(0.0..1.0).contains(&self.eccentricity) {
            return Err(Error::parse(record(), "eccentricity must lie in [0, 1)"));
        }
        for (name, v) in [
            ("inclination", self.inclination_deg),
            ("raan", self.raan_deg),
            ("argument of perigee", self.arg_perigee_deg),
            ("mean anomaly", self.mean_anomaly_deg),
        ] {
            if !(0.0..360.0).contains(&v) {
                return Err(Error::parse(record(), format!("{name} must lie in [0, 360)")));
            }
        }
        Ok(())
    }
}

/// A ground station. Antenna roll/pitch limits are folded into a single
/// minimum elevation angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: u32,
    #[serde(default)]
    pub name: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    pub altitude_km: f64,
    pub min_elevation_deg: f64,
}

impl GroundStation {
    pub fn check(&self) -> Result<()> {
        let record = || format!("station {}", self.id);
        if !(self.latitude_deg.abs() <= 90.0) {
            return Err(Error::parse(record(), "latitude must lie in [-90, 90]"));
        }
        if !(self.longitude_deg.abs() <= 180.0) {
            return Err(Error::parse(record(), "longitude must lie in [-180, 180]"));
        }
        if !(0.0..90.0).contains(&self.min_elevation_deg) {
            return Err(Error::parse(record(), "minimum elevation must lie in [0, 90)"));
        }
        Ok(())
    }
}

/// One observation's worth of image data (an OID).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginalImageData {
    pub id: u32,
    /// Priority ω in 1..=10.
    pub priority: u8,
    /// Release time r; may precede the horizon start.
    #[serde(rename = "release_s")]
    pub release: f64,
    /// Due time o in hours, derived from the priority.
    #[serde(rename = "due_h")]
    pub due_hours: u32,
    /// Observation duration d.
    #[serde(rename = "duration_s")]
    pub duration: f64,
    pub satellite: u32,
}

impl OriginalImageData {
    /// End of the interval in which a serving window must begin.
    pub fn expiry(&self) -> f64 {
        self.release + SECONDS_PER_HOUR * f64::from(self.due_hours)
    }

    /// ω·d, the weight of this OID in the failure rate.
    pub fn weight(&self) -> f64 {
        f64::from(self.priority) * self.duration
    }

    pub fn check(&self) -> Result<()> {
        let record = || format!("oid {}", self.id);
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::parse(record(), "duration must be positive"));
        }
        if !self.release.is_finite() {
            return Err(Error::parse(record(), "release must be finite"));
        }
        let due = due_time(self.priority).map_err(|e| Error::parse(record(), e.to_string()))?;
        if due != self.due_hours {
            return Err(Error::parse(
                record(),
                format!("due time {} h inconsistent with priority {} (expected {due} h)", self.due_hours, self.priority),
            ));
        }
        Ok(())
    }
}

/// A visible time window between one satellite and one station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibleTimeWindow {
    pub id: u32,
    /// Begin of the window (sw).
    #[serde(rename = "sw")]
    pub start: f64,
    /// End of the window (ew).
    #[serde(rename = "ew")]
    pub end: f64,
    pub satellite: u32,
    pub station: u32,
}

impl VisibleTimeWindow {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

/// An OID or one segment of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageData {
    pub id: u32,
    /// Family identifier: the id of the source OID.
    pub family: u32,
    /// Position of this segment inside its family.
    pub segment: u32,
    pub priority: u8,
    #[serde(rename = "release_s")]
    pub release: f64,
    #[serde(rename = "due_h")]
    pub due_hours: u32,
    pub satellite: u32,
    /// Share of the source observation duration carried by this piece.
    #[serde(rename = "nd_s")]
    pub nd: f64,
}

impl ImageData {
    /// Wraps a piece of `source` carrying `nd` seconds of observation.
    pub fn piece_of(source: &OriginalImageData, segment: u32, nd: f64) -> Self {
        ImageData {
            id: 0,
            family: source.id,
            segment,
            priority: source.priority,
            release: source.release,
            due_hours: source.due_hours,
            satellite: source.satellite,
            nd,
        }
    }
}

/// A transmission executed inside one visible time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DownlinkMission {
    pub id: u32,
    /// Id of the window hosting the mission.
    pub window: u32,
    /// Start time.
    pub st: f64,
    /// Work duration.
    pub w: f64,
    /// Ids of the transmitted image data.
    pub payload: Vec<u32>,
    pub satellite: u32,
    pub station: u32,
}

impl DownlinkMission {
    pub fn end(&self) -> f64 {
        self.st + self.w
    }
}

/// A complete, immutable problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub version: u32,
    pub epoch: String,
    /// Scheduling horizon `[St, Et]`.
    #[serde(rename = "horizon_s")]
    pub horizon: [f64; 2],
    pub rp: f64,
    #[serde(rename = "msid_s")]
    pub msid: f64,
    #[serde(rename = "sigma_s")]
    pub sigma: f64,
    pub satellites: Vec<Satellite>,
    pub stations: Vec<GroundStation>,
    pub oids: Vec<OriginalImageData>,
    pub vtws: Vec<VisibleTimeWindow>,
}

impl Instance {
    /// An instance with default parameters and no entities.
    pub fn empty() -> Self {
        Instance {
            version: INSTANCE_FORMAT_VERSION,
            epoch: DEFAULT_EPOCH.to_string(),
            horizon: [0.0, DEFAULT_HORIZON_S],
            rp: DEFAULT_RP,
            msid: DEFAULT_MSID_S,
            sigma: DEFAULT_SIGMA_S,
            satellites: Vec::new(),
            stations: Vec::new(),
            oids: Vec::new(),
            vtws: Vec::new(),
        }
    }

    pub fn satellite(&self, id: u32) -> Option<&Satellite> {
        self.satellites.iter().find(|s| s.id == id)
    }

    /// Checks every structural invariant; errors name the offending record.
    pub fn validate(&self) -> Result<()> {
        if self.version != INSTANCE_FORMAT_VERSION {
            return Err(Error::parse(
                "header",
                format!("unsupported version {} (expected {INSTANCE_FORMAT_VERSION})", self.version),
            ));
        }
        if !(self.horizon[0] < self.horizon[1]) {
            return Err(Error::parse("header", "horizon must satisfy St < Et"));
        }
        if !(self.rp > 0.0) {
            return Err(Error::parse("header", "rp must be positive"));
        }
        if !(self.msid > 0.0) {
            return Err(Error::parse("header", "msid must be positive"));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::parse("header", "sigma must be non-negative"));
        }
        let mut sat_ids = std::collections::HashSet::new();
        for s in &self.satellites {
            s.check()?;
            if !sat_ids.insert(s.id) {
                return Err(Error::parse(format!("satellite {}", s.id), "duplicate id"));
            }
        }
        let mut station_ids = std::collections::HashSet::new();
        for g in &self.stations {
            g.check()?;
            if !station_ids.insert(g.id) {
                return Err(Error::parse(format!("station {}", g.id), "duplicate id"));
            }
        }
        let mut oid_ids = std::collections::HashSet::new();
        for t in &self.oids {
            t.check()?;
            if !oid_ids.insert(t.id) {
                return Err(Error::parse(format!("oid {}", t.id), "duplicate id"));
            }
            if !sat_ids.contains(&t.satellite) {
                return Err(Error::parse(format!("oid {}", t.id), format!("unknown satellite {}", t.satellite)));
            }
        }
        check_windows(&self.vtws, Some((&sat_ids, &station_ids)))
    }
}

/// Window list invariants: positive length, non-decreasing start times,
/// unique ids and (optionally) known satellite/station references.
pub(crate) fn check_windows(
    vtws: &[VisibleTimeWindow],
    refs: Option<(&std::collections::HashSet<u32>, &std::collections::HashSet<u32>)>,
) -> Result<()> {
    let mut ids = std::collections::HashSet::new();
    let mut prev = f64::NEG_INFINITY;
    for w in vtws {
        let record = || format!("vtw {}", w.id);
        if !(w.start.is_finite() && w.end.is_finite()) {
            return Err(Error::parse(record(), "window bounds must be finite"));
        }
        if !(w.start < w.end) {
            return Err(Error::parse(record(), format!("sw {} must precede ew {}", w.start, w.end)));
        }
        if w.start < prev {
            return Err(Error::parse(record(), "windows must be sorted by sw ascending"));
        }
        prev = w.start;
        if !ids.insert(w.id) {
            return Err(Error::parse(record(), "duplicate id"));
        }
        if let Some((sats, stations)) = refs {
            if !sats.contains(&w.satellite) {
                return Err(Error::parse(record(), format!("unknown satellite {}", w.satellite)));
            }
            if !stations.contains(&w.station) {
                return Err(Error::parse(record(), format!("unknown station {}", w.station)));
            }
        }
    }
    Ok(())
}

/// Due time in hours for a priority in 1..=10.
pub fn due_time(priority: u8) -> Result<u32> {
    match priority {
        1..=3 => Ok(24),
        4..=6 => Ok(12),
        7..=9 => Ok(6),
        10 => Ok(3),
        _ => Err(Error::Domain(format!("priority {priority} outside [1, 10]"))),
    }
}

/// True when `w` can serve `t`: same satellite and a start inside `[r, r + o)`.
pub fn serves(t: &OriginalImageData, w: &VisibleTimeWindow) -> bool {
    w.satellite == t.satellite && w.start >= t.release && w.start < t.expiry()
}

/// The windows able to serve `t`, in the order they appear in `windows`.
pub fn candidate_windows<'a>(
    t: &OriginalImageData,
    windows: &'a [VisibleTimeWindow],
) -> Vec<&'a VisibleTimeWindow> {
    windows.iter().filter(|w| serves(t, w)).collect()
}

/// Whether the total length of `candidates` can hold `t`'s observation duration.
pub fn playback_feasible(t: &OriginalImageData, candidates: &[&VisibleTimeWindow]) -> bool {
    playback_feasible_scaled(t, candidates, 1.0)
}

/// [`playback_feasible`] with the duration scaled by `factor` (use `rp` to
/// compare downlink need rather than observation time).
pub fn playback_feasible_scaled(
    t: &OriginalImageData,
    candidates: &[&VisibleTimeWindow],
    factor: f64,
) -> bool {
    let capacity: f64 = candidates.iter().map(|w| w.len()).sum();
    t.duration * factor <= capacity
}

/// Whether `t` is long enough to be split without producing a piece below `msid`.
pub fn segmental(t: &OriginalImageData, msid: f64) -> bool {
    t.duration > 2.0 * msid
}
