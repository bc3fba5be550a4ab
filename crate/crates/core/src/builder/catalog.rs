//! Built-in satellite and ground station catalogs used by the generator.

use serde::{Deserialize, Serialize};

use crate::model::{GroundStation, Satellite};

/// Default antenna elevation mask, degrees.
pub const DEFAULT_MIN_ELEVATION_DEG: f64 = 5.0;

/// Satellite families; each observes for a characteristic duration range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SatelliteClass {
    GaoFen,
    SuperView,
    EarthResource,
}

impl SatelliteClass {
    pub const ALL: [SatelliteClass; 3] = [
        SatelliteClass::GaoFen,
        SatelliteClass::SuperView,
        SatelliteClass::EarthResource,
    ];

    /// Observation duration range `[lo, hi]` in seconds.
    pub fn duration_range(self) -> (f64, f64) {
        match self {
            SatelliteClass::GaoFen => (60.0, 120.0),
            SatelliteClass::SuperView => (10.0, 60.0),
            SatelliteClass::EarthResource => (120.0, 200.0),
        }
    }

    /// Infers the class from a catalog name (`GF*`, `SV*`, `ZY*`).
    pub fn from_name(name: &str) -> Option<Self> {
        let upper = name.to_ascii_uppercase();
        if upper.starts_with("GF") {
            Some(SatelliteClass::GaoFen)
        } else if upper.starts_with("SV") {
            Some(SatelliteClass::SuperView)
        } else if upper.starts_with("ZY") {
            Some(SatelliteClass::EarthResource)
        } else {
            None
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SatelliteClass::GaoFen => "GaoFen",
            SatelliteClass::SuperView => "SuperView",
            SatelliteClass::EarthResource => "EarthResource",
        }
    }
}

impl std::fmt::Display for SatelliteClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl Satellite {
    pub fn class(&self) -> Option<SatelliteClass> {
        SatelliteClass::from_name(&self.name)
    }
}

// name, id, semi-major axis (km), eccentricity, inclination, RAAN,
// argument of perigee, mean anomaly (degrees).
const SATELLITES: [(&str, u32, f64, f64, f64, f64, f64, f64); 10] = [
    ("GF0101", 1, 7145.08, 0.001, 98.55, 359.06, 152.17, 265.39),
    ("GF0201", 2, 7011.57, 0.002, 97.83, 2.89, 98.15, 257.45),
    ("GF0601", 3, 7020.45, 0.002, 97.99, 6.87, 56.94, 94.33),
    ("SV01", 4, 6901.65, 0.002, 97.43, 1.01, 124.24, 242.68),
    ("SV02", 5, 6894.39, 0.001, 97.54, 11.87, 128.22, 90.39),
    ("SV03", 6, 6883.14, 0.000, 97.51, 5.98, 341.26, 106.70),
    ("SV04", 7, 6884.95, 0.004, 97.51, 6.14, 92.52, 195.65),
    ("ZY02C", 8, 7143.90, 0.002, 98.64, 341.91, 57.55, 186.17),
    ("ZY3", 9, 6875.80, 0.001, 97.41, 0.79, 59.20, 71.87),
    // Identical elements to GF0101 in the source table.
    ("ZY0104", 10, 7145.08, 0.001, 98.55, 359.06, 152.17, 265.39),
];

/// The ten catalog satellites.
pub fn satellites() -> Vec<Satellite> {
    SATELLITES
        .iter()
        .map(|&(name, id, a, e, i, raan, argp, m0)| Satellite {
            id,
            name: name.to_string(),
            semi_major_axis_km: a,
            eccentricity: e,
            inclination_deg: i,
            raan_deg: raan,
            arg_perigee_deg: argp,
            mean_anomaly_deg: m0,
        })
        .collect()
}

pub const MIYUN: u32 = 1;
pub const KASHI: u32 = 2;
pub const SANYA: u32 = 3;
pub const KIRUNA: u32 = 4;

/// The three mid-latitude stations plus the polar station.
pub fn stations() -> Vec<GroundStation> {
    [
        (MIYUN, "Miyun", 40.0, 117.0),
        (KASHI, "Kashi", 39.0, 76.0),
        (SANYA, "Sanya", 18.0, 109.0),
        (KIRUNA, "Kiruna", 67.0, 21.0),
    ]
    .into_iter()
    .map(|(id, name, lat, lon)| GroundStation {
        id,
        name: name.to_string(),
        latitude_deg: lat,
        longitude_deg: lon,
        altitude_km: 0.0,
        min_elevation_deg: DEFAULT_MIN_ELEVATION_DEG,
    })
    .collect()
}
