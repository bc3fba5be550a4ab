//! An instance paired with its image-data set, plus the lookup tables the
//! decoder and the evolutionary operators share.
//!
//! Windows, OIDs and image data are addressed by their position in the
//! instance (or NT) vectors. Windows are sorted by start time, so a smaller
//! window index never starts later.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{self, ImageData, Instance};

/// Absolute slack, in seconds, granted to floating-point sums when checking
/// capacity and spacing of missions.
pub const TIME_EPS: f64 = 1e-6;

/// Tolerance for the family-conservation check on image-data durations.
pub const ND_EPS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Problem {
    pub inst: Instance,
    pub nt: Vec<ImageData>,
    /// NT positions of each OID's pieces, ordered by segment.
    pub families: Vec<Vec<usize>>,
    /// OID position of each NT piece.
    pub family_of: Vec<usize>,
    /// Serving windows of each OID, ascending.
    pub candidates: Vec<Vec<usize>>,
    /// Station / satellite position of each window.
    pub window_station: Vec<usize>,
    pub window_satellite: Vec<usize>,
    /// Windows of each station / satellite, ascending.
    pub station_windows: Vec<Vec<usize>>,
    pub satellite_windows: Vec<Vec<usize>>,
    pub max_window_len: f64,
    /// Normaliser of the segmentation objective, `floor(max d / msid)`, at least 1.
    pub max_segmentation_times: u32,
    /// Σ ω·d over all OIDs.
    pub total_weight: f64,
    window_index: HashMap<u32, usize>,
    oid_index: HashMap<u32, usize>,
}

impl Problem {
    /// Indexes `inst` and checks that `nt` is a valid image-data set for it:
    /// ids equal positions, every piece belongs to a known OID and inherits
    /// its attributes, and each family's durations add up to its source.
    pub fn new(inst: Instance, nt: Vec<ImageData>) -> Result<Self> {
        let window_index: HashMap<u32, usize> =
            inst.vtws.iter().enumerate().map(|(i, w)| (w.id, i)).collect();
        let oid_index: HashMap<u32, usize> =
            inst.oids.iter().enumerate().map(|(i, t)| (t.id, i)).collect();
        let sat_pos: HashMap<u32, usize> =
            inst.satellites.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        let station_pos: HashMap<u32, usize> =
            inst.stations.iter().enumerate().map(|(i, g)| (g.id, i)).collect();

        let mut families = vec![Vec::new(); inst.oids.len()];
        let mut family_of = Vec::with_capacity(nt.len());
        for (k, piece) in nt.iter().enumerate() {
            let record = || format!("image data {}", piece.id);
            if piece.id as usize != k {
                return Err(Error::parse(record(), format!("id must equal position {k}")));
            }
            let &i = oid_index
                .get(&piece.family)
                .ok_or_else(|| Error::parse(record(), format!("unknown family {}", piece.family)))?;
            let t = &inst.oids[i];
            if piece.satellite != t.satellite || piece.priority != t.priority || !(piece.nd > 0.0) {
                return Err(Error::parse(record(), "attributes inconsistent with the source OID"));
            }
            families[i].push(k);
            family_of.push(i);
        }
        for (i, fam) in families.iter_mut().enumerate() {
            fam.sort_by_key(|&k| nt[k].segment);
            if fam.is_empty() {
                continue;
            }
            let sum: f64 = fam.iter().map(|&k| nt[k].nd).sum();
            if (sum - inst.oids[i].duration).abs() > ND_EPS {
                return Err(Error::parse(
                    format!("family {}", inst.oids[i].id),
                    format!("pieces sum to {sum} s, source lasts {} s", inst.oids[i].duration),
                ));
            }
        }

        let mut window_station = Vec::with_capacity(inst.vtws.len());
        let mut window_satellite = Vec::with_capacity(inst.vtws.len());
        let mut station_windows = vec![Vec::new(); inst.stations.len()];
        let mut satellite_windows = vec![Vec::new(); inst.satellites.len()];
        let mut max_window_len: f64 = 0.0;
        for (j, w) in inst.vtws.iter().enumerate() {
            let g = *station_pos
                .get(&w.station)
                .ok_or_else(|| Error::parse(format!("vtw {}", w.id), "unknown station"))?;
            let s = *sat_pos
                .get(&w.satellite)
                .ok_or_else(|| Error::parse(format!("vtw {}", w.id), "unknown satellite"))?;
            window_station.push(g);
            window_satellite.push(s);
            station_windows[g].push(j);
            satellite_windows[s].push(j);
            max_window_len = max_window_len.max(w.len());
        }

        let candidates = inst
            .oids
            .iter()
            .map(|t| {
                inst.vtws
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| model::serves(t, w))
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();

        let max_d = inst.oids.iter().map(|t| t.duration).fold(0.0, f64::max);
        let max_segmentation_times = ((max_d / inst.msid).floor() as u32).max(1);
        let total_weight = inst.oids.iter().map(|t| t.weight()).sum();

        Ok(Problem {
            inst,
            nt,
            families,
            family_of,
            candidates,
            window_station,
            window_satellite,
            station_windows,
            satellite_windows,
            max_window_len,
            max_segmentation_times,
            total_weight,
            window_index,
            oid_index,
        })
    }

    pub fn n_oids(&self) -> usize {
        self.inst.oids.len()
    }

    pub fn n_nt(&self) -> usize {
        self.nt.len()
    }

    pub fn n_windows(&self) -> usize {
        self.inst.vtws.len()
    }

    pub fn window_position(&self, id: u32) -> Option<usize> {
        self.window_index.get(&id).copied()
    }

    pub fn oid_position(&self, id: u32) -> Option<usize> {
        self.oid_index.get(&id).copied()
    }

    /// Whether window `j` can serve OID `i`.
    pub fn is_candidate(&self, i: usize, j: usize) -> bool {
        self.candidates[i].binary_search(&j).is_ok()
    }

    pub fn window_start(&self, j: usize) -> f64 {
        self.inst.vtws[j].start
    }

    pub fn window_len(&self, j: usize) -> f64 {
        self.inst.vtws[j].len()
    }
}
