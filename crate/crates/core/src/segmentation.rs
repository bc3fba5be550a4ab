//! Turning OIDs into the image-data set NT.
//!
//! An OID whose total serving-window length cannot hold it is dropped. One too
//! short to split without producing a piece below the minimum size (MSID) is
//! passed through whole. Every other OID is cut according to the strategy:
//!
//! * [`SegmentationStrategy::Minimum`] cuts `NS = floor(d / msid)` equal pieces,
//!   each `msid + RS / NS` long, where `RS = d - NS * msid`.
//! * [`SegmentationStrategy::Stochastic`] cuts a random number of random
//!   pieces, each at least `msid` long.
//! * [`SegmentationStrategy::None`] never cuts.
//!
//! Pieces of one OID form a family; their durations always add back up to the
//! source duration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, ImageData, Instance, OriginalImageData};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SegmentationStrategy {
    Minimum,
    Stochastic,
    None,
}

impl SegmentationStrategy {
    pub const ALL: [SegmentationStrategy; 3] = [
        SegmentationStrategy::Minimum,
        SegmentationStrategy::Stochastic,
        SegmentationStrategy::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SegmentationStrategy::Minimum => "min",
            SegmentationStrategy::Stochastic => "stoch",
            SegmentationStrategy::None => "none",
        }
    }
}

impl std::str::FromStr for SegmentationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "min" | "minimum" => Ok(SegmentationStrategy::Minimum),
            "stoch" | "stochastic" => Ok(SegmentationStrategy::Stochastic),
            "none" => Ok(SegmentationStrategy::None),
            other => Err(Error::Domain(format!("unknown segmentation strategy {other:?}"))),
        }
    }
}

impl std::fmt::Display for SegmentationStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Options for [`build_nt`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub strategy: SegmentationStrategy,
    /// Seed for the stochastic strategy.
    pub seed: u64,
    /// Compare `rp * d` rather than `d` against the serving-window capacity
    /// when deciding whether an OID can be played back at all.
    pub playback_uses_rp: bool,
}

impl SegmentationConfig {
    pub fn new(strategy: SegmentationStrategy) -> Self {
        SegmentationConfig {
            strategy,
            seed: 0,
            playback_uses_rp: false,
        }
    }
}

/// `(NS, RS)`: number of whole `msid` pieces in `d` and the remainder.
pub fn segmentation_counts(d: f64, msid: f64) -> (u32, f64) {
    let ns = (d / msid).floor();
    (ns as u32, d - ns * msid)
}

/// Cuts `t` into `NS` equal pieces of `msid + RS / NS`.
pub fn minimum_segment(t: &OriginalImageData, msid: f64) -> Result<Vec<ImageData>> {
    if !model::segmental(t, msid) {
        return Err(Error::Contract(format!(
            "oid {} ({} s) is too short to segment with msid {msid}",
            t.id, t.duration
        )));
    }
    let (ns, rs) = segmentation_counts(t.duration, msid);
    let nd = msid + rs / f64::from(ns);
    Ok((0..ns).map(|k| ImageData::piece_of(t, k, nd)).collect())
}

/// Cuts `t` into `k` pieces, `k` uniform in `[2, NS]`, with each piece
/// `msid` plus a share of the slack `d - k * msid` taken from a uniform point
/// on the simplex.
pub fn stochastic_segment(
    t: &OriginalImageData,
    msid: f64,
    rng: &mut impl Rng,
) -> Result<Vec<ImageData>> {
    if !model::segmental(t, msid) {
        return Err(Error::Contract(format!(
            "oid {} ({} s) is too short to segment with msid {msid}",
            t.id, t.duration
        )));
    }
    let (ns, _) = segmentation_counts(t.duration, msid);
    let k = rng.gen_range(2..=ns.max(2));
    let slack = t.duration - f64::from(k) * msid;
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    let mut pieces = Vec::with_capacity(k as usize);
    for (i, &c) in cuts.iter().chain(std::iter::once(&1.0)).enumerate() {
        pieces.push(ImageData::piece_of(t, i as u32, msid + slack * (c - prev)));
        prev = c;
    }
    Ok(pieces)
}

/// Pieces of one playable OID under `strategy`: the OID itself when it is
/// too short to split or the strategy is [`SegmentationStrategy::None`].
pub fn segment(
    t: &OriginalImageData,
    msid: f64,
    strategy: SegmentationStrategy,
    rng: &mut impl Rng,
) -> Result<Vec<ImageData>> {
    if !model::segmental(t, msid) || strategy == SegmentationStrategy::None {
        return Ok(vec![ImageData::piece_of(t, 0, t.duration)]);
    }
    match strategy {
        SegmentationStrategy::Minimum => minimum_segment(t, msid),
        SegmentationStrategy::Stochastic => stochastic_segment(t, msid, rng),
        SegmentationStrategy::None => unreachable!(),
    }
}

/// Builds NT for the instance.
///
/// The result is ordered by release time (ties by family, then segment) and
/// each piece's id is its position in that order.
pub fn build_nt(inst: &Instance, cfg: &SegmentationConfig) -> Result<Vec<ImageData>> {
    let factor = if cfg.playback_uses_rp { inst.rp } else { 1.0 };
    let mut nt = Vec::new();
    for t in &inst.oids {
        let candidates = model::candidate_windows(t, &inst.vtws);
        if !model::playback_feasible_scaled(t, &candidates, factor) {
            continue;
        }
        let mut rng = stream(cfg.seed, &[0x5e6, u64::from(t.id)]);
        nt.extend(segment(t, inst.msid, cfg.strategy, &mut rng)?);
    }
    nt.sort_by(|a, b| {
        a.release
            .total_cmp(&b.release)
            .then(a.family.cmp(&b.family))
            .then(a.segment.cmp(&b.segment))
    });
    for (i, piece) in nt.iter_mut().enumerate() {
        piece.id = i as u32;
    }
    Ok(nt)
}
