//! Two-body orbit propagation and station visibility windows.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::model::{GroundStation, Satellite, VisibleTimeWindow};

/// Earth gravitational parameter, km³/s².
pub const MU_EARTH: f64 = 398_600.4418;

/// Earth rotation rate, rad/s.
pub const EARTH_ROTATION_RATE: f64 = 7.292_115_9e-5;

/// WGS-84 flattening.
const FLATTENING: f64 = 1.0 / 298.257_223_563;

/// Julian date (UT1) of 2020-10-15T00:00:00Z, the scheduling epoch.
pub const EPOCH_JD: f64 = 2_459_137.5;

const KEPLER_TOLERANCE: f64 = 1e-10;
const KEPLER_MAX_ITER: usize = 50;

/// Endpoint refinement resolution for visibility windows, seconds.
const EDGE_RESOLUTION_S: f64 = 0.1;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Greenwich mean sidereal time, radians, for a Julian date.
pub fn gmst(jd: f64) -> f64 {
    let d = jd - 2_451_545.0;
    let t = d / 36_525.0;
    let deg = 280.460_618_37 + 360.985_647_366_29 * d + 0.000_387_933 * t * t - t * t * t / 38_710_000.0;
    deg.to_radians().rem_euclid(TAU)
}

/// Orbital period in seconds.
pub fn period(sat: &Satellite) -> f64 {
    TAU * (sat.semi_major_axis_km.powi(3) / MU_EARTH).sqrt()
}

/// Solves `E - e sin E = M` by Newton iteration.
pub fn eccentric_anomaly(mean_anomaly: f64, e: f64) -> Result<f64> {
    let m = mean_anomaly.rem_euclid(TAU);
    let mut ecc = if e < 0.8 { m } else { std::f64::consts::PI };
    for _ in 0..KEPLER_MAX_ITER {
        let residual = ecc - e * ecc.sin() - m;
        if residual.abs() < KEPLER_TOLERANCE {
            return Ok(ecc);
        }
        ecc -= residual / (1.0 - e * ecc.cos());
    }
    Err(Error::Numerical(format!(
        "Kepler's equation did not converge for M={m}, e={e}"
    )))
}

/// Inertial (equatorial, epoch-fixed) position in km, `t` seconds after epoch.
pub fn propagate_inertial(sat: &Satellite, t: f64) -> Result<Vec3> {
    let a = sat.semi_major_axis_km;
    let e = sat.eccentricity;
    let n = (MU_EARTH / a.powi(3)).sqrt();
    let m = sat.mean_anomaly_deg.to_radians() + n * t;
    let ecc = eccentric_anomaly(m, e)?;
    let (sin_e, cos_e) = ecc.sin_cos();
    // perifocal coordinates
    let px = a * (cos_e - e);
    let py = a * (1.0 - e * e).sqrt() * sin_e;

    let (so, co) = sat.raan_deg.to_radians().sin_cos();
    let (si, ci) = sat.inclination_deg.to_radians().sin_cos();
    let (sw, cw) = sat.arg_perigee_deg.to_radians().sin_cos();

    let x = (co * cw - so * sw * ci) * px + (-co * sw - so * cw * ci) * py;
    let y = (so * cw + co * sw * ci) * px + (-so * sw + co * cw * ci) * py;
    let z = (sw * si) * px + (cw * si) * py;
    Ok([x, y, z])
}

/// Earth-fixed position in km, `t` seconds after epoch.
pub fn propagate(sat: &Satellite, t: f64) -> Result<Vec3> {
    let r = propagate_inertial(sat, t)?;
    let theta = gmst(EPOCH_JD) + EARTH_ROTATION_RATE * t;
    let (s, c) = theta.sin_cos();
    Ok([c * r[0] + s * r[1], -s * r[0] + c * r[1], r[2]])
}

/// Earth-fixed station position and local vertical.
fn station_frame(g: &GroundStation) -> (Vec3, Vec3) {
    let lat = g.latitude_deg.to_radians();
    let lon = g.longitude_deg.to_radians();
    let e2 = FLATTENING * (2.0 - FLATTENING);
    let radius = crate::model::EARTH_RADIUS_KM;
    let n = radius / (1.0 - e2 * lat.sin().powi(2)).sqrt();
    let pos = [
        (n + g.altitude_km) * lat.cos() * lon.cos(),
        (n + g.altitude_km) * lat.cos() * lon.sin(),
        (n * (1.0 - e2) + g.altitude_km) * lat.sin(),
    ];
    let up = [lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin()];
    (pos, up)
}

/// Elevation of an earth-fixed point above the station horizon, degrees.
pub fn elevation_deg(g: &GroundStation, sat_ecef: Vec3) -> f64 {
    let (pos, up) = station_frame(g);
    let rho = [sat_ecef[0] - pos[0], sat_ecef[1] - pos[1], sat_ecef[2] - pos[2]];
    (dot(rho, up) / norm(rho)).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Elevation of `sat` seen from `g` at time `t`.
pub fn elevation_at(sat: &Satellite, g: &GroundStation, t: f64) -> Result<f64> {
    Ok(elevation_deg(g, propagate(sat, t)?))
}

/// Visibility windows of every satellite over every station inside `horizon`.
///
/// The horizon is scanned at `step` seconds and the edges of each visible run
/// are refined by bisection to 0.1 s, keeping the refined bound on the visible
/// side. Windows shorter than `min_len` are dropped. The result is sorted by
/// start time (ties by satellite, then station) and ids are assigned from 1.
pub fn compute_vtws(
    sats: &[Satellite],
    stations: &[GroundStation],
    horizon: [f64; 2],
    step: f64,
    min_len: f64,
) -> Result<Vec<VisibleTimeWindow>> {
    if !(step > 0.0) {
        return Err(Error::Domain(format!("scan step must be positive, got {step}")));
    }
    let [begin, end] = horizon;
    let n_steps = ((end - begin) / step).ceil() as usize;
    let times: Vec<f64> = (0..=n_steps).map(|k| (begin + k as f64 * step).min(end)).collect();

    let mut out = Vec::new();
    for sat in sats {
        let positions = times
            .iter()
            .map(|&t| propagate(sat, t))
            .collect::<Result<Vec<_>>>()?;
        for g in stations {
            let visible = |t: f64| -> Result<bool> { Ok(elevation_at(sat, g, t)? >= g.min_elevation_deg) };
            let flags: Vec<bool> = positions
                .iter()
                .map(|&p| elevation_deg(g, p) >= g.min_elevation_deg)
                .collect();
            let mut k = 0;
            while k < flags.len() {
                if !flags[k] {
                    k += 1;
                    continue;
                }
                let start = if k == 0 {
                    times[0]
                } else {
                    refine_edge(times[k - 1], times[k], &visible)?
                };
                let mut j = k;
                while j + 1 < flags.len() && flags[j + 1] {
                    j += 1;
                }
                let stop = if j + 1 == flags.len() {
                    times[j]
                } else {
                    refine_edge(times[j + 1], times[j], &visible)?
                };
                if stop - start >= min_len {
                    out.push(VisibleTimeWindow {
                        id: 0,
                        start,
                        end: stop,
                        satellite: sat.id,
                        station: g.id,
                    });
                }
                k = j + 1;
            }
        }
    }
    out.sort_by(|a, b| {
        a.start
            .total_cmp(&b.start)
            .then(a.satellite.cmp(&b.satellite))
            .then(a.station.cmp(&b.station))
    });
    for (i, w) in out.iter_mut().enumerate() {
        w.id = i as u32 + 1;
    }
    Ok(out)
}

/// Bisects between an invisible instant and a visible one, returning a
/// visible instant within the edge resolution of the crossing.
fn refine_edge(
    mut hidden: f64,
    mut shown: f64,
    visible: &impl Fn(f64) -> Result<bool>,
) -> Result<f64> {
    while (shown - hidden).abs() > EDGE_RESOLUTION_S {
        let mid = 0.5 * (hidden + shown);
        if visible(mid)? {
            shown = mid;
        } else {
            hidden = mid;
        }
    }
    Ok(shown)
}
