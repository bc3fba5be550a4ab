//! Quality indicators: hypervolume, per-class success rates and front
//! statistics.
//!
//! All objectives are minimised. Hypervolume is measured against a reference
//! point, by default `(1, 1)`, the worst value of both objectives.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::builder::SatelliteClass;
use crate::error::{Error, Result};
use crate::evolution::selection::nondominated_sort;
use crate::model::Instance;
use crate::objectives::ObjectiveVector;
use crate::schedule::Schedule;

/// Default hypervolume reference point.
pub const DEFAULT_REFERENCE: [f64; 2] = [1.0, 1.0];

/// Slack allowed when a point touches the reference point.
pub const REFERENCE_TOLERANCE: f64 = 1e-12;

/// Highest number of objectives [`hypervolume`] accepts.
pub const MAX_DIMENSIONS: usize = 4;

fn checked(points: &[Vec<f64>], reference: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = reference.len();
    if d == 0 || d > MAX_DIMENSIONS {
        return Err(Error::Domain(format!("{d} objectives, expected 1..={MAX_DIMENSIONS}")));
    }
    points
        .iter()
        .map(|p| {
            if p.len() != d {
                return Err(Error::Domain(format!("point {p:?} has {} coordinates, expected {d}", p.len())));
            }
            if p.iter().zip(reference).any(|(x, r)| !x.is_finite() || *x > r + REFERENCE_TOLERANCE) {
                return Err(Error::Domain(format!("point {p:?} does not dominate the reference {reference:?}")));
            }
            Ok(p.iter().zip(reference).map(|(x, r)| x.min(*r)).collect())
        })
        .collect()
}

/// Exact dominated hypervolume by slicing objectives (HSO).
///
/// The points are swept along the first objective; each slab between two
/// consecutive values contributes its width times the hypervolume, in the
/// remaining objectives, of the points already passed.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    let pts = checked(points, reference)?;
    Ok(hso(pts, reference))
}

fn hso(mut pts: Vec<Vec<f64>>, reference: &[f64]) -> f64 {
    if pts.is_empty() {
        return 0.0;
    }
    if reference.len() == 1 {
        let best = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        return reference[0] - best;
    }
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let mut volume = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let x = pts[i][0];
        while i < pts.len() && pts[i][0] == x {
            i += 1;
        }
        let next = if i < pts.len() { pts[i][0] } else { reference[0] };
        let width = next - x;
        if width > 0.0 {
            let slice: Vec<Vec<f64>> = pts[..i].iter().map(|p| p[1..].to_vec()).collect();
            volume += width * hso(slice, &reference[1..]);
        }
    }
    volume
}

/// [`hypervolume`] of two-objective vectors.
pub fn hypervolume_2d(front: &[ObjectiveVector], reference: [f64; 2]) -> Result<f64> {
    let pts: Vec<Vec<f64>> = front.iter().map(|v| vec![v.fr, v.st]).collect();
    hypervolume(&pts, &reference)
}

/// Two-objective hypervolume by a staircase sweep along the second
/// objective, independent of the slicing in [`hypervolume`].
pub fn hypervolume_2d_sweep(front: &[ObjectiveVector], reference: [f64; 2]) -> Result<f64> {
    let pts = checked(
        &front.iter().map(|v| vec![v.fr, v.st]).collect::<Vec<_>>(),
        &reference,
    )?;
    let mut pts: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut area = 0.0;
    let mut best_x = reference[0];
    for (k, &(x, y)) in pts.iter().enumerate() {
        best_x = best_x.min(x);
        let next_y = pts.get(k + 1).map_or(reference[1], |p| p.1);
        area += (next_y - y) * (reference[0] - best_x);
    }
    Ok(area)
}

/// Monte-Carlo estimate of the hypervolume with its standard error.
///
/// Samples are drawn uniformly from the box spanned by the componentwise
/// minimum of the front and the reference point.
pub fn hv_monte_carlo(
    points: &[Vec<f64>],
    reference: &[f64],
    n_samples: usize,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    if n_samples == 0 {
        return Err(Error::Domain("Monte-Carlo hypervolume needs at least one sample".into()));
    }
    let pts = checked(points, reference)?;
    if pts.is_empty() {
        return Ok((0.0, 0.0));
    }
    let d = reference.len();
    let lower: Vec<f64> = (0..d)
        .map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let volume: f64 = lower.iter().zip(reference).map(|(l, r)| r - l).product();
    if volume <= 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut hits: u64 = 0;
    let mut sample = vec![0.0; d];
    if d == 2 {
        // staircase: ascending first objective with running minimum of the second
        let mut stairs: Vec<(f64, f64)> = pts.iter().map(|p| (p[0], p[1])).collect();
        stairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut run = f64::INFINITY;
        for s in stairs.iter_mut() {
            run = run.min(s.1);
            s.1 = run;
        }
        for _ in 0..n_samples {
            let x = rng.gen_range(lower[0]..=reference[0]);
            let y = rng.gen_range(lower[1]..=reference[1]);
            let n = stairs.partition_point(|s| s.0 <= x);
            if n > 0 && stairs[n - 1].1 <= y {
                hits += 1;
            }
        }
    } else {
        for _ in 0..n_samples {
            for k in 0..d {
                sample[k] = rng.gen_range(lower[k]..=reference[k]);
            }
            if pts.iter().any(|p| p.iter().zip(&sample).all(|(a, b)| a <= b)) {
                hits += 1;
            }
        }
    }
    let f = hits as f64 / n_samples as f64;
    let se = (f * (1.0 - f) / n_samples as f64).sqrt();
    Ok((f * volume, se * volume))
}

/// Share of the OIDs of `class` that `s` schedules; 0 when the class has none.
pub fn single_success_rate(s: &Schedule, inst: &Instance, class: SatelliteClass) -> f64 {
    let mut total = 0usize;
    let mut done = 0usize;
    for (t, &x) in inst.oids.iter().zip(&s.scheduled) {
        let of_class = inst
            .satellite(t.satellite)
            .and_then(|sat| sat.class())
            .is_some_and(|c| c == class);
        if of_class {
            total += 1;
            done += usize::from(x);
        }
    }
    if total == 0 {
        0.0
    } else {
        done as f64 / total as f64
    }
}

/// The nondominated part of an archive with its hypervolume and the
/// minimum, mean and maximum of each objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontSummary {
    pub points: Vec<ObjectiveVector>,
    pub hv: f64,
    pub fr_min: f64,
    pub fr_mean: f64,
    pub fr_max: f64,
    pub st_min: f64,
    pub st_mean: f64,
    pub st_max: f64,
}

pub fn summarize_front(archive: &[ObjectiveVector], reference: [f64; 2]) -> Result<FrontSummary> {
    if archive.is_empty() {
        return Err(Error::Domain("cannot summarize an empty archive".into()));
    }
    let f1 = nondominated_sort(archive).swap_remove(0);
    let points: Vec<ObjectiveVector> = f1.iter().map(|&i| archive[i]).collect();
    let n = points.len() as f64;
    let stat = |get: fn(&ObjectiveVector) -> f64| {
        let min = points.iter().map(get).fold(f64::INFINITY, f64::min);
        let max = points.iter().map(get).fold(f64::NEG_INFINITY, f64::max);
        let mean = points.iter().map(get).sum::<f64>() / n;
        (min, mean, max)
    };
    let (fr_min, fr_mean, fr_max) = stat(|v| v.fr);
    let (st_min, st_mean, st_max) = stat(|v| v.st);
    Ok(FrontSummary {
        hv: hypervolume_2d(&points, reference)?,
        points,
        fr_min,
        fr_mean,
        fr_max,
        st_min,
        st_mean,
        st_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn ov(fr: f64, st: f64) -> ObjectiveVector {
        ObjectiveVector { fr, st }
    }

    const R: [f64; 2] = DEFAULT_REFERENCE;

    #[test]
    fn single_rectangle() {
        let hv = hypervolume_2d(&[ov(0.9, 0.01)], R).unwrap();
        assert!((hv - 0.1 * 0.99).abs() < 1e-15);
        assert!((hypervolume_2d_sweep(&[ov(0.9, 0.01)], R).unwrap() - hv).abs() < 1e-15);
    }

    #[test]
    fn two_points() {
        // 0.7·0.2 + 0.5·0.5 - overlap 0.5·0.2 = 0.29
        let front = [ov(0.3, 0.8), ov(0.5, 0.5)];
        let hv = hypervolume_2d(&front, R).unwrap();
        assert!((hv - 0.29).abs() < 1e-12);
        let pts: Vec<Vec<f64>> = front.iter().map(|v| vec![v.fr, v.st]).collect();
        let (mc, se) = hv_monte_carlo(&pts, &R, 1_000_000, &mut stream(3, &[])).unwrap();
        assert!((mc - 0.29).abs() < 1e-3 && (mc - 0.29).abs() < 4.0 * se);
    }

    #[test]
    fn dominated_point_adds_nothing() {
        let a = hypervolume_2d(&[ov(0.3, 0.8), ov(0.5, 0.5)], R).unwrap();
        let b = hypervolume_2d(&[ov(0.3, 0.8), ov(0.5, 0.5), ov(0.6, 0.9)], R).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reference_contact_and_errors() {
        assert_eq!(hypervolume_2d(&[ov(1.0, 0.0)], R).unwrap(), 0.0);
        assert_eq!(hypervolume_2d(&[ov(1.0 + 1e-13, 0.5)], R).unwrap(), 0.0);
        assert!(matches!(hypervolume_2d(&[ov(1.1, 0.5)], R), Err(Error::Domain(_))));
        assert_eq!(hypervolume_2d(&[], R).unwrap(), 0.0);
        assert!(hv_monte_carlo(&[], &R, 0, &mut stream(0, &[])).is_err());
        assert_eq!(hv_monte_carlo(&[], &R, 10, &mut stream(0, &[])).unwrap().0, 0.0);
    }

    #[test]
    fn three_dimensions() {
        let pts = vec![vec![0.5, 0.5, 0.5]];
        assert!((hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap() - 0.125).abs() < 1e-15);
        let pts = vec![vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5], vec![0.5, 0.5, 0.0]];
        // inclusion-exclusion: 3·0.25 - 3·0.125 + 0.125
        assert!((hypervolume(&pts, &[1.0, 1.0, 1.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn summary_of_single_point() {
        let s = summarize_front(&[ov(0.9, 0.01)], R).unwrap();
        assert_eq!((s.fr_min, s.fr_mean, s.fr_max), (0.9, 0.9, 0.9));
        assert_eq!((s.st_min, s.st_mean, s.st_max), (0.01, 0.01, 0.01));
        assert!((s.hv - 0.099).abs() < 1e-12);
        assert!(summarize_front(&[], R).is_err());
    }

    fn front(raw: &[(f64, f64)]) -> Vec<ObjectiveVector> {
        raw.iter().map(|&(a, b)| ov(a, b)).collect()
    }

    proptest! {
        #[test]
        fn hso_matches_sweep(raw in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..60)) {
            let f = front(&raw);
            let a = hypervolume_2d(&f, R).unwrap();
            let b = hypervolume_2d_sweep(&f, R).unwrap();
            prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }

        #[test]
        fn nondominated_addition_increases(raw in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..30), x in 0.0..0.999f64, y in 0.0..0.999f64) {
            let f = front(&raw);
            let v = ov(x, y);
            if !f.iter().any(|p| p.dominates(v) || *p == v) {
                let mut g = f.clone();
                g.push(v);
                prop_assert!(hypervolume_2d(&g, R).unwrap() > hypervolume_2d(&f, R).unwrap());
            }
        }

        #[test]
        fn reference_shift_adds_perimeter_slab(raw in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..30), eps in 1e-4..0.5f64) {
            let f = front(&raw);
            let a = hypervolume_2d(&f, R).unwrap();
            let b = hypervolume_2d(&f, [1.0 + eps, 1.0 + eps]).unwrap();
            let x0 = f.iter().map(|v| v.fr).fold(f64::INFINITY, f64::min);
            let y0 = f.iter().map(|v| v.st).fold(f64::INFINITY, f64::min);
            // L-shaped slab: eps·(1 - y0) + eps·(1 - x0) + eps²
            let slab = eps * (1.0 - y0) + eps * (1.0 - x0) + eps * eps;
            prop_assert!((b - a - slab).abs() < 1e-12);
        }

        #[test]
        fn summary_points_are_first_front(raw in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..40)) {
            let f = front(&raw);
            let s = summarize_front(&f, R).unwrap();
            let f1: Vec<ObjectiveVector> = nondominated_sort(&f)[0].iter().map(|&i| f[i]).collect();
            prop_assert_eq!(&s.points, &f1);
            prop_assert!(s.fr_min <= s.fr_mean + 1e-15 && s.fr_mean <= s.fr_max + 1e-15);
            prop_assert!(s.st_min <= s.st_mean + 1e-15 && s.st_mean <= s.st_max + 1e-15);
        }
    }
}
