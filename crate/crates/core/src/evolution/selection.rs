//! Nondominated sorting, crowding distance, elitist survivor selection and
//! the box-method acceptance filter.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::objectives::ObjectiveVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Fill by fronts, truncate the last one by crowding distance.
    Nsga2,
    /// Keep a uniform random subset.
    Crem,
}

impl std::str::FromStr for SelectionMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nsga2" | "nsga-ii" => Ok(SelectionMode::Nsga2),
            "crem" => Ok(SelectionMode::Crem),
            other => Err(crate::Error::Domain(format!("unknown selection mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SelectionMode::Nsga2 => "nsga2",
            SelectionMode::Crem => "crem",
        })
    }
}

/// Fronts of `points` as index lists: the first holds the nondominated
/// points, each next one the nondominated points of what remains.
pub fn nondominated_sort(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if points[i].dominates(points[j]) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if points[j].dominates(points[i]) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (indices into `points`),
/// returned in the order of `front`.
pub fn crowding_distance(points: &[ObjectiveVector], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut dist = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    for obj in 0..2 {
        let value = |pos: usize| points[front[pos]].as_array()[obj];
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(front[a].cmp(&front[b])));
        let (lo, hi) = (value(order[0]), value(order[m - 1]));
        dist[order[0]] = f64::INFINITY;
        dist[order[m - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..m - 1 {
                dist[order[w]] += (value(order[w + 1]) - value(order[w - 1])) / (hi - lo);
            }
        }
    }
    dist
}

/// Indices of at most `k` survivors of `pool`.
pub fn elitist_select(
    pool: &[ObjectiveVector],
    k: usize,
    mode: SelectionMode,
    rng: &mut impl Rng,
) -> Vec<usize> {
    if pool.len() <= k {
        return (0..pool.len()).collect();
    }
    match mode {
        SelectionMode::Crem => {
            let mut chosen = sample(rng, pool.len(), k).into_vec();
            chosen.sort_unstable();
            chosen
        }
        SelectionMode::Nsga2 => {
            let mut out = Vec::with_capacity(k);
            for front in nondominated_sort(pool) {
                if out.len() + front.len() <= k {
                    out.extend_from_slice(&front);
                    if out.len() == k {
                        break;
                    }
                    continue;
                }
                let dist = crowding_distance(pool, &front);
                let mut order: Vec<usize> = (0..front.len()).collect();
                order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]).then(front[a].cmp(&front[b])));
                let room = k - out.len();
                out.extend(order[..room].iter().map(|&o| front[o]));
                break;
            }
            out
        }
    }
}

/// Box of `v` in a `grid`×`grid` partition of the unit square.
pub fn box_of(v: ObjectiveVector, grid: usize) -> (usize, usize) {
    let cell = |x: f64| ((x.clamp(0.0, 1.0) * grid as f64) as usize).min(grid - 1);
    (cell(v.fr), cell(v.st))
}

/// Merges `offspring` into `best` with the box method and returns the
/// indices of the resulting pool: `i < best.len()` refers to `best[i]`,
/// larger values to `offspring[i - best.len()]`.
///
/// An offspring dominated by a current nondominated member is rejected. One
/// landing in a box with no nondominated member is admitted; one landing in
/// an occupied box is admitted only if it dominates the incumbent, which then
/// leaves the pool.
pub fn box_combine(best: &[ObjectiveVector], offspring: &[ObjectiveVector], grid: usize) -> Vec<usize> {
    let grid = grid.max(1);
    let value = |i: usize| {
        if i < best.len() {
            best[i]
        } else {
            offspring[i - best.len()]
        }
    };
    let mut pool: Vec<usize> = (0..best.len()).collect();
    let mut front: Vec<usize> = nondominated_sort(best).into_iter().next().unwrap_or_default();
    for (o, &v) in offspring.iter().enumerate() {
        let id = best.len() + o;
        if front.iter().any(|&f| value(f).dominates(v)) {
            continue;
        }
        let b = box_of(v, grid);
        let incumbents: Vec<usize> = front.iter().copied().filter(|&f| box_of(value(f), grid) == b).collect();
        if !incumbents.is_empty() {
            if !incumbents.iter().all(|&f| v.dominates(value(f))) {
                continue;
            }
            pool.retain(|f| !incumbents.contains(f));
        }
        front.retain(|&f| !v.dominates(value(f)));
        front.push(id);
        pool.push(id);
    }
    pool
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use proptest::prelude::*;

    fn ov(fr: f64, st: f64) -> ObjectiveVector {
        ObjectiveVector { fr, st }
    }

    /// Peels nondominated layers by brute force.
    fn peel(points: &[ObjectiveVector]) -> Vec<Vec<usize>> {
        let mut left: Vec<usize> = (0..points.len()).collect();
        let mut fronts = Vec::new();
        while !left.is_empty() {
            let front: Vec<usize> = left
                .iter()
                .copied()
                .filter(|&i| !left.iter().any(|&j| points[j].dominates(points[i])))
                .collect();
            left.retain(|i| !front.contains(i));
            fronts.push(front);
        }
        fronts
    }

    #[test]
    fn sort_examples() {
        assert_eq!(nondominated_sort(&[ov(0.5, 0.5), ov(0.6, 0.6)]), vec![vec![0], vec![1]]);
        assert_eq!(nondominated_sort(&[ov(0.3, 0.8), ov(0.5, 0.5)]), vec![vec![0, 1]]);
        assert!(nondominated_sort(&[]).is_empty());
    }

    #[test]
    fn crowding_examples() {
        let pts = [ov(0.0, 1.0), ov(0.5, 0.5), ov(1.0, 0.0)];
        let d = crowding_distance(&pts, &[0, 1, 2]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-12);
        assert!(crowding_distance(&pts, &[0, 2]).iter().all(|d| d.is_infinite()));
        let d2 = crowding_distance(&pts, &[2, 1, 0]);
        assert_eq!(d2[1], d[1]);
    }

    #[test]
    fn select_examples() {
        let mut rng = stream(1, &[]);
        let pool = [ov(0.1, 0.1), ov(0.5, 0.5), ov(0.6, 0.2)];
        assert_eq!(elitist_select(&pool, 5, SelectionMode::Nsga2, &mut rng), vec![0, 1, 2]);
        assert_eq!(elitist_select(&pool, 1, SelectionMode::Nsga2, &mut rng), vec![0]);
        let crem = elitist_select(&pool, 2, SelectionMode::Crem, &mut rng);
        assert_eq!(crem.len(), 2);
    }

    #[test]
    fn box_examples() {
        let best = [ov(0.505, 0.505), ov(0.2, 0.9)];
        // dominates everything
        assert_eq!(box_combine(&best, &[ov(0.1, 0.1)], 100), vec![0, 1, 2]);
        // duplicate of an incumbent
        assert_eq!(box_combine(&best, &[ov(0.505, 0.505)], 100), vec![0, 1]);
        // dominated
        assert_eq!(box_combine(&best, &[ov(0.6, 0.6)], 100), vec![0, 1]);
        // new box on the front
        assert_eq!(box_combine(&best, &[ov(0.9, 0.05)], 100), vec![0, 1, 2]);
        // same box, not dominating the incumbent
        assert_eq!(box_combine(&best, &[ov(0.501, 0.509)], 100), vec![0, 1]);
        // same box, dominating the incumbent
        assert_eq!(box_combine(&best, &[ov(0.501, 0.502)], 100), vec![1, 2]);
    }

    fn points(raw: &[(f64, f64)]) -> Vec<ObjectiveVector> {
        raw.iter().map(|&(a, b)| ov((a * 20.0).round() / 20.0, (b * 20.0).round() / 20.0)).collect()
    }

    proptest! {
        #[test]
        fn sort_matches_peeling(raw in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..120)) {
            // coarse grid so ties and duplicates occur
            let pts = points(&raw);
            let mut a = nondominated_sort(&pts);
            let mut b = peel(&pts);
            for f in a.iter_mut().chain(b.iter_mut()) {
                f.sort_unstable();
            }
            prop_assert_eq!(a, b);
        }

        #[test]
        fn nsga2_keeps_first_front(raw in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..120), k in 1usize..60, seed in any::<u64>()) {
            let pts = points(&raw);
            let chosen = elitist_select(&pts, k, SelectionMode::Nsga2, &mut stream(seed, &[]));
            prop_assert_eq!(chosen.len(), k.min(pts.len()));
            let f1 = &nondominated_sort(&pts)[0];
            if f1.len() <= k {
                prop_assert!(f1.iter().all(|i| chosen.contains(i)));
            } else {
                prop_assert!(chosen.iter().all(|i| f1.contains(i)));
            }
        }

        #[test]
        fn box_combine_one_front_point_per_box(
            best in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..40),
            off in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..80),
        ) {
            let best = points(&best);
            let off = points(&off);
            let pool = box_combine(&best, &off, 10);
            let all: Vec<ObjectiveVector> = best.iter().chain(off.iter()).copied().collect();
            let vals: Vec<ObjectiveVector> = pool.iter().map(|&i| all[i]).collect();
            // every admitted offspring is nondominated by the old front
            let old_front: Vec<ObjectiveVector> = nondominated_sort(&best).first().map(|f| f.iter().map(|&i| best[i]).collect()).unwrap_or_default();
            for &i in pool.iter().filter(|&&i| i >= best.len()) {
                prop_assert!(!old_front.iter().any(|f| f.dominates(all[i])));
            }
            // offspring on the final front never share a box
            let f1 = &nondominated_sort(&vals).first().cloned().unwrap_or_default();
            let mut boxes: Vec<_> = f1.iter().filter(|&&q| pool[q] >= best.len()).map(|&q| box_of(vals[q], 10)).collect();
            let n = boxes.len();
            boxes.sort_unstable();
            boxes.dedup();
            prop_assert_eq!(boxes.len(), n);
        }
    }
}
