use proptest::prelude::*;

use super::*;
use crate::builder::{generate_instance, DistributionKind};
use crate::model::{ImageData, Instance, OriginalImageData, VisibleTimeWindow};
use crate::objectives::evaluate;
use crate::rng::stream;
use crate::segmentation::{build_nt, SegmentationConfig, SegmentationStrategy};

fn oid(id: u32, priority: u8, duration: f64, satellite: u32) -> OriginalImageData {
    OriginalImageData {
        id,
        priority,
        release: 0.0,
        due_hours: crate::model::due_time(priority).unwrap(),
        duration,
        satellite,
    }
}

fn window(id: u32, start: f64, end: f64, satellite: u32, station: u32) -> VisibleTimeWindow {
    VisibleTimeWindow { id, start, end, satellite, station }
}

fn whole_pieces(inst: &Instance) -> Vec<ImageData> {
    inst.oids
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let mut p = ImageData::piece_of(t, 0, t.duration);
            p.id = i as u32;
            p
        })
        .collect()
}

fn fixture(oids: Vec<OriginalImageData>, vtws: Vec<VisibleTimeWindow>) -> Problem {
    let mut inst = Instance::empty();
    inst.satellites = crate::builder::catalog::satellites();
    inst.stations = crate::builder::catalog::stations();
    inst.oids = oids;
    inst.vtws = vtws;
    let nt = whole_pieces(&inst);
    Problem::new(inst, nt).unwrap()
}

#[test]
fn nothing_scheduled() {
    let p = fixture(vec![oid(1, 5, 50.0, 1)], vec![window(1, 100.0, 600.0, 1, 1)]);
    let s = decode(&Chromosome::empty(&p), &p).unwrap();
    assert!(s.missions.is_empty());
    assert_eq!(evaluate(&s, &p.inst, &p.nt).fr, 1.0);
}

#[test]
fn single_placement() {
    let p = fixture(vec![oid(1, 5, 50.0, 1)], vec![window(1, 100.0, 600.0, 1, 1)]);
    let ch = Chromosome { scheduled: vec![true], assignment: vec![Some(0)] };
    let s = decode(&ch, &p).unwrap();
    assert_eq!(s.missions.len(), 1);
    let m = &s.missions[0];
    assert_eq!((m.st, m.w, m.window, m.id), (100.0, 200.0, 1, 1));
    assert_eq!(m.payload, vec![0]);
    assert_eq!(window_load(&s, &p, 1).unwrap(), 200.0);
    assert!(validate_schedule(&s, &p.inst, &p.nt).is_empty());
}

#[test]
fn length_mismatch_is_contract_error() {
    let p = fixture(vec![oid(1, 5, 50.0, 1)], vec![window(1, 100.0, 600.0, 1, 1)]);
    let ch = Chromosome { scheduled: vec![true, false], assignment: vec![Some(0)] };
    assert!(matches!(decode(&ch, &p), Err(Error::Contract(_))));
}

#[test]
fn window_load_examples() {
    let p = fixture(
        vec![oid(1, 5, 100.0, 1)],
        vec![window(1, 100.0, 600.0, 1, 1), window(2, 1000.0, 1500.0, 1, 1)],
    );
    let ch = Chromosome { scheduled: vec![true], assignment: vec![Some(0)] };
    let s = decode(&ch, &p).unwrap();
    assert_eq!(window_load(&s, &p, 1).unwrap(), 400.0);
    assert_eq!(window_load(&s, &p, 1).unwrap(), s.missions[0].w);
    assert_eq!(window_load(&s, &p, 2).unwrap(), 0.0);
    assert!(matches!(window_load(&s, &p, 77), Err(Error::Domain(_))));
}

/// Highest-weight subset of families that fits a single window, by enumeration.
fn best_fitting_subset(p: &Problem, capacity: f64) -> Vec<bool> {
    let n = p.n_oids();
    let mut best = (f64::NEG_INFINITY, vec![false; n]);
    for mask in 0u32..(1 << n) {
        let chosen: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let load: f64 = (0..n).filter(|&i| chosen[i]).map(|i| p.inst.oids[i].duration).sum();
        let weight: f64 = (0..n).filter(|&i| chosen[i]).map(|i| p.inst.oids[i].weight()).sum();
        if p.inst.rp * load <= capacity && weight > best.0 {
            best = (weight, chosen);
        }
    }
    best.1
}

#[test]
fn overfilled_window_evicts_lighter_family() {
    // 4 * (60 + 70) = 520 > 400, while each family alone fits
    let p = fixture(
        vec![oid(1, 2, 60.0, 1), oid(2, 9, 70.0, 1)],
        vec![window(1, 100.0, 500.0, 1, 1)],
    );
    let ch = Chromosome { scheduled: vec![true, true], assignment: vec![Some(0), Some(0)] };
    let s = decode(&ch, &p).unwrap();
    assert_eq!(s.scheduled, best_fitting_subset(&p, 400.0));
    assert_eq!(s.scheduled, vec![false, true]);
    assert!(validate_schedule(&s, &p.inst, &p.nt).is_empty());
}

#[test]
fn ineligible_member_unschedules_family() {
    let p = fixture(
        vec![oid(1, 5, 50.0, 1), oid(2, 5, 50.0, 1)],
        vec![window(1, 100.0, 600.0, 1, 1), window(2, 100.0, 600.0, 2, 2)],
    );
    // window 2 belongs to another satellite
    let ch = Chromosome { scheduled: vec![true, true], assignment: vec![Some(1), None] };
    let s = decode(&ch, &p).unwrap();
    assert_eq!(s.scheduled, vec![false, false]);
    assert!(s.missions.is_empty());
}

#[test]
fn station_conflict_drops_later_mission() {
    // sat 1 at station 1 busy until 100 + 200; sat 2 at the same station starts at 320 < 360
    let p = fixture(
        vec![oid(1, 5, 50.0, 1), oid(2, 5, 50.0, 2)],
        vec![window(1, 100.0, 600.0, 1, 1), window(2, 320.0, 900.0, 2, 1)],
    );
    let ch = Chromosome { scheduled: vec![true, true], assignment: vec![Some(0), Some(1)] };
    let s = decode(&ch, &p).unwrap();
    assert_eq!(s.scheduled, vec![true, false]);

    // at exactly σ after the first mission both survive
    let p = fixture(
        vec![oid(1, 5, 50.0, 1), oid(2, 5, 50.0, 2)],
        vec![window(1, 100.0, 600.0, 1, 1), window(2, 360.0, 900.0, 2, 1)],
    );
    let s = decode(&ch, &p).unwrap();
    assert_eq!(s.scheduled, vec![true, true]);
    assert!(validate_schedule(&s, &p.inst, &p.nt).is_empty());
}

#[test]
fn satellite_overlap_drops_later_mission() {
    let p = fixture(
        vec![oid(1, 5, 50.0, 1), oid(2, 5, 50.0, 1)],
        vec![window(1, 100.0, 600.0, 1, 1), window(2, 250.0, 900.0, 1, 2)],
    );
    let ch = Chromosome { scheduled: vec![true, true], assignment: vec![Some(0), Some(1)] };
    let s = decode(&ch, &p).unwrap();
    assert_eq!(s.scheduled, vec![true, false]);
}

fn mission(id: u32, window: u32, st: f64, w: f64, payload: Vec<u32>, satellite: u32, station: u32) -> DownlinkMission {
    DownlinkMission { id, window, st, w, payload, satellite, station }
}

#[test]
fn validator_setup_time_gap() {
    let p = fixture(
        vec![oid(1, 5, 50.0, 1), oid(2, 5, 50.0, 2)],
        vec![window(1, 100.0, 600.0, 1, 1), window(2, 100.0, 900.0, 2, 1)],
    );
    let s = Schedule {
        missions: vec![
            mission(1, 1, 100.0, 200.0, vec![0], 1, 1),
            mission(2, 2, 359.0, 200.0, vec![1], 2, 1),
        ],
        scheduled: vec![true, true],
        objectives: None,
    };
    let v = validate_schedule(&s, &p.inst, &p.nt);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::SetupTime);
}

#[test]
fn validator_family_incomplete() {
    let mut inst = Instance::empty();
    inst.satellites = crate::builder::catalog::satellites();
    inst.stations = crate::builder::catalog::stations();
    inst.oids = vec![oid(1, 5, 50.0, 1)];
    inst.vtws = vec![window(1, 100.0, 600.0, 1, 1)];
    let mut a = ImageData::piece_of(&inst.oids[0], 0, 25.0);
    let mut b = ImageData::piece_of(&inst.oids[0], 1, 25.0);
    a.id = 0;
    b.id = 1;
    let nt = vec![a, b];
    let s = Schedule {
        missions: vec![mission(1, 1, 100.0, 100.0, vec![0], 1, 1)],
        scheduled: vec![true],
        objectives: None,
    };
    let v = validate_schedule(&s, &inst, &nt);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0].kind, ViolationKind::FamilyIncomplete);
}

#[test]
fn validator_capacity_boundaries() {
    let p = fixture(vec![oid(1, 5, 100.0, 1)], vec![window(1, 100.0, 600.0, 1, 1)]);
    let ok = Schedule {
        missions: vec![mission(1, 1, 100.0, 400.0, vec![0], 1, 1)],
        scheduled: vec![true],
        objectives: None,
    };
    assert!(validate_schedule(&ok, &p.inst, &p.nt).is_empty());
    let late = Schedule {
        missions: vec![mission(1, 1, 250.0, 400.0, vec![0], 1, 1)],
        ..ok.clone()
    };
    let v = validate_schedule(&late, &p.inst, &p.nt);
    assert!(v.iter().any(|v| v.kind == ViolationKind::Capacity));
    let short = Schedule {
        missions: vec![mission(1, 1, 100.0, 300.0, vec![0], 1, 1)],
        ..ok.clone()
    };
    assert!(validate_schedule(&short, &p.inst, &p.nt).iter().any(|v| v.kind == ViolationKind::Capacity));
}

#[test]
fn validator_reuse_and_uniqueness() {
    let p = fixture(
        vec![oid(1, 5, 20.0, 1), oid(2, 5, 20.0, 1)],
        vec![window(1, 100.0, 900.0, 1, 1)],
    );
    let s = Schedule {
        missions: vec![
            mission(1, 1, 100.0, 80.0, vec![0], 1, 1),
            mission(2, 1, 180.0, 160.0, vec![0, 1], 1, 1),
        ],
        scheduled: vec![true, true],
        objectives: None,
    };
    let kinds: Vec<_> = validate_schedule(&s, &p.inst, &p.nt).iter().map(|v| v.kind).collect();
    assert!(kinds.contains(&ViolationKind::WindowReuse));
    assert!(kinds.contains(&ViolationKind::Uniqueness));
}

fn random_chromosome(p: &Problem, rng: &mut impl rand::Rng) -> Chromosome {
    let scheduled = (0..p.n_oids()).map(|_| rng.gen_bool(0.6)).collect();
    let assignment = (0..p.n_nt())
        .map(|k| {
            let cands = &p.candidates[p.family_of[k]];
            let u: f64 = rng.gen();
            if u < 0.85 && !cands.is_empty() {
                Some(cands[rng.gen_range(0..cands.len())] as u32)
            } else if u < 0.95 {
                Some(rng.gen_range(0..p.n_windows()) as u32)
            } else {
                None
            }
        })
        .collect();
    Chromosome { scheduled, assignment }
}

fn check_decoded(p: &Problem, ch: &Chromosome) {
    let s = decode(ch, p).unwrap();
    let v = validate_schedule(&s, &p.inst, &p.nt);
    assert!(v.is_empty(), "{v:?}");
    for (i, fam) in p.families.iter().enumerate() {
        let sent = fam
            .iter()
            .filter(|&&k| s.missions.iter().any(|m| m.payload.contains(&(k as u32))))
            .count();
        assert!(sent == 0 || sent == fam.len());
        assert_eq!(s.scheduled[i], sent > 0 && sent == fam.len());
    }
    let again = decode(&encode(&s, p), p).unwrap();
    assert_eq!(again, s);
}

fn small_problem(kind: DistributionKind, n: usize, seed: u64, strategy: SegmentationStrategy) -> Problem {
    let inst = generate_instance(kind, n, seed).unwrap();
    let mut cfg = SegmentationConfig::new(strategy);
    cfg.seed = seed;
    let nt = build_nt(&inst, &cfg).unwrap();
    Problem::new(inst, nt).unwrap()
}

#[test]
fn fuzz_decoded_schedules_are_feasible() {
    let problems = [
        small_problem(DistributionKind::PD, 50, 1, SegmentationStrategy::Minimum),
        small_problem(DistributionKind::ND, 50, 2, SegmentationStrategy::Stochastic),
        small_problem(DistributionKind::MD, 100, 3, SegmentationStrategy::None),
        small_problem(DistributionKind::MD, 100, 4, SegmentationStrategy::Minimum),
    ];
    let mut rng = stream(2024, &[]);
    for n in 0..10_000 {
        let p = &problems[n % problems.len()];
        let ch = random_chromosome(p, &mut rng);
        check_decoded(p, &ch);
    }
}

#[test]
fn objectives_ignore_mission_order() {
    let p = small_problem(DistributionKind::MD, 100, 5, SegmentationStrategy::Minimum);
    let mut rng = stream(5, &[]);
    for _ in 0..50 {
        let s = decode(&random_chromosome(&p, &mut rng), &p).unwrap();
        let mut shuffled = s.clone();
        shuffled.missions.reverse();
        assert_eq!(evaluate(&s, &p.inst, &p.nt), evaluate(&shuffled, &p.inst, &p.nt));
        assert_eq!(
            evaluate(&s, &p.inst, &p.nt),
            crate::objectives::evaluate_in(&s, &p)
        );
    }
}

#[test]
fn dump_round_trip() {
    let p = small_problem(DistributionKind::PD, 50, 6, SegmentationStrategy::Minimum);
    let mut rng = stream(6, &[]);
    let mut s = decode(&random_chromosome(&p, &mut rng), &p).unwrap();
    s.objectives = Some(evaluate(&s, &p.inst, &p.nt));
    let text = ScheduleDump::new(&s, &p.inst, &p.nt).to_json().unwrap();
    let (back, nt) = ScheduleDump::from_json(&text).unwrap().into_schedule(&p.inst).unwrap();
    assert_eq!(back, s);
    assert_eq!(nt, p.nt);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn decode_is_feasible_and_idempotent(seed in any::<u64>()) {
        let p = small_problem(DistributionKind::PD, 50, seed % 4, SegmentationStrategy::Minimum);
        let mut rng = stream(seed, &[1]);
        check_decoded(&p, &random_chromosome(&p, &mut rng));
    }
}
