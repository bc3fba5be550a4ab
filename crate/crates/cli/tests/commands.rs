use std::fs;
use std::path::Path;
use std::process::Command;

use downlink_sched::builder::DistributionKind;
use downlink_sched::schedule::ScheduleDump;
use downlink_sched::segmentation::SegmentationStrategy;
use downlink_sched::{EvolutionConfig, SelectionMode};
use downlink_sched_cli::experiment::{read_front, summarize, RunRow};
use downlink_sched_cli::{
    cmd_experiment, cmd_gen, cmd_solve, cmd_validate, load_instance, ExperimentSpec, Sweep, EXIT_CONFIG,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_downlink-sched"))
}

fn quick(seed: u64) -> EvolutionConfig {
    EvolutionConfig { pop_size: 10, archive_size: 10, max_iter: 3, seed, ..EvolutionConfig::default() }
}

#[test]
fn gen_is_deterministic_and_lenient() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let inst = cmd_gen(DistributionKind::MD, 100, 7, &a).unwrap();
    assert_eq!(inst.oids.len(), 100);
    cmd_gen(DistributionKind::MD, 100, 7, &b).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let off_grid = cmd_gen(DistributionKind::PD, 37, 1, &dir.path().join("c.json")).unwrap();
    assert_eq!(off_grid.oids.len(), 37);
}

#[test]
fn solve_output_validates_clean() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pd.json");
    cmd_gen(DistributionKind::PD, 50, 3, &path).unwrap();
    let (trace, files) = cmd_solve(load_instance(&path).unwrap(), SegmentationStrategy::Minimum, &quick(1), dir.path()).unwrap();
    assert_eq!(trace.hv.len(), 3);
    assert!(cmd_validate(&path, &files.schedule).unwrap().is_empty());
    let front = read_front(&files.front).unwrap();
    assert_eq!(front.len(), trace.front().len());

    let (zero, _) = cmd_solve(
        load_instance(&path).unwrap(),
        SegmentationStrategy::Minimum,
        &EvolutionConfig { max_iter: 0, ..quick(1) },
        &dir.path().join("zero"),
    )
    .unwrap();
    assert!(zero.hv.is_empty());
}

fn corrupt(schedule: &Path, edit: impl FnOnce(&mut ScheduleDump)) {
    let mut dump = ScheduleDump::from_json(&fs::read_to_string(schedule).unwrap()).unwrap();
    edit(&mut dump);
    fs::write(schedule, dump.to_json().unwrap()).unwrap();
}

#[test]
fn validate_reports_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("md.json");
    cmd_gen(DistributionKind::MD, 100, 2, &path).unwrap();
    let (_, files) = cmd_solve(load_instance(&path).unwrap(), SegmentationStrategy::Minimum, &quick(4), dir.path()).unwrap();
    let clean = fs::read_to_string(&files.schedule).unwrap();

    let inst = load_instance(&path).unwrap();
    corrupt(&files.schedule, |d| {
        let m = &mut d.missions[0];
        let window = inst.vtws.iter().find(|w| w.id == m.window).unwrap();
        m.st = window.end;
    });
    let report = cmd_validate(&path, &files.schedule).unwrap();
    assert!(report.iter().any(|l| l.contains("Capacity")), "{report:?}");

    fs::write(&files.schedule, &clean).unwrap();
    corrupt(&files.schedule, |d| {
        let m = d.missions.iter_mut().find(|m| m.payload.len() > 1).expect("a multi-piece mission");
        m.payload.pop();
    });
    let report = cmd_validate(&path, &files.schedule).unwrap();
    assert!(report.iter().any(|l| l.contains("FamilyIncomplete")), "{report:?}");

    let out = bin()
        .args(["validate", "--instance"])
        .arg(&path)
        .arg("--schedule")
        .arg(&files.schedule)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stdout.is_empty());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pd.json");
    let gen = bin()
        .args(["gen", "--kind", "PD", "--n", "50", "--seed", "1", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(gen.status.code(), Some(0));

    let bad_ir = bin().args(["solve", "--ir", "1.5", "--instance"]).arg(&path).output().unwrap();
    assert_eq!(bad_ir.status.code(), Some(EXIT_CONFIG));
    let bad_flag = bin().args(["solve", "--strategy", "sometimes"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(EXIT_CONFIG));
    let bad_threads = bin()
        .env("DOWNLINK_SCHED_THREADS", "zero")
        .args(["solve", "--iters", "1", "--instance"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("t"))
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(EXIT_CONFIG));

    let solved = bin()
        .env("DOWNLINK_SCHED_THREADS", "2")
        .args(["solve", "--iters", "2", "--pop", "8", "--archive", "8", "--selection", "crem", "--ref", "1,1", "--instance"])
        .arg(&path)
        .arg("--out")
        .arg(dir.path().join("s"))
        .output()
        .unwrap();
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stderr));
    let ok = bin()
        .args(["validate", "--instance"])
        .arg(&path)
        .arg("--schedule")
        .arg(dir.path().join("s/schedule.json"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

fn spec(instance: &Path, sweep: Sweep, seeds: Vec<u64>, out: &Path) -> ExperimentSpec {
    ExperimentSpec {
        instance: load_instance(instance).unwrap(),
        strategy: SegmentationStrategy::Minimum,
        base: EvolutionConfig { max_iter: 2, ..quick(0) },
        sweep,
        seeds,
        out: out.to_path_buf(),
    }
}

#[test]
fn ir_sweep_layout_and_recomputable_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nd.json");
    cmd_gen(DistributionKind::ND, 50, 5, &path).unwrap();
    let out = dir.path().join("ir");
    let result = cmd_experiment(&spec(&path, Sweep::parse("ir", None).unwrap(), vec![1, 2], &out)).unwrap();
    assert_eq!(result.summary.len(), 11);
    assert_eq!(result.runs.len(), 22);

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 12);
    assert!(summary.starts_with("cell,value,runs,hv,fr_max,fr_mean,fr_min,st_max,st_mean,st_min"));
    for f in ["runs.csv", "ssr.csv", "fronts.svg", "hv.svg", "hv/ir-0.40_seed2.csv", "fronts/ir-1.00_seed1.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }

    // summary rows are seed means of run rows, which follow from the fronts
    let mut r = csv::Reader::from_path(out.join("runs.csv")).unwrap();
    let rows: Vec<RunRow> = r.deserialize().map(Result::unwrap).collect();
    for (cell, written) in rows.chunks(2).zip(&result.summary) {
        assert_eq!(summarize(cell).hv, written.hv);
        assert_eq!(summarize(cell).fr_mean, written.fr_mean);
    }
    for row in &rows {
        let front = read_front(&out.join("fronts").join(format!("{}_seed{}.csv", row.cell, row.seed))).unwrap();
        let pts: Vec<_> = front.iter().map(|&(fr, st)| downlink_sched::ObjectiveVector { fr, st }).collect();
        assert_eq!(downlink_sched::metrics::hypervolume_2d(&pts, [1.0, 1.0]).unwrap(), row.hv);
        let fr_max = front.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(fr_max, row.fr_max);
    }
}

#[test]
fn strategy_and_selection_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("md.json");
    cmd_gen(DistributionKind::MD, 100, 6, &path).unwrap();
    let result = cmd_experiment(&spec(&path, Sweep::parse("strategy", None).unwrap(), vec![0], &dir.path().join("s"))).unwrap();
    let cells: Vec<&str> = result.summary.iter().map(|r| r.cell.as_str()).collect();
    assert_eq!(cells, ["strategy-min", "strategy-stoch", "strategy-none"]);
    assert_eq!(result.ssr.len(), 9);
    assert!(result.ssr.iter().all(|r| (0.0..=1.0).contains(&r.ssr_min) && r.ssr_min <= r.ssr_max));

    let sel = Sweep::parse("selection", None).unwrap();
    assert_eq!(sel, Sweep::Selection(vec![SelectionMode::Nsga2, SelectionMode::Crem]));
    let result = cmd_experiment(&spec(&path, sel, (0..3).collect(), &dir.path().join("b"))).unwrap();
    assert_eq!(result.runs.len(), 6);
}

#[test]
fn experiment_spec_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pd.json");
    cmd_gen(DistributionKind::PD, 50, 1, &path).unwrap();
    let no_seeds = spec(&path, Sweep::None, vec![], dir.path());
    assert_eq!(cmd_experiment(&no_seeds).unwrap_err().code, EXIT_CONFIG);
    let out_of_range = spec(&path, Sweep::parse("mr", Some("0.5,1.2")).unwrap(), vec![0], dir.path());
    assert_eq!(cmd_experiment(&out_of_range).unwrap_err().code, EXIT_CONFIG);
    assert!(Sweep::parse("colour", None).is_err());
    assert!(Sweep::parse("strategy", Some("min,sometimes")).is_err());
}
