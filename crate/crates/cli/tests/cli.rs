use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "dimension = 512\nstate_counts = [7, 9, 11]\ntargets = 3\ninits = 2\n";

fn run(dir: &Path, args: &[&str]) -> Output {
    let config = dir.join("config.toml");
    if !config.exists() {
        fs::write(&config, SMALL).unwrap();
    }
    Command::new(env!("CARGO_BIN_EXE_cml-arm"))
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(String::from).collect()
}

fn keys(path: &Path) -> Vec<String> {
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn reach_writes_point_cloud_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["reach"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("out");
    assert_eq!(header(&o.join("points.csv")), ["x", "y"]);
    assert_eq!(header(&o.join("histogram.csv")), ["x", "y", "count"]);
    let rows = csv::Reader::from_path(o.join("points.csv")).unwrap().records().count();
    assert_eq!(rows, 7 * 9 * 11);
    let mut k = keys(&o.join("reach.json"));
    k.sort();
    assert_eq!(k, ["coverage_fraction", "covered_cells", "grid_cell_size", "pipeline", "point_count", "state_counts", "total_cells"]);
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--target", "1.2,-0.7", "--method", "resonator"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("out");
    let first = fs::read(o.join("solution.json")).unwrap();
    let traj = fs::read(o.join("trajectory.csv")).unwrap();
    assert_eq!(header(&o.join("trajectory.csv")), ["step", "segment", "node_index", "angle", "effector_x", "effector_y"]);
    let again = run(dir.path(), &["solve", "--target", "1.2,-0.7", "--method", "resonator"]);
    assert!(again.status.success());
    assert_eq!(first, fs::read(o.join("solution.json")).unwrap());
    assert_eq!(traj, fs::read(o.join("trajectory.csv")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert!(v["displacement"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["trajectories"].as_array().unwrap().len(), 3);
}

#[test]
fn gripper_solve_adds_base_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--pipeline", "3d-gripper", "--target", "0.9,0.9,1.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(dir.path().join("out/trajectory.csv")).unwrap();
    let segments: Vec<usize> = r.records().map(|rec| rec.unwrap()[1].parse().unwrap()).collect();
    assert!(segments.contains(&3));
}

#[test]
fn experiment_and_configs_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["experiment", "--seed", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("out");
    assert_eq!(
        header(&o.join("runs.csv")),
        [
            "target_index",
            "target_x",
            "target_y",
            "target_z",
            "method",
            "displacement",
            "similarity_to_target",
            "initializations_used",
            "final_threshold",
            "plan_lengths",
            "plans_converged",
            "wall_micros"
        ]
    );
    assert_eq!(csv::Reader::from_path(o.join("runs.csv")).unwrap().records().count(), 6);
    let mut k = keys(&o.join("summary.json"));
    k.sort();
    assert_eq!(k, ["methods", "pipeline", "seed", "spearman_similarity_displacement", "targets"]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(o.join("summary.json")).unwrap()).unwrap();
    let mut mk: Vec<String> = summary["methods"]["hopfield"].as_object().unwrap().keys().cloned().collect();
    mk.sort();
    assert_eq!(
        mk,
        [
            "displacement_mean",
            "displacement_std",
            "final_threshold_mean",
            "first_attempt_rate",
            "initializations_mean",
            "initializations_std",
            "runs",
            "spearman_similarity_displacement"
        ]
    );

    let out = run(dir.path(), &["configs", "--inits", "1", "--method", "hopfield"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&o.join("configs.csv")), ["target_x", "target_y", "method", "unique_count"]);
    let mut r = csv::Reader::from_path(o.join("configs.csv")).unwrap();
    assert!(r.records().all(|rec| &rec.unwrap()[3] == "1"));
    let mut k = keys(&o.join("configs_summary.json"));
    k.sort();
    assert_eq!(k, ["inits", "pipeline", "seed", "targets", "unique_mean", "unique_std"]);
}

#[test]
fn experiment_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let mut r = csv::Reader::from_path(p).unwrap();
        r.records().map(|rec| rec.unwrap().iter().take(11).map(String::from).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    assert!(run(dir.path(), &["experiment"]).status.success());
    let o = dir.path().join("out");
    let (runs, summary) = (strip(&o.join("runs.csv")), fs::read(o.join("summary.json")).unwrap());
    assert!(run(dir.path(), &["experiment"]).status.success());
    assert_eq!(runs, strip(&o.join("runs.csv")));
    assert_eq!(summary, fs::read(o.join("summary.json")).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--target", "1.0;2.0"][..],
        &["solve", "--target", "1.0"],
        &["solve", "--target", "1,1,1"],
        &["experiment", "--method", "annealing"],
        &["teleport"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    fs::write(dir.path().join("bad.toml"), "dimension = 0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cml-arm"))
        .args(["--config", dir.path().join("bad.toml").to_str().unwrap(), "reach"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    fs::write(dir.path().join("config.toml"), SMALL).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cml-arm"))
        .args(["--config", dir.path().join("config.toml").to_str().unwrap()])
        .args(["--out", blocker.join("sub").to_str().unwrap(), "reach"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
