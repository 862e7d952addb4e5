use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spoqc::frame::read_dump;

fn spoqc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spoqc")).args(args).current_dir(dir).env_remove("SPOQC_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rates_reports_two_to_the_minus_k() {
    let dir = tempfile::tempdir().unwrap();
    let o = spoqc(&["rates", "--eta", "1", "--k", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("failure+abort 0.125"), "{}", stdout(&o));
}

#[test]
fn verify_optics_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = spoqc(&["verify-optics", "--json", "optics.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("optics.json")).unwrap()).unwrap();
    assert!(summary["result"]["max_deviation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(spoqc(&["threshold", "--bogus"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["nonsense"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["threshold", "--distances", "3,4", "--shots", "5"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["threshold", "--axis", "q", "--shots", "5"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["rates"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["threshold", "--csv", "missing/out.csv"], dir.path()).status.code(), Some(1));
    fs::write(dir.path().join("bad.toml"), "[run]\nshot = 3\n").unwrap();
    assert_eq!(spoqc(&["threshold", "--config", "bad.toml"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn threshold_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |csv: &'static str, json: &'static str| {
        [
            "threshold", "--axis", "p_F", "--distances", "3,5", "--points", "3", "--shots", "400", "--seed", "1",
            "--bootstrap", "20", "--csv", csv, "--json", json,
        ]
    };
    assert_eq!(spoqc(&args("a.csv", "a.json"), dir.path()).status.code(), Some(0));
    let mut two_workers = args("b.csv", "b.json").to_vec();
    two_workers.extend(["--workers", "2"]);
    assert_eq!(spoqc(&two_workers, dir.path()).status.code(), Some(0));
    let read = |f: &str| fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    let csv = String::from_utf8(read("a.csv")).unwrap();
    assert!(csv.starts_with("axis_value,distance,shots,logical_errors,p_L,stderr\n"));
    assert_eq!(csv.lines().count(), 7);

    // The echoed config alone reproduces the run.
    let summary: serde_json::Value = serde_json::from_slice(&read("a.json")).unwrap();
    let mut config = summary["config"].clone();
    config["output"]["csv"] = "c.csv".into();
    config["output"]["json"] = "c.json".into();
    fs::write(dir.path().join("echo.json"), serde_json::to_string(&config).unwrap()).unwrap();
    assert_eq!(spoqc(&["threshold", "--config", "echo.json"], dir.path()).status.code(), Some(0));
    assert_eq!(read("a.csv"), read("c.csv"));
    assert_eq!(summary["result"], serde_json::from_slice::<serde_json::Value>(&read("c.json")).unwrap()["result"]);
}

#[test]
fn sample_writes_a_readable_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = spoqc(&["sample", "--distances", "3", "--p-fail", "0.1", "--shots", "50", "--dump", "shots.bin"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, shots) = read_dump(fs::File::open(dir.path().join("shots.bin")).unwrap()).unwrap();
    assert_eq!(header.shots, 50);
    assert_eq!(header.detector_count, 24);
    assert_eq!(header.herald_count, 72);
    assert!(shots.iter().any(|s| s.heralds.any()));
    assert_eq!(spoqc(&["sample", "--shots", "5"], dir.path()).status.code(), Some(1));
}

#[test]
fn tradeoff_from_config_knots() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("t.toml"),
        "[tradeoff]\nk = [1, 2, 3, 4, 5, 6]\nn = [1, 2]\nloss_max = 0.03\nloss_points = 4\nborder_knots = [[0.0, 0.0235], [0.1024, 0.0]]\n",
    )
    .unwrap();
    let o = spoqc(&["hrus-tradeoff", "--config", "t.toml", "--csv", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(csv.starts_with("photons,trials,loss,p_F,t_trial_max\n"));
    assert!(csv.contains("2,envelope,0,,"));
    assert_eq!(spoqc(&["tradeoff"], dir.path()).status.code(), Some(1));
}

#[test]
fn ft_surface_line_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = spoqc(
        &[
            "ft-surface", "--thresholds", "0.1,0.02,0.02", "--line", "2", "--distances", "3,5", "--shots", "300",
            "--w-points", "3", "--bootstrap", "10", "--csv", "s.csv", "--json", "s.json",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(spoqc(&["ft-surface", "--n-p", "2", "--thresholds", "0.1,0.02,0.02"], dir.path()).status.code(), Some(1));
    assert_eq!(spoqc(&["ft-surface", "--thresholds", "0.1,0.02"], dir.path()).status.code(), Some(1));
}

#[test]
fn code_serialises_tanner_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let o = spoqc(&["code", "--distances", "3", "--json", "code.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[[9, 1, 3]]"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("code.json")).unwrap()).unwrap();
    assert_eq!(v["result"][0]["distance"], 3);
    assert_eq!(spoqc(&["code", "--distances", "4"], dir.path()).status.code(), Some(1));
}
