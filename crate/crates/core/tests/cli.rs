use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lanestyle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lanestyle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lanestyle(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

fn workspace() -> Workspace {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    Workspace { _dir: dir, root }
}

#[test]
fn generate_then_cluster_finds_three_styles() {
    let ws = workspace();
    let data = p(&ws.root, "data.csv");
    let labels = p(&ws.root, "labels.csv");
    ok(&["generate", "--n", "9936", "--seed", "7", "--out", &data]);
    let report = ok(&["cluster", "--data", &data, "--labels", &labels]);
    let rows: Vec<&str> = report.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for style in ["moderate", "vague", "aggressive"] {
        assert!(rows.iter().any(|r| r.starts_with(style)), "{report}");
    }
    let labeled = fs::read_to_string(&labels).unwrap();
    assert!(labeled.starts_with("dd,dv,da,label\n"));
    assert_eq!(labeled.lines().count(), 9937);
}

#[test]
fn kmcknn_k1_model_matches_plain_knn() {
    let ws = workspace();
    let data = p(&ws.root, "data.csv");
    let model = p(&ws.root, "model.txt");
    let queries = p(&ws.root, "queries.csv");
    ok(&["generate", "--n", "1500", "--seed", "3", "--out", &data]);
    ok(&["generate", "--n", "300", "--seed", "4", "--out", &queries]);
    ok(&["train", "--data", &data, "--k", "1", "--model", &model]);
    let a = ok(&["recognize", "--model", &model, "--queries", &queries]);
    let b = ok(&["recognize", "--train", &data, "--queries", &queries]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 301);
}

#[test]
fn recognize_trajectory() {
    let ws = workspace();
    let data = p(&ws.root, "data.csv");
    let model = p(&ws.root, "model.txt");
    let traj = p(&ws.root, "traj.csv");
    ok(&["generate", "--n", "1500", "--seed", "3", "--out", &data]);
    ok(&["train", "--data", &data, "--model", &model]);
    ok(&["generate", "--scenario", "aggressive", "--seed", "2", "--out", &traj]);
    assert_eq!(ok(&["recognize", "--model", &model, "--trajectory", &traj]), "index,label\n0,aggressive\n");
}

#[test]
fn bench_reports_speedup() {
    let ws = workspace();
    let csv = p(&ws.root, "bench.csv");
    let text = ok(&["bench", "--n", "2000", "--k", "4", "--repeats", "1", "--csv", &csv]);
    assert!(text.contains("kmcknn k=4: speedup"), "{text}");
    let rows = fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("method,k,fold,lambda_mod,lambda_vag,lambda_agg,T_s,T0_ms,dist_evals\n"));
    assert!(rows.lines().any(|l| l.starts_with("kmcknn,4,mean,")));
}

#[test]
fn crossval_and_report_run() {
    let ws = workspace();
    let data = p(&ws.root, "data.csv");
    ok(&["generate", "--n", "2000", "--seed", "5", "--out", &data]);
    let cv = ok(&["crossval", "--data", &data, "--method", "knn", "--folds", "5"]);
    assert!(cv.contains("p = 5"), "{cv}");
    let report = ok(&["report", "--data", &data, "--k", "2", "--auto-label"]);
    assert!(report.contains("Morphology") && report.contains("KNN vs. kMC-KNN"), "{report}");
    let tree = ok(&["ahc", "--data", &data, "--target", "3", "--linkage", "average"]);
    assert_eq!(tree.lines().count(), 4);
}

#[test]
fn outputs_are_reproducible() {
    let ws = workspace();
    let (d1, d2) = (p(&ws.root, "a.csv"), p(&ws.root, "b.csv"));
    ok(&["generate", "--n", "3000", "--seed", "11", "--out", &d1]);
    ok(&["generate", "--n", "3000", "--seed", "11", "--out", &d2]);
    assert_eq!(fs::read(&d1).unwrap(), fs::read(&d2).unwrap());
    let (m1, m2) = (p(&ws.root, "m1.txt"), p(&ws.root, "m2.txt"));
    ok(&["train", "--data", &d1, "--k", "3", "--model", &m1]);
    ok(&["train", "--data", &d2, "--k", "3", "--model", &m2]);
    assert_eq!(fs::read(&m1).unwrap(), fs::read(&m2).unwrap());
    assert_eq!(ok(&["cluster", "--data", &d1]), ok(&["cluster", "--data", &d2]));
}

#[test]
fn exit_codes_and_diagnostics() {
    let ws = workspace();
    assert_eq!(lanestyle(&["cluster", "--nope"]).status.code(), Some(1));
    assert_eq!(lanestyle(&[]).status.code(), Some(1));

    let bad = p(&ws.root, "bad.csv");
    fs::write(&bad, "dd,dv,da\n1,2,3\n4,five,6\n").unwrap();
    let out = lanestyle(&["cluster", "--data", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:3:"));

    let data = p(&ws.root, "data.csv");
    ok(&["generate", "--n", "500", "--seed", "1", "--out", &data]);
    let never = p(&ws.root, "never.csv");
    let out = lanestyle(&["cluster", "--data", &data, "--r", "60", "--out", &never]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!Path::new(&never).exists());

    let model = p(&ws.root, "m.txt");
    fs::write(&model, "lanestyle-kmcknn-model 1\nk two\n").unwrap();
    let out = lanestyle(&["recognize", "--model", &model, "--queries", &data]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m.txt:2:"));
}

#[test]
fn config_file_overrides_flags() {
    let ws = workspace();
    let data = p(&ws.root, "data.csv");
    ok(&["generate", "--n", "2000", "--seed", "2", "--out", &data]);
    let conf = p(&ws.root, "run.conf");
    fs::write(&conf, "target = 2\n").unwrap();
    let out = ok(&["ahc", "--data", &data, "--target", "5", "--config", &conf]);
    assert_eq!(out.lines().count(), 3);

    fs::write(&conf, "n = 10\nseed = 4\n").unwrap();
    let out = ok(&["generate", "--n", "50", "--config", &conf]);
    assert_eq!(out.lines().count(), 11);

    fs::write(&conf, "target = 2\nshape = round\n").unwrap();
    let out = lanestyle(&["ahc", "--data", &data, "--config", &conf]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("run.conf:2:"));
}

#[test]
fn profile_file_drives_generation() {
    let ws = workspace();
    let profiles = p(&ws.root, "profiles.conf");
    fs::write(&profiles, "vague.mean = 5 0.5 0.12\nvague.spread = 0 0 0\n").unwrap();
    let out = ok(&["generate", "--n", "3", "--profiles", &profiles]);
    assert_eq!(out, "dd,dv,da,label\n5,0.5,0.12,vague\n5,0.5,0.12,vague\n5,0.5,0.12,vague\n");
}
