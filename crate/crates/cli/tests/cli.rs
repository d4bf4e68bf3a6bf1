use std::path::Path;
use std::process::{Command, Output};

fn ptvec(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptvec"))
        .args(args)
        .current_dir(dir)
        .env_remove("PTVEC_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn zero_coupling_sweep_lists_unperturbed_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptvec(&["e3-sweep", "--m", "0", "--g-min", "0", "--g-max", "0", "--steps", "1"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "g,index,re_lambda,im_lambda,is_complex_pair");
    let re: Vec<f64> = csv_rows(&text).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(re.len(), 12);
    for (k, v) in re.iter().enumerate() {
        assert_eq!(*v, (k * (k + 1)) as f64);
    }
}

#[test]
fn sweep_files_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| {
        vec!["e3-sweep", "--m", "1", "--g-min", "0", "--g-max", "20", "--steps", "41", "--trunc", "60", "--out", out]
    };
    assert_eq!(code(&ptvec(&args("a.csv"), dir.path())), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_ptvec"))
        .args(args("b.csv"))
        .current_dir(dir.path())
        .env("PTVEC_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.meta.json"), read("b.meta.json"));

    let meta: serde_json::Value = serde_json::from_slice(&read("a.meta.json")).unwrap();
    assert_eq!(meta["m"], 1);
    assert_eq!(meta["grid"].as_array().unwrap().len(), 41);
    assert_eq!(meta["provenance"]["trunc"], 60);
    // first complex pair for m = 1 appears between 5.0 and 5.5
    let t = &meta["transitions"][0];
    assert_eq!((t["lower"].as_f64().unwrap(), t["upper"].as_f64().unwrap()), (5.0, 5.5));

    // rows sorted by (g, index)
    let text = String::from_utf8(read("a.csv")).unwrap();
    let keys: Vec<(f64, usize)> = csv_rows(&text)
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn json_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptvec(
        &["e3-sweep", "--m", "0", "--g-min", "1", "--g-max", "3", "--steps", "3", "--trunc", "40", "--format", "json", "--out", "s.json"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert_eq!(v["points"][0]["n_complex_pairs"], 0);
    assert_eq!(v["points"][2]["n_complex_pairs"], 1);
}

#[test]
fn critical_coupling_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptvec(&["e3-critical", "--m", "0", "--index", "1", "--bracket", "1:3", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["g_c"].as_f64().unwrap() - 1.899).abs() < 0.01);
    assert!(v["bracket_width"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["rerun"]["trunc"], 120);
    assert!(v["g_c_shift"].as_f64().unwrap() <= 1e-3);

    let o = ptvec(&["e3-critical", "--m", "0", "--index", "1", "--bracket", "1:3"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("g_c"));
}

#[test]
fn bracket_failure_has_its_own_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptvec(&["e3-critical", "--m", "0", "--index", "1", "--bracket", "0:1"], dir.path());
    assert_eq!(code(&o), 4);
    let o = ptvec(&["e3-critical", "--m", "0", "--index", "1", "--bracket", "1:3:4"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["e3-sweep", "--m", "0", "--g-min", "2", "--g-max", "1", "--steps", "5"],
        vec!["e3-sweep", "--m", "0", "--g-min", "0", "--g-max", "1", "--steps", "0"],
        vec!["e3-sweep", "--m", "0", "--g-min", "0", "--g-max", "1"],
        vec!["e3-sweep", "--m", "0", "--g-min", "0", "--g-max", "1", "--steps", "3", "--trunc", "1"],
        vec!["so3-sweep", "--ell", "1", "--b-range", "0:6"],
        vec!["so3-sweep", "--ell", "1", "--b-range", "0:6:10", "--c-mode", "fixed:abc"],
        vec!["we-verify", "--ells", "2,1"],
        vec!["we-verify", "--A", "1+2k"],
        vec!["we-verify", "--B", "i+"],
        vec!["no-such-command"],
    ] {
        let o = ptvec(&args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn so3_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptvec(&["so3-sweep", "--ell", "0", "--b-range", "0:0:1", "--c-mode", "equal"], dir.path());
    assert_eq!(code(&o), 0);
    let mut re: Vec<f64> = csv_rows(&stdout(&o)).iter().map(|r| r[4].parse().unwrap()).collect();
    re.sort_by(f64::total_cmp);
    assert_eq!(re, vec![0.0, 2.0, 2.0, 2.0]);

    let o = ptvec(&["so3-sweep", "--ell", "1", "--b-range", "0:100:10", "--c-mode", "negated"], dir.path());
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[6] == "true" && r[5].parse::<f64>().unwrap() == 0.0));

    let o = ptvec(
        &["so3-sweep", "--ell", "1", "--b-range", "0:6:121", "--out", "f2.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("f2.csv")).unwrap();
    let first_complex = |m: &str| -> f64 {
        csv_rows(&text)
            .iter()
            .find(|r| r[2] == m && r[6] == "false")
            .map(|r| r[0].parse().unwrap())
            .unwrap()
    };
    assert!((first_complex("0") - 12.0_f64.sqrt()).abs() < 0.05);
    assert!((first_complex("1") - 4.0).abs() < 0.051);
    // the uncoupled line at (ℓ+1)(ℓ+2) = 6
    assert!(csv_rows(&text).iter().filter(|r| r[3] == "top").all(|r| r[4].parse::<f64>().unwrap() == 6.0));
    assert!(dir.path().join("f2.meta.json").exists());
}

#[test]
fn operator_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = ptvec(&["we-verify", "--ells", "1,2", "--A", "2+3i", "--B", "1-1i", "--C", "0+5i"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("PASS"));

    let o = ptvec(&["we-verify", "--ells", "1", "--A", "1+0i"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).lines().any(|l| l.starts_with("P-odd") && l.ends_with("FAIL")));
    let o = ptvec(&["we-verify", "--ells", "1", "--A", "1+0i", "--require-pt"], dir.path());
    assert_eq!(code(&o), 3);

    let o = ptvec(&["we-verify", "--ells", "1,2", "--B", "2i", "--C", "-0.5i", "--require-pt"], dir.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = ptvec(&["we-verify", "--trials", "100", "--ells", "0,1,2"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("100/100 PASS"));
}

#[test]
fn config_presets_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "trunc = 30\n\n[e3-sweep]\nm = 1\ng-min = 0\ng-max = 0\nsteps = 1\nwindow = 4\n",
    )
    .unwrap();
    let o = ptvec(&["--config", "run.toml", "e3-sweep"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let re: Vec<f64> = csv_rows(&stdout(&o)).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(re, vec![2.0, 6.0, 12.0, 20.0]);

    let o = ptvec(&["e3-sweep", "--config=run.toml", "--m", "0", "--window", "3"], dir.path());
    assert_eq!(code(&o), 0);
    let re: Vec<f64> = csv_rows(&stdout(&o)).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(re, vec![0.0, 2.0, 6.0]);

    std::fs::write(dir.path().join("bad.toml"), "[e3-sweep]\nells = [1]\n").unwrap();
    assert_eq!(code(&ptvec(&["--config", "bad.toml", "e3-sweep"], dir.path())), 2);
    assert_eq!(code(&ptvec(&["--config", "missing.toml", "e3-sweep"], dir.path())), 2);
}

#[test]
fn closed_stdout_is_not_an_error() {
    use std::process::Stdio;
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_ptvec"))
        .args(["so3-sweep", "--ell", "10", "--b-range", "0:10:2000"])
        .current_dir(dir.path())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    assert_eq!(child.wait().unwrap().code(), Some(0));
}
