use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kvstring(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kvstring"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn decay_writes_documented_file_set() {
    let dir = tempfile::tempdir().unwrap();
    let o = kvstring(&["decay", "--n", "64", "--t-end", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["energy.csv", "decay_report.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let report = json(&dir.path().join("decay_report.json"));
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["report"]["verdict"], "PASS");
    let csv = fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert!(csv.starts_with("t,E,V,V_bound,sup_y\n"));
    assert_eq!(csv.lines().count(), 402);
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"], "decay");
    assert_eq!(manifest["config"]["grid"]["n"], 64);
}

#[test]
fn decay_above_critical_speed_is_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = kvstring(&["decay", "--v", "0.7", "--n", "32"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("critical speed"));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn identities_polybump_three_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = kvstring(&["identities", "--n", "128", "--profile", "polybump"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("identities.csv")).unwrap();
    let ns: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["128", "256", "512"]);
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "t_end = 1.0\n[params]\nv = 1.2\nb = 1.0\ndelta = 0.2\neta = 0.05\n").unwrap();
    let o = kvstring(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("params.v"));

    fs::write(&cfg, "t_end = 1.0\nspeed = 3\n").unwrap();
    let o = kvstring(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("speed"));
}

#[test]
fn flag_overrides_file_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "t_end = 0.5\n[params]\nv = 0.1\nb = 1.0\ndelta = 0.2\neta = 0.05\n[grid]\nn = 32\n").unwrap();
    let o = kvstring(&["simulate", "--config", cfg.to_str().unwrap(), "--v", "0.3"], dir.path());
    assert_eq!(code(&o), 0);
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["config"]["params"]["v"], 0.3);
}

#[test]
fn manifest_replay_is_byte_identical() {
    let first = tempfile::tempdir().unwrap();
    let o = kvstring(&["decay", "--n", "64", "--t-end", "3", "--scheme", "rk4"], first.path());
    assert_eq!(code(&o), 0);
    let second = tempfile::tempdir().unwrap();
    let manifest = first.path().join("manifest.json");
    let o = kvstring(&["decay", "--config", manifest.to_str().unwrap()], second.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["energy.csv", "decay_report.json"] {
        let a = fs::read(first.path().join(f)).unwrap();
        let b = fs::read(second.path().join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
    let mut m1 = json(&manifest);
    let mut m2 = json(&second.path().join("manifest.json"));
    m1["wall_clock_seconds"] = 0.into();
    m2["wall_clock_seconds"] = 0.into();
    assert_eq!(m1, m2);
}

#[test]
fn bibo_with_seeded_noise() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noise.toml");
    fs::write(
        &cfg,
        "t_end = 10.0\n[params]\nv = 0.2\nb = 1.0\ndelta = 0.5\neta = 0.1\n[grid]\nn = 64\n\
         [forcing]\nkind = \"bounded_noise\"\namplitude = 0.05\nseed = 42\n",
    )
    .unwrap();
    let o = kvstring(&["bibo", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("bibo_report.json"));
    let sup = r["report"]["sup_y_measured"].as_f64().unwrap();
    assert!(sup > 0.0 && sup <= r["report"]["bound"].as_f64().unwrap());
}

#[test]
fn sweep_reports_missing_bound_above_critical_speed() {
    let dir = tempfile::tempdir().unwrap();
    let o = kvstring(&["sweep", "--n", "32", "--t-end", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0].parse::<f64>().unwrap(), 0.7);
    assert_eq!(last[1], "");
    assert!(!last[2].is_empty());
    assert_eq!(last[4], "");
}

#[test]
fn converge_and_control_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = kvstring(&["converge", "--n", "128"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = kvstring(&["control", "--n", "64", "--t-end", "4", "--k-v", "0.8", "--tension", "nonlinear"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("control_report.json"));
    assert!(r["report"]["boundary_work"].as_f64().unwrap() < 0.0);
}

#[test]
fn undamped_passes_and_seed_without_noise_is_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = kvstring(&["undamped", "--n", "64", "--t-end", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = kvstring(&["simulate", "--seed", "3"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_kvstring")).arg("--help").output().unwrap();
    assert_eq!(code(&o), 0);
}
