//! Command-line behavior: exit codes, config files and report determinism.

use std::process::Command;

fn qvacheck(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qvacheck")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn canonical(json: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(json).expect("json report");
    v.as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn passing_run_exits_zero() {
    let (code, out, _) = qvacheck(&["--gcm", "A2", "--level", "2", "--suite", "tau-tech0"]);
    assert_eq!(code, 0);
    let v = canonical(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["reports"][0]["pairs"].as_array().unwrap().len(), 4);
}

#[test]
fn reports_are_deterministic() {
    let args = ["--suite", "tau-group", "--suite", "bridge-vacom", "--hbar-order", "3", "--z-order", "6"];
    let (a, b) = (qvacheck(&args), qvacheck(&args));
    assert_eq!(a.0, 0);
    assert_eq!(canonical(&a.1), canonical(&b.1));
}

#[test]
fn invalid_configs_exit_two() {
    assert_eq!(qvacheck(&["--hbar-order", "1"]).0, 2);
    assert_eq!(qvacheck(&["--z-order", "3"]).0, 2);
    assert_eq!(qvacheck(&["--gcm", "[[2,-3],[-1,1]]"]).0, 2);
    assert_eq!(qvacheck(&["--suite", "nonsense"]).0, 2);
    assert_eq!(qvacheck(&["--gcm", "B2", "--suite", "classical-affine"]).0, 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("qvacheck-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    let out = dir.join("report.txt");
    std::fs::write(&cfg, r#"{"schema": 1, "gcm": "A1", "level": 1, "n_hbar": 1, "suites": ["tau-tech1"], "format": "text"}"#).unwrap();
    assert_eq!(qvacheck(&["--config", cfg.to_str().unwrap()]).0, 2);
    let (code, _, _) = qvacheck(&["--config", cfg.to_str().unwrap(), "--hbar-order", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("suite tau-tech1"));
    std::fs::remove_dir_all(&dir).ok();
}
