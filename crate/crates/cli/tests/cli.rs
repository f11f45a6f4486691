use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_resqfi");

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("resqfi-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.current_dir(dir).args(args).env_remove("RESQFI_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.conf");
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn golden(dir: &Path) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(dir)
}

#[test]
fn golden_files_reproduce() {
    for (cmd, file) in [("dynamics", "dynamics.csv"), ("spectrum", "spectrum.csv")] {
        let dir = scratch(cmd);
        let conf = golden(Path::new(&format!("{cmd}.conf")));
        let out = run(&dir, &[cmd, "--config", conf.to_str().unwrap()], &[]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let got = fs::read_to_string(dir.join("out").join(file)).unwrap();
        let want = fs::read_to_string(golden(Path::new(file))).unwrap();
        assert_eq!(got, want, "{file} drifted from the golden copy");
    }
}

#[test]
fn output_independent_of_thread_count() {
    let dir = scratch("threads");
    let conf = write_config(
        &dir,
        "reservoir.eta = 0.4\nreservoir.omega_c = 4.5\nreservoir.s = 0.5\nstate.nbar = 10\nstate.beta = 0.5\n\
         estimation.theta = omega_c\ntime.t_max = 10\ntime.steps = 50\n",
    );
    let mut files = Vec::new();
    for n in ["1", "4"] {
        let out_dir = dir.join(format!("t{n}"));
        let out = run(&dir, &["qfi", "--config", &conf, "--out", out_dir.to_str().unwrap()], &[("RESQFI_THREADS", n)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(out_dir.join("qfi_time.csv")).unwrap();
        // The header records the output directory, which differs by design.
        files.push(text.lines().filter(|l| !l.starts_with("# config output.dir")).collect::<Vec<_>>().join("\n"));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn every_file_starts_with_header() {
    let dir = scratch("header");
    let conf = write_config(&dir, "state.alpha = 1\nstate.r = 0.5\ntime.t_max = 2\ntime.steps = 20\n");
    let out = run(&dir, &["dynamics", "--config", &conf, "--svg"], &[]);
    assert!(out.status.success());
    for f in ["dynamics.csv", "wigner.csv"] {
        let text = fs::read_to_string(dir.join("out").join(f)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# format-version 1"));
        assert_eq!(lines.next(), Some("# command dynamics"));
        assert!(text.contains("# config state.r=0.5"));
        assert!(text.contains("# config reservoir.eta=0.4"));
    }
    assert!(dir.join("out/dynamics.svg").exists());
}

#[test]
fn decoupled_probe_keeps_unit_population() {
    let dir = scratch("eta0");
    let conf = write_config(&dir, "reservoir.eta = 0\nstate.nbar = 1\nstate.beta = 0.5\ntime.t_max = 5\ntime.steps = 50\n");
    let out = run(&dir, &["dynamics", "--config", &conf], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("out/dynamics.csv")).unwrap();
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = rows.next().unwrap().split(',').collect();
    let col = header.iter().position(|c| *c == "abs_u2").unwrap();
    let mut n = 0;
    for row in rows {
        let v: f64 = row.split(',').nth(col).unwrap().parse().unwrap();
        assert!((v - 1.0).abs() <= 1e-12, "{row}");
        n += 1;
    }
    assert_eq!(n, 51);
}

#[test]
fn measure_rejects_undisplaced_state() {
    let dir = scratch("alpha0");
    let conf = write_config(&dir, "state.alpha = 0\nstate.r = 1\n");
    let out = run(&dir, &["measure", "--config", &conf], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("alpha = 0"), "{err}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = scratch("badkey");
    for text in ["reservoir.etaa = 1\n", "state.alpha = 1\nstate.nbar = 2\n", "reservoir.eta = -1\n"] {
        let conf = write_config(&dir, text);
        let out = run(&dir, &["dynamics", "--config", &conf], &[]);
        assert_eq!(out.status.code(), Some(2), "{text}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(&dir, &["dynamics", "--config", "/nonexistent/run.conf"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_report_schema() {
    let dir = scratch("verify");
    let out = run(&dir, &["verify", "--level", "quick", "--out", "rep"], &[]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("rep/verify.json")).unwrap()).unwrap();
    assert_eq!(report["format_version"], "1");
    assert_eq!(report["level"], "quick");
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 12);
    for c in checks {
        for key in ["id", "title", "passed", "measured", "tolerance", "detail", "seconds"] {
            assert!(c.get(key).is_some(), "missing {key} in {c}");
        }
    }
    assert!(checks.iter().all(|c| c["id"] != "c11_fock_oracle"));
}
