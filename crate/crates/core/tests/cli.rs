use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn heatbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatbath")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.ini");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const DEGENERATE: &str = "[qubit]\nomega = 1\n[bath]\nkind = degenerate\nn_tls = 50\nr = 0.25\nlambda0 = 0.05\nseed = 2\n[engine]\nt_max = 100\n";

#[test]
fn evolve_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), DEGENERATE);
    let out = tmp.path().join("run");
    let o = heatbath(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = fs::read_to_string(out.join("manifest.ini")).unwrap();
    assert!(manifest.contains("seed = 5"));
    assert!(manifest.contains("status = ok"));

    let series = out.join("series.csv");
    let o = heatbath(&["report", series.to_str().unwrap(), "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let l0: f64 = text.lines().find_map(|l| l.strip_prefix("lambda0 = ")).unwrap().parse().unwrap();
    assert!((l0 - 0.05).abs() < 1e-15, "{text}");
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "[qubit]\nomega = 1\nfrequency = 2\n");
    assert_eq!(heatbath(&["evolve", "--config", &bad]).status.code(), Some(1));
    let missing = tmp.path().join("absent.ini");
    assert_eq!(heatbath(&["evolve", "--config", missing.to_str().unwrap()]).status.code(), Some(3));

    let drift = format!("{DEGENERATE}dt = 2\nnorm_tolerance = 1e-15\n");
    let cfg = write_config(tmp.path(), &drift);
    let out = tmp.path().join("drift");
    let o = heatbath(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(out.join("series.csv").exists());
}

#[test]
fn circuit_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[qubit]\nomega = 0.05\n[circuit]\nL = 1\nC = 100\nCg = 1\nN = 200\ntermination = short\n\
         [output]\nimpedance_omega_min = 0.001\nimpedance_omega_max = 0.3\nimpedance_points = 500\ndispersion_modes = 200\n",
    );
    let out = tmp.path().join("circuit");
    for cmd in ["impedance", "dispersion"] {
        let o = heatbath(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read_to_string(out.join("impedance.csv")).unwrap().lines().count(), 501);
    assert_eq!(fs::read_to_string(out.join("dispersion.csv")).unwrap().lines().count(), 201);
}

#[test]
fn sweep_is_independent_of_jobs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), DEGENERATE);
    let mut summaries = Vec::new();
    for jobs in ["1", "2"] {
        let out = tmp.path().join(format!("jobs{jobs}"));
        let o = heatbath(&[
            "sweep",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--param",
            "bath.r",
            "--values",
            "0,0.25",
            "--jobs",
            jobs,
        ]);
        assert_eq!(o.status.code(), Some(0));
        summaries.push(fs::read(out.join("summary.csv")).unwrap());
        summaries.push(fs::read(out.join("002_0.25").join("series.csv")).unwrap());
    }
    assert_eq!(summaries[0], summaries[2]);
    assert_eq!(summaries[1], summaries[3]);
}
