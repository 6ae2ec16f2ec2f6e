use std::path::Path;
use std::process::{Command, Output};

fn qbrown(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbrown")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const HIGH_FRICTION: &str = "scenario = free-high-friction\ntime.per_decade = 5\n";

#[test]
fn config_error_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.conf", "scenario = harmonic\nparams.mass = -1\n");
    let out = qbrown(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn missing_file_exits_1() {
    let out = qbrown(&["run", "/nonexistent/qbrown.conf"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn successful_run_writes_manifest_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "hf.conf", HIGH_FRICTION);
    let out_dir = dir.path().join("out");
    let out = qbrown(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(out_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("scenario = free-high-friction\n"));
    assert!(manifest.contains("time.per_decade = 5\n"));
    assert!(manifest.contains("# default"));
    assert!(manifest.contains("scales.t_c = "));
    let csv = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.split(',').all(|h| h.contains(" [") && h.ends_with(']')), "{header}");
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "hf.conf", HIGH_FRICTION);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(qbrown(&["run", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(qbrown(&["run", &cfg, "--out", b.to_str().unwrap(), "--jobs", "3"]).status.success());
    for file in ["trajectory.csv", "surface.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert!(x == y, "{file} differs between runs");
    }
}

#[test]
fn dispersion_compare_orderings_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cmp.conf", "scenario = dispersion-compare\ntime.points = 20\n");
    let out_dir = dir.path().join("out");
    let out = qbrown(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS ordering"), "{stdout}");
    assert!(!stdout.contains("FAIL"), "{stdout}");
}

#[test]
fn equilibrium_writes_three_densities() {
    let dir = tempfile::tempdir().unwrap();
    let text = "scenario = equilibrium\nequilibrium.potential = harmonic\ngrid.n = 161\n";
    let cfg = write_config(dir.path(), "eq.conf", text);
    let out_dir = dir.path().join("out");
    let out = qbrown(&["run", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(out_dir.join("density_equilibrium.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["rho_imaginary_time", "rho_eigen", "rho_semiclassical"] {
        assert!(header.contains(col), "{header}");
    }
    assert_eq!(csv.lines().count(), 162);
}

#[test]
fn scales_prints_derived_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "h.conf", "scenario = harmonic\n");
    let out = qbrown(&["scales", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    for key in ["lambda_t = ", "diffusion = ", "t_c = ", "tau_m = "] {
        assert!(stdout.contains(key), "{stdout}");
    }
}

#[test]
fn zero_jobs_is_rejected() {
    let out = qbrown(&["accept", "--jobs", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
