use std::path::Path;
use std::process::{Command, Output};

fn degjc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degjc"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

#[test]
fn envelope_to_stdout_has_metadata_and_rows() {
    let o = degjc(&["envelope", "--steps", "4"]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("# generator: degjc "));
    assert!(csv.contains("# config.beta: 0.75,0.1"));
    assert!(csv.contains("\nbeta,omega_t,envelope\n"));
    assert_eq!(data_rows(&csv).len(), 10);
    // Effective config is echoed on stderr.
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("scenario = envelope"));
}

#[test]
fn omega_adds_time_column() {
    let o = degjc(&["envelope", "--steps", "2", "--omega", "2", "--beta", "0"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("\nbeta,omega_t,t,envelope\n"));
    let last = data_rows(&csv).pop().unwrap().to_string();
    let cells: Vec<f64> = last.split(',').map(|c| c.parse().unwrap()).collect();
    assert!((cells[2] - cells[1] / 2.0).abs() < 1e-15);
    assert_eq!(cells[3], 1.0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# sweep\nbeta = 0.1\nsteps = 3\nfield = number:n=1\n").unwrap();
    let o = degjc(&[
        "concurrence-sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--beta",
        "0.5",
    ]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("# config.beta: 0.5\n"));
    assert!(csv.contains("# config.field: number:n=1\n"));
    assert_eq!(data_rows(&csv).len(), 4);
}

#[test]
fn sweep_with_oracle_reports_truncation() {
    let o = degjc(&[
        "concurrence-sweep",
        "--field",
        "coherent:alpha=1,0.5",
        "--compare-oracle",
        "--steps",
        "8",
    ]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("# truncation_policy: "));
    assert!(csv.contains("# oracle[beta=0.5,field=coherent:alpha=1,0.5]: ncut="));
    assert!(csv.contains("oracle_concurrence,abs_error"));
}

#[test]
fn quasi_degenerate_sweep_is_oracle_only() {
    let o = degjc(&[
        "concurrence-sweep",
        "--omega0",
        "0.5",
        "--beta",
        "0.3",
        "--steps",
        "4",
    ]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("\nbeta,field,omega_t,oracle_concurrence\n"));
    // Closed-form-only scenarios refuse.
    assert_eq!(code(&degjc(&["envelope", "--omega0", "0.5"])), 2);
}

#[test]
fn esd_reports_interval() {
    let o = degjc(&[
        "esd",
        "--beta",
        "0.5",
        "--field",
        "thermal:nbar=2",
        "--steps",
        "16",
    ]);
    assert_eq!(code(&o), 0);
    let csv = String::from_utf8(o.stdout).unwrap();
    let line = csv
        .lines()
        .find(|l| l.starts_with("# esd_interval["))
        .unwrap();
    assert!(!line.ends_with("none"));
    let o = degjc(&[
        "esd",
        "--beta",
        "0.1",
        "--field",
        "thermal:nbar=2",
        "--steps",
        "16",
    ]);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("# esd_interval[beta=0.1,nbar=2]: none"));
    // Revival of the mixture's initial concurrence.
    let last = data_rows(&csv).pop().unwrap().to_string();
    let closed: f64 = last.split(',').nth(3).unwrap().parse().unwrap();
    assert!((closed - 0.5).abs() < 1e-12);
}

#[test]
fn separability_rejects_mixed_fields() {
    let o = degjc(&["separability", "--field", "thermal:nbar=1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_config_exits_2() {
    assert_eq!(code(&degjc(&["envelope", "--steps", "1"])), 2);
    assert_eq!(code(&degjc(&["envelope", "--tolerance", "0"])), 2);
    assert_eq!(
        code(&degjc(&["concurrence-sweep", "--field", "squeezed:r=1"])),
        2
    );
    assert_eq!(code(&degjc(&["concurrence-sweep", "--bell", "ghz"])), 2);
    assert_eq!(code(&degjc(&["nonsense"])), 2);
    assert_eq!(
        code(&degjc(&["envelope", "--config", "/nonexistent/run.cfg"])),
        2
    );
}

#[test]
fn unwritable_output_exits_2() {
    let o = degjc(&["envelope", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn truncation_failure_exits_3() {
    let o = degjc(&[
        "validate",
        "--ncut",
        "2",
        "--field",
        "coherent:alpha=3,0",
        "--beta",
        "0.5",
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stderr)
        .unwrap()
        .contains("truncation failure"));
}

#[test]
fn impossible_tolerance_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let o = degjc(&[
        "validate",
        "--beta",
        "0.5",
        "--field",
        "vacuum",
        "--tolerance",
        "1e-16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.contains(",false\n"));
}

#[test]
fn default_validation_passes() {
    let o = degjc(&["validate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.contains("# failed: 0\n"));
    assert!(!csv.contains(",false\n"));
}

#[test]
fn plot_script_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env.csv");
    let script = dir.path().join("env.gp");
    let o = degjc(&[
        "envelope",
        "--steps",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--plot-script",
        script.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let s = std::fs::read_to_string(&script).unwrap();
    assert!(s.contains(&format!("plot '{}'", Path::new(&out).display())));
}
