use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semiperiodic"))
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const QUICK: &str = "kind: rescaling-identity\nm: 1\nn: 1\np: 4\nscales: [2]\nseed: 1\n";

#[test]
fn table_prints_thresholds() {
    let out = bin().args(["table", "--m", "1", "--n", "1", "--p", "4", "--q", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("m=1 n=1 p=4 q=2 r=4"));
    assert!(text.lines().count() > 3);
    assert!(text.contains("1/4"));
}

#[test]
fn bad_exponent_is_a_config_error() {
    let out = bin().args(["table", "--m", "1", "--n", "1", "--p", "0.5", "--q", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_key_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.yaml", &format!("{QUICK}colour: blue\n"));
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn run_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = format!(
        "{QUICK}output:\n  report: {}\n  csv: {}\n  plot: {}\n",
        d.join("r/report.json").display(),
        d.join("r/norms.csv").display(),
        d.join("r/plot.svg").display()
    );
    let cfg = write(d, "ok.yaml", &text);
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS"));
    let csv = std::fs::read_to_string(d.join("r/norms.csv")).unwrap();
    assert!(csv.starts_with("experiment,scale,norm,p,q,r,alpha,value"));
    assert!(std::fs::read_to_string(d.join("r/plot.svg")).unwrap().starts_with("<svg"));

    let svg = d.join("again.svg");
    let out = bin().arg("plot").arg(d.join("r/report.json")).arg("--out").arg(&svg).output().unwrap();
    assert!(out.status.success());
    assert!(svg.exists());
}

#[test]
fn suite_validates_before_running() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.yaml", QUICK);
    write(dir.path(), "b.yaml", "kind: nonsense\n");
    let out = bin().arg("suite").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("PASS"));
}

#[test]
fn failing_criterion_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // a tolerance this tight cannot be met by a fitted dispersion slope
    let cfg = write(
        dir.path(),
        "tight.yaml",
        "kind: dispersion-torus\nm: 1\nn: 1\nscales: [0.125, 0.0625, 0.03125, 0.015625]\neps0: 0.25\ntolerance: 1.0e-9\n",
    );
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}
