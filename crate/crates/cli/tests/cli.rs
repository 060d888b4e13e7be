//! End-to-end runs of the `consensus-cake` binary: exit codes, stdout
//! bytes, and the divide → verify → render pipeline over real files.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use consensus_cake_cli::format::parse_report_file;

const BIN: &str = env!("CARGO_BIN_EXE_consensus-cake");

const INTERVAL: &str = r#"
format = 1

[cake]
vertices = ["l", "r"]

[[cake.edges]]
id = "e1"
u = "l"
v = "r"

[valuations.a]
e1 = [{ lo = 0.0, hi = 1.0, density = 1.0 }]

[valuations.b]
e1 = [{ lo = 0.35, hi = 0.45, density = 10.0 }]

[entitlement]
t = 0.3
"#;

const CIRCLE: &str = r#"
format = 1

[cake]
vertices = ["o"]

[[cake.edges]]
id = "loop"
u = "o"
v = "o"

[valuations.a]
loop = [{ lo = 0.0, hi = 1.0, density = 1.0 }]

[valuations.b]
loop = [{ lo = 0.0, hi = 1.0, density = 1.0 }]

[entitlement]
t = 0.25
"#;

fn dir() -> PathBuf {
    let d = std::env::temp_dir().join(format!("consensus-cake-it-{}", std::process::id()));
    fs::create_dir_all(&d).unwrap();
    d
}

fn fixture(name: &str, contents: &str) -> PathBuf {
    let path = dir().join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn divide_succeeds_and_prints_the_report() {
    let cake = fixture("interval.toml", INTERVAL);
    let out = run(&["divide", "--cake", cake.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = parse_report_file(&stdout(&out)).unwrap();
    assert_eq!(report.class, "interval");
    assert!(report.residuals.a <= 1e-9 && report.residuals.b <= 1e-9);
}

#[test]
fn uniform_circle_gets_an_arc_of_length_t() {
    let cake = fixture("circle.toml", CIRCLE);
    let out = run(&["divide", "--cake", cake.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = parse_report_file(&stdout(&out)).unwrap();
    assert_eq!(report.class, "circle");
    assert_eq!((report.pieces.a, report.pieces.b), (1, 1));
    let arc: f64 = report.division.a.iter().map(|p| p.hi - p.lo).sum();
    assert!((arc - 0.25).abs() <= 1e-9, "arc = {arc}");
}

#[test]
fn malformed_input_exits_one_citing_the_edge() {
    let broken = INTERVAL.replace("v = \"r\"", "v = \"missing\"");
    let cake = fixture("broken.toml", &broken);
    let out = run(&["divide", "--cake", cake.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("e1"), "{err}");
    assert!(err.contains("missing"), "{err}");
}

#[test]
fn exhausted_resolution_exits_two() {
    let cake = fixture("hard.toml", INTERVAL);
    let out = Command::new(BIN)
        .args(["divide", "--cake", cake.to_str().unwrap()])
        .env("CONSENSUS_CAKE_NMAX", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn garbage_nmax_exits_one() {
    let cake = fixture("nmax.toml", INTERVAL);
    let out = Command::new(BIN)
        .args(["divide", "--cake", cake.to_str().unwrap()])
        .env("CONSENSUS_CAKE_NMAX", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("CONSENSUS_CAKE_NMAX"));
}

#[test]
fn divide_verify_render_pipeline_is_deterministic() {
    let cake = fixture("pipeline.toml", INTERVAL);
    let report = dir().join("pipeline-report.toml");
    let c = cake.to_str().unwrap();
    let r = report.to_str().unwrap();

    let first = run(&["divide", "--cake", c, "--out", r]);
    assert!(first.status.success());
    let report_bytes = fs::read(&report).unwrap();
    assert_eq!(report_bytes, first.stdout, "--out mirrors stdout");

    let second = run(&["divide", "--cake", c]);
    assert_eq!(first.stdout, second.stdout, "byte-identical reruns");

    let verify = run(&["verify", "--cake", c, "--report", r]);
    assert!(verify.status.success(), "{}", stdout(&verify));
    assert_eq!(stdout(&verify).trim(), "verify: pass");

    let svg1 = dir().join("pipeline-1.svg");
    let svg2 = dir().join("pipeline-2.svg");
    for (svg, path) in [(&svg1, "pipeline-1.svg"), (&svg2, "pipeline-2.svg")] {
        let out = run(&["render", "--cake", c, "--report", r, "--out", svg.to_str().unwrap()]);
        assert!(out.status.success(), "render {path} failed");
    }
    assert_eq!(fs::read(&svg1).unwrap(), fs::read(&svg2).unwrap());
}

#[test]
fn tampered_report_fails_verification_with_exit_one() {
    let cake = fixture("tamper.toml", INTERVAL);
    let report_path = dir().join("tamper-report.toml");
    let c = cake.to_str().unwrap();
    let r = report_path.to_str().unwrap();
    assert!(run(&["divide", "--cake", c, "--out", r]).status.success());

    let mut report = parse_report_file(&fs::read_to_string(&report_path).unwrap()).unwrap();
    report.pieces.b += 1;
    fs::write(&report_path, report.to_toml().unwrap()).unwrap();

    let verify = run(&["verify", "--cake", c, "--report", r]);
    assert_eq!(verify.status.code(), Some(1));
    let text = stdout(&verify);
    assert!(text.contains("verify: fail"), "{text}");
    assert!(text.contains("pieces"), "{text}");
}

#[test]
fn batch_writes_csv_with_one_row_per_instance() {
    let csv = dir().join("batch.csv");
    let out = run(&[
        "batch",
        "--class",
        "tree",
        "--count",
        "4",
        "--seed",
        "11",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5, "header + 4 rows:\n{text}");
    assert!(lines[0].starts_with("seed,class,"));
    for (i, row) in lines[1..].iter().enumerate() {
        assert!(row.starts_with(&format!("{},tree,", 11 + i as u64)), "{row}");
        assert!(row.ends_with(",ok"), "{row}");
    }
}

#[test]
fn shipped_fixtures_divide_and_verify() {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut seen = 0;
    for entry in fs::read_dir(&fixtures).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        seen += 1;
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let report = dir().join(format!("fixture-{name}-report.toml"));
        let text = consensus_cake_cli::commands::cmd_divide(&path, None, 1e-9, Some(&report))
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let parsed = parse_report_file(&text).unwrap();
        assert!(parsed.residuals.a <= 1e-9 && parsed.residuals.b <= 1e-9, "{name}");
        let mismatches = consensus_cake_cli::commands::cmd_verify(&path, &report).unwrap();
        assert!(mismatches.is_empty(), "{name}: {mismatches:?}");
    }
    assert!(seen >= 5, "expected the shipped fixtures, found {seen}");
}

#[test]
fn metrics_prints_class_and_bound() {
    let cake = fixture("metrics.toml", CIRCLE);
    let out = run(&["metrics", "--cake", cake.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("class = \"circle\""), "{text}");
    assert!(text.contains("bound = 1"), "{text}");
}
