use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn moran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moran"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn spectrum_prints_one_element_per_line() {
    let out = moran(&["spectrum", &corpus("four_four.json"), "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "0\n2\n8\n10\n");
}

#[test]
fn spectrum_output_checks_as_spectrum() {
    for (system, level) in [
        ("four_four.json", "2"),
        ("four_six.json", "2"),
        ("periodic_mixed.json", "3"),
    ] {
        let out = moran(&["spectrum", &corpus(system), "--level", level]);
        let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{system}.{level}.txt"));
        std::fs::write(&path, &out.stdout).unwrap();
        let check = moran(&[
            "check-spectrum",
            &corpus(system),
            "--level",
            level,
            "--lambda",
            path.to_str().unwrap(),
        ]);
        assert_eq!(check.status.code(), Some(0));
        assert!(
            stdout(&check).starts_with("Spectrum\n"),
            "{system}: {}",
            stdout(&check)
        );
    }
}

#[test]
fn check_spectrum_reports_cardinality() {
    let out = moran(&[
        "check-spectrum",
        &corpus("four_four.json"),
        "--level",
        "2",
        "--lambda",
        &corpus("four_four_partial.txt"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "CardinalityFail found=3 expected=4\natoms 4\n"
    );
}

#[test]
fn analyze_periodic_closed_forms() {
    let out = moran(&["analyze", &corpus("periodic.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("convergence  Convergent\n"));
    assert!(text.contains("sum          2/3 (exact)\n"));
    assert!(text.contains("diameter     1/3\n"));
    assert!(text.contains("spectrality  Spectral\n"));
}

#[test]
fn not_spectral_is_a_verdict() {
    let out = moran(&["spectrum", &corpus("not_spectral.json"), "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "NotSpectral(2)\n");
    let out = moran(&["search", &corpus("not_spectral.json"), "--level", "2"]);
    assert_eq!(stdout(&out), "NONE\n");
    let out = moran(&["fuglede", &corpus("not_spectral.json"), "--level", "2"]);
    assert!(stdout(&out).contains("NotSpectral(2)"));
}

#[test]
fn qgrid_csv_shape() {
    let out = moran(&[
        "qgrid",
        &corpus("four_four.json"),
        "--level",
        "2",
        "--lambda",
        &corpus("four_four_spectrum.txt"),
        "--from",
        "0",
        "--to",
        "1",
        "--step",
        "1/1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi,Q"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1001);
    assert!(rows[1].starts_with("1/1000,"));
    for row in rows {
        let q: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((q - 1.0).abs() <= 1e-9, "{row}");
    }
}

#[test]
fn tile_verdicts_and_exit_codes() {
    let out = moran(&["tile", &corpus("digits_0189.txt")]);
    assert_eq!(
        (out.status.code(), stdout(&out).as_str()),
        (Some(0), "TILE m=16 complement=0,2,4,6\n")
    );
    let out = moran(&["tile", &corpus("digits_0134.txt")]);
    assert_eq!(
        (out.status.code(), stdout(&out).as_str()),
        (Some(0), "NOTTILE T1 A(1)=4 prod=2\n")
    );
    let out = moran(&["tile", &corpus("digits_013467.txt")]);
    assert!(stdout(&out).starts_with("NOTTILE TIJDEMAN"));
    let out = moran(&["tile", &corpus("digits_0189.txt"), "--max-period", "12"]);
    assert_eq!(
        (out.status.code(), stdout(&out).as_str()),
        (Some(2), "UNKNOWN m_max=12\n")
    );
}

#[test]
fn tijdeman_dilation() {
    let out = moran(&[
        "tijdeman",
        "--a",
        &corpus("digits_0189.txt"),
        "--b",
        &corpus("complement_0246.txt"),
        "--period",
        "16",
        "--r",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "TILE m=16 rA=0,3,8,11 B=0,2,4,6\n");
    let out = moran(&[
        "tijdeman",
        "--a",
        &corpus("digits_0189.txt"),
        "--b",
        &corpus("complement_0246.txt"),
        "--period",
        "16",
        "--r",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn decompose_worked_trace() {
    let out = moran(&[
        "decompose",
        &corpus("four_four.json"),
        "--level",
        "2",
        "--split",
        "1",
        "--lambda",
        &corpus("four_four_spectrum.txt"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "head 0,2\npart 0 0,8\npart 2 2,10\nVERIFIED\n"
    );
}

#[test]
fn complement_and_fuglede() {
    let out = moran(&["complement", &corpus("four_six.json"), "--level", "2"]);
    let text = stdout(&out);
    assert!(
        text.contains("L 18\n") && text.contains("uniform true\n"),
        "{text}"
    );
    let out = moran(&[
        "fuglede",
        &corpus("four_six.json"),
        "--level",
        "2",
        "--json",
    ]);
    let text = stdout(&out);
    assert!(text.contains("\"kolmogorov_distance\": \"1/18\""), "{text}");
    assert!(text.contains("\"3/4\""));
}

#[test]
fn input_errors_exit_one() {
    let out = moran(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = moran(&["spectrum", &corpus("four_four.json")]);
    assert_eq!(out.status.code(), Some(1));
    let out = moran(&["spectrum", &corpus("missing.json"), "--level", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = moran(&[
        "spectrum",
        &corpus("four_four_spectrum.txt"),
        "--level",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = moran(&["spectrum", &corpus("four_four.json"), "--level", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_budget_exits_two() {
    let out = moran(&[
        "search",
        &corpus("four_four.json"),
        "--level",
        "2",
        "--budget",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}
