use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Output};

fn nearhex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearhex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn build_reports_stats() {
    let o = nearhex(&["build", "hexagon", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for row in [
        "points,45",
        "lines,60",
        "diameter,3",
        "grid_quads,15",
        "doily_quads,3",
    ] {
        assert!(text.lines().any(|l| l == row), "{row} missing from\n{text}");
    }
    let o = nearhex(&["build", "doily"]);
    assert!(stdout(&o).contains("| gq_order | 2 2 |"));
    let o = nearhex(&["build", "subhex", "--grid", "0", "--format", "csv"]);
    assert!(stdout(&o).contains("points,27\nlines,27\n"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nearhex(&["build", "fano"]).status.code(), Some(2));
    assert_eq!(
        nearhex(&["build", "subhex", "--grid", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nearhex(&["hyperplanes", "doily", "--method", "guess"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nearhex(&["classify", "grid"]).status.code(), Some(2));
    assert_eq!(nearhex(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn hyperplane_lists() {
    let o = nearhex(&["hyperplanes", "grid", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 16);

    let o = nearhex(&["hyperplanes", "doily", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 31);

    let o = nearhex(&[
        "hyperplanes",
        "hexagon",
        "--method",
        "both",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("code and search agree"));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 1023);
    let types: BTreeSet<&str> = recs.iter().map(|r| r["type"].as_str().unwrap()).collect();
    assert_eq!(types.len(), 8);
}

#[test]
fn output_is_independent_of_threads() {
    let a = nearhex(&[
        "hyperplanes",
        "hexagon",
        "--method",
        "code",
        "--format",
        "json",
    ]);
    let b = nearhex(&[
        "--threads",
        "3",
        "hyperplanes",
        "hexagon",
        "--method",
        "code",
        "--format",
        "json",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let a = nearhex(&["veldkamp", "doily", "--lines", "--format", "csv"]);
    let b = nearhex(&[
        "--threads",
        "4",
        "veldkamp",
        "doily",
        "--lines",
        "--format",
        "csv",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 156);
}

#[test]
fn classify_reproduces_type_table() {
    let o = nearhex(&["classify", "hexagon", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let cd: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(cd, ["30", "45", "18", "270", "90", "120", "360", "90"]);
    assert!(text.contains("H3,25,20,0,10,0,10,5,0,15,0,0,1,0,2,0,18"));

    let o = nearhex(&["classify", "doily", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "Kind,Size,Count\ngrid,9,10\nperp,7,15\novoid,5,6\n"
    );
}

#[test]
fn classify_flags_a_corrupted_cell() {
    let path = fixture("corrupted_expected.toml");
    let o = nearhex(&["classify", "hexagon", "--expected", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("table2.H4.cd"));
}

#[test]
fn veldkamp_tables() {
    let o = nearhex(&["veldkamp", "doily", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "Type,Core,Perps,Ovoids,Grids,Count\n\
         I,Pentad,1,0,2,45\n\
         II,Collinear Triple,3,0,0,15\n\
         III,Tricentric Triad,3,0,0,20\n\
         IV,Unicentric Triad,1,1,1,60\n\
         V,Single Point,1,2,0,15\n"
    );
    let o = nearhex(&["veldkamp", "doily", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["points"], 31);
    assert_eq!(v["lines"], 155);
    assert_eq!(v["line_types"]["IV"], 60);
    assert_eq!(v["lines_sample"].as_array().unwrap().len(), 10);

    let o = nearhex(&["veldkamp", "hexagon", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        (v["points"].as_u64(), v["lines"].as_u64()),
        (Some(1023), Some(174251))
    );
    assert!(v.get("line_types").is_none());

    let o = nearhex(&["veldkamp", "subhex", "--grid", "3", "--format", "csv"]);
    assert_eq!(stdout(&o), "points,lines\n255,10795\n");
}

#[test]
fn dot_export() {
    let dir = std::env::temp_dir().join(format!("nearhex-dot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("grid.dot");
    let o = nearhex(&["dot", "grid", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("graph grid {"));
    assert_eq!(text.matches(" -- ").count(), 18);
    let o = nearhex(&["dot", "line3", "--incidence"]);
    assert_eq!(stdout(&o).matches(" -- ").count(), 3);
    std::fs::remove_dir_all(dir).unwrap();
}

fn failing_checks(o: &Output) -> BTreeSet<String> {
    let v: serde_json::Value = serde_json::from_str(&stdout(o)).unwrap();
    v.as_array()
        .unwrap()
        .iter()
        .filter(|r| r["passed"] == false)
        .map(|r| r["name"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn check_names_failures() {
    let o = nearhex(&["check", "--quick", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let known: BTreeSet<String> = [
        "identity.has_singular_doily_quad",
        "h1_complement.two_k33_components",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(failing_checks(&o), known);

    let path = fixture("corrupted_expected.toml");
    let o = nearhex(&["check", "--quick", "--format", "json", "--expected", &path]);
    assert_eq!(o.status.code(), Some(1));
    let mut with_tamper = known.clone();
    with_tamper.insert("table2.H4.cd".into());
    assert_eq!(failing_checks(&o), with_tamper);
    assert!(stderr(&o).contains("FAIL table2.H4.cd"));
}

#[test]
fn check_payload_is_deterministic() {
    let a = nearhex(&["check", "--quick", "--format", "json"]);
    let b = nearhex(&["--threads", "2", "check", "--quick", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_expected_is_a_usage_error() {
    let dir = std::env::temp_dir().join(format!("nearhex-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.toml");
    std::fs::write(&file, "hexagon = 1\n").unwrap();
    let o = nearhex(&["check", "--quick", "--expected", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(dir).unwrap();
}
