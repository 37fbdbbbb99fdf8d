use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_artin")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn iso_prints_mapping() {
    let o = run(&["iso", &data("g333.graph"), &data("g333_renamed.graph")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("a->x b->y c->z"), "{}", stdout(&o));
    let o = run(&["iso", &data("g333.graph"), &data("g345.graph")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn out_group_of_g345() {
    let o = run(&["out-group", &data("g345.graph"), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 2);
    assert_eq!(v["table"], serde_json::json!([[0, 1], [1, 0]]));
    let o = run(&["aut-gamma", &data("g333.graph")]);
    assert!(stdout(&o).starts_with("order 6\n"));
}

#[test]
fn verify_small_ball() {
    let o = run(&["verify", &data("g333.graph"), "--radius", "4"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", &data("g345.graph"), "--radius", "3", "--format", "json", "--seed", "9"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ball.json");
    let o = run(&["ball", &data("g345.graph"), "--radius", "2", "--format", "json", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).take(6).collect();
    assert_eq!(keys, ["vertices", "edges", "triangles", "center", "radius", "safe_radius"]);
}

#[test]
fn word_commands() {
    let g = data("g333.graph");
    let o = run(&["word", "equal", &g, "a b a", "b a b"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("braid ab"));
    assert_eq!(code(&run(&["word", "equal", &g, "a b", "b a"])), 1);
    let starved = run(&["word", "equal", &g, "a b a c", "b a b c", "--max-len", "1", "--max-states", "1"]);
    assert_eq!(code(&starved), 3);
    assert_eq!(stdout(&run(&["word", "height", &g, "a b^-1 c c"])), "2\n");
    assert_eq!(stdout(&run(&["word", "reduce", &g, "a b a b^-1 a^-1"])), "b\n");
}

#[test]
fn invalid_input_exit_code() {
    assert_eq!(code(&run(&["iso", "no/such/file", &data("g333.graph")])), 2);
    assert_eq!(code(&run(&["word", "height", &data("g333.graph"), "a q"])), 2);
    assert_eq!(code(&run(&["out-group", &data("path.graph")])), 2);
    assert_eq!(code(&run(&["validate", &data("path.graph")])), 1);
    assert_eq!(code(&run(&["validate", &data("small_label.graph")])), 1);
    assert_eq!(code(&run(&["verify", &data("g333.graph"), "--max-len", "0"])), 2);
}

#[test]
fn curvature_commands() {
    let o = run(&["curvature", "check", &data("hexagon.disc")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("residual 0\n"));
    assert_eq!(code(&run(&["curvature", "check", &data("angled.disc")])), 0);

    let o = run(&["curvature", "partition", &data("hexagon.disc")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("total: 2\n"));
    let o = run(&["curvature", "partition", &data("hexagon.disc"), "--label", "v=6"]);
    assert!(stdout(&o).contains("marked: 2\n"));

    let o = run(&["curvature", "strip", &data("strip.disc")]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("double arrow between strip faces f1 and f2"));
    assert_eq!(code(&run(&["curvature", "check", &data("strip.disc")])), 2);
}
