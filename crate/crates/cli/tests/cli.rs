use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailwalk")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_k4() {
    let o = run(&["analyze", &data("k4.txt")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for route in ["direct", "potential", "closed-form"] {
        let line = text.lines().find(|l| l.trim_start().starts_with(route)).unwrap();
        assert!(line.contains("5/12"), "{line}");
    }
    assert!(text.contains("perfect-reflection (R)"));
    assert!(text.contains("sigma = [1, 0; 0, 1]"));
    assert!(text.contains("iota1=48"));
}

#[test]
fn analyze_c4_json_matches_text() {
    let o = run(&["analyze", &data("c4.txt"), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for route in v["comfortability"].as_array().unwrap() {
        assert_eq!(route["value"]["exact"], "19/16");
    }
    assert_eq!(v["routes_agree"], true);
    assert_eq!(v["scattering"]["label"], "T");
    assert_eq!(v["scattering"]["sigma"], serde_json::json!([["0", "1"], ["1", "0"]]));

    let human = stdout(&run(&["analyze", &data("c4.txt")]));
    for entry in v["psi"].as_array().unwrap() {
        let arc = format!("{}->{}", entry["origin"], entry["terminus"]);
        let exact = entry["value"]["exact"].as_str().unwrap();
        let line = human.lines().find(|l| l.split_whitespace().next() == Some(arc.as_str())).unwrap();
        let shown = line.split_whitespace().nth(1).unwrap();
        assert_eq!(
            tailwalk::algebra::parse_rational(shown).unwrap(),
            tailwalk::algebra::parse_rational(exact).unwrap()
        );
    }
}

#[test]
fn analyze_with_simulation() {
    let o = run(&["analyze", &data("k4.txt"), "--simulate", "2000", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["simulation"]["distance_to_exact"].as_f64().unwrap() < 1e-6);
}

#[test]
fn input_errors_exit_2() {
    for file in ["bad_keyword.txt", "bad_vertex.txt", "does_not_exist.txt"] {
        let o = run(&["analyze", &data(file)]);
        assert_eq!(o.status.code(), Some(2), "{file}");
    }
    let o = run(&["analyze", &data("bad_keyword.txt")]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(run(&["rank", "--n", "6", "--z", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["rank", "--n", "4", "--z", "0"]).status.code(), Some(2));
}

#[test]
fn rank_four_vertices() {
    let o = run(&["rank", "--n", "4", "--z", "-1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["configurations"], 38 * 12);
    let classes = v["value_classes"].as_array().unwrap();
    assert_eq!(classes.len(), 10);
    let g6 = classes.iter().find(|c| c["name"] == "𝒢6").unwrap();
    assert_eq!(g6["comf"]["exact"], "7/4");
    let ties: Vec<&Value> = v["tie_groups"].as_array().unwrap().iter().collect();
    assert!(ties
        .iter()
        .any(|t| t["members"] == serde_json::json!(["𝒢5", "𝒢9"])));

    let text = stdout(&run(&["rank", "--n", "4", "--z", "+1"]));
    assert!(text.contains("13/8"));
    assert!(text.contains("17/12"));
}

#[test]
fn simulate_writes_csv() {
    let dir = std::env::temp_dir().join(format!("tailwalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("trace.csv");
    let o = run(&["simulate", &data("triangle.txt"), "--steps", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "step,arc_origin,arc_terminus,amplitude,residual");
    assert!(lines.contains(&"1,1,2,-6,6"));
    assert!(lines.contains(&"1,1,t1,3,6"));
    assert!(stdout(&o).contains("steps 1"));

    let o = run(&["simulate", &data("silent.txt"), "--steps", "5", "--out", "-", "--tolerance", "0"]);
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 1 + 5 * (6 + 2));
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3], "0");
        assert_eq!(fields[4], "0");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn selftest_small_catalog() {
    let o = run(&["selftest", "--max-n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("PASS kirchhoff audits")));
    assert!(text.lines().any(|l| l.starts_with("PASS signless mutation")));
    assert!(!text.contains("FAIL"));
}
