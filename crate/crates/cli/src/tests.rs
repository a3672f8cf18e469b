use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use lfgeo::json::{behavior_to_string, inequality_to_string};
use lfgeo::{Behavior, Inequality, Rational, Scenario};

use super::*;

fn lfgeo(args: &[&str]) -> i32 {
    run(std::iter::once("lfgeo").chain(args.iter().copied()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn chsh_file(dir: &Path) -> PathBuf {
    let chsh = Inequality::<Rational>::chsh(Scenario::binary(2, 2), (1, 2), (1, 2)).unwrap();
    write(dir, "chsh.json", &inequality_to_string(&chsh))
}

#[test]
fn lhv_facets_2x2_has_24_entries_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.json");
    assert_eq!(lfgeo(&["polytope", "facets", "--kind", "lhv", "--scenario", "2,2,2,2", "--out", path_str(&out)]), EXIT_OK);
    assert_eq!(read_json(&out).as_array().unwrap().len(), 24);
    let m = read_json(&dir.path().join("f.json.manifest.json"));
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(m["command_line"].as_array().unwrap().iter().any(|a| a == "facets"));
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn qcm_check_reports_lf_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write(
        dir.path(),
        "qcm.json",
        r#"{"held": ["AOE", "SpaceTime", "PCC", "IndependentInterventions", "TemporalCausalArrow", "RelativisticCausality"]}"#,
    );
    let out = dir.path().join("check.json");
    let code = lfgeo(&["principles", "check", "--position", path_str(&pos), "--falsified", "bell64,bell76,lf", "--out", path_str(&out)]);
    assert_eq!(code, EXIT_OK);
    let v = read_json(&out);
    assert_eq!(v["ok"], false);
    let expected = serde_json::json!(["LF", ["AOE", "SpaceTime", "LocalAction"]]);
    assert!(v["violated"].as_array().unwrap().contains(&expected));
    let inputs = &read_json(&dir.path().join("check.json.manifest.json"))["inputs"];
    assert_eq!(inputs[0]["sha256"], sha256_hex(&fs::read(&pos).unwrap()));
}

#[test]
fn repair_echoes_rule_notes() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write(dir.path(), "qcm.json", r#"["AOE", "SpaceTime", "PCC", "IndependentInterventions", "TemporalCausalArrow", "RelativisticCausality"]"#);
    let out = dir.path().join("repair.json");
    assert_eq!(lfgeo(&["principles", "repair", "--position", path_str(&pos), "--falsified", "lf", "--out", path_str(&out)]), EXIT_OK);
    let v = read_json(&out);
    assert!(v["repairs"].as_array().unwrap().contains(&serde_json::json!(["AOE"])));
    assert!(v["rules"].as_array().unwrap().iter().all(|r| !r["note"].as_str().unwrap().is_empty()));
    assert_eq!(v["theorems"][0]["name"], "LF");
}

#[test]
fn optimize_chsh_reaches_tsirelson() {
    let dir = tempfile::tempdir().unwrap();
    let ineq = chsh_file(dir.path());
    let out = dir.path().join("opt.json");
    let code = lfgeo(&["quantum", "optimize", "--ineq", path_str(&ineq), "--steps", "50", "--seed", "7", "--out", path_str(&out)]);
    assert_eq!(code, EXIT_OK);
    let v = read_json(&out);
    assert!(v["value"].as_f64().unwrap() >= 2.827);
    assert_eq!(v["ineq_id"], sha256_hex(&fs::read(&ineq).unwrap()));
    assert_eq!(v["seed"], 7);
    assert_eq!(read_json(&dir.path().join("opt.json.manifest.json"))["seed"], 7);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let ineq = chsh_file(dir.path());
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("opt{i}.json"));
            assert_eq!(lfgeo(&["quantum", "optimize", "--ineq", path_str(&ineq), "--steps", "10", "--seed", "3", "--out", path_str(&out)]), EXIT_OK);
            fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    let facets: Vec<Vec<u8>> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("lf{i}.json"));
            assert_eq!(lfgeo(&["polytope", "facets", "--kind", "lf", "--scenario", "2,2,2,2", "--out", path_str(&out)]), EXIT_OK);
            fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(facets[0], facets[1]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lfgeo(&["polytope", "transmogrify"]), EXIT_USAGE);
    assert_eq!(lfgeo(&["polytope", "facets", "--kind", "lhv"]), EXIT_USAGE);
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(lfgeo(&["polytope", "member", "--kind", "lhv", "--behavior", path_str(&bad)]), EXIT_DOMAIN);
    assert_eq!(lfgeo(&["polytope", "facets", "--kind", "xyz", "--scenario", "2,2,2,2"]), EXIT_DOMAIN);
    assert_eq!(lfgeo(&["polytope", "member", "--kind", "lhv", "--behavior", "/nonexistent/b.json"]), EXIT_DOMAIN);
    // an "outside" verdict is data, not an error
    let pr = write(dir.path(), "pr.json", &behavior_to_string(&Behavior::<Rational>::pr_box(Scenario::binary(2, 2)).unwrap()));
    let out = dir.path().join("m.json");
    assert_eq!(lfgeo(&["polytope", "member", "--kind", "lhv", "--behavior", path_str(&pr), "--out", path_str(&out)]), EXIT_OK);
    assert_eq!(read_json(&out)["inside"], false);
}

#[test]
fn error_report_is_structured() {
    let e = lfgeo::Error::Parse("bad".into());
    let v: Value = serde_json::from_str(&error_report(&e)).unwrap();
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("bad"));
}

#[test]
fn polytope_max_and_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let ineq = chsh_file(dir.path());
    let out = dir.path().join("max.json");
    assert_eq!(lfgeo(&["polytope", "max", "--kind", "ns", "--ineq", path_str(&ineq), "--out", path_str(&out)]), EXIT_OK);
    assert_eq!(read_json(&out)["value"], serde_json::json!({"num": 4, "den": 1}));
    let out = dir.path().join("v.json");
    assert_eq!(lfgeo(&["polytope", "vertices", "--scenario", "2,2,2,2", "--out", path_str(&out)]), EXIT_OK);
    assert_eq!(read_json(&out).as_array().unwrap().len(), 16);
    assert_eq!(lfgeo(&["polytope", "vertices", "--scenario", "3,3,2,2", "--cap", "10"]), EXIT_DOMAIN);
}

#[test]
fn slice_writes_csv_and_exact_companion() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = chsh_file(dir.path());
    let other = Inequality::<Rational>::chsh(Scenario::binary(2, 2), (2, 1), (1, 2)).unwrap();
    let f2 = write(dir.path(), "f2.json", &inequality_to_string(&other));
    let out = dir.path().join("slice.csv");
    let code = lfgeo(&["polytope", "slice", "--kinds", "lhv,ns", "--f1", path_str(&f1), "--f2", path_str(&f2), "--resolution", "8", "--out", path_str(&out)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1 + 2 * 8);
    let v = read_json(&dir.path().join("slice.csv.json"));
    assert_eq!(v["convex"], true);
    assert_eq!(v["polygons"][1]["points"][0][0], serde_json::json!({"num": 4, "den": 1}));
    assert!(dir.path().join("slice.csv.json.manifest.json").exists());
}

#[test]
fn born_and_ewfs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let state = r#"{"amplitudes": [[0, 0], [0.7071067811865476, 0], [-0.7071067811865476, 0], [0, 0]]}"#;
    let born = write(
        dir.path(),
        "born.json",
        &format!(r#"{{"state": {state}, "alice": [{{"theta": 0.3}}, {{"theta": 1.1}}], "bob": [{{"theta": 2.0}}, {{"theta": 0.4, "phi": 0.2}}]}}"#),
    );
    let ewfs = write(
        dir.path(),
        "ewfs.json",
        &format!(
            r#"{{"shared_state": {state}, "charlie_basis": {{"theta": 0.3}}, "debbie_basis": {{"theta": 2.0}}, "alice_settings": [{{"theta": 1.1}}], "bob_settings": [{{"theta": 0.4, "phi": 0.2}}]}}"#
        ),
    );
    let (o1, o2) = (dir.path().join("b.json"), dir.path().join("e.json"));
    assert_eq!(lfgeo(&["quantum", "born", "--config", path_str(&born), "--out", path_str(&o1)]), EXIT_OK);
    assert_eq!(lfgeo(&["quantum", "ewfs", "--config", path_str(&ewfs), "--out", path_str(&o2)]), EXIT_OK);
    let p1 = lfgeo::json::behavior_from_str::<f64>(&fs::read_to_string(o1).unwrap()).unwrap();
    let p2 = lfgeo::json::behavior_from_str::<f64>(&fs::read_to_string(o2).unwrap()).unwrap();
    assert!(p1.max_abs_diff(&p2).unwrap() < 1e-10);
}

#[test]
fn grid_command_resolution_one() {
    let dir = tempfile::tempdir().unwrap();
    let ineq = chsh_file(dir.path());
    let out = dir.path().join("g.json");
    assert_eq!(lfgeo(&["quantum", "grid", "--ineq", path_str(&ineq), "--resolution", "1", "--out", path_str(&out)]), EXIT_OK);
    let v = read_json(&out);
    assert_eq!(v["resolution"], 1);
    assert!(v["alice_angles"].as_array().unwrap().iter().all(|a| a == 0.0));
    assert_eq!(lfgeo(&["quantum", "grid", "--ineq", path_str(&ineq), "--resolution", "100", "--cap", "5"]), EXIT_DOMAIN);
}

#[test]
fn causal_commands() {
    let dir = tempfile::tempdir().unwrap();
    let g = lfgeo::causal::bell_dag(2).unwrap();
    let dag = write(dir.path(), "dag.json", &g.to_json());
    let out = dir.path().join("d.json");
    let code = lfgeo(&["causal", "dsep", "--dag", path_str(&dag), "--a", "A", "--b", "Y", "--z", "X,L", "--out", path_str(&out)]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(read_json(&out)["d_separated"], true);
    let all = dir.path().join("all.json");
    assert_eq!(lfgeo(&["causal", "dsep", "--dag", path_str(&dag), "--all", "--observed", "--out", path_str(&all)]), EXIT_OK);
    assert_eq!(read_json(&all)["implied"].as_array().unwrap().len(), 7);

    let d = lfgeo::causal::random_markov(&g, 5).unwrap();
    let dist = write(dir.path(), "dist.json", &lfgeo::json::pretty(&lfgeo::json::joint_to_value(&d)));
    let cmc = dir.path().join("cmc.json");
    assert_eq!(lfgeo(&["causal", "cmc", "--dag", path_str(&dag), "--dist", path_str(&dist), "--out", path_str(&cmc)]), EXIT_OK);
    assert_eq!(read_json(&cmc)["passes"], true);
    let faithful = dir.path().join("f.json");
    assert_eq!(lfgeo(&["causal", "faithful", "--dag", path_str(&dag), "--dist", path_str(&dist), "--tol", "1e-12", "--out", path_str(&faithful)]), EXIT_OK);
    assert!(read_json(&faithful)["holds"].is_boolean());

    let pr = write(dir.path(), "pr.json", &behavior_to_string(&Behavior::<Rational>::pr_box(Scenario::binary(2, 2)).unwrap()));
    let scan = dir.path().join("scan.csv");
    assert_eq!(lfgeo(&["causal", "scan-bell", "--behavior", path_str(&pr), "--out", path_str(&scan)]), EXIT_OK);
    assert_eq!(fs::read_to_string(&scan).unwrap().lines().count(), 193);
    let summary = read_json(&dir.path().join("scan.csv.json"));
    assert_eq!(summary["dichotomy_holds"], true);
    assert_eq!(summary["counts"]["faithful_reproducing"], 0);
}

#[test]
fn principles_show_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    assert_eq!(lfgeo(&["principles", "show", "--out", path_str(&out)]), EXIT_OK);
    let g = lfgeo::principles::PrincipleGraph::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g, lfgeo::principles::default_graph());
}
